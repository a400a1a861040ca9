//! Action, Nehari, energy and virial functionals, their closed-form
//! benchmark values, the mass-slope condition and the blow-up threshold
//! frequency.

use crate::forms::quadratic_form_f_beta;
use crate::profiles::{build_critical_point, ProfileKind};
use crate::{make_grid, quad, Error, GraphField, Grid, ModelParams, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Values of the standing-wave functionals at a field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    /// `S = ½F_β + (ω/2)Q - ‖f‖_{p+1}^{p+1}/(p+1)`
    pub action: f64,
    /// `I = F_β + ωQ - ‖f‖_{p+1}^{p+1}`
    pub nehari: f64,
    /// `E = ½F_β - ‖f‖_{p+1}^{p+1}/(p+1)`
    pub energy: f64,
    /// `Q = ‖f‖₂²`
    pub charge: f64,
    /// `P = ‖f'‖² + |Σf_j(0)|²/(2β) - ((p-1)/(2(p+1)))‖f‖_{p+1}^{p+1}`
    /// (the vertex term carries half the coefficient it has in `F_β`, with
    /// the same sign, so that standing waves sit at `P = 0`)
    pub virial: f64,
}

/// Evaluates all functionals by Simpson quadrature on node samples.
pub fn evaluate(f: &GraphField, params: &ModelParams) -> FunctionalReport {
    let p = params.p;
    let f_beta = quadratic_form_f_beta(f, params);
    let charge = f.lp_norm(2.0).expect("q = 2 is valid").powi(2);
    let pp1 = f.lp_norm(p + 1.0).expect("p + 1 > 1").powf(p + 1.0);
    let grad = f.grad_norm_sq();
    let vertex = f.vertex_sum().norm_sqr();
    FunctionalReport {
        action: 0.5 * f_beta + 0.5 * params.omega * charge - pp1 / (p + 1.0),
        nehari: f_beta + params.omega * charge - pp1,
        energy: 0.5 * f_beta - pp1 / (p + 1.0),
        charge,
        virial: grad + vertex / (2.0 * params.beta) - (p - 1.0) / (2.0 * (p + 1.0)) * pp1,
    }
}

/// The limiting action level `d_ω^∞` of the decoupled problem:
/// `½((p+1)/2)^{2/(p-1)} ω^{(p+3)/(2(p-1))} ∫₀¹ (1-t²)^{2/(p-1)} dt`.
pub fn d_infinity(p: f64, omega: f64) -> Result<f64> {
    if !(p > 1.0) || !(omega > 0.0) {
        return Err(Error::invalid("d_infinity requires p > 1 and omega > 0"));
    }
    let alpha = 2.0 / (p - 1.0);
    Ok(0.5
        * ((p + 1.0) / 2.0).powf(alpha)
        * omega.powf((p + 3.0) / (2.0 * (p - 1.0)))
        * quad::int_one_minus_t2(alpha, 0.0))
}

/// Closed-form action of the symmetric profile,
/// `(N/2)((p+1)/2)^{2/(p-1)} ω^{(p+3)/(2(p-1))} ∫_{N/(|β|√ω)}^1 (1-t²)^{2/(p-1)} dt`;
/// this is also the minimal action among symmetric fields.
pub fn symmetric_action_closed_form(params: &ModelParams) -> Result<f64> {
    params.require_profile(false)?;
    let p = params.p;
    let alpha = 2.0 / (p - 1.0);
    let lo = params.symmetric_t();
    Ok(params.n_edges as f64 / 2.0
        * ((p + 1.0) / 2.0).powf(alpha)
        * params.omega.powf((p + 3.0) / (2.0 * (p - 1.0)))
        * quad::int_one_minus_t2(alpha, lo))
}

/// Projects a field onto the Nehari manifold: returns `λ₁` with
/// `I(λ₁ f) = 0` and the rescaled field.
pub fn nehari_rescale(f: &GraphField, params: &ModelParams) -> Result<(f64, GraphField)> {
    let pp1 = f.lp_norm(params.p + 1.0)?.powf(params.p + 1.0);
    if pp1 <= 0.0 {
        return Err(Error::invalid("cannot rescale the zero field onto the Nehari manifold"));
    }
    let coercive = quadratic_form_f_beta(f, params)
        + params.omega * f.lp_norm(2.0)?.powi(2);
    if coercive <= 0.0 {
        return Err(Error::invalid(
            "F_β + ω‖f‖² ≤ 0: frequency below the coercivity range",
        ));
    }
    let lambda = (coercive / pp1).powf(1.0 / (params.p - 1.0));
    Ok((lambda, f.scale(Complex64::new(lambda, 0.0))))
}

/// All critical points at these parameters with their action values,
/// ascending by action.
pub fn rank_critical_points(
    params: &ModelParams,
    grid: &Grid,
) -> Result<Vec<(ProfileKind, f64)>> {
    params.require_profile(true)?;
    let mut rows = Vec::with_capacity(params.n_edges);
    for k in 1..params.n_edges {
        let kind = ProfileKind::Asymmetric { k };
        let (_, field) = build_critical_point(params, kind, grid)?;
        rows.push((kind, evaluate(&field, params).action));
    }
    let (_, sym) = build_critical_point(params, ProfileKind::Symmetric, grid)?;
    rows.push((ProfileKind::Symmetric, evaluate(&sym, params).action));
    rows.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite actions"));
    Ok(rows)
}

/// Mass-slope data: `J(ω) = ∂_ω Q(φ_β)` in closed form.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SlopeReport {
    pub j: f64,
    pub j1: f64,
    /// Zero of `J₁` located for `3 < p < 5`, when it exists in the bracket.
    pub omega_star_slope: Option<f64>,
    /// Whether the sign classification applies (repulsive coupling);
    /// for `β < 0` the value is computed from the same closed form but the
    /// sign statements are not asserted.
    pub classified: bool,
}

fn j1_value(params: &ModelParams, omega: f64) -> f64 {
    let p = params.p;
    let nf = params.n_edges as f64;
    let alpha = (3.0 - p) / (p - 1.0);
    let lo = nf / (-params.beta * omega.sqrt());
    let edge = nf / (params.beta * omega.sqrt());
    (5.0 - p) / (p - 1.0) * quad::int_one_minus_t2(alpha, lo)
        - edge * (1.0 - nf * nf / (params.beta * params.beta * omega)).powf(alpha)
}

/// Slope of the charge of the symmetric profile with respect to frequency:
/// `J = C ω^{(7-3p)/(2(p-1))} J₁(ω)`, `C = (N/(p-1))((p+1)/2)^{2/(p-1)}`.
///
/// For `3 < p < 5` also locates the sign change `ω*` of `J₁` by bisection
/// over `(N²/β², 10⁶ N²/β²]`; reports `None` when no sign change lies in
/// the bracket.
pub fn mass_slope(params: &ModelParams) -> Result<SlopeReport> {
    params.require_profile(false)?;
    let p = params.p;
    let j1 = j1_value(params, params.omega);
    let c = params.n_edges as f64 / (p - 1.0) * ((p + 1.0) / 2.0).powf(2.0 / (p - 1.0));
    let j = c * params.omega.powf((7.0 - 3.0 * p) / (2.0 * (p - 1.0))) * j1;
    let omega_star_slope = if p > 3.0 && p < 5.0 {
        let floor = params.omega_floor();
        let mut lo = floor * (1.0 + 1e-9);
        let mut hi = 1e6 * floor;
        if j1_value(params, lo) < 0.0 && j1_value(params, hi) > 0.0 {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if j1_value(params, mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-12 * hi {
                    break;
                }
            }
            Some(0.5 * (lo + hi))
        } else {
            None
        }
    } else {
        None
    };
    Ok(SlopeReport { j, j1, omega_star_slope, classified: params.beta > 0.0 })
}

/// Blow-up threshold for supercritical attractive coupling: the unique
/// `ξ̂ ∈ (0,1)` solving
/// `((p-5)N/2)∫_ξ^1 (1-s²)^{2/(p-1)} ds = ξ(1-ξ²)^{2/(p-1)}`
/// and the frequency `ω₃ = N²/(β² ξ̂²)`.
pub fn omega3(p: f64, n_edges: usize, beta: f64) -> Result<(f64, f64)> {
    if !(p > 5.0) {
        return Err(Error::invalid(format!("omega3 requires p > 5, got {p}")));
    }
    if !(beta < 0.0) {
        return Err(Error::invalid("omega3 requires attractive coupling (beta < 0)"));
    }
    let nf = n_edges as f64;
    let alpha = 2.0 / (p - 1.0);
    let g = |xi: f64| {
        (p - 5.0) * nf / 2.0 * quad::int_one_minus_t2(alpha, xi)
            - xi * (1.0 - xi * xi).powf(alpha)
    };
    let mut lo = 1e-9;
    let mut hi = 1.0 - 1e-9;
    if !(g(lo) > 0.0 && g(hi) < 0.0) {
        return Err(Error::Unresolved("xi bracket lost its sign change".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let xi = 0.5 * (lo + hi);
    Ok((xi, nf * nf / (beta * beta * xi * xi)))
}

/// Convenience: charge of the symmetric profile by quadrature at a given
/// frequency (used by the slope consistency checks).
pub fn symmetric_charge(params: &ModelParams, omega: f64, m: usize) -> Result<f64> {
    let mp = ModelParams::new(params.p, omega, params.beta, params.n_edges)?;
    let grid = make_grid(&mp, m)?;
    let (_, field) = build_critical_point(&mp, ProfileKind::Symmetric, &grid)?;
    Ok(field.lp_norm(2.0)?.powi(2))
}
