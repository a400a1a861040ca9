//! Closed-form standing-wave profiles and the transcendental system behind
//! the asymmetric family.
//!
//! Every real profile on the graph is built from shifted copies of the line
//! soliton `φ_a(x) = {((p+1)ω/2) sech²(κ(x+a))}^{1/(p-1)}`, `κ = (p-1)√ω/2`.
//! The symmetric profile puts the same offset on every edge; the asymmetric
//! profile `k` puts one offset on `k` edges and another on the remaining
//! `N-k`, with tanh parameters `0 < t₁ < t_max < t_N < 1` solving
//!
//! ```text
//! t₁^{p-1} - t₁^{p+1} = t_N^{p-1} - t_N^{p+1},
//! k/t₁ + (N-k)/t_N = |β|√ω.
//! ```

use crate::grid::atanh_guarded;
use crate::{quad, Error, GraphField, Grid, ModelParams, Result};
use serde::{Deserialize, Serialize};

/// Which member of the critical family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    Symmetric,
    /// `k` edges carry the small tanh parameter, `N-k` the large one.
    Asymmetric { k: usize },
}

impl std::fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProfileKind::Symmetric => write!(f, "symmetric"),
            ProfileKind::Asymmetric { k } => write!(f, "asymmetric({k})"),
        }
    }
}

/// Identity of a constructed critical point: tanh parameters and the signed
/// offsets carried by the two edge groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub params: ModelParams,
    pub kind: ProfileKind,
    pub t1: f64,
    pub tn: f64,
    pub a1: f64,
    pub an: f64,
}

impl ProfileSpec {
    /// Offset on a given edge.
    pub fn offset(&self, edge: usize) -> f64 {
        match self.kind {
            ProfileKind::Symmetric => self.a1,
            ProfileKind::Asymmetric { k } => {
                if edge < k {
                    self.a1
                } else {
                    self.an
                }
            }
        }
    }
}

/// `sech` evaluated through decaying exponentials; safe for large arguments.
fn sech(z: f64) -> f64 {
    let e = (-z.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// Line soliton `φ_a(x)`.
pub fn soliton_value(p: f64, omega: f64, a: f64, x: f64) -> f64 {
    let kappa = 0.5 * (p - 1.0) * omega.sqrt();
    let amp = ((p + 1.0) * omega / 2.0).powf(1.0 / (p - 1.0));
    amp * sech(kappa * (x + a)).powf(2.0 / (p - 1.0))
}

/// Exact derivative `φ_a'(x) = -√ω tanh(κ(x+a)) φ_a(x)`.
pub fn soliton_deriv(p: f64, omega: f64, a: f64, x: f64) -> f64 {
    let kappa = 0.5 * (p - 1.0) * omega.sqrt();
    -omega.sqrt() * (kappa * (x + a)).tanh() * soliton_value(p, omega, a, x)
}

/// `t^{p-1} - t^{p+1}`, the matching function of the tanh parameters.
fn f_match(t: f64, p: f64) -> f64 {
    t.powf(p - 1.0) - t.powf(p + 1.0)
}

/// The root function whose unique zero in `(N/a, 1]` yields `t_N`; derived
/// by eliminating `t₁` from the two-line system (`a = |β|√ω`).
fn w_root_fn(x: f64, k: f64, n: f64, a: f64, p: f64) -> f64 {
    let kp1 = k.powf(p - 1.0);
    let num = x * x * (a * a * kp1 - k.powf(p + 1.0)) - 2.0 * a * (n - k) * kp1 * x
        + (n - k) * (n - k) * kp1;
    num / (a * x - n + k).powf(p + 1.0) + x * x - 1.0
}

/// Solves the two-parameter system for the asymmetric profile `k`.
///
/// Validates the bracket facts (`w(N/a) = 0`, `w'(N/a) < 0`, `w(1) > 0`)
/// before bisecting on `(N/a + 1e-9, 1]`, then polishes by Newton. Returns
/// [`Error::NoRoot`] when the sign bracket fails, which is exactly the
/// regime `ω ≤ ω*`.
pub fn solve_t_system(params: &ModelParams, k: usize) -> Result<(f64, f64)> {
    if k == 0 || k >= params.n_edges {
        return Err(Error::invalid(format!(
            "asymmetric index k = {k} must lie in 1..{}",
            params.n_edges
        )));
    }
    let (p, nf, kf) = (params.p, params.n_edges as f64, k as f64);
    let a = params.beta.abs() * params.omega.sqrt();
    let base = nf / a;
    if base >= 1.0 {
        return Err(Error::no_root(format!(
            "no profile below the ground-frequency floor (N/(|β|√ω) = {base} ≥ 1)"
        )));
    }
    let w = |x: f64| w_root_fn(x, kf, nf, a, p);

    // bracket facts
    let at_base = w(base);
    if at_base.abs() > 1e-8 {
        return Err(Error::Unresolved(format!("w(N/a) = {at_base}, expected 0")));
    }
    let wp = (w(base + 1e-7) - at_base) / 1e-7;
    if wp >= 0.0 {
        return Err(Error::no_root(format!(
            "w'(N/a) = {wp:.3e} ≥ 0: frequency at or below the bifurcation threshold"
        )));
    }
    let at_one = w(1.0);
    if at_one <= 0.0 {
        return Err(Error::no_root(format!("w(1) = {at_one} ≤ 0, bracket fails")));
    }

    let mut lo = base + 1e-9;
    if w(lo) >= 0.0 {
        // step past the double root at N/a
        let mut step = 1e-8;
        while w(base + step) >= 0.0 && base + step < 1.0 {
            step *= 4.0;
        }
        lo = base + step;
        if lo >= 1.0 {
            return Err(Error::no_root("sign bracket on (N/a, 1] failed"));
        }
    }
    let mut hi = 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if w(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    let mut tn = 0.5 * (lo + hi);
    // Newton polish with a central-difference slope
    for _ in 0..6 {
        let val = w(tn);
        let dw = (w(tn + 1e-8) - w(tn - 1e-8)) / 2e-8;
        if dw == 0.0 {
            break;
        }
        let next = tn - val / dw;
        if next > base && next <= 1.0 {
            tn = next;
        }
        if val.abs() < 1e-14 {
            break;
        }
    }
    let t1 = kf / (a - (nf - kf) / tn);
    let r1 = f_match(t1, p) - f_match(tn, p);
    let r2 = kf / t1 + (nf - kf) / tn - a;
    if r1.abs() > 1e-12 || r2.abs() > 1e-12 {
        return Err(Error::Unresolved(format!(
            "t-system residuals too large: {r1:.3e}, {r2:.3e}"
        )));
    }
    let t_max = ((p - 1.0) / (p + 1.0)).sqrt();
    if !(t1 > 0.0 && t1 < t_max && tn > t_max && tn < 1.0) {
        return Err(Error::Unresolved(format!(
            "t-parameters out of order: t1 = {t1}, t_max = {t_max}, tN = {tn}"
        )));
    }
    Ok((t1, tn))
}

/// Signed offset for a tanh parameter: `-sign(β)·(2/((p-1)√ω))·artanh(t)`.
fn offset_for(params: &ModelParams, t: f64) -> f64 {
    -params.beta.signum() * 2.0 / ((params.p - 1.0) * params.omega.sqrt()) * atanh_guarded(t)
}

/// Builds a member of the critical family on the given grid.
pub fn build_critical_point(
    params: &ModelParams,
    kind: ProfileKind,
    grid: &Grid,
) -> Result<(ProfileSpec, GraphField)> {
    if grid.n_edges != params.n_edges {
        return Err(Error::invalid("grid and params disagree on the edge count"));
    }
    let spec = match kind {
        ProfileKind::Symmetric => {
            params.require_profile(false)?;
            let t = params.symmetric_t();
            let a = offset_for(params, t);
            ProfileSpec { params: *params, kind, t1: t, tn: t, a1: a, an: a }
        }
        ProfileKind::Asymmetric { k } => {
            params.require_profile(false)?;
            let (t1, tn) = solve_t_system(params, k)?;
            ProfileSpec {
                params: *params,
                kind,
                t1,
                tn,
                a1: offset_for(params, t1),
                an: offset_for(params, tn),
            }
        }
    };
    let field = GraphField::from_real_fn(grid, |j, x| {
        soliton_value(params.p, params.omega, spec.offset(j), x)
    });
    Ok((spec, field))
}

/// Residuals of the stationary equation and the vertex conditions.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StationarityReport {
    /// `max |−f'' + ωf − |f|^{p-1}f|` over interior nodes (second differences).
    pub interior: f64,
    /// `max_j |f_j'(0) − f_1'(0)|` (stencil derivatives).
    pub vertex_derivative_match: f64,
    /// `|Σ_j f_j(0) − β f_1'(0)|`.
    pub vertex_sum: f64,
}

/// Checks how well a field satisfies `-Δ_β f + ω f - |f|^{p-1} f = 0`.
pub fn stationarity_check(f: &GraphField, params: &ModelParams) -> StationarityReport {
    let grid = &f.grid;
    let m = grid.points_per_edge;
    let h2 = grid.h * grid.h;
    let mut interior = 0.0f64;
    for j in 0..grid.n_edges {
        let e = f.edge(j);
        for i in 1..m - 1 {
            let lap = (e[i - 1] - 2.0 * e[i] + e[i + 1]) / h2;
            let res = -lap + params.omega * e[i] - e[i].norm().powf(params.p - 1.0) * e[i];
            interior = interior.max(res.norm());
        }
    }
    let d0: Vec<num_complex::Complex64> =
        (0..grid.n_edges).map(|j| f.derivative_edge(j)[0]).collect();
    let mut vertex_derivative_match = 0.0f64;
    for dj in &d0 {
        vertex_derivative_match = vertex_derivative_match.max((dj - d0[0]).norm());
    }
    let vertex_sum = (f.vertex_sum() - params.beta * d0[0]).norm();
    StationarityReport { interior, vertex_derivative_match, vertex_sum }
}

/// The coupling strength `β* < -N/√ω` at which the symmetric action equals
/// the limiting level `d_ω^∞`: solves
/// `N ∫_{N/(|β*|√ω)}^1 (1-t²)^{2/(p-1)} dt = ∫_0^1 (1-t²)^{2/(p-1)} dt`.
pub fn compute_beta_star(p: f64, omega: f64, n_edges: usize) -> Result<f64> {
    if n_edges < 2 {
        return Err(Error::invalid("beta* requires at least 2 edges"));
    }
    if !(p > 1.0) || !(omega > 0.0) {
        return Err(Error::invalid("beta* requires p > 1 and omega > 0"));
    }
    let alpha = 2.0 / (p - 1.0);
    let nf = n_edges as f64;
    let full = quad::int_one_minus_t2(alpha, 0.0);
    let sq = omega.sqrt();
    let g = |b: f64| nf * quad::int_one_minus_t2(alpha, (nf / (b * sq)).min(1.0 - 1e-15)) - full;
    // g increases from -full at b = N/√ω to (N-1)·full as b → ∞
    let mut lo = nf / sq * (1.0 + 1e-12);
    let mut hi = 2.0 * nf / sq;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Unresolved("beta* bracket expansion failed".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) < 1e-15 * hi {
            break;
        }
    }
    Ok(-0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::make_grid;

    #[test]
    fn soliton_closed_form_values() {
        // ((p+1)ω/2)^{1/(p-1)} at the peak: p = 3, ω = 2 gives 2
        assert!((soliton_value(3.0, 2.0, 0.0, 0.0) - 2.0).abs() < 1e-14);
        // even bump: numerical derivative at the peak vanishes
        let h = 1e-4;
        let d = (soliton_value(3.0, 2.0, 0.0, h) - soliton_value(3.0, 2.0, 0.0, -h)) / (2.0 * h);
        assert!(d.abs() < 1e-8);
        // tail decay
        let omega: f64 = 2.0;
        let peak = soliton_value(3.0, omega, 0.0, 0.0);
        let far = soliton_value(3.0, omega, 0.0, 40.0 / omega.sqrt());
        assert!(far < 1e-10 * peak);
    }

    #[test]
    fn t_system_reference_cell() {
        // N=2, k=1, β=-1, ω=25, p=3
        let mp = ModelParams::new(3.0, 25.0, -1.0, 2).unwrap();
        let (t1, tn) = solve_t_system(&mp, 1).unwrap();
        assert!(t1 < std::f64::consts::FRAC_1_SQRT_2 && std::f64::consts::FRAC_1_SQRT_2 < tn);
        // independent oracle: for p = 3 the first line forces t1² + tN² = 1,
        // so tN is the root of 1/√(1-t²) + 1/t = 5 on (1/√2, 1)
        let g = |t: f64| 1.0 / (1.0 - t * t).sqrt() + 1.0 / t - 5.0;
        let (mut lo, mut hi) = (0.75, 0.999);
        assert!(g(lo) < 0.0 && g(hi) > 0.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        assert!((tn - oracle).abs() < 1e-10, "tn = {tn}, oracle = {oracle}");
        assert!((t1 * t1 + tn * tn - 1.0).abs() < 1e-10);

        let r1 = f_match(t1, 3.0) - f_match(tn, 3.0);
        let r2 = 1.0 / t1 + 1.0 / tn - 5.0;
        assert!(r1.abs() <= 1e-12 && r2.abs() <= 1e-12);
    }

    #[test]
    fn t_system_pythagorean_property_p3() {
        for (n, k, omega) in [(3usize, 1usize, 25.0), (3, 2, 25.0), (5, 2, 60.0), (4, 3, 40.0)] {
            let mp = ModelParams::new(3.0, omega, -1.0, n).unwrap();
            let (t1, tn) = solve_t_system(&mp, k).unwrap();
            assert!((t1 * t1 + tn * tn - 1.0).abs() < 1e-10, "N={n} k={k}");
        }
    }

    #[test]
    fn t_system_depends_on_beta_modulus_only() {
        let neg = ModelParams::new(3.0, 25.0, -1.0, 3).unwrap();
        let pos = ModelParams::new(3.0, 25.0, 1.0, 3).unwrap();
        let a = solve_t_system(&neg, 1).unwrap();
        let b = solve_t_system(&pos, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn t_system_no_root_below_bifurcation() {
        let mp = ModelParams::new(3.0, 15.0, -1.0, 3).unwrap(); // ω* = 18
        match solve_t_system(&mp, 1) {
            Err(Error::NoRoot(_)) => {}
            other => panic!("expected NoRoot, got {other:?}"),
        }
    }

    #[test]
    fn t_parameters_merge_at_bifurcation() {
        // the branch with k ≥ N-k passes through the symmetric point at ω*,
        // so its parameters merge at t_max as ω ↓ ω*
        let t_max = (0.5f64).sqrt();
        for (n, k) in [(2usize, 1usize), (3, 2), (4, 2)] {
            let params = ModelParams::new(3.0, 1.0, -1.0, n).unwrap();
            let omega = params.omega_star() * 1.0001;
            let mp = ModelParams::new(3.0, omega, -1.0, n).unwrap();
            let (t1, tn) = solve_t_system(&mp, k).unwrap();
            assert!((tn - t1).abs() < 0.05, "N={n} k={k}: t1 = {t1}, tN = {tn}");
            assert!((t1 - t_max).abs() < 0.05 && (tn - t_max).abs() < 0.05);
        }
        // branches with k < N-k are born at a fold below ω* and sit at O(1)
        // separation when they become the unique root above ω*
        let mp = ModelParams::new(3.0, 18.0 * 1.0001, -1.0, 3).unwrap();
        let (t1, tn) = solve_t_system(&mp, 1).unwrap();
        assert!(tn - t1 > 0.1, "k=1 branch does not merge: t1 = {t1}, tN = {tn}");
    }

    #[test]
    fn symmetric_profile_satisfies_vertex_conditions() {
        let mp = ModelParams::new(3.0, 25.0, -1.0, 3).unwrap();
        let grid = make_grid(&mp, 256).unwrap();
        let (spec, field) = build_critical_point(&mp, ProfileKind::Symmetric, &grid).unwrap();
        assert!(spec.a1 > 0.0, "attractive coupling puts the peak off-edge");
        // analytic check of Σφ_j(0) = β φ'(0)
        let sum: f64 = (0..3).map(|_| soliton_value(3.0, 25.0, spec.a1, 0.0)).sum();
        let deriv = soliton_deriv(3.0, 25.0, spec.a1, 0.0);
        assert!((sum - mp.beta * deriv).abs() < 1e-8 * sum.abs().max(1.0));
        let vv = field.vertex_values();
        assert!(vv.iter().all(|v| (v - vv[0]).norm() < 1e-14));
    }

    #[test]
    fn asymmetric_profile_vertex_multiplicities() {
        let mp = ModelParams::new(3.0, 25.0, -1.0, 3).unwrap();
        let grid = make_grid(&mp, 256).unwrap();
        let (spec, field) =
            build_critical_point(&mp, ProfileKind::Asymmetric { k: 1 }, &grid).unwrap();
        let vv = field.vertex_values();
        assert!((vv[1] - vv[2]).norm() < 1e-14);
        assert!((vv[0] - vv[1]).norm() > 1e-6);
        // β < 0: all offsets positive, peaks at x = -a_j ≤ 0
        assert!(spec.a1 > 0.0 && spec.an > 0.0);
        // exact vertex conditions, via the analytic derivative
        let d1 = soliton_deriv(3.0, 25.0, spec.a1, 0.0);
        let dn = soliton_deriv(3.0, 25.0, spec.an, 0.0);
        assert!((d1 - dn).abs() < 1e-10 * d1.abs());
        let sum = soliton_value(3.0, 25.0, spec.a1, 0.0)
            + 2.0 * soliton_value(3.0, 25.0, spec.an, 0.0);
        assert!((sum - mp.beta * d1).abs() < 1e-8 * sum.abs());
    }

    #[test]
    fn repulsive_offsets_negative() {
        let mp = ModelParams::new(3.0, 25.0, 1.0, 3).unwrap();
        let grid = make_grid(&mp, 256).unwrap();
        let (spec, _) = build_critical_point(&mp, ProfileKind::Symmetric, &grid).unwrap();
        assert!(spec.a1 < 0.0);
    }

    #[test]
    fn stationarity_of_constructed_profiles() {
        let mp = ModelParams::new(3.0, 25.0, -1.0, 3).unwrap();
        let grid = make_grid(&mp, 2048).unwrap();
        for kind in [ProfileKind::Symmetric, ProfileKind::Asymmetric { k: 1 }] {
            let (_, field) = build_critical_point(&mp, kind, &grid).unwrap();
            let rep = stationarity_check(&field, &mp);
            assert!(rep.interior < 5e-2, "{kind}: interior {}", rep.interior);
            assert!(rep.vertex_derivative_match < 1e-6, "{kind}: {}", rep.vertex_derivative_match);
            assert!(rep.vertex_sum < 1e-6, "{kind}: {}", rep.vertex_sum);
        }
        // interior residual converges at O(h²)
        let coarse = make_grid(&mp, 1024).unwrap();
        let (_, fc) = build_critical_point(&mp, ProfileKind::Symmetric, &coarse).unwrap();
        let (_, ff) = build_critical_point(&mp, ProfileKind::Symmetric, &grid).unwrap();
        let rc = stationarity_check(&fc, &mp).interior;
        let rf = stationarity_check(&ff, &mp).interior;
        assert!(rc / rf > 3.5 && rc / rf < 4.5, "ratio {}", rc / rf);
    }

    #[test]
    fn scaled_profile_violates_stationarity() {
        let mp = ModelParams::new(3.0, 25.0, -1.0, 3).unwrap();
        let grid = make_grid(&mp, 1024).unwrap();
        let (_, field) = build_critical_point(&mp, ProfileKind::Symmetric, &grid).unwrap();
        let doubled = field.scale(num_complex::Complex64::new(2.0, 0.0));
        let rep = stationarity_check(&doubled, &mp);
        let floor = 0.1 * doubled.max_abs().powf(mp.p);
        assert!(rep.interior >= floor, "{} < {floor}", rep.interior);
    }

    #[test]
    fn zero_field_is_stationary() {
        let mp = ModelParams::new(3.0, 25.0, -1.0, 3).unwrap();
        let grid = make_grid(&mp, 256).unwrap();
        let rep = stationarity_check(&GraphField::zeros(&grid), &mp);
        assert_eq!(rep.interior, 0.0);
        assert_eq!(rep.vertex_sum, 0.0);
    }

    #[test]
    fn beta_star_reference_value() {
        // p=3, ω=1, N=2: u = 2/|β*| is the root of u³/3 - u + 1/3 = 0
        let bs = compute_beta_star(3.0, 1.0, 2).unwrap();
        let u = 2.0 / bs.abs();
        assert!((u * u * u / 3.0 - u + 1.0 / 3.0).abs() <= 1e-10);
        assert!((bs - (-5.758770483143634)).abs() < 1e-8);
        // always below -N/√ω
        for (p, omega, n) in [(3.0, 1.0, 2usize), (2.5, 7.0, 3), (6.0, 2.0, 4)] {
            let b = compute_beta_star(p, omega, n).unwrap();
            assert!(b < -(n as f64) / omega.sqrt());
        }
    }

    #[test]
    fn beta_star_rejects_single_edge() {
        assert!(compute_beta_star(3.0, 1.0, 1).is_err());
    }
}
