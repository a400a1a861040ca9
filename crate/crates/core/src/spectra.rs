//! Spectral analysis of the linearization around a critical point.
//!
//! The linearized operators split into `L₁ = -Δ_β + ω - p φ^{p-1}` (real
//! block) and `L₂ = -Δ_β + ω - φ^{p-1}` (imaginary block). Their Morse
//! indices are counted two independent ways:
//!
//! * **shooting** — eigenvalues below zero are located through the zeros of
//!   the determinant factors built from the half-line solution `u(x, λ)`
//!   that decays at infinity: `u'` at each offset (with the multiplicity of
//!   the repeated edges) and the scalar vertex-coupling factor;
//! * **inertia** — negative pivot counts of the `LDLᵀ` elimination of the
//!   assembled form matrices (valid by Sylvester's law since the mass form
//!   is positive definite).
//!
//! On top of the counts: near-kernel detection, unstable eigenvalues of the
//! linearized flow `λ² = -μ`, `μ ∈ σ(L₂L₁)`, and the projected-index lower
//! bound for the number of unstable modes.

use crate::forms::{assemble_forms, field_to_dofs, FormMatrices};
use crate::linalg::{
    balance_in_place, dense_symmetric_negatives, project_out_direction,
    smallest_generalized_eigs,
};
use crate::profiles::{build_critical_point, ProfileSpec};
use crate::{make_grid, Error, ModelParams, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Which linearized block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    L1,
    L2,
}

impl Which {
    /// Multiplier of the sech² well: `p` for the real block, `1` for the
    /// imaginary one.
    fn well_strength(self, p: f64) -> f64 {
        match self {
            Which::L1 => p,
            Which::L2 => 1.0,
        }
    }
}

/// How a Morse count was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    Shooting,
    Inertia,
}

/// Morse indices and near-kernel dimensions of `(L₁, L₂)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub n1: usize,
    pub n2: usize,
    pub ker1_dim: usize,
    pub ker2_dim: usize,
    /// Real parts of detected unstable eigenvalues (filled by
    /// [`unstable_modes`], empty in plain Morse reports).
    pub lambda_unstable: Vec<f64>,
    pub method: CountMethod,
}

/// Discretized quadratic forms of the pair `(L₁, L₂)` around a profile.
pub struct OperatorPair {
    pub k1: FormMatrices,
    pub k2: FormMatrices,
    pub spec: ProfileSpec,
    /// Profile DOF vector on the same grid.
    pub profile: Vec<f64>,
    /// Near-zero tolerance for eigenvalues of the linearized flow,
    /// tied to the discretization order.
    pub tau0: f64,
    /// Near-kernel declaration window for the operators themselves. The
    /// discrete image of a true kernel eigenvalue drifts by `O(ω h²)`
    /// (measured constants up to ~3.3ω), so the window carries the `ω`
    /// scale on top of the discretization order.
    pub tau_kernel: f64,
}

impl OperatorPair {
    /// Assembles both operators at `m` points per edge.
    pub fn assemble(spec: &ProfileSpec, m: usize) -> Result<Self> {
        let params = spec.params;
        let grid = make_grid(&params, m)?;
        let (_, field) = build_critical_point(&params, spec.kind, &grid)?;
        let well = |x: f64, a: f64| {
            // φ^{p-1} = ((p+1)ω/2) sech²(κ(x+a)) exactly
            let kappa = params.kappa();
            let z = kappa * (x + a);
            let e = (-z.abs()).exp();
            let sech = 2.0 * e / (1.0 + e * e);
            (params.p + 1.0) * params.omega / 2.0 * sech * sech
        };
        let mut pot1 = Vec::with_capacity(grid.n_edges);
        let mut pot2 = Vec::with_capacity(grid.n_edges);
        for j in 0..grid.n_edges {
            let a = spec.offset(j);
            let row1: Vec<f64> = (0..grid.points_per_edge)
                .map(|i| params.omega - params.p * well(grid.x(i), a))
                .collect();
            let row2: Vec<f64> = (0..grid.points_per_edge)
                .map(|i| params.omega - well(grid.x(i), a))
                .collect();
            pot1.push(row1);
            pot2.push(row2);
        }
        let k1 = assemble_forms(&params, &grid, Some(&pot1), true)?;
        let k2 = assemble_forms(&params, &grid, Some(&pot2), true)?;
        let tau0 = 10.0 * grid.h * grid.h;
        let tau_kernel = tau0 * (1.0 + params.omega);
        Ok(OperatorPair {
            k1,
            k2,
            spec: spec.clone(),
            profile: field_to_dofs(&field),
            tau0,
            tau_kernel,
        })
    }

    fn form(&self, which: Which) -> &FormMatrices {
        match which {
            Which::L1 => &self.k1,
            Which::L2 => &self.k2,
        }
    }

    /// Eigenvalues strictly below the near-kernel window.
    pub fn morse_count(&self, which: Which) -> usize {
        self.form(which).eig_count_below(-self.tau_kernel)
    }

    pub fn near_kernel_dim(&self, which: Which) -> usize {
        self.form(which).near_kernel_dim(self.tau_kernel)
    }
}

/// Value of the decaying half-line solution and its derivative at a point,
/// defined up to one positive scalar per evaluation point.
#[derive(Debug, Clone, Copy)]
pub struct ShotPoint {
    pub u: f64,
    pub du: f64,
}

/// Log-derivative outcome: `u'/u` or a pole marker when `u` vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LogDerivative {
    Value(f64),
    Pole,
}

/// Integrates `-u'' + ωu - c·((p+1)ω/2)sech²(κx)·u = λu` backward from the
/// asymptotic regime with data `(1, -√(ω-λ))`, renormalizing every 50
/// steps, and records `(u, u')` at each requested point (`targets` must be
/// strictly decreasing). `resolution` is the number of RK4 steps per unit
/// of the fastest length scale.
fn shoot(
    params: &ModelParams,
    which: Which,
    lambda: f64,
    targets: &[f64],
    resolution: f64,
) -> Vec<ShotPoint> {
    debug_assert!(targets.windows(2).all(|w| w[0] > w[1]));
    let omega = params.omega;
    let p = params.p;
    let c = which.well_strength(p);
    let kappa = params.kappa();
    let mu = (omega - lambda).sqrt();
    let depth = (p + 1.0) * omega / 2.0 * c;
    let q = |x: f64| {
        let e = (-(kappa * x).abs()).exp();
        let sech = 2.0 * e / (1.0 + e * e);
        omega - lambda - depth * sech * sech
    };
    let rate = (omega - lambda + depth).sqrt().max(kappa);
    let h = 1.0 / (resolution * rate);

    let start = targets[0].max(3.0 / kappa) + 40.0 / mu;
    let mut x = start;
    let mut u = 1.0f64;
    let mut du = -mu;
    let mut out = Vec::with_capacity(targets.len());
    let mut steps_since_norm = 0u32;
    for &target in targets {
        let span = x - target;
        let n_steps = (span / h).ceil().max(1.0) as usize;
        let step = -span / n_steps as f64;
        for _ in 0..n_steps {
            // RK4 on (u, u')' = (u', q(x) u)
            let k1u = du;
            let k1d = q(x) * u;
            let xm = x + 0.5 * step;
            let k2u = du + 0.5 * step * k1d;
            let k2d = q(xm) * (u + 0.5 * step * k1u);
            let k3u = du + 0.5 * step * k2d;
            let k3d = q(xm) * (u + 0.5 * step * k2u);
            let xe = x + step;
            let k4u = du + step * k3d;
            let k4d = q(xe) * (u + step * k3u);
            u += step / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            du += step / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
            x = xe;
            steps_since_norm += 1;
            if steps_since_norm == 50 {
                let norm = u.hypot(du);
                u /= norm;
                du /= norm;
                steps_since_norm = 0;
            }
        }
        x = target;
        out.push(ShotPoint { u, du });
    }
    out
}

/// `F(λ) = u'(a, λ)/u(a, λ)` for the decaying solution, or `Pole`.
pub fn shoot_log_derivative(
    lambda: f64,
    offset: f64,
    which: Which,
    params: &ModelParams,
) -> Result<LogDerivative> {
    if lambda > 0.0 {
        return Err(Error::invalid("the scan domain is λ ≤ 0"));
    }
    let shot = shoot(params, which, lambda, &[offset], 200.0)[0];
    if shot.u.abs() < 1e-13 * shot.u.hypot(shot.du) {
        Ok(LogDerivative::Pole)
    } else {
        Ok(LogDerivative::Value(shot.du / shot.u))
    }
}

/// One counting function of the eigenvalue scan: continuous in `λ`, each
/// sign change contributes `multiplicity` eigenvalues.
struct CountingFn {
    multiplicity: usize,
    values: fn(&[ShotPoint], &ProfileSpec) -> f64,
}

fn fn_du_first(shots: &[ShotPoint], _: &ProfileSpec) -> f64 {
    shots[0].du
}

fn fn_du_second(shots: &[ShotPoint], _: &ProfileSpec) -> f64 {
    shots[1].du
}

fn fn_vertex_symmetric(shots: &[ShotPoint], spec: &ProfileSpec) -> f64 {
    let n = spec.params.n_edges as f64;
    n * shots[0].u - spec.params.beta * shots[0].du
}

/// The vertex factor of the asymmetric determinant,
/// `k u(a₁)u'(a_N) + (N-k)u(a_N)u'(a₁) - β u'(a₁)u'(a_N)`; bilinear in the
/// two shot points, hence sign-stable under their positive rescalings.
fn fn_vertex_asymmetric(shots: &[ShotPoint], spec: &ProfileSpec) -> f64 {
    let (k, n) = match spec.kind {
        crate::profiles::ProfileKind::Asymmetric { k } => (k as f64, spec.params.n_edges as f64),
        _ => unreachable!("asymmetric counting function"),
    };
    // shots are ordered by decreasing offset; map back to (a1, aN)
    let (s1, sn) = if spec.a1 >= spec.an { (shots[0], shots[1]) } else { (shots[1], shots[0]) };
    k * s1.u * sn.du + (n - k) * sn.u * s1.du - spec.params.beta * s1.du * sn.du
}

struct ScanOutcome {
    count: usize,
    zeros: Vec<f64>,
}

/// Scans `λ ∈ [λ_min, 0)` on a 2000-point grid, counting sign changes of
/// each determinant factor with bisection refinement.
fn scan_operator(
    spec: &ProfileSpec,
    which: Which,
    resolution: f64,
) -> Result<ScanOutcome> {
    let params = spec.params;
    let lambda_min = -(1.0 + params.p * (params.p + 1.0) * params.omega / 2.0);
    let lambda_end = 1e-7 * lambda_min;
    let grid_n = 2000usize;

    let mut targets = vec![spec.a1];
    let symmetric = matches!(spec.kind, crate::profiles::ProfileKind::Symmetric);
    if !symmetric {
        let (hi, lo) = if spec.a1 >= spec.an { (spec.a1, spec.an) } else { (spec.an, spec.a1) };
        targets = if (hi - lo).abs() < 1e-14 { vec![hi] } else { vec![hi, lo] };
    }

    let mut funcs: Vec<CountingFn> = Vec::new();
    if symmetric {
        funcs.push(CountingFn { multiplicity: params.n_edges - 1, values: fn_du_first });
        funcs.push(CountingFn { multiplicity: 1, values: fn_vertex_symmetric });
    } else {
        let k = match spec.kind {
            crate::profiles::ProfileKind::Asymmetric { k } => k,
            _ => unreachable!(),
        };
        // multiplicities attach to the offsets, ordered as (a1, aN)
        let (m_first, m_second) = if spec.a1 >= spec.an {
            (k - 1, params.n_edges - k - 1)
        } else {
            (params.n_edges - k - 1, k - 1)
        };
        if m_first > 0 {
            funcs.push(CountingFn { multiplicity: m_first, values: fn_du_first });
        }
        if m_second > 0 {
            funcs.push(CountingFn { multiplicity: m_second, values: fn_du_second });
        }
        funcs.push(CountingFn { multiplicity: 1, values: fn_vertex_asymmetric });
    }

    let eval = |lambda: f64| -> Vec<f64> {
        let shots = shoot(&params, which, lambda, &targets, resolution);
        funcs.iter().map(|f| (f.values)(&shots, spec)).collect()
    };

    let width_tol = 1e-10 * lambda_min.abs();
    let mut count = 0usize;
    let mut zeros = Vec::new();
    let mut prev_lambda = lambda_min;
    let mut prev = eval(prev_lambda);
    for g in 1..=grid_n {
        let lambda = lambda_min + (lambda_end - lambda_min) * g as f64 / grid_n as f64;
        let vals = eval(lambda);
        for (fi, f) in funcs.iter().enumerate() {
            if prev[fi] == 0.0 {
                return Err(Error::Unresolved(format!(
                    "counting function {fi} exactly zero at grid node λ = {prev_lambda}"
                )));
            }
            if prev[fi] * vals[fi] < 0.0 {
                let mut lo = prev_lambda;
                let mut hi = lambda;
                let mut flo = prev[fi];
                while hi - lo > width_tol {
                    let mid = 0.5 * (lo + hi);
                    let fmid = eval(mid)[fi];
                    if !fmid.is_finite() {
                        return Err(Error::Unresolved(format!(
                            "non-finite counting function while isolating a zero near λ = {mid}"
                        )));
                    }
                    if flo * fmid <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fmid;
                    }
                }
                count += f.multiplicity;
                zeros.push(0.5 * (lo + hi));
            }
        }
        prev = vals;
        prev_lambda = lambda;
    }
    Ok(ScanOutcome { count, zeros })
}

/// Detailed shooting outcome: the report plus the isolated eigenvalue
/// locations of both operators.
pub struct ShootingDetail {
    pub report: SpectralReport,
    pub zeros_l1: Vec<f64>,
    pub zeros_l2: Vec<f64>,
    pub lambda_min: f64,
}

pub fn morse_by_shooting_detail(spec: &ProfileSpec, m_kernel: usize) -> Result<ShootingDetail> {
    let l1 = scan_operator(spec, Which::L1, 100.0)?;
    let l2 = scan_operator(spec, Which::L2, 100.0)?;
    // near-kernel dimensions from the assembled forms (cheap banded counts)
    let pair = OperatorPair::assemble(spec, m_kernel)?;
    let params = spec.params;
    Ok(ShootingDetail {
        report: SpectralReport {
            n1: l1.count,
            n2: l2.count,
            ker1_dim: pair.near_kernel_dim(Which::L1),
            ker2_dim: pair.near_kernel_dim(Which::L2),
            lambda_unstable: Vec::new(),
            method: CountMethod::Shooting,
        },
        zeros_l1: l1.zeros,
        zeros_l2: l2.zeros,
        lambda_min: -(1.0 + params.p * (params.p + 1.0) * params.omega / 2.0),
    })
}

/// Morse indices by the paper-side method: sign changes of the determinant
/// factors of the decaying half-line solution.
pub fn morse_by_shooting(spec: &ProfileSpec) -> Result<SpectralReport> {
    Ok(morse_by_shooting_detail(spec, 512)?.report)
}

/// Morse indices by matrix inertia of the assembled quadratic forms
/// (independent oracle for the shooting counts). `m` is the number of grid
/// points per edge, at least 512.
pub fn morse_by_inertia(spec: &ProfileSpec, m: usize) -> Result<SpectralReport> {
    if m < 512 {
        return Err(Error::invalid("inertia counts need at least 512 points per edge"));
    }
    let pair = OperatorPair::assemble(spec, m)?;
    Ok(SpectralReport {
        n1: pair.morse_count(Which::L1),
        n2: pair.morse_count(Which::L2),
        ker1_dim: pair.near_kernel_dim(Which::L1),
        ker2_dim: pair.near_kernel_dim(Which::L2),
        lambda_unstable: Vec::new(),
        method: CountMethod::Inertia,
    })
}

/// Near-kernel dimensions and, for `L₂`, the cosine overlap of the
/// near-kernel eigenvector with the profile itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelReport {
    pub ker1_dim: usize,
    pub ker2_dim: usize,
    pub overlap2: f64,
    /// Smallest-|λ| generalized eigenvalues of `L₂` and `L₁`.
    pub smallest_l2: f64,
    pub smallest_l1: f64,
}

pub fn kernel_report(spec: &ProfileSpec, m: usize) -> Result<KernelReport> {
    let pair = OperatorPair::assemble(spec, m)?;
    let q = (spec.params.n_edges + 2).max(4);
    let eigs2 = smallest_generalized_eigs(&pair.k2, q, 1e-11, 400)?;
    let eigs1 = smallest_generalized_eigs(&pair.k1, q, 1e-11, 400)?;
    let (lam2, v2) = &eigs2[0];
    // cos overlap in the mass inner product
    let mut mv = vec![0.0; v2.len()];
    pair.k2.apply_m(v2, &mut mv);
    let num: f64 = pair.profile.iter().zip(&mv).map(|(a, b)| a * b).sum();
    let mut mphi = vec![0.0; v2.len()];
    pair.k2.apply_m(&pair.profile, &mut mphi);
    let phi_norm: f64 = pair.profile.iter().zip(&mphi).map(|(a, b)| a * b).sum();
    let v_norm: f64 = v2.iter().zip(&mv).map(|(a, b)| a * b).sum();
    let overlap2 = num.abs() / (phi_norm.sqrt() * v_norm.sqrt());
    Ok(KernelReport {
        ker1_dim: pair.near_kernel_dim(Which::L1),
        ker2_dim: pair.near_kernel_dim(Which::L2),
        overlap2,
        smallest_l2: *lam2,
        smallest_l1: eigs1[0].0,
    })
}

/// Unstable spectrum of the linearized flow.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnstableModes {
    /// Real parts of growth rates `λ` with `Re λ > 0`, descending.
    pub lambdas: Vec<f64>,
    /// The underlying eigenvalues `μ` of `L₂L₁` that produced them.
    pub mu: Vec<(f64, f64)>,
    pub tau0: f64,
}

/// Solves the reduced eigenvalue problem `L₂L₁ w = μ w`; every `μ` with
/// `Re μ < -τ₀` yields a growth rate `λ = √(-μ)` of the linearized flow.
///
/// Internally the inverse `K₁⁻¹ M K₂⁻¹ M` is formed (banded solves per
/// column) so the physically relevant small-|μ| part of the spectrum is
/// resolved to full precision by the dense eigensolver; `m ≤ 512`.
pub fn unstable_modes(spec: &ProfileSpec, m: usize) -> Result<UnstableModes> {
    if m > 512 {
        return Err(Error::invalid("unstable-mode solves are capped at 512 points per edge"));
    }
    let pair = OperatorPair::assemble(spec, m)?;
    let n = pair.k1.dof_count();
    let s1 = shifted_or_nudged(&pair.k1)?;
    let s2 = shifted_or_nudged(&pair.k2)?;
    let mut w = DMatrix::<f64>::zeros(n, n);
    let mut col = vec![0.0; n];
    for j in 0..n {
        col.iter_mut().for_each(|v| *v = 0.0);
        col[j] = 1.0;
        let mut mcol = vec![0.0; n];
        pair.k2.apply_m(&col, &mut mcol);
        let y = s2.solve(&mcol);
        let mut my = vec![0.0; n];
        pair.k2.apply_m(&y, &mut my);
        let z = s1.solve(&my);
        for i in 0..n {
            w[(i, j)] = z[i];
        }
    }
    balance_in_place(&mut w);
    let nu = w.complex_eigenvalues();
    let floor = 1e-14 * nu.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut mu_list: Vec<Complex64> = Vec::new();
    for v in nu.iter() {
        if v.norm() > floor {
            mu_list.push(Complex64::new(1.0, 0.0) / v);
        }
    }
    let tau0 = pair.tau0;
    let mut lambdas = Vec::new();
    let mut mu_out = Vec::new();
    for mu in &mu_list {
        if mu.re < -tau0 {
            let lam = (-mu).sqrt();
            let lam = if lam.re >= 0.0 { lam } else { -lam };
            if lam.re > 0.0 {
                lambdas.push(lam.re);
                mu_out.push((mu.re, mu.im));
            }
        }
    }
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(UnstableModes { lambdas, mu: mu_out, tau0 })
}

fn shifted_or_nudged(fm: &FormMatrices) -> Result<crate::forms::ShiftedSolver> {
    match fm.factor_shifted(0.0) {
        Ok(s) => Ok(s),
        Err(_) => fm.factor_shifted(1e-11),
    }
}

/// `n(P L₁ P) - n(P L₂⁻¹ P)` where `P` projects onto the mass-orthogonal
/// complement of the `L₂` kernel direction; a lower bound for the number of
/// unstable modes.
///
/// The kernel direction is taken from the computed near-kernel eigenvector
/// of `L₂` (its overlap with the profile is verified), so the deflation of
/// the singular direction of `L₂⁻¹` is exact at the discrete level.
pub fn grillakis_lower_bound(spec: &ProfileSpec, m: usize) -> Result<i64> {
    let pair = OperatorPair::assemble(spec, m)?;
    let n = pair.k1.dof_count();
    // kernel direction of L₂
    let eigs2 = smallest_generalized_eigs(&pair.k2, 4, 1e-11, 400)?;
    let v0 = {
        let (_, v) = &eigs2[0];
        let mut mv = vec![0.0; n];
        pair.k2.apply_m(v, &mut mv);
        let overlap: f64 = pair.profile.iter().zip(&mv).map(|(a, b)| a * b).sum();
        let mut mphi = vec![0.0; n];
        pair.k2.apply_m(&pair.profile, &mut mphi);
        let pn: f64 = pair.profile.iter().zip(&mphi).map(|(a, b)| a * b).sum();
        let vn: f64 = v.iter().zip(&mv).map(|(a, b)| a * b).sum();
        if overlap.abs() / (pn.sqrt() * vn.sqrt()) >= 0.99 {
            v.clone()
        } else {
            pair.profile.clone()
        }
    };
    let mut c = vec![0.0; n];
    pair.k2.apply_m(&v0, &mut c);
    let c = DVector::from_vec(c);

    let k1 = pair.k1.k_dense();
    let proj_k1 = project_out_direction(&k1, &c);
    let n_pl1 = dense_symmetric_negatives(&proj_k1);

    // form matrix of L₂⁻¹ in the L² pairing: M K₂⁻¹ M
    let s2 = shifted_or_nudged(&pair.k2)?;
    let mut x = DMatrix::<f64>::zeros(n, n);
    let mut col = vec![0.0; n];
    for j in 0..n {
        col.iter_mut().for_each(|v| *v = 0.0);
        col[j] = 1.0;
        let mut mcol = vec![0.0; n];
        pair.k2.apply_m(&col, &mut mcol);
        let y = s2.solve(&mcol);
        let mut my = vec![0.0; n];
        pair.k2.apply_m(&y, &mut my);
        for i in 0..n {
            x[(i, j)] = my[i];
        }
    }
    let x = (&x + x.transpose()) * 0.5;
    let proj_inv = project_out_direction(&x, &c);
    let n_pl2inv = dense_symmetric_negatives(&proj_inv);

    Ok(n_pl1 as i64 - n_pl2inv as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::ProfileKind;

    fn spec_for(p: f64, omega: f64, beta: f64, n: usize, kind: ProfileKind) -> ProfileSpec {
        let params = ModelParams::new(p, omega, beta, n).unwrap();
        let grid = make_grid(&params, 128).unwrap();
        build_critical_point(&params, kind, &grid).unwrap().0
    }

    #[test]
    fn shooting_closed_form_at_zero_l1() {
        // F(0) - N/β = (βω(p-1)/(2N)) (N²/(β²ω) - 1) at the symmetric offset
        for (p, omega, beta, n) in
            [(3.0, 25.0, -1.0, 3usize), (3.0, 12.0, 1.0, 2), (2.3, 9.0, -1.7, 4)]
        {
            let params = ModelParams::new(p, omega, beta, n).unwrap();
            let t = params.symmetric_t();
            assert!(t < 1.0, "cell must sit above the floor");
            let spec = spec_for(p, omega, beta, n, ProfileKind::Symmetric);
            let f0 = match shoot_log_derivative(0.0, spec.a1, Which::L1, &params).unwrap() {
                LogDerivative::Value(v) => v,
                LogDerivative::Pole => panic!("unexpected pole"),
            };
            let nf = n as f64;
            let expect = beta * omega * (p - 1.0) / (2.0 * nf)
                * (nf * nf / (beta * beta * omega) - 1.0)
                + nf / beta;
            assert!(
                (f0 - expect).abs() <= 1e-6 * expect.abs().max(1.0),
                "p={p} ω={omega} β={beta} N={n}: F(0)={f0}, expect {expect}"
            );
        }
    }

    #[test]
    fn shooting_closed_form_at_zero_l2() {
        for (p, omega, beta, n) in [(3.0, 25.0, -1.0, 3usize), (4.2, 30.0, 2.0, 5)] {
            let params = ModelParams::new(p, omega, beta, n).unwrap();
            let spec = spec_for(p, omega, beta, n, ProfileKind::Symmetric);
            let f0 = match shoot_log_derivative(0.0, spec.a1, Which::L2, &params).unwrap() {
                LogDerivative::Value(v) => v,
                LogDerivative::Pole => panic!("unexpected pole"),
            };
            let expect = n as f64 / beta;
            assert!(
                (f0 - expect).abs() <= 1e-6 * expect.abs().max(1.0),
                "F(0) = {f0}, expect {expect}"
            );
        }
    }

    #[test]
    fn log_derivative_rejects_positive_lambda() {
        let params = ModelParams::new(3.0, 25.0, -1.0, 3).unwrap();
        assert!(shoot_log_derivative(0.5, 0.3, Which::L1, &params).is_err());
    }

    #[test]
    fn log_derivative_increases_between_poles() {
        // β < 0 symmetric: F increases on (-∞, 0)
        let params = ModelParams::new(3.0, 12.0, -1.0, 3).unwrap();
        let spec = spec_for(3.0, 12.0, -1.0, 3, ProfileKind::Symmetric);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..30 {
            let lambda = -30.0 + i as f64;
            match shoot_log_derivative(lambda, spec.a1, Which::L2, &params).unwrap() {
                LogDerivative::Value(v) => {
                    assert!(v > prev, "F not increasing at λ = {lambda}: {v} ≤ {prev}");
                    prev = v;
                }
                LogDerivative::Pole => prev = f64::NEG_INFINITY,
            }
        }
    }

    #[test]
    fn symmetric_morse_counts_attractive() {
        // β = -1, N = 3, p = 3: (1, 0) below ω* = 18, (3, 0) above
        let below = spec_for(3.0, 12.0, -1.0, 3, ProfileKind::Symmetric);
        let r = morse_by_shooting(&below).unwrap();
        assert_eq!((r.n1, r.n2), (1, 0));
        let above = spec_for(3.0, 25.0, -1.0, 3, ProfileKind::Symmetric);
        let r = morse_by_shooting(&above).unwrap();
        assert_eq!((r.n1, r.n2), (3, 0));
    }

    #[test]
    fn symmetric_morse_counts_repulsive() {
        // β = +1, N = 3, p = 3, ω = 12 < 18: (2N-1, N-1) = (5, 2)
        let spec = spec_for(3.0, 12.0, 1.0, 3, ProfileKind::Symmetric);
        let r = morse_by_shooting(&spec).unwrap();
        assert_eq!((r.n1, r.n2), (5, 2));
        let ri = morse_by_inertia(&spec, 512).unwrap();
        assert_eq!((ri.n1, ri.n2), (5, 2));
    }

    #[test]
    fn methods_agree_on_asymmetric_profiles() {
        let spec = spec_for(3.0, 60.0, -1.0, 5, ProfileKind::Asymmetric { k: 2 });
        let rs = morse_by_shooting(&spec).unwrap();
        let ri = morse_by_inertia(&spec, 512).unwrap();
        assert_eq!((rs.n1, rs.n2), (ri.n1, ri.n2));
        assert!(rs.n1 >= 2, "n1 = {}", rs.n1);
        assert_eq!(rs.n2, 0);
    }

    #[test]
    fn eigenvalues_stay_inside_scan_window() {
        let spec = spec_for(3.0, 25.0, -1.0, 3, ProfileKind::Symmetric);
        let det = morse_by_shooting_detail(&spec, 512).unwrap();
        for z in det.zeros_l1.iter().chain(&det.zeros_l2) {
            assert!(*z > det.lambda_min && *z < 0.0);
        }
    }

    #[test]
    fn kernel_of_l2_is_the_profile() {
        let spec = spec_for(3.0, 25.0, -1.0, 3, ProfileKind::Symmetric);
        let rep = kernel_report(&spec, 1024).unwrap();
        assert_eq!(rep.ker2_dim, 1);
        assert!(rep.overlap2 >= 0.999, "overlap {}", rep.overlap2);
        assert_eq!(rep.ker1_dim, 0, "generic frequency has trivial L₁ kernel");
    }

    #[test]
    fn l1_kernel_at_bifurcation() {
        // ω = ω* = 18 exactly: ker L₁ is (N-1)-dimensional
        let spec = spec_for(3.0, 18.0, -1.0, 3, ProfileKind::Symmetric);
        let rep = kernel_report(&spec, 1024).unwrap();
        assert_eq!(rep.ker1_dim, 2, "smallest L₁ eigenvalue {}", rep.smallest_l1);
    }

    #[test]
    fn unstable_mode_present_above_bifurcation() {
        let spec = spec_for(3.0, 25.0, -1.0, 3, ProfileKind::Symmetric);
        let modes = unstable_modes(&spec, 256).unwrap();
        assert!(!modes.lambdas.is_empty());
        assert!(modes.lambdas[0] > 10.0 * modes.tau0);
        // Hamiltonian symmetry: nonreal μ come in conjugate pairs
        for (re, im) in &modes.mu {
            if im.abs() > modes.tau0 {
                assert!(
                    modes.mu.iter().any(|(r2, i2)| (r2 - re).abs() < 1e-6 && (i2 + im).abs() < 1e-6),
                    "unpaired complex μ = {re} + {im}i"
                );
            }
        }
    }

    #[test]
    fn stable_regime_has_no_unstable_modes() {
        let spec = spec_for(3.0, 12.0, -1.0, 3, ProfileKind::Symmetric);
        let modes = unstable_modes(&spec, 256).unwrap();
        assert!(
            modes.lambdas.iter().all(|l| *l <= 10.0 * modes.tau0),
            "spurious growth rates {:?}",
            modes.lambdas
        );
    }

    #[test]
    fn grillakis_bound_below_mode_count() {
        let spec = spec_for(3.0, 25.0, -1.0, 3, ProfileKind::Symmetric);
        let bound = grillakis_lower_bound(&spec, 256).unwrap();
        assert!(bound >= 2, "expected at least N-1 = 2, got {bound}");
        let modes = unstable_modes(&spec, 256).unwrap();
        assert!(bound <= modes.lambdas.len() as i64);
    }

    #[test]
    fn mesh_stability_of_counts() {
        let spec = spec_for(3.0, 25.0, -1.0, 3, ProfileKind::Symmetric);
        let a = morse_by_inertia(&spec, 512).unwrap();
        let b = morse_by_inertia(&spec, 1024).unwrap();
        assert_eq!((a.n1, a.n2), (b.n1, b.n2));
    }
}
