//! Conservative time integration of `i u_t = -Δ_β u - |u|^{p-1} u` on the
//! truncated graph.
//!
//! One step is Crank-Nicolson on the FEM system,
//! `(M + i(dt/2)K) u⁺ = (M - i(dt/2)K) u + i dt M_L g(u_mid)`,
//! with the zero-potential δ'ₛ stiffness `K` (the frequency lives in the
//! initial data and diagnostics), the nonlinearity `g = |u|^{p-1}u`
//! evaluated nodally at the midpoint through a fixed-point iteration, and
//! the lumped mass `M_L` carrying the nonlinear load so that the discrete
//! charge `uᴴMu` is conserved exactly up to the fixed-point tolerance.
//! The linear solve is per-edge tridiagonal plus a Sherman-Morrison
//! correction for the vertex coupling, `O(n)` per step.

use crate::forms::{assemble_forms, FormMatrices};
use crate::linalg::TridiagLuC;
use crate::{Error, GraphField, Grid, ModelParams, Result};
use num_complex::Complex64;
use std::io::Write;

const FIXED_POINT_TOL: f64 = 1e-13;
const FIXED_POINT_MAX_ITER: usize = 50;
const MAX_DT_HALVINGS: u32 = 10;
const BLOWUP_H1_FACTOR: f64 = 1e3;
const WALL_FRACTION: f64 = 0.9;
const WALL_AMPLITUDE: f64 = 1e-6;

/// Terminal state of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunStatus {
    Completed,
    /// First time the orbit distance exceeded the escape radius.
    OrbitEscape(f64),
    /// First time the H¹ norm blew past 10³ times its initial value or the
    /// stepper hit the dt floor.
    BlowupFlagged(f64),
}

/// Time series of the conserved quantities and instability diagnostics.
#[derive(Debug, Clone)]
pub struct TrajectoryLog {
    pub times: Vec<f64>,
    /// Discrete charge `uᴴ M u`.
    pub mass: Vec<f64>,
    /// Discrete energy `½ uᴴ K u - Σ M_L |u|^{p+1}/(p+1)`.
    pub energy: Vec<f64>,
    /// `f(t) = ‖x u‖²` by Simpson quadrature.
    pub fvals: Vec<f64>,
    /// Virial functional `P(u(t))`.
    pub pvals: Vec<f64>,
    /// `inf_θ ‖u - e^{iθ}φ‖_{H¹}` against the reference profile (zero when
    /// no reference was supplied).
    pub orbit_dist: Vec<f64>,
    pub h1_norm: Vec<f64>,
    pub status: RunStatus,
    /// First time the field touched the outer 10% of an edge above the
    /// monitoring amplitude; diagnostics beyond it are untrusted.
    pub wall_warning: Option<f64>,
    /// Whether the stepper hit the dt floor (drives BlowupFlagged).
    pub dt_floor_hit: bool,
}

impl TrajectoryLog {
    /// CSV with header `t,mass,energy,f,P,orbit_dist,h1_norm`, 17
    /// significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,mass,energy,f,P,orbit_dist,h1_norm")?;
        for i in 0..self.times.len() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.times[i],
                self.mass[i],
                self.energy[i],
                self.fvals[i],
                self.pvals[i],
                self.orbit_dist[i],
                self.h1_norm[i]
            )?;
        }
        Ok(())
    }
}

/// Evolution options beyond the time step.
#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub dt: f64,
    pub t_final: f64,
    pub sample_every: usize,
    /// Orbit-escape radius; `None` disables escape detection.
    pub eps_escape: Option<f64>,
    /// Reference profile for the orbit distance.
    pub reference: Option<GraphField>,
    /// Nonlinearity toggle (off = free Schrödinger flow, for consistency
    /// checks).
    pub nonlinear: bool,
}

impl EvolveOptions {
    pub fn new(dt: f64, t_final: f64, sample_every: usize) -> Self {
        EvolveOptions {
            dt,
            t_final,
            sample_every: sample_every.max(1),
            eps_escape: None,
            reference: None,
            nonlinear: true,
        }
    }
}

struct CnFactor {
    dt: f64,
    lus: Vec<TridiagLuC>,
    z: Vec<Complex64>,
    denom: Complex64,
    sigma: Complex64,
}

/// Crank-Nicolson integrator bound to one grid and parameter set.
pub struct Evolver {
    pub params: ModelParams,
    pub grid: Grid,
    forms: FormMatrices,
    lumped: Vec<f64>,
    simpson: Vec<f64>,
    factor: Option<CnFactor>,
    pub nonlinear: bool,
}

impl Evolver {
    pub fn new(params: &ModelParams, grid: &Grid) -> Result<Self> {
        let forms = assemble_forms(params, grid, None, true)?;
        let lumped = forms.lumped_mass();
        Ok(Evolver {
            params: *params,
            grid: grid.clone(),
            forms,
            lumped,
            simpson: grid.simpson_weights(),
            factor: None,
            nonlinear: true,
        })
    }

    fn md(&self) -> usize {
        self.grid.points_per_edge - 1
    }

    fn ensure_factor(&mut self, dt: f64) -> Result<()> {
        if let Some(f) = &self.factor {
            if f.dt == dt {
                return Ok(());
            }
        }
        let md = self.md();
        let half = Complex64::new(0.0, 0.5 * dt);
        let mut lus = Vec::with_capacity(self.grid.n_edges);
        for blk in &self.forms.k_edges {
            let diag: Vec<Complex64> = (0..md)
                .map(|i| Complex64::new(self.forms.mass.diag[i], 0.0) + half * blk.diag[i])
                .collect();
            let off: Vec<Complex64> = (0..md - 1)
                .map(|i| Complex64::new(self.forms.mass.off[i], 0.0) + half * blk.off[i])
                .collect();
            lus.push(TridiagLuC::factor(&diag, &off, &off)?);
        }
        let sigma = half * self.forms.vertex_sigma;
        let n = self.forms.dof_count();
        let mut z = vec![Complex64::ZERO; n];
        for (j, lu) in lus.iter().enumerate() {
            let mut rhs = vec![Complex64::ZERO; md];
            rhs[0] = Complex64::new(1.0, 0.0);
            lu.solve_in_place(&mut rhs);
            z[j * md..(j + 1) * md].copy_from_slice(&rhs);
        }
        let s_dot_z: Complex64 = (0..self.grid.n_edges).map(|j| z[j * md]).sum();
        let denom = Complex64::new(1.0, 0.0) + sigma * s_dot_z;
        self.factor = Some(CnFactor { dt, lus, z, denom, sigma });
        Ok(())
    }

    fn solve_cn(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let f = self.factor.as_ref().expect("factorization prepared");
        let md = self.md();
        let mut x = rhs.to_vec();
        for (j, lu) in f.lus.iter().enumerate() {
            lu.solve_in_place(&mut x[j * md..(j + 1) * md]);
        }
        if f.sigma != Complex64::ZERO {
            let s_dot: Complex64 = (0..self.grid.n_edges).map(|j| x[j * md]).sum();
            let c = f.sigma * s_dot / f.denom;
            for (xi, zi) in x.iter_mut().zip(&f.z) {
                *xi -= c * zi;
            }
        }
        x
    }

    fn apply_k_c(&self, x: &[Complex64], y: &mut [Complex64]) {
        let md = self.md();
        for (j, blk) in self.forms.k_edges.iter().enumerate() {
            let xs = &x[j * md..(j + 1) * md];
            let ys = &mut y[j * md..(j + 1) * md];
            for i in 0..md {
                let mut v = blk.diag[i] * xs[i];
                if i > 0 {
                    v += blk.off[i - 1] * xs[i - 1];
                }
                if i + 1 < md {
                    v += blk.off[i] * xs[i + 1];
                }
                ys[i] = v;
            }
        }
        if self.forms.vertex_sigma != 0.0 {
            let s: Complex64 = (0..self.grid.n_edges).map(|j| x[j * md]).sum();
            for j in 0..self.grid.n_edges {
                y[j * md] += self.forms.vertex_sigma * s;
            }
        }
    }

    fn apply_m_c(&self, x: &[Complex64], y: &mut [Complex64]) {
        let md = self.md();
        for j in 0..self.grid.n_edges {
            let xs = &x[j * md..(j + 1) * md];
            let ys = &mut y[j * md..(j + 1) * md];
            for i in 0..md {
                let mut v = self.forms.mass.diag[i] * xs[i];
                if i > 0 {
                    v += self.forms.mass.off[i - 1] * xs[i - 1];
                }
                if i + 1 < md {
                    v += self.forms.mass.off[i] * xs[i + 1];
                }
                ys[i] = v;
            }
        }
    }

    fn nonlinearity(&self, w: &[Complex64], out: &mut [Complex64]) {
        if !self.nonlinear {
            out.iter_mut().for_each(|v| *v = Complex64::ZERO);
            return;
        }
        let md = self.md();
        let pm1 = self.params.p - 1.0;
        for j in 0..self.grid.n_edges {
            for i in 0..md {
                let idx = j * md + i;
                out[idx] = self.lumped[i] * w[idx].norm().powf(pm1) * w[idx];
            }
        }
    }

    /// One Crank-Nicolson step; `dt` may be negative (time reversal).
    pub fn step_dofs(&mut self, u: &[Complex64], dt: f64) -> Result<Vec<Complex64>> {
        self.ensure_factor(dt)?;
        let n = u.len();
        let mut ku = vec![Complex64::ZERO; n];
        self.apply_k_c(u, &mut ku);
        let mut mu = vec![Complex64::ZERO; n];
        self.apply_m_c(u, &mut mu);
        let half = Complex64::new(0.0, 0.5 * dt);
        let i_dt = Complex64::new(0.0, dt);
        let base: Vec<Complex64> =
            (0..n).map(|i| mu[i] - half * ku[i]).collect();

        let scale = u.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
        let mut w: Vec<Complex64> = u.to_vec();
        let mut g = vec![Complex64::ZERO; n];
        let mut unext = u.to_vec();
        let mut converged = false;
        for _ in 0..FIXED_POINT_MAX_ITER {
            self.nonlinearity(&w, &mut g);
            let rhs: Vec<Complex64> = (0..n).map(|i| base[i] + i_dt * g[i]).collect();
            unext = self.solve_cn(&rhs);
            let mut delta = 0.0f64;
            let mut wmax = 0.0f64;
            for i in 0..n {
                let wn = 0.5 * (u[i] + unext[i]);
                delta = delta.max((wn - w[i]).norm());
                wmax = wmax.max(wn.norm());
                w[i] = wn;
            }
            if !delta.is_finite() || wmax > 1e6 * scale {
                return Err(Error::FixedPointDivergence { t: f64::NAN });
            }
            if delta <= FIXED_POINT_TOL * wmax.max(scale) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::FixedPointDivergence { t: f64::NAN });
        }
        Ok(unext)
    }

    /// Advances one nominal step, halving the substep on fixed-point
    /// divergence down to `dt/2^10`.
    fn advance(&mut self, u: &[Complex64], dt: f64, depth: u32) -> Result<Vec<Complex64>> {
        match self.step_dofs(u, dt) {
            Ok(v) => Ok(v),
            Err(Error::FixedPointDivergence { .. }) if depth < MAX_DT_HALVINGS => {
                let mid = self.advance(u, 0.5 * dt, depth + 1)?;
                self.advance(&mid, 0.5 * dt, depth + 1)
            }
            Err(e) => Err(e),
        }
    }

    /// One public step on graph fields.
    pub fn step(&mut self, u: &GraphField, dt: f64) -> Result<GraphField> {
        if dt == 0.0 {
            return Err(Error::invalid("dt must be nonzero"));
        }
        let dofs = field_dofs_c(u);
        let next = self.step_dofs(&dofs, dt)?;
        Ok(self.dofs_to_field(&next))
    }

    fn dofs_to_field(&self, u: &[Complex64]) -> GraphField {
        let m = self.grid.points_per_edge;
        let md = self.md();
        let mut values = vec![Complex64::ZERO; self.grid.node_count()];
        for j in 0..self.grid.n_edges {
            for i in 0..md {
                values[j * m + i] = u[j * md + i];
            }
        }
        GraphField { grid: self.grid.clone(), values }
    }

    fn discrete_mass(&self, u: &[Complex64]) -> f64 {
        let mut mu = vec![Complex64::ZERO; u.len()];
        self.apply_m_c(u, &mut mu);
        u.iter().zip(&mu).map(|(a, b)| (a.conj() * b).re).sum()
    }

    fn discrete_energy(&self, u: &[Complex64]) -> f64 {
        let mut ku = vec![Complex64::ZERO; u.len()];
        self.apply_k_c(u, &mut ku);
        let quad: f64 = u.iter().zip(&ku).map(|(a, b)| (a.conj() * b).re).sum();
        let mut nl = 0.0;
        if self.nonlinear {
            let md = self.md();
            let pp1 = self.params.p + 1.0;
            for j in 0..self.grid.n_edges {
                for i in 0..md {
                    nl += self.lumped[i] * u[j * md + i].norm().powf(pp1);
                }
            }
        }
        0.5 * quad - nl / (self.params.p + 1.0)
    }

    fn weighted_moment(&self, field: &GraphField) -> f64 {
        // ‖x u‖² by Simpson
        let m = self.grid.points_per_edge;
        let mut total = 0.0;
        for j in 0..self.grid.n_edges {
            for i in 0..m {
                let x = self.grid.x(i);
                total += self.simpson[i] * x * x * field.value(j, i).norm_sqr();
            }
        }
        total
    }

    fn virial(&self, field: &GraphField) -> f64 {
        let grad = field.grad_norm_sq();
        let vertex = field.vertex_sum().norm_sqr();
        let p = self.params.p;
        let nl = if self.nonlinear {
            (p - 1.0) / (2.0 * (p + 1.0))
                * field.lp_norm(p + 1.0).expect("p + 1 > 1").powf(p + 1.0)
        } else {
            0.0
        };
        grad + vertex / (2.0 * self.params.beta) - nl
    }

    fn wall_touched(&self, field: &GraphField) -> bool {
        let m = self.grid.points_per_edge;
        let first = ((WALL_FRACTION * (m - 1) as f64).ceil() as usize).min(m - 1);
        let peak = field.max_abs();
        if peak == 0.0 {
            return false;
        }
        for j in 0..self.grid.n_edges {
            for i in first..m {
                if field.value(j, i).norm() > WALL_AMPLITUDE * peak {
                    return true;
                }
            }
        }
        false
    }

    /// Drives the stepper, sampling diagnostics every `sample_every` steps;
    /// halts early on orbit escape, blow-up flag, or wall contamination.
    pub fn evolve(&mut self, u0: &GraphField, opts: &EvolveOptions) -> Result<TrajectoryLog> {
        if opts.dt == 0.0 {
            return Err(Error::invalid("dt must be nonzero"));
        }
        let n_steps_f = opts.t_final / opts.dt;
        let n_steps = n_steps_f.round() as usize;
        if n_steps == 0 || (n_steps_f - n_steps as f64).abs() > 1e-9 * n_steps_f.abs().max(1.0) {
            return Err(Error::invalid("t_final must be an integer number of steps"));
        }
        self.nonlinear = opts.nonlinear;

        let mut log = TrajectoryLog {
            times: Vec::new(),
            mass: Vec::new(),
            energy: Vec::new(),
            fvals: Vec::new(),
            pvals: Vec::new(),
            orbit_dist: Vec::new(),
            h1_norm: Vec::new(),
            status: RunStatus::Completed,
            wall_warning: None,
            dt_floor_hit: false,
        };

        let mut u = field_dofs_c(u0);
        let record = |ev: &Evolver, t: f64, u: &[Complex64], log: &mut TrajectoryLog| {
            let field = ev.dofs_to_field(u);
            log.times.push(t);
            log.mass.push(ev.discrete_mass(u));
            log.energy.push(ev.discrete_energy(u));
            log.fvals.push(ev.weighted_moment(&field));
            log.pvals.push(ev.virial(&field));
            let dist = opts
                .reference
                .as_ref()
                .map(|r| orbit_distance(&field, r))
                .unwrap_or(0.0);
            log.orbit_dist.push(dist);
            log.h1_norm.push(field.h1_norm());
            field
        };

        let f0 = record(self, 0.0, &u, &mut log);
        let h1_0 = log.h1_norm[0];
        if self.wall_touched(&f0) {
            log.wall_warning = Some(0.0);
            return Ok(log);
        }

        for step in 1..=n_steps {
            let t = step as f64 * opts.dt;
            match self.advance(&u.clone(), opts.dt, 0) {
                Ok(next) => u = next,
                Err(Error::FixedPointDivergence { .. }) => {
                    log.dt_floor_hit = true;
                    log.status = RunStatus::BlowupFlagged(t);
                    record(self, t, &u, &mut log);
                    return Ok(log);
                }
                Err(e) => return Err(e),
            }
            if step % opts.sample_every == 0 || step == n_steps {
                let field = record(self, t, &u, &mut log);
                let h1 = *log.h1_norm.last().expect("just pushed");
                if h1 > BLOWUP_H1_FACTOR * h1_0 {
                    log.status = RunStatus::BlowupFlagged(t);
                    return Ok(log);
                }
                if let Some(eps) = opts.eps_escape {
                    if *log.orbit_dist.last().expect("just pushed") > eps {
                        log.status = RunStatus::OrbitEscape(t);
                        return Ok(log);
                    }
                }
                if self.wall_touched(&field) {
                    log.wall_warning = Some(t);
                    return Ok(log);
                }
            }
        }
        Ok(log)
    }
}

fn field_dofs_c(f: &GraphField) -> Vec<Complex64> {
    let m = f.grid.points_per_edge;
    let mut out = Vec::with_capacity(f.grid.dof_count());
    for j in 0..f.grid.n_edges {
        for i in 0..m - 1 {
            out.push(f.value(j, i));
        }
    }
    out
}

/// `inf_θ ‖u - e^{iθ}φ‖_{H¹}` in closed form through the complex `H¹`
/// pairing: the optimal phase is `arg⟨u, φ⟩`.
pub fn orbit_distance(u: &GraphField, phi: &GraphField) -> f64 {
    let z = u.h1_inner(phi);
    let uu = u.h1_inner(u).re;
    let pp = phi.h1_inner(phi).re;
    (uu + pp - 2.0 * z.norm()).max(0.0).sqrt()
}

/// Compares second differences of `f(t) = ‖xu‖²` against `8P(u(t))` at the
/// interior samples; returns the maximal deviation relative to the scale of
/// `8P` (with an absolute floor of one).
pub fn virial_check(log: &TrajectoryLog) -> Result<f64> {
    let n = log.times.len();
    if n < 5 {
        return Err(Error::invalid("virial check needs at least 5 samples"));
    }
    let dt = log.times[1] - log.times[0];
    for w in log.times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.abs() {
            return Err(Error::invalid("virial check needs uniform sampling"));
        }
    }
    let scale = log.pvals.iter().map(|p| (8.0 * p).abs()).fold(1.0, f64::max);
    let mut worst = 0.0f64;
    for i in 1..n - 1 {
        let d2 = (log.fvals[i + 1] - 2.0 * log.fvals[i] + log.fvals[i - 1]) / (dt * dt);
        worst = worst.max((d2 - 8.0 * log.pvals[i]).abs());
    }
    Ok(worst / scale)
}

/// Recomputes the terminal status from the recorded series.
pub fn classify_run(log: &TrajectoryLog, eps_escape: f64) -> RunStatus {
    let h1_0 = log.h1_norm.first().copied().unwrap_or(0.0);
    for i in 0..log.times.len() {
        if log.h1_norm[i] > BLOWUP_H1_FACTOR * h1_0 {
            return RunStatus::BlowupFlagged(log.times[i]);
        }
        if log.orbit_dist[i] > eps_escape {
            return RunStatus::OrbitEscape(log.times[i]);
        }
    }
    if log.dt_floor_hit {
        return log.status;
    }
    RunStatus::Completed
}

/// Deterministic smooth perturbation with the requested `H¹` norm: a few
/// Gaussian bumps per edge with splitmix64-derived parameters, tapered to
/// zero at the wall. Used to seed instability experiments.
pub fn seeded_bump(grid: &Grid, seed: u64, h1_target: f64) -> GraphField {
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(0x9e3779b97f4a7c15);
    let mut next = move || {
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64
    };
    let l = grid.len;
    let mut per_edge = Vec::new();
    for _ in 0..grid.n_edges {
        // widths keep the spatial frequencies low (so sampled second
        // differences of the virial series resolve `ω + k²`) while staying
        // several widths clear of the outer-wall monitor at 0.9 L
        let bumps: Vec<(f64, f64, f64, f64)> = (0..3)
            .map(|_| {
                let amp = 2.0 * next() - 1.0;
                let center = (0.15 + 0.25 * next()) * l;
                let width = ((0.06 + 0.04 * next()) * l).clamp(0.5, 2.0);
                let phase = 2.0 * std::f64::consts::PI * next();
                (amp, center, width, phase)
            })
            .collect();
        per_edge.push(bumps);
    }
    let raw = GraphField::from_fn(grid, |j, x| {
        let taper = 1.0 - (x / l).powi(4);
        let mut v = Complex64::ZERO;
        for &(amp, center, width, phase) in &per_edge[j] {
            let g = (-((x - center) / width).powi(2)).exp();
            v += Complex64::from_polar(amp * g, phase);
        }
        v * taper
    });
    let h1 = raw.h1_norm();
    raw.scale(Complex64::new(h1_target / h1, 0.0))
}
