//! Python bindings: thin wrappers over the main graphwave types and
//! operations, returning plain tuples/dicts/lists.

use graphwave::evolution::{seeded_bump, EvolveOptions, Evolver, RunStatus};
use graphwave::profiles::{self, ProfileKind};
use graphwave::spectra;
use graphwave::{functionals, make_grid, ModelParams};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: graphwave::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn params(p: f64, omega: f64, beta: f64, n_edges: usize) -> PyResult<ModelParams> {
    ModelParams::new(p, omega, beta, n_edges).map_err(err)
}

fn kind_of(kind: &str, k: Option<usize>) -> PyResult<ProfileKind> {
    match kind {
        "symmetric" => Ok(ProfileKind::Symmetric),
        "asymmetric" => {
            let k = k.ok_or_else(|| PyValueError::new_err("asymmetric profile needs k"))?;
            Ok(ProfileKind::Asymmetric { k })
        }
        other => Err(PyValueError::new_err(format!("unknown profile kind `{other}`"))),
    }
}

/// (omega_floor, omega_star) for the parameter set.
#[pyfunction]
fn thresholds(p: f64, omega: f64, beta: f64, n_edges: usize) -> PyResult<(f64, f64)> {
    let mp = params(p, omega, beta, n_edges)?;
    Ok((mp.omega_floor(), mp.omega_star()))
}

/// Coupling strength at which the symmetric action meets the decoupled level.
#[pyfunction]
fn beta_star(p: f64, omega: f64, n_edges: usize) -> PyResult<f64> {
    profiles::compute_beta_star(p, omega, n_edges).map_err(err)
}

/// (xi_hat, omega3) blow-up threshold data for p > 5, beta < 0.
#[pyfunction]
fn omega3(p: f64, n_edges: usize, beta: f64) -> PyResult<(f64, f64)> {
    functionals::omega3(p, n_edges, beta).map_err(err)
}

/// Tanh parameters (t1, tN) of the asymmetric profile k.
#[pyfunction]
fn solve_t_system(p: f64, omega: f64, beta: f64, n_edges: usize, k: usize) -> PyResult<(f64, f64)> {
    let mp = params(p, omega, beta, n_edges)?;
    profiles::solve_t_system(&mp, k).map_err(err)
}

/// Node coordinates and per-edge real profile samples.
#[pyfunction]
#[pyo3(signature = (p, omega, beta, n_edges, kind="symmetric", k=None, points=512))]
fn profile_values(
    p: f64,
    omega: f64,
    beta: f64,
    n_edges: usize,
    kind: &str,
    k: Option<usize>,
    points: usize,
) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
    let mp = params(p, omega, beta, n_edges)?;
    let grid = make_grid(&mp, points).map_err(err)?;
    let (_, field) =
        profiles::build_critical_point(&mp, kind_of(kind, k)?, &grid).map_err(err)?;
    let xs: Vec<f64> = (0..grid.points_per_edge).map(|i| grid.x(i)).collect();
    let values = (0..n_edges)
        .map(|j| field.edge(j).iter().map(|v| v.re).collect())
        .collect();
    Ok((xs, values))
}

/// Functional values of a constructed critical point.
#[pyfunction]
#[pyo3(signature = (p, omega, beta, n_edges, kind="symmetric", k=None, points=2048))]
fn actions<'py>(
    py: Python<'py>,
    p: f64,
    omega: f64,
    beta: f64,
    n_edges: usize,
    kind: &str,
    k: Option<usize>,
    points: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let mp = params(p, omega, beta, n_edges)?;
    let grid = make_grid(&mp, points).map_err(err)?;
    let (_, field) =
        profiles::build_critical_point(&mp, kind_of(kind, k)?, &grid).map_err(err)?;
    let rep = functionals::evaluate(&field, &mp);
    let d = PyDict::new(py);
    d.set_item("action", rep.action)?;
    d.set_item("nehari", rep.nehari)?;
    d.set_item("energy", rep.energy)?;
    d.set_item("charge", rep.charge)?;
    d.set_item("virial", rep.virial)?;
    Ok(d)
}

/// Morse indices from both counting methods, with the agreement flag.
#[pyfunction]
#[pyo3(signature = (p, omega, beta, n_edges, kind="symmetric", k=None, points=512))]
fn morse<'py>(
    py: Python<'py>,
    p: f64,
    omega: f64,
    beta: f64,
    n_edges: usize,
    kind: &str,
    k: Option<usize>,
    points: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let mp = params(p, omega, beta, n_edges)?;
    let grid = make_grid(&mp, 128).map_err(err)?;
    let (spec, _) =
        profiles::build_critical_point(&mp, kind_of(kind, k)?, &grid).map_err(err)?;
    let shooting = spectra::morse_by_shooting(&spec).map_err(err)?;
    let inertia = spectra::morse_by_inertia(&spec, points.max(512)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("n1", inertia.n1)?;
    d.set_item("n2", inertia.n2)?;
    d.set_item("ker1_dim", inertia.ker1_dim)?;
    d.set_item("ker2_dim", inertia.ker2_dim)?;
    d.set_item("agreement", shooting.n1 == inertia.n1 && shooting.n2 == inertia.n2)?;
    Ok(d)
}

/// Positive growth rates of the linearized flow.
#[pyfunction]
#[pyo3(signature = (p, omega, beta, n_edges, kind="symmetric", k=None, points=256))]
fn unstable_modes(
    p: f64,
    omega: f64,
    beta: f64,
    n_edges: usize,
    kind: &str,
    k: Option<usize>,
    points: usize,
) -> PyResult<Vec<f64>> {
    let mp = params(p, omega, beta, n_edges)?;
    let grid = make_grid(&mp, 128).map_err(err)?;
    let (spec, _) =
        profiles::build_critical_point(&mp, kind_of(kind, k)?, &grid).map_err(err)?;
    Ok(spectra::unstable_modes(&spec, points).map_err(err)?.lambdas)
}

/// Evolves a perturbed profile and reports drift/orbit statistics.
#[pyfunction]
#[pyo3(signature = (p, omega, beta, n_edges, dt, t_final, points=512, perturb_scale=1.0, perturb_bump=0.0, seed=7))]
#[allow(clippy::too_many_arguments)]
fn evolve<'py>(
    py: Python<'py>,
    p: f64,
    omega: f64,
    beta: f64,
    n_edges: usize,
    dt: f64,
    t_final: f64,
    points: usize,
    perturb_scale: f64,
    perturb_bump: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let mp = params(p, omega, beta, n_edges)?;
    let grid = make_grid(&mp, points).map_err(err)?;
    let (_, phi) =
        profiles::build_critical_point(&mp, ProfileKind::Symmetric, &grid).map_err(err)?;
    let mut u0 = phi.scale(Complex64::new(perturb_scale, 0.0));
    if perturb_bump != 0.0 {
        u0 = u0.add_scaled(&seeded_bump(&grid, seed, perturb_bump), Complex64::new(1.0, 0.0));
    }
    let mut opts = EvolveOptions::new(dt, t_final, 10);
    opts.reference = Some(phi);
    let mut ev = Evolver::new(&mp, &grid).map_err(err)?;
    let log = ev.evolve(&u0, &opts).map_err(err)?;
    let m0 = log.mass[0];
    let e0 = log.energy[0];
    let mass_drift =
        log.mass.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max) / m0.abs().max(1e-300);
    let energy_drift =
        log.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / e0.abs().max(1e-300);
    let d = PyDict::new(py);
    d.set_item("t_end", *log.times.last().unwrap())?;
    d.set_item("mass_drift", mass_drift)?;
    d.set_item("energy_drift", energy_drift)?;
    d.set_item("max_orbit_dist", log.orbit_dist.iter().cloned().fold(0.0, f64::max))?;
    d.set_item(
        "status",
        match log.status {
            RunStatus::Completed => "completed".to_string(),
            RunStatus::OrbitEscape(t) => format!("orbit_escape@{t}"),
            RunStatus::BlowupFlagged(t) => format!("blowup_flagged@{t}"),
        },
    )?;
    Ok(d)
}

#[pymodule]
fn graphwave_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(beta_star, m)?)?;
    m.add_function(wrap_pyfunction!(omega3, m)?)?;
    m.add_function(wrap_pyfunction!(solve_t_system, m)?)?;
    m.add_function(wrap_pyfunction!(profile_values, m)?)?;
    m.add_function(wrap_pyfunction!(actions, m)?)?;
    m.add_function(wrap_pyfunction!(morse, m)?)?;
    m.add_function(wrap_pyfunction!(unstable_modes, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    Ok(())
}
