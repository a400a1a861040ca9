//! Standing waves of the focusing NLS equation `i u_t = -Δ_β u - |u|^{p-1} u`
//! on a star graph of `N` half-lines joined by a δ'ₛ vertex coupling.
//!
//! The vertex condition `u'_1(0) = … = u'_N(0)`, `Σ_j u_j(0) = β u'_1(0)` is
//! realized through its quadratic form `F_β(u) = ‖u'‖² + (1/β)|Σ_j u_j(0)|²`,
//! discretized with P1 finite elements on truncated edges. On top of that the
//! crate provides:
//!
//! * closed-form soliton profiles (one symmetric, `N-1` asymmetric per
//!   frequency above the bifurcation threshold) and their tanh-parameter
//!   system solver ([`profiles`]),
//! * action/Nehari/energy/virial functionals and the closed-form benchmark
//!   values ([`functionals`]),
//! * Morse-index counting for the linearized operators by Sturm shooting and
//!   by matrix inertia, kernel detection, and unstable eigenvalues of the
//!   linearized flow ([`spectra`]),
//! * conservative Crank–Nicolson time evolution with conservation, virial,
//!   orbit-distance and blow-up diagnostics ([`evolution`]).

pub mod error;
pub mod evolution;
pub mod field;
pub mod forms;
pub mod functionals;
pub mod grid;
pub mod linalg;
pub mod params;
pub mod profiles;
pub mod quad;
pub mod report;
pub mod spectra;

pub use error::Error;
pub use field::GraphField;
pub use forms::{assemble_forms, quadratic_form_f_beta, FormMatrices};
pub use functionals::FunctionalReport;
pub use grid::{make_grid, Grid};
pub use params::ModelParams;
pub use profiles::{build_critical_point, ProfileKind, ProfileSpec};
pub use spectra::SpectralReport;

pub type Result<T> = std::result::Result<T, Error>;
