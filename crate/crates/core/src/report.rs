//! Typed CLI outputs and their JSON serialization.
//!
//! Floating-point values are printed at 17 significant digits so identical
//! invocations are byte-identical and regression-diffable; every emitted
//! document embeds the run configuration and parses back into the same
//! type.

use crate::functionals::FunctionalReport;
use crate::profiles::StationarityReport;
use crate::spectra::SpectralReport;
use serde::{Deserialize, Serialize};
use std::io;

/// Run configuration echoed into every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub p: f64,
    pub omega: f64,
    pub beta: f64,
    pub n_edges: usize,
    pub points_per_edge: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdsOut {
    pub config: RunConfig,
    pub omega_floor: f64,
    pub omega_star: f64,
    pub beta_star: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega3: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionsOut {
    pub config: RunConfig,
    pub functionals: FunctionalReport,
    pub stationarity_interior: f64,
    pub stationarity_vertex_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorseOut {
    pub config: RunConfig,
    pub shooting: SpectralReport,
    pub inertia: SpectralReport,
    pub agreement: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModesOut {
    pub config: RunConfig,
    pub lambda_unstable: Vec<f64>,
    pub tau0: f64,
    pub grillakis_lower_bound: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelOut {
    pub config: RunConfig,
    pub ker1_dim: usize,
    pub ker2_dim: usize,
    pub overlap2: f64,
    pub smallest_l1: f64,
    pub smallest_l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeOut {
    pub config: RunConfig,
    pub j: f64,
    pub j1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_star_slope: Option<f64>,
    pub classified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub action: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOut {
    pub config: RunConfig,
    pub rows: Vec<RankRow>,
}

/// Stationarity residuals attached to profile CSV output.
pub fn stationarity_comment(rep: &StationarityReport) -> String {
    format!(
        "# interior_residual,{:.16e}\n# vertex_derivative_match,{:.16e}\n# vertex_sum_residual,{:.16e}\n",
        rep.interior, rep.vertex_derivative_match, rep.vertex_sum
    )
}

struct Digits17;

impl serde_json::ser::Formatter for Digits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes with every float at 17 significant digits.
pub fn to_json_17<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits17);
    value.serialize(&mut ser).expect("serialization cannot fail");
    let mut s = String::from_utf8(out).expect("JSON is UTF-8");
    s.push('\n');
    s
}
