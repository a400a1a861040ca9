use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Physical parameters of the model: nonlinearity exponent `p`, standing-wave
/// frequency `ω`, vertex coupling intensity `β` and edge count `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub p: f64,
    pub omega: f64,
    pub beta: f64,
    pub n_edges: usize,
}

impl ModelParams {
    pub fn new(p: f64, omega: f64, beta: f64, n_edges: usize) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::invalid(format!("p must exceed 1, got {p}")));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::invalid(format!("omega must be positive, got {omega}")));
        }
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::invalid("beta must be nonzero"));
        }
        if n_edges < 2 {
            return Err(Error::invalid(format!("need at least 2 edges, got {n_edges}")));
        }
        Ok(ModelParams { p, omega, beta, n_edges })
    }

    /// `N²/β²`, the infimum frequency for which the symmetric profile exists
    /// (also `-inf σ(-Δ_β)` for attractive coupling).
    pub fn omega_floor(&self) -> f64 {
        let n = self.n_edges as f64;
        n * n / (self.beta * self.beta)
    }

    /// `((p+1)/(p-1))·N²/β²`, the frequency at which the asymmetric branch
    /// bifurcates from the symmetric one.
    pub fn omega_star(&self) -> f64 {
        (self.p + 1.0) / (self.p - 1.0) * self.omega_floor()
    }

    /// Inverse width `(p-1)√ω/2` of the soliton piece.
    pub fn kappa(&self) -> f64 {
        0.5 * (self.p - 1.0) * self.omega.sqrt()
    }

    /// Tanh parameter `N/(|β|√ω)` of the symmetric profile.
    pub fn symmetric_t(&self) -> f64 {
        self.n_edges as f64 / (self.beta.abs() * self.omega.sqrt())
    }

    pub fn attractive(&self) -> bool {
        self.beta < 0.0
    }

    /// Checks `ω > N²/β²` (any profile) and, for asymmetric profiles,
    /// `ω > ω*`.
    pub fn require_profile(&self, asymmetric: bool) -> Result<()> {
        if self.omega <= self.omega_floor() {
            return Err(Error::invalid(format!(
                "omega = {} must exceed the ground-frequency floor N^2/beta^2 = {}",
                self.omega,
                self.omega_floor()
            )));
        }
        if asymmetric && self.omega <= self.omega_star() {
            return Err(Error::invalid(format!(
                "omega = {} must exceed the bifurcation threshold {} for asymmetric profiles",
                self.omega,
                self.omega_star()
            )));
        }
        Ok(())
    }
}
