use crate::{quad, Error, ModelParams, Result};
use serde::{Deserialize, Serialize};

/// Shared uniform grid on the truncated edges: `N` copies of `[0, L]` with
/// `M` nodes each, the vertex at index 0 and a homogeneous Dirichlet node at
/// index `M-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n_edges: usize,
    pub len: f64,
    pub points_per_edge: usize,
    pub h: f64,
}

impl Grid {
    pub fn new(n_edges: usize, len: f64, points_per_edge: usize) -> Result<Self> {
        if n_edges < 2 {
            return Err(Error::invalid("grid needs at least 2 edges"));
        }
        if points_per_edge < 3 {
            return Err(Error::invalid("grid needs at least 3 points per edge"));
        }
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::invalid("edge length must be positive"));
        }
        let h = len / (points_per_edge - 1) as f64;
        Ok(Grid { n_edges, len, points_per_edge, h })
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    /// Total node count `N·M`.
    pub fn node_count(&self) -> usize {
        self.n_edges * self.points_per_edge
    }

    /// Degrees of freedom after eliminating the outer Dirichlet node:
    /// `N·(M-1)`.
    pub fn dof_count(&self) -> usize {
        self.n_edges * (self.points_per_edge - 1)
    }

    /// Composite Simpson weights along one edge.
    pub fn simpson_weights(&self) -> Vec<f64> {
        quad::simpson_weights(self.points_per_edge, self.h)
    }
}

/// Builds a grid whose truncation length keeps the profile tail below 1e-14.
///
/// The length covers the largest admissible tanh-parameter offset plus 35
/// decay lengths of the soliton piece, and in addition enforces
/// `exp(-√ω L) < 1e-14` directly; the result is rounded up to an integer.
pub fn make_grid(params: &ModelParams, points_per_edge: usize) -> Result<Grid> {
    if points_per_edge < 64 {
        return Err(Error::invalid(format!(
            "need at least 64 points per edge, got {points_per_edge}"
        )));
    }
    let sq = params.omega.sqrt();
    let t_sym = params.symmetric_t().min(1.0 - 1e-15);
    let t_max = ((params.p - 1.0) / (params.p + 1.0)).sqrt();
    let t_guess = t_sym.max(t_max);
    let offset_reach = 2.0 / ((params.p - 1.0) * sq) * (atanh_guarded(t_guess) + 35.0);
    // exp(-√ω L) < 1e-14  ⇔  L > 14 ln 10 / √ω; keep two extra lengths
    let tail = (14.0 * std::f64::consts::LN_10 + 2.0) / sq;
    let len = offset_reach.max(tail).ceil();
    let grid = Grid::new(params.n_edges, len, points_per_edge)?;
    debug_assert!((-sq * grid.len).exp() < 1e-14);
    Ok(grid)
}

/// `atanh` clamped away from the singularity at `t = 1`.
pub fn atanh_guarded(t: f64) -> f64 {
    let t = t.clamp(-(1.0 - 1e-15), 1.0 - 1e-15);
    0.5 * ((1.0 + t) / (1.0 - t)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_length_bounds_tail() {
        let mp = ModelParams::new(3.0, 25.0, -1.0, 3).unwrap();
        let g = make_grid(&mp, 512).unwrap();
        // exp(-5 L) < 1e-14 needs L >= 6.45
        assert!(g.len >= 6.45);
        assert!((-5.0 * g.len).exp() < 1e-14);

        let mp1 = ModelParams::new(3.0, 1.0, -1.0, 3).unwrap();
        let g1 = make_grid(&mp1, 512).unwrap();
        assert!(g1.len >= 32.3);
    }

    #[test]
    fn deterministic_for_fixed_inputs() {
        let mp = ModelParams::new(3.0, 25.0, -1.0, 3).unwrap();
        let a = make_grid(&mp, 512).unwrap();
        let b = make_grid(&mp, 512).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tiny_point_count_rejected() {
        let mp = ModelParams::new(3.0, 25.0, -1.0, 3).unwrap();
        assert!(make_grid(&mp, 2).is_err());
        assert!(Grid::new(3, 1.0, 2).is_err());
    }
}
