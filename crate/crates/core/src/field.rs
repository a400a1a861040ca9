use crate::{Error, Grid, Result};
use num_complex::Complex64;

/// A complex-valued function on the star graph, sampled edge-major on the
/// shared grid. δ'ₛ functions carry no continuity constraint at the vertex,
/// so the `N` entries `values[j·M]` are independent one-sided traces.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphField {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl GraphField {
    pub fn zeros(grid: &Grid) -> Self {
        GraphField { grid: grid.clone(), values: vec![Complex64::ZERO; grid.node_count()] }
    }

    /// Samples `f(edge, x)` on every node.
    pub fn from_fn(grid: &Grid, f: impl Fn(usize, f64) -> Complex64) -> Self {
        let m = grid.points_per_edge;
        let mut values = Vec::with_capacity(grid.node_count());
        for j in 0..grid.n_edges {
            for i in 0..m {
                values.push(f(j, grid.x(i)));
            }
        }
        GraphField { grid: grid.clone(), values }
    }

    pub fn from_real_fn(grid: &Grid, f: impl Fn(usize, f64) -> f64) -> Self {
        Self::from_fn(grid, |j, x| Complex64::new(f(j, x), 0.0))
    }

    #[inline]
    pub fn value(&self, edge: usize, node: usize) -> Complex64 {
        self.values[edge * self.grid.points_per_edge + node]
    }

    pub fn edge(&self, edge: usize) -> &[Complex64] {
        let m = self.grid.points_per_edge;
        &self.values[edge * m..(edge + 1) * m]
    }

    /// The `N` one-sided traces `f_j(0)`.
    pub fn vertex_values(&self) -> Vec<Complex64> {
        (0..self.grid.n_edges).map(|j| self.value(j, 0)).collect()
    }

    pub fn vertex_sum(&self) -> Complex64 {
        self.vertex_values().iter().sum()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol)
    }

    pub fn scale(&self, c: Complex64) -> GraphField {
        GraphField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add_scaled(&self, other: &GraphField, c: Complex64) -> GraphField {
        assert_eq!(self.grid, other.grid, "fields must share a grid");
        GraphField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + c * b)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `L^q` norm by composite Simpson over every edge; `q = ∞` (`q.is_infinite()`)
    /// returns the sup norm.
    pub fn lp_norm(&self, q: f64) -> Result<f64> {
        if q.is_infinite() && q > 0.0 {
            return Ok(self.max_abs());
        }
        if !(q >= 1.0) {
            return Err(Error::invalid(format!("Lp exponent must be >= 1, got {q}")));
        }
        let w = self.grid.simpson_weights();
        let m = self.grid.points_per_edge;
        let mut total = 0.0;
        for j in 0..self.grid.n_edges {
            for i in 0..m {
                total += w[i] * self.value(j, i).norm().powf(q);
            }
        }
        Ok(total.powf(1.0 / q))
    }

    /// Node samples of `f'` on one edge: five-point fourth-order stencils,
    /// one-sided at both ends.
    pub fn derivative_edge(&self, edge: usize) -> Vec<Complex64> {
        derivative_samples(self.edge(edge), self.grid.h)
    }

    /// `Σ_j ∫ |f_j'|² dx` with stencil derivatives and Simpson weights.
    pub fn grad_norm_sq(&self) -> f64 {
        let w = self.grid.simpson_weights();
        let mut total = 0.0;
        for j in 0..self.grid.n_edges {
            let d = self.derivative_edge(j);
            for (i, di) in d.iter().enumerate() {
                total += w[i] * di.norm_sqr();
            }
        }
        total
    }

    /// Complex `H¹` pairing `Σ_j ∫ (f_j' conj(g_j') + f_j conj(g_j)) dx`.
    pub fn h1_inner(&self, other: &GraphField) -> Complex64 {
        assert_eq!(self.grid, other.grid, "fields must share a grid");
        let w = self.grid.simpson_weights();
        let m = self.grid.points_per_edge;
        let mut total = Complex64::ZERO;
        for j in 0..self.grid.n_edges {
            let df = self.derivative_edge(j);
            let dg = other.derivative_edge(j);
            for i in 0..m {
                total += w[i]
                    * (df[i] * dg[i].conj() + self.value(j, i) * other.value(j, i).conj());
            }
        }
        total
    }

    pub fn h1_norm(&self) -> f64 {
        self.h1_inner(self).re.max(0.0).sqrt()
    }

    /// Reorders edges; functionals must be invariant under this.
    pub fn permute_edges(&self, perm: &[usize]) -> GraphField {
        assert_eq!(perm.len(), self.grid.n_edges);
        let m = self.grid.points_per_edge;
        let mut values = Vec::with_capacity(self.values.len());
        for &j in perm {
            values.extend_from_slice(&self.values[j * m..(j + 1) * m]);
        }
        GraphField { grid: self.grid.clone(), values }
    }
}

/// Fourth-order derivative samples of uniformly spaced data; the two
/// endpoints use six-point fifth-order stencils (the vertex trace `f'(0)`
/// enters the coupling-condition residuals directly, so it gets the extra
/// order). Second-order fallback below 6 nodes.
pub fn derivative_samples(f: &[Complex64], h: f64) -> Vec<Complex64> {
    let m = f.len();
    let mut d = vec![Complex64::ZERO; m];
    if m < 6 {
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        for i in 1..m - 1 {
            d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        }
        d[m - 1] = (3.0 * f[m - 1] - 4.0 * f[m - 2] + f[m - 3]) / (2.0 * h);
        return d;
    }
    let c = 1.0 / (12.0 * h);
    d[0] = (-137.0 / 60.0 * f[0] + 5.0 * f[1] - 5.0 * f[2] + 10.0 / 3.0 * f[3]
        - 1.25 * f[4]
        + 0.2 * f[5])
        / h;
    d[1] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    for i in 2..m - 2 {
        d[i] = c * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
    }
    d[m - 2] = c
        * (3.0 * f[m - 1] + 10.0 * f[m - 2] - 18.0 * f[m - 3] + 6.0 * f[m - 4] - f[m - 5]);
    d[m - 1] = (137.0 / 60.0 * f[m - 1] - 5.0 * f[m - 2] + 5.0 * f[m - 3]
        - 10.0 / 3.0 * f[m - 4]
        + 1.25 * f[m - 5]
        - 0.2 * f[m - 6])
        / h;
    d
}
