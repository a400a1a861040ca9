//! Small dense/banded linear-algebra kernels: pivoted tridiagonal solves
//! (real and complex), symmetric inertia counting, constrained projections,
//! and a block inverse-iteration eigensolver for the generalized pencils.

use crate::forms::FormMatrices;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// LU factorization of a tridiagonal matrix with partial pivoting
/// (one fill-in superdiagonal).
pub struct TridiagLu {
    n: usize,
    low: Vec<f64>,
    diag: Vec<f64>,
    up1: Vec<f64>,
    up2: Vec<f64>,
    swap: Vec<bool>,
}

impl TridiagLu {
    pub fn factor(diag: &[f64], lower: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        assert!(n >= 1 && lower.len() == n - 1 && upper.len() == n - 1);
        let mut d = diag.to_vec();
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut low = vec![0.0; n.saturating_sub(1)];
        let mut swap = vec![false; n.saturating_sub(1)];
        u1[..n - 1].copy_from_slice(upper);
        let mut sub = lower.to_vec();
        for i in 0..n - 1 {
            if sub[i].abs() > d[i].abs() {
                // interchange rows i and i+1
                swap[i] = true;
                std::mem::swap(&mut d[i], &mut sub[i]);
                let (du, dd) = (u1[i], d[i + 1]);
                u1[i] = dd;
                d[i + 1] = du;
                if i + 2 < n {
                    u2[i] = u1[i + 1];
                    u1[i + 1] = 0.0;
                }
            }
            if d[i] == 0.0 {
                return Err(Error::Linalg("singular tridiagonal pivot".into()));
            }
            let l = sub[i] / d[i];
            low[i] = l;
            d[i + 1] -= l * u1[i];
            if i + 2 < n {
                u1[i + 1] -= l * u2[i];
            }
        }
        if d[n - 1] == 0.0 {
            return Err(Error::Linalg("singular tridiagonal matrix".into()));
        }
        Ok(TridiagLu { n, low, diag: d, up1: u1, up2: u2, swap })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n - 1 {
            if self.swap[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.low[i] * b[i];
        }
        b[n - 1] /= self.diag[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.up1[n - 2] * b[n - 1]) / self.diag[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.up1[i] * b[i + 1] - self.up2[i] * b[i + 2]) / self.diag[i];
        }
    }
}

/// Complex counterpart of [`TridiagLu`].
pub struct TridiagLuC {
    n: usize,
    low: Vec<Complex64>,
    diag: Vec<Complex64>,
    up1: Vec<Complex64>,
    up2: Vec<Complex64>,
    swap: Vec<bool>,
}

impl TridiagLuC {
    pub fn factor(diag: &[Complex64], lower: &[Complex64], upper: &[Complex64]) -> Result<Self> {
        let n = diag.len();
        let mut d = diag.to_vec();
        let mut u1 = vec![Complex64::ZERO; n];
        let mut u2 = vec![Complex64::ZERO; n];
        let mut low = vec![Complex64::ZERO; n - 1];
        let mut swap = vec![false; n - 1];
        u1[..n - 1].copy_from_slice(upper);
        let mut sub = lower.to_vec();
        for i in 0..n - 1 {
            if sub[i].norm_sqr() > d[i].norm_sqr() {
                swap[i] = true;
                std::mem::swap(&mut d[i], &mut sub[i]);
                let (du, dd) = (u1[i], d[i + 1]);
                u1[i] = dd;
                d[i + 1] = du;
                if i + 2 < n {
                    u2[i] = u1[i + 1];
                    u1[i + 1] = Complex64::ZERO;
                }
            }
            if d[i] == Complex64::ZERO {
                return Err(Error::Linalg("singular complex tridiagonal pivot".into()));
            }
            let l = sub[i] / d[i];
            low[i] = l;
            d[i + 1] -= l * u1[i];
            if i + 2 < n {
                u1[i + 1] -= l * u2[i];
            }
        }
        if d[n - 1] == Complex64::ZERO {
            return Err(Error::Linalg("singular complex tridiagonal matrix".into()));
        }
        Ok(TridiagLuC { n, low, diag: d, up1: u1, up2: u2, swap })
    }

    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        for i in 0..n - 1 {
            if self.swap[i] {
                b.swap(i, i + 1);
            }
            let t = self.low[i] * b[i];
            b[i + 1] -= t;
        }
        b[n - 1] /= self.diag[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.up1[n - 2] * b[n - 1]) / self.diag[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.up1[i] * b[i + 1] - self.up2[i] * b[i + 2]) / self.diag[i];
        }
    }
}

/// Parlett-Reinsch balancing: a diagonal similarity with power-of-two
/// factors that equalizes row and column norms. Leaves the spectrum
/// untouched and keeps the QR iteration of the nonsymmetric eigensolver
/// well-conditioned (the inverse-product operators here have raw row
/// norms spanning many orders of magnitude).
pub fn balance_in_place(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    let radix2 = 4.0f64;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c: f64 = 0.0;
            let mut r: f64 = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0f64;
            let mut g = r / 2.0;
            while c < g {
                f *= 2.0;
                c *= radix2;
            }
            g = r * 2.0;
            while c > g {
                f /= 2.0;
                c /= radix2;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                let ginv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= ginv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// Negative-eigenvalue count of a dense symmetric matrix via Householder
/// tridiagonalization and the Sturm pivot recurrence.
pub fn dense_symmetric_negatives(a: &DMatrix<f64>) -> usize {
    let n = a.nrows();
    if n == 0 {
        return 0;
    }
    if n == 1 {
        return usize::from(a[(0, 0)] < 0.0);
    }
    let tri = nalgebra::linalg::SymmetricTridiagonal::new(a.clone());
    let (alpha, beta) = (tri.diagonal(), tri.off_diagonal());
    let scale = alpha.amax().max(beta.amax()).max(1e-300);
    let guard = 1e-300 * scale;
    let mut neg = 0usize;
    let mut d = alpha[0];
    if d == 0.0 {
        d = guard;
    }
    if d < 0.0 {
        neg += 1;
    }
    for i in 1..n {
        let mut next = alpha[i] - beta[i - 1] * beta[i - 1] / d;
        if next == 0.0 {
            next = guard;
        }
        if next < 0.0 {
            neg += 1;
        }
        d = next;
    }
    neg
}

/// Restriction of a symmetric `A` to the hyperplane `{v : cᵀ v = 0}`:
/// returns `Qᵀ A Q` where `Q` spans the complement of `c` (Householder
/// reflector sending `c` to `±‖c‖ e₁`, first column dropped).
pub fn project_out_direction(a: &DMatrix<f64>, c: &DVector<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut v = c.clone();
    let norm = v.norm();
    assert!(norm > 0.0, "constraint direction must be nonzero");
    v /= norm;
    v[0] += if v[0] >= 0.0 { 1.0 } else { -1.0 };
    let vn2 = v.norm_squared();
    // H = I - (2/|v|²) v vᵀ;  H A H = A - v tᵀ - t vᵀ + β(vᵀt) v vᵀ,  t = βAv
    let t = a * &v * (2.0 / vn2);
    let coeff = v.dot(&t) / vn2;
    let mut ha = a.clone();
    for i in 0..n {
        for j in 0..n {
            ha[(i, j)] += -v[i] * t[j] - t[i] * v[j] + 2.0 * coeff * v[i] * v[j];
        }
    }
    ha.view((1, 1), (n - 1, n - 1)).into()
}

/// Block inverse iteration for the generalized pencil `(K, M)`: returns the
/// `q` eigenpairs of smallest magnitude, M-orthonormalized.
pub fn smallest_generalized_eigs(
    fm: &FormMatrices,
    q: usize,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = fm.dof_count();
    let q = q.min(n);
    let solver = match fm.factor_shifted(0.0) {
        Ok(s) => s,
        // exactly singular: nudge the shift
        Err(_) => fm.factor_shifted(1e-11)?,
    };
    // deterministic pseudo-random start block
    let mut x: Vec<DVector<f64>> = (0..q)
        .map(|c| {
            let mut state = 0x9e3779b97f4a7c15u64 ^ (c as u64 + 1).wrapping_mul(0xbf58476d1ce4e5b9);
            DVector::from_fn(n, |_, _| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
        })
        .collect();
    let mut prev: Option<Vec<f64>> = None;
    let mut ritz_vals = vec![0.0; q];
    for _ in 0..max_iter {
        // y_i = K⁻¹ M x_i
        let mut y: Vec<DVector<f64>> = x
            .iter()
            .map(|xi| {
                let mut mx = vec![0.0; n];
                fm.apply_m(xi.as_slice(), &mut mx);
                DVector::from_vec(solver.solve(&mx))
            })
            .collect();
        m_orthonormalize(fm, &mut y)?;
        // Rayleigh-Ritz in the M-orthonormal basis
        let mut a_r = DMatrix::zeros(q, q);
        let ky: Vec<DVector<f64>> = y
            .iter()
            .map(|yi| {
                let mut t = vec![0.0; n];
                fm.apply_k(yi.as_slice(), &mut t);
                DVector::from_vec(t)
            })
            .collect();
        for i in 0..q {
            for j in 0..q {
                a_r[(i, j)] = y[i].dot(&ky[j]);
            }
        }
        a_r = (&a_r + a_r.transpose()) * 0.5;
        let eig = nalgebra::linalg::SymmetricEigen::new(a_r);
        // sort by |λ| ascending
        let mut idx: Vec<usize> = (0..q).collect();
        idx.sort_by(|&a, &b| {
            eig.eigenvalues[a].abs().partial_cmp(&eig.eigenvalues[b].abs()).unwrap()
        });
        let mut new_x = Vec::with_capacity(q);
        for (slot, &col) in idx.iter().enumerate() {
            let mut v = DVector::zeros(n);
            for j in 0..q {
                v += &y[j] * eig.eigenvectors[(j, col)];
            }
            ritz_vals[slot] = eig.eigenvalues[col];
            new_x.push(v);
        }
        x = new_x;
        if let Some(p) = &prev {
            let close = ritz_vals.iter().zip(p).all(|(a, b)| {
                (a - b).abs() <= tol * a.abs().max(1e-12)
            });
            if close {
                break;
            }
        }
        prev = Some(ritz_vals.clone());
    }
    Ok(ritz_vals
        .iter()
        .zip(x)
        .map(|(&l, v)| (l, v.as_slice().to_vec()))
        .collect())
}

fn m_orthonormalize(fm: &FormMatrices, vs: &mut [DVector<f64>]) -> Result<()> {
    let n = fm.dof_count();
    let mut mv_cache: Vec<DVector<f64>> = Vec::with_capacity(vs.len());
    for i in 0..vs.len() {
        for _ in 0..2 {
            for (j, mv) in mv_cache.iter().enumerate() {
                let c = vs[i].dot(mv);
                let vj = vs[j].clone();
                vs[i] -= vj * c;
            }
        }
        let mut mv = vec![0.0; n];
        fm.apply_m(vs[i].as_slice(), &mut mv);
        let mv = DVector::from_vec(mv);
        let nrm = vs[i].dot(&mv).max(0.0).sqrt();
        if nrm < 1e-150 {
            return Err(Error::Linalg("rank collapse in block iteration".into()));
        }
        vs[i] /= nrm;
        mv_cache.push(mv / nrm);
    }
    Ok(())
}
