//! One-dimensional quadrature: composite Simpson weights on uniform node
//! samples and adaptive Simpson for parameter integrals.

/// Composite Simpson weights for `m` uniformly spaced nodes with spacing `h`.
///
/// An odd interval count is closed with a Simpson-3/8 panel at the far end,
/// keeping fourth-order accuracy throughout. Requires `m >= 3`.
pub fn simpson_weights(m: usize, h: f64) -> Vec<f64> {
    assert!(m >= 3, "composite Simpson needs at least 3 nodes");
    let mut w = vec![0.0; m];
    let intervals = m - 1;
    let simpson_end = if intervals % 2 == 0 { m - 1 } else { m - 4 };
    if intervals % 2 != 0 && m == 4 {
        // single 3/8 panel
        let c = 3.0 * h / 8.0;
        return vec![c, 3.0 * c, 3.0 * c, c];
    }
    let mut i = 0;
    while i + 2 <= simpson_end {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
    if intervals % 2 != 0 {
        let c = 3.0 * h / 8.0;
        w[m - 4] += c;
        w[m - 3] += 3.0 * c;
        w[m - 2] += 3.0 * c;
        w[m - 1] += c;
    }
    w
}

/// Adaptive Simpson with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// `∫_lo^1 (1-t²)^α dt` for `α > -1` and `lo ∈ (-1, 1)`.
///
/// For negative `α` the integrand has an algebraic endpoint singularity at
/// `t = 1`; the last `δ = 1e-8` is integrated by the series of
/// `(1-t)^α (1+t)^α` around `t = 1`, the rest adaptively.
pub fn int_one_minus_t2(alpha: f64, lo: f64) -> f64 {
    assert!(alpha > -1.0, "endpoint exponent must be integrable");
    assert!(lo > -1.0 && lo < 1.0, "lower limit must lie in (-1, 1)");
    let f = |t: f64| (1.0 - t * t).powf(alpha);
    if alpha >= 0.0 {
        return adaptive_simpson(&f, lo, 1.0, 1e-12);
    }
    let delta = 1e-8_f64;
    let cut = 1.0 - delta;
    let smooth = if lo < cut { adaptive_simpson(&f, lo, cut, 1e-12) } else { 0.0 };
    let start = if lo < cut { 0.0 } else { 1.0 - lo };
    // ∫_0^δ s^α (2-s)^α ds expanded in powers of s/2
    let mut tail = 0.0;
    let mut coeff = 2.0_f64.powf(alpha);
    let mut k = 0.0;
    for _ in 0..8 {
        let expo = alpha + k + 1.0;
        tail += coeff * (delta.powf(expo) - start.powf(expo)) / expo;
        coeff *= -(alpha - k) / (2.0 * (k + 1.0));
        k += 1.0;
    }
    smooth + tail
}
