//! Gauss--Legendre rules and the split-domain integrators used for
//! asymptotic-variance integrals.
//!
//! Covariance integrands are smooth except for kinks along the hyperplanes
//! where query coordinates cross (`s = t`, `s + t = 1`, `u = s`, `v = t`).
//! Tensor Gauss--Legendre straight across a kink stalls near 1e-3 accuracy,
//! so the integrators here split the domain along those lines and map each
//! smooth piece onto a square (Duffy transform for triangles), restoring
//! spectral convergence.

use crate::error::{Error, Result};

/// Nodes and weights of the n-point Gauss--Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut rule = Vec::with_capacity(n);
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (_, d2) = legendre_and_derivative(n, x);
                dp = d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
        if 2 * (i + 1) <= n && x != 0.0 {
            rule.push((-x, w));
        }
    }
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The same rule mapped to [0, 1].
pub fn gauss_legendre_01(n: usize) -> Vec<(f64, f64)> {
    gauss_legendre(n)
        .into_iter()
        .map(|(x, w)| ((x + 1.0) / 2.0, w / 2.0))
        .collect()
}

/// Plain tensor-product rule over the unit square (for smooth integrands).
pub fn tensor2<F: Fn(f64, f64) -> f64>(f: &F, n: usize) -> f64 {
    let rule = gauss_legendre_01(n);
    let mut total = 0.0;
    for &(x, wx) in &rule {
        let mut inner = 0.0;
        for &(y, wy) in &rule {
            inner += wy * f(x, y);
        }
        total += wx * inner;
    }
    total
}

/// Integral of `f` over the triangle (p0, p1, p2) via the Duffy transform.
fn triangle<F: Fn(f64, f64) -> f64>(f: &F, rule: &[(f64, f64)], p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> f64 {
    let e1 = (p1.0 - p0.0, p1.1 - p0.1);
    let e2 = (p2.0 - p1.0, p2.1 - p1.1);
    let d2 = (p2.0 - p0.0, p2.1 - p0.1);
    let jac_affine = (e1.0 * d2.1 - e1.1 * d2.0).abs();
    let mut total = 0.0;
    for &(a, wa) in rule {
        let mut inner = 0.0;
        for &(b, wb) in rule {
            let x = p0.0 + a * e1.0 + a * b * e2.0;
            let y = p0.1 + a * e1.1 + a * b * e2.1;
            inner += wb * f(x, y);
        }
        total += wa * a * jac_affine * inner;
    }
    total
}

/// Integral over the unit square of an integrand that is smooth away from the
/// two diagonals `s = t` and `s + t = 1`: the square is cut into the four
/// triangles with common apex (1/2, 1/2).
pub fn integrate2_diagonal_split<F: Fn(f64, f64) -> f64>(f: &F, nodes_per_axis: usize) -> f64 {
    let rule = gauss_legendre_01(nodes_per_axis);
    let c = (0.5, 0.5);
    let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let mut total = 0.0;
    for i in 0..4 {
        total += triangle(f, &rule, corners[i], corners[(i + 1) % 4], c);
    }
    total
}

/// Integral over the unit 4-cube of `f(u, v, s, t)` smooth away from the
/// hyperplanes `u = s` and `v = t`: each of the (u,s) and (v,t) squares is
/// split into its two triangles and Duffy-mapped.
pub fn integrate4_orthant_split<F: Fn(f64, f64, f64, f64) -> f64>(f: &F, nodes_per_axis: usize) -> f64 {
    let rule = gauss_legendre_01(nodes_per_axis);
    let mut total = 0.0;
    for us_swap in [false, true] {
        for vt_swap in [false, true] {
            for &(a, wa) in &rule {
                for &(b, wb) in &rule {
                    let (u, s) = if us_swap { (a, a * b) } else { (a * b, a) };
                    for &(cc, wc) in &rule {
                        for &(d, wd) in &rule {
                            let (v, t) = if vt_swap { (cc, cc * d) } else { (cc * d, cc) };
                            total += wa * wb * wc * wd * a * cc * f(u, v, s, t);
                        }
                    }
                }
            }
        }
    }
    total
}

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = (a + b) / 2.0;
        let lm = (a + m) / 2.0;
        let rm = (m + b) / 2.0;
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let err = left + right - whole;
        if err.abs() <= 15.0 * tol {
            return Ok(left + right + err / 15.0);
        }
        if depth == 0 {
            return Err(Error::QuadratureFailure {
                tolerance: tol,
                achieved: err.abs() / 15.0,
            });
        }
        Ok(recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
    }
    let m = (a + b) / 2.0;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 50)
}
