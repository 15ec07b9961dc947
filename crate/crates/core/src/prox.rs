//! Closed-form proximal maps for the block functions and resolvents for the
//! dual conjugates.
//!
//! Primal maps solve `argmin_x f(x) + (h/2)||x - v||^2` and are written in
//! terms of the shrinkage threshold `lambda / h`. Dual resolvents solve
//! `argmin_y g*(y) - <y, u> + (1/2)||y - y_prev||^2_sigma` with a diagonal
//! `sigma`.

use crate::error::Result;
use crate::matrix::DenseMatrix;
use crate::svd;

/// Coordinatewise soft threshold `sign(v) max(|v| - t, 0)`.
pub fn prox_l1(v: &[f64], thresholds: &[f64]) -> Vec<f64> {
    assert_eq!(v.len(), thresholds.len());
    v.iter()
        .zip(thresholds)
        .map(|(&x, &t)| soft_threshold(x, t))
        .collect()
}

#[inline]
pub fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Block shrinkage `(1 - tau / ||v||)_+ v`, the prox of `tau ||x||_2`.
pub fn prox_group_l2(v: &[f64], tau: f64) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= tau {
        return vec![0.0; v.len()];
    }
    let factor = 1.0 - tau / norm;
    v.iter().map(|x| x * factor).collect()
}

/// Singular value thresholding, the prox of `tau ||X||_*`.
pub fn prox_nuclear(v: &DenseMatrix, tau: f64) -> Result<DenseMatrix> {
    if tau == 0.0 {
        return Ok(v.clone());
    }
    let dec = svd::svd(v)?;
    let (m, n) = (v.rows(), v.cols());
    let mut out = vec![0.0; m * n];
    for (k, s) in dec.singular_values.iter().enumerate() {
        let shrunk = s - tau;
        if shrunk <= 0.0 {
            break;
        }
        let u = dec.u.col(k);
        let w = dec.v.col(k);
        for (c, wc) in w.iter().enumerate() {
            let f = shrunk * wc;
            for (o, ur) in out[c * m..(c + 1) * m].iter_mut().zip(u) {
                *o += f * ur;
            }
        }
    }
    DenseMatrix::from_col_major(m, n, out)
}

/// Minimizer of `(1/2)||x||^2 + (h/2)||x - v||^2`, i.e. `v h / (1 + h)`.
pub fn prox_quadratic_frobenius(v: &[f64], h: f64) -> Vec<f64> {
    let f = h / (1.0 + h);
    v.iter().map(|x| x * f).collect()
}

/// Resolvent for `g*(y) = <y, b>`: `y_prev + (u - b) / sigma`.
pub fn dual_resolvent_linear(y_prev: &[f64], u: &[f64], b: &[f64], sigma: &[f64]) -> Vec<f64> {
    check_lengths(y_prev, u, sigma);
    assert_eq!(b.len(), y_prev.len());
    (0..y_prev.len())
        .map(|k| y_prev[k] + (u[k] - b[k]) / sigma[k])
        .collect()
}

/// Resolvent for `g*(y) = sum (y_k^2 / 2 + b_k y_k)`:
/// `(sigma y_prev + u - b) / (sigma + 1)`. `sigma = 0` is allowed.
pub fn dual_resolvent_quadratic(y_prev: &[f64], u: &[f64], b: &[f64], sigma: &[f64]) -> Vec<f64> {
    check_lengths(y_prev, u, sigma);
    assert_eq!(b.len(), y_prev.len());
    (0..y_prev.len())
        .map(|k| (sigma[k] * y_prev[k] + u[k] - b[k]) / (sigma[k] + 1.0))
        .collect()
}

/// Resolvent for `g*(y) = c sum y_k` restricted to `[0, 1]^m`:
/// `clip(y_prev + (u - c) / sigma, 0, 1)`.
pub fn dual_resolvent_box_linear(y_prev: &[f64], u: &[f64], c: f64, sigma: &[f64]) -> Vec<f64> {
    check_lengths(y_prev, u, sigma);
    (0..y_prev.len())
        .map(|k| (y_prev[k] + (u[k] - c) / sigma[k]).clamp(0.0, 1.0))
        .collect()
}

fn check_lengths(y_prev: &[f64], u: &[f64], sigma: &[f64]) {
    assert_eq!(y_prev.len(), u.len(), "dual vector lengths differ");
    assert_eq!(y_prev.len(), sigma.len(), "dual metric length differs");
}
