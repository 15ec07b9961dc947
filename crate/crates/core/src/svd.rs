//! Thin SVD by one-sided (Hestenes) Jacobi rotations.
//!
//! The working matrix `G` is the input or its transpose, whichever has at
//! least as many rows as columns. `G` is QR-factored and the rotations act
//! on the columns of the small triangular factor. Column pairs are rotated until every pair
//! satisfies `|g_i . g_j| <= 1e-12 * ||g_i|| ||g_j||`; pairs whose product
//! of norms is below `(1e-12 * ||V||_F)^2` count as converged.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

const REL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 80;

/// `A = U diag(s) V^T` with `s` sorted in decreasing order.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `m x k` left singular vectors.
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    /// `n x k` right singular vectors.
    pub v: DenseMatrix,
}

struct Jacobi {
    rows: usize,
    cols: usize,
    g: Vec<f64>,
    w: Option<Vec<f64>>,
}

impl Jacobi {
    fn new(rows: usize, cols: usize, g: Vec<f64>, accumulate: bool) -> Self {
        let w = accumulate.then(|| DenseMatrix::identity(cols).into_col_major());
        Self { rows, cols, g, w }
    }

    fn col(&self, i: usize) -> &[f64] {
        &self.g[i * self.rows..(i + 1) * self.rows]
    }

    fn norms_sq(&self) -> Vec<f64> {
        (0..self.cols).map(|i| sq(self.col(i))).collect()
    }

    fn run(&mut self, frob: f64) -> Result<usize> {
        let floor = (REL_TOL * frob).powi(2);
        let mut norms = self.norms_sq();
        for sweep in 1..=MAX_SWEEPS {
            let mut rotated = false;
            for i in 0..self.cols {
                for j in i + 1..self.cols {
                    let alpha = norms[i];
                    let beta = norms[j];
                    let scale = (alpha * beta).sqrt();
                    if scale <= floor {
                        continue;
                    }
                    let gamma = dot(self.col(i), self.col(j));
                    if gamma.abs() <= REL_TOL * scale {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                    let t = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    rotate(&mut self.g, self.rows, i, j, c, s);
                    if let Some(w) = self.w.as_mut() {
                        rotate(w, self.cols, i, j, c, s);
                    }
                    norms[i] = alpha - t * gamma;
                    norms[j] = beta + t * gamma;
                }
            }
            if !rotated {
                return Ok(sweep);
            }
            norms = self.norms_sq();
        }
        Err(Error::Numeric(format!(
            "one-sided Jacobi did not converge in {MAX_SWEEPS} sweeps \
             ({}x{} working matrix, ||V||_F = {frob:.3e}, smallest column norm {:.3e})",
            self.rows,
            self.cols,
            norms.iter().cloned().fold(f64::INFINITY, f64::min).sqrt()
        )))
    }
}

/// Householder QR of a tall column-major `rows x cols` matrix, in place.
/// Returns the reflectors (each `rows - k` long) and the `cols x cols`
/// upper-triangular factor, column-major.
fn householder_qr(rows: usize, cols: usize, g: &mut [f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut reflectors = Vec::with_capacity(cols);
    for k in 0..cols {
        let (head, tail) = g.split_at_mut((k + 1) * rows);
        let col = &mut head[k * rows + k..(k + 1) * rows];
        let norm = sq(col).sqrt();
        let mut v = col.to_vec();
        if norm > 0.0 {
            let alpha = if col[0] >= 0.0 { -norm } else { norm };
            v[0] -= alpha;
            let vn = sq(&v).sqrt();
            if vn > 0.0 {
                v.iter_mut().for_each(|x| *x /= vn);
            }
            col.fill(0.0);
            col[0] = alpha;
            for c in 0..cols - k - 1 {
                let other = &mut tail[c * rows + k..(c + 1) * rows];
                let f = 2.0 * dot(&v, other);
                for (o, vi) in other.iter_mut().zip(&v) {
                    *o -= f * vi;
                }
            }
        } else {
            v.fill(0.0);
        }
        reflectors.push(v);
    }
    let mut r = vec![0.0; cols * cols];
    for c in 0..cols {
        for i in 0..=c {
            r[c * cols + i] = g[c * rows + i];
        }
    }
    (reflectors, r)
}

/// Multiplies `Q` (from the reflectors) onto a `rows x k` column-major
/// matrix whose rows beyond `cols` are zero on input.
fn apply_q(rows: usize, reflectors: &[Vec<f64>], m: &mut [f64]) {
    for (k, v) in reflectors.iter().enumerate().rev() {
        for col in m.chunks_exact_mut(rows) {
            let seg = &mut col[k..];
            let f = 2.0 * dot(v, seg);
            if f != 0.0 {
                for (o, vi) in seg.iter_mut().zip(v) {
                    *o -= f * vi;
                }
            }
        }
    }
}

fn rotate(buf: &mut [f64], rows: usize, i: usize, j: usize, c: f64, s: f64) {
    debug_assert!(i < j);
    let (head, tail) = buf.split_at_mut(j * rows);
    let ci = &mut head[i * rows..(i + 1) * rows];
    let cj = &mut tail[..rows];
    for (a, b) in ci.iter_mut().zip(cj.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Tall working copy `G` (input or its transpose) and whether it was transposed.
fn working_copy(a: &DenseMatrix) -> (usize, usize, Vec<f64>, bool) {
    if a.rows() < a.cols() {
        (a.cols(), a.rows(), a.transpose().into_col_major(), true)
    } else {
        (a.rows(), a.cols(), a.as_col_major().to_vec(), false)
    }
}

/// Full thin SVD of `a`.
///
/// `G = Q R` first; Jacobi then runs on the square `R^T`, so with
/// `R^T W = X` (orthogonal columns) we get `G = (Q W) diag(s) U_x^T`.
pub fn svd(a: &DenseMatrix) -> Result<Svd> {
    let (p, q, mut g, transposed) = working_copy(a);
    let (reflectors, r) = householder_qr(p, q, &mut g);
    let rt = DenseMatrix::from_col_major(q, q, r)?.transpose().into_col_major();
    let mut jac = Jacobi::new(q, q, rt, true);
    jac.run(a.frobenius_norm())?;

    let mut order: Vec<(usize, f64)> = (0..q).map(|i| (i, sq(jac.col(i)).sqrt())).collect();
    order.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));

    let w = jac.w.as_ref().expect("accumulated");
    let mut left = vec![0.0; p * q];
    let mut right = Vec::with_capacity(q * q);
    let mut values = Vec::with_capacity(q);
    for (slot, &(i, s)) in order.iter().enumerate() {
        values.push(s);
        left[slot * p..slot * p + q].copy_from_slice(&w[i * q..(i + 1) * q]);
        let col = jac.col(i);
        if s > 0.0 {
            right.extend(col.iter().map(|v| v / s));
        } else {
            right.extend(std::iter::repeat_n(0.0, q));
        }
    }
    apply_q(p, &reflectors, &mut left);
    let left = DenseMatrix::from_col_major(p, q, left)?;
    let right = DenseMatrix::from_col_major(q, q, right)?;
    let (u, v) = if transposed { (right, left) } else { (left, right) };
    Ok(Svd {
        u,
        singular_values: values,
        v,
    })
}

/// Singular values only, in decreasing order.
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    let (p, q, mut g, _) = working_copy(a);
    let (_, r) = householder_qr(p, q, &mut g);
    let rt = DenseMatrix::from_col_major(q, q, r)?.transpose().into_col_major();
    let mut jac = Jacobi::new(q, q, rt, false);
    jac.run(a.frobenius_norm())?;
    let mut s: Vec<f64> = jac.norms_sq().into_iter().map(f64::sqrt).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}
