use crate::error::{Error, Result};
use crate::matrix::{BlockPartition, DenseMatrix};

/// Eigenvalues of a symmetric matrix (row-major, `n x n`) by cyclic
/// Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(Error::Input(format!("expected {} entries, got {}", n * n, a.len())));
    }
    let at = |i: usize, j: usize| i * n + j;
    let total: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = 1e-15 * total.max(f64::MIN_POSITIVE);
    let mut converged = n < 2;
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[at(i, j)] * a[at(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[at(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[at(q, q)] - a[at(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[at(k, p)], a[at(k, q)]);
                    a[at(k, p)] = c * akp - s * akq;
                    a[at(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[at(p, k)], a[at(q, k)]);
                    a[at(p, k)] = c * apk - s * aqk;
                    a[at(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "Jacobi eigensolver did not converge on a {n}x{n} matrix"
        )));
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[at(i, i)]).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    Ok(eig)
}

/// Smallest eigenvalue of
/// `[[diag(h_S), -A_S^T], [-A_S, (K/J) diag(sigma)]]`
/// where `A_S` keeps the columns of the selected blocks.
pub fn p_matrix_min_eig(
    a: &DenseMatrix,
    partition: &BlockPartition,
    selected: &[usize],
    h: &[f64],
    sigma: &[f64],
    k: usize,
    num_blocks: usize,
) -> Result<f64> {
    let m = a.rows();
    if h.len() != a.cols() || sigma.len() != m {
        return Err(Error::Input("penalty lengths do not match A".into()));
    }
    let cols: Vec<usize> = selected
        .iter()
        .flat_map(|&j| partition.range(j))
        .collect();
    let ns = cols.len();
    let n = ns + m;
    let mut p = vec![0.0; n * n];
    for (i, &c) in cols.iter().enumerate() {
        p[i * n + i] = h[c];
        for r in 0..m {
            let v = -a.get(r, c);
            p[i * n + ns + r] = v;
            p[(ns + r) * n + i] = v;
        }
    }
    let scale = k as f64 / num_blocks as f64;
    for r in 0..m {
        p[(ns + r) * n + ns + r] = scale * sigma[r];
    }
    Ok(symmetric_eigenvalues(p, n)?[0])
}
