//! Seeded synthetic data. Every generator draws from `ChaCha8Rng::seed_from_u64(seed)`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::GroupSpec;
use crate::error::{input_err, Result};
use crate::matrix::DenseMatrix;

/// Samples in the desk-scale group-Lasso data set.
pub const GROUP_LASSO_SAMPLES: usize = 2000;

const RPCA_SPARSE_FRACTION: f64 = 0.05;
const RPCA_NOISE_STD: f64 = 1e-3;
const GROUP_ACTIVE_FRACTION: f64 = 0.2;
const GROUP_LABEL_NOISE: f64 = 0.1;

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

#[derive(Debug, Clone)]
pub struct LassoData {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub lambda: f64,
    pub x_true: Vec<f64>,
}

/// Gaussian design with unit-norm columns, `d`-sparse Gaussian truth,
/// `b = A x_true + e` with `e ~ N(0, 1e-3 I)` and `lambda = 0.1 ||A^T b||_inf`.
pub fn gen_lasso(m: usize, n: usize, d: usize, seed: u64) -> Result<LassoData> {
    if d > n {
        return input_err(format!("{d} nonzeros requested for {n} coordinates"));
    }
    if m == 0 || n == 0 {
        return input_err("empty Lasso shape");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..m * n).map(|_| normal(&mut rng)).collect();
    let mut a = DenseMatrix::from_col_major(m, n, data)?;
    for c in 0..n {
        let norm = crate::matrix::norm2(a.col(c));
        a.scale_col(c, 1.0 / norm);
    }
    let mut x_true = vec![0.0; n];
    for pos in index::sample(&mut rng, n, d) {
        x_true[pos] = normal(&mut rng);
    }
    let noise_std = 1e-3f64.sqrt();
    let mut b = a.matvec(&x_true);
    for v in &mut b {
        *v += noise_std * normal(&mut rng);
    }
    let lambda = 0.1 * a.matvec_t(&b).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(LassoData { a, b, lambda, x_true })
}

/// Observation `B = L0 + S0 + N0` with its components.
#[derive(Debug, Clone)]
pub struct RpcaSample {
    pub observation: DenseMatrix,
    pub low_rank: DenseMatrix,
    pub sparse: DenseMatrix,
}

/// `L0 = U V^T` with Gaussian `m x r` and `n x r` factors; `S0` has exactly
/// `round(0.05 m n)` nonzeros at uniformly random positions, each
/// `+-||L0||_inf` with a fair random sign; `N0` is Gaussian with std `1e-3`.
pub fn gen_rpca(m: usize, n: usize, r: usize, seed: u64) -> Result<RpcaSample> {
    if r > m.min(n) || r == 0 {
        return input_err(format!("rank {r} invalid for a {m}x{n} matrix"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: Vec<f64> = (0..m * r).map(|_| normal(&mut rng)).collect();
    let v: Vec<f64> = (0..n * r).map(|_| normal(&mut rng)).collect();
    let mut low = vec![0.0; m * n];
    for k in 0..r {
        let uk = &u[k * m..(k + 1) * m];
        for c in 0..n {
            let vck = v[k * n + c];
            for (o, ur) in low[c * m..(c + 1) * m].iter_mut().zip(uk) {
                *o += ur * vck;
            }
        }
    }
    let low_rank = DenseMatrix::from_col_major(m, n, low)?;
    let magnitude = low_rank.max_abs();

    let nnz = (RPCA_SPARSE_FRACTION * (m * n) as f64).round() as usize;
    let mut sparse = vec![0.0; m * n];
    for pos in index::sample(&mut rng, m * n, nnz) {
        sparse[pos] = if rng.random_bool(0.5) { magnitude } else { -magnitude };
    }
    let sparse = DenseMatrix::from_col_major(m, n, sparse)?;

    let obs: Vec<f64> = low_rank
        .as_col_major()
        .iter()
        .zip(sparse.as_col_major())
        .map(|(l, s)| l + s + RPCA_NOISE_STD * normal(&mut rng))
        .collect();
    Ok(RpcaSample {
        observation: DenseMatrix::from_col_major(m, n, obs)?,
        low_rank,
        sparse,
    })
}

#[derive(Debug, Clone)]
pub struct GroupLassoData {
    pub features: DenseMatrix,
    pub labels: Vec<f64>,
    pub groups: GroupSpec,
    pub x_true: Vec<f64>,
}

/// Splice-site-shaped data: 63 groups / 2604 features, 2000 samples.
pub fn gen_group_lasso(seed: u64) -> Result<GroupLassoData> {
    gen_group_lasso_with(GroupSpec::splice_site(), GROUP_LASSO_SAMPLES, seed)
}

/// Group-sparse truth with 20% of the groups active (Gaussian entries),
/// features `N(0, 1/d)`, labels `sign(a_i^T x_true + 0.1 e_i)` with
/// `sign(0) = +1`.
pub fn gen_group_lasso_with(groups: GroupSpec, samples: usize, seed: u64) -> Result<GroupLassoData> {
    if samples == 0 {
        return input_err("need at least one sample");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = groups.dim();
    let g = groups.num_groups();
    let active = ((GROUP_ACTIVE_FRACTION * g as f64).round() as usize).clamp(1, g);
    let mut x_true = vec![0.0; d];
    let offsets: Vec<usize> = std::iter::once(0)
        .chain(groups.sizes().iter().scan(0, |acc, s| {
            *acc += s;
            Some(*acc)
        }))
        .collect();
    let mut chosen = index::sample(&mut rng, g, active).into_vec();
    chosen.sort_unstable();
    for gi in chosen {
        for v in &mut x_true[offsets[gi]..offsets[gi + 1]] {
            *v = normal(&mut rng);
        }
    }
    let scale = 1.0 / (d as f64).sqrt();
    let data: Vec<f64> = (0..samples * d).map(|_| scale * normal(&mut rng)).collect();
    let features = DenseMatrix::from_col_major(samples, d, data)?;
    let labels = features
        .matvec(&x_true)
        .into_iter()
        .map(|s| {
            let noisy = s + GROUP_LABEL_NOISE * normal(&mut rng);
            if noisy >= 0.0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    Ok(GroupLassoData {
        features,
        labels,
        groups,
        x_true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lasso_columns_have_unit_norm_and_truth_is_sparse() {
        let data = gen_lasso(30, 50, 7, 1).unwrap();
        for c in 0..50 {
            let norm = crate::matrix::norm2(data.a.col(c));
            assert!((norm - 1.0).abs() < 1e-12);
        }
        assert_eq!(data.x_true.iter().filter(|v| **v != 0.0).count(), 7);
        let atb = data.a.matvec_t(&data.b);
        let expected = 0.1 * atb.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert_eq!(data.lambda, expected);
        assert!(gen_lasso(3, 4, 5, 0).is_err());
    }

    #[test]
    fn lasso_is_seed_deterministic() {
        let a = gen_lasso(10, 12, 3, 99).unwrap();
        let b = gen_lasso(10, 12, 3, 99).unwrap();
        assert_eq!(a.a, b.a);
        assert_eq!(a.b, b.b);
        assert_ne!(gen_lasso(10, 12, 3, 98).unwrap().b, a.b);
    }

    #[test]
    fn rpca_components() {
        let s = gen_rpca(20, 30, 3, 4).unwrap();
        let sv = crate::svd::singular_values(&s.low_rank).unwrap();
        let tol = 1e-10 * sv[0];
        assert_eq!(sv.iter().filter(|v| **v > tol).count(), 3);
        let nnz = s.sparse.as_col_major().iter().filter(|v| **v != 0.0).count();
        let frac = nnz as f64 / 600.0;
        assert!((frac - 0.05).abs() <= 0.005);
        let mag = s.low_rank.max_abs();
        assert!(s.sparse.as_col_major().iter().all(|v| *v == 0.0 || v.abs() == mag));
        assert!(gen_rpca(4, 5, 6, 0).is_err());
    }

    #[test]
    fn group_lasso_structure() {
        let data = gen_group_lasso_with(GroupSpec::new(vec![2, 3, 5, 4, 6]).unwrap(), 50, 3).unwrap();
        assert_eq!(data.features.rows(), 50);
        assert_eq!(data.features.cols(), 20);
        assert!(data.labels.iter().all(|z| *z == 1.0 || *z == -1.0));
        // one of five groups active
        assert!(data.x_true.iter().any(|v| *v != 0.0));
    }
}
