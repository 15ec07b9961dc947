use super::{norm2, DenseMatrix};

/// Result of a power-iteration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Largest singular value of `a` by power iteration on `A^T A`.
///
/// The start vector is fixed: `v_d = 1 + ((d * 7919) mod 101) / 101`,
/// normalized. The run stops once the relative change of the estimate
/// drops below `tol / 10`; when `max_iters` is hit first the best estimate
/// is returned with `converged = false`.
pub fn spectral_norm_estimate(a: &DenseMatrix, tol: f64, max_iters: usize) -> SpectralEstimate {
    assert!(tol > 0.0, "tolerance must be positive");
    power_iteration(a.cols(), tol, max_iters, |v| a.matvec(v), |w| a.matvec_t(w))
}

pub(crate) fn power_iteration(
    n: usize,
    tol: f64,
    max_iters: usize,
    apply: impl Fn(&[f64]) -> Vec<f64>,
    apply_t: impl Fn(&[f64]) -> Vec<f64>,
) -> SpectralEstimate {
    let mut v: Vec<f64> = (0..n)
        .map(|d| 1.0 + ((d * 7919) % 101) as f64 / 101.0)
        .collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut estimate = 0.0_f64;
    for it in 1..=max_iters {
        let w = apply(&v);
        let value = norm2(&w);
        if value == 0.0 {
            return SpectralEstimate {
                value: 0.0,
                iterations: it,
                converged: true,
            };
        }
        let mut next = apply_t(&w);
        let nn = norm2(&next);
        next.iter_mut().for_each(|x| *x /= nn);
        v = next;
        let change = (value - estimate).abs();
        estimate = estimate.max(value);
        if change <= 0.1 * tol * value {
            return SpectralEstimate {
                value: estimate,
                iterations: it,
                converged: true,
            };
        }
    }
    SpectralEstimate {
        value: estimate,
        iterations: max_iters,
        converged: false,
    }
}
