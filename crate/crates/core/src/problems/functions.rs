use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::prox;
use crate::svd;

/// Block term `f_j` of the separable primal objective.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockFn {
    Zero,
    /// `weight * ||x||_1`
    L1 { weight: f64 },
    /// `weight * ||x||_2`
    GroupL2 { weight: f64 },
    /// `(1/2) ||x||^2`
    QuadFrob,
    /// `weight * ||X||_*` with `x = vec(X)` in column-major order.
    Nuclear { weight: f64, rows: usize, cols: usize },
}

impl BlockFn {
    /// Whether the prox splits per coordinate, so that it accepts a
    /// non-uniform diagonal metric.
    pub fn is_separable(&self) -> bool {
        matches!(self, BlockFn::Zero | BlockFn::L1 { .. } | BlockFn::QuadFrob)
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            BlockFn::Zero => 0.0,
            BlockFn::L1 { weight } => weight * x.iter().map(|v| v.abs()).sum::<f64>(),
            BlockFn::GroupL2 { weight } => weight * x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            BlockFn::QuadFrob => 0.5 * x.iter().map(|v| v * v).sum::<f64>(),
            BlockFn::Nuclear { weight, rows, cols } => {
                let m = DenseMatrix::from_col_major(*rows, *cols, x.to_vec())?;
                weight * svd::singular_values(&m)?.iter().sum::<f64>()
            }
        })
    }

    /// `argmin_x f(x) + (1/2)||x - v||^2_diag(h)`.
    ///
    /// Non-separable terms read the penalty from `h[0]`; the caller passes a
    /// constant vector for them.
    pub fn prox(&self, v: &[f64], h: &[f64]) -> Result<Vec<f64>> {
        debug_assert_eq!(v.len(), h.len());
        Ok(match self {
            BlockFn::Zero => v.to_vec(),
            BlockFn::L1 { weight } => v
                .iter()
                .zip(h)
                .map(|(&x, &hd)| prox::soft_threshold(x, weight / hd))
                .collect(),
            BlockFn::QuadFrob => v
                .iter()
                .zip(h)
                .map(|(&x, &hd)| x * hd / (1.0 + hd))
                .collect(),
            BlockFn::GroupL2 { weight } => prox::prox_group_l2(v, weight / h[0]),
            BlockFn::Nuclear { weight, rows, cols } => {
                let m = DenseMatrix::from_col_major(*rows, *cols, v.to_vec())?;
                prox::prox_nuclear(&m, weight / h[0])?.into_col_major()
            }
        })
    }

    pub(crate) fn check_size(&self, len: usize) -> Result<()> {
        if let BlockFn::Nuclear { rows, cols, .. } = self {
            if rows * cols != len {
                return Err(Error::Config(format!(
                    "nuclear-norm block of shape {rows}x{cols} assigned to a block of {len} coordinates"
                )));
            }
        }
        let weight = match self {
            BlockFn::L1 { weight } | BlockFn::GroupL2 { weight } | BlockFn::Nuclear { weight, .. } => {
                *weight
            }
            _ => 0.0,
        };
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(Error::Config(format!("block weight {weight} must be finite and >= 0")));
        }
        Ok(())
    }
}

/// Conjugate term `g*` of the saddle function.
#[derive(Debug, Clone, PartialEq)]
pub enum DualFn {
    /// `g*(y) = <y, b>` (multipliers of `A x = b`).
    Linear { b: Vec<f64> },
    /// `g*(y) = sum (y_k^2 / 2 + b_k y_k)`, conjugate of `(1/2)||u - b||^2`.
    Quadratic { b: Vec<f64> },
    /// `g*(y) = c sum y_k` on `[0, 1]^m`, `+inf` outside. The hinge loss
    /// with the `1/N` scaling uses `c = -1/N`.
    BoxLinear { c: f64 },
}

impl DualFn {
    pub(crate) fn check_size(&self, m: usize) -> Result<()> {
        match self {
            DualFn::Linear { b } | DualFn::Quadratic { b } if b.len() != m => Err(Error::Config(
                format!("dual data has length {}, coupling has {m} rows", b.len()),
            )),
            DualFn::BoxLinear { c } if !c.is_finite() => {
                Err(Error::Config("box coefficient must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// `g*(y)`; `+inf` outside the domain.
    pub fn value(&self, y: &[f64]) -> f64 {
        match self {
            DualFn::Linear { b } => crate::matrix::dot(y, b),
            DualFn::Quadratic { b } => y
                .iter()
                .zip(b)
                .map(|(yk, bk)| 0.5 * yk * yk + bk * yk)
                .sum(),
            DualFn::BoxLinear { c } => {
                if y.iter().all(|v| (0.0..=1.0).contains(v)) {
                    c * y.iter().sum::<f64>()
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `argmin_y g*(y) - <y, u> + (1/2)||y - y_prev||^2_diag(sigma)`.
    pub fn resolvent(&self, y_prev: &[f64], u: &[f64], sigma: &[f64]) -> Vec<f64> {
        match self {
            DualFn::Linear { b } => prox::dual_resolvent_linear(y_prev, u, b, sigma),
            DualFn::Quadratic { b } => prox::dual_resolvent_quadratic(y_prev, u, b, sigma),
            DualFn::BoxLinear { c } => prox::dual_resolvent_box_linear(y_prev, u, *c, sigma),
        }
    }

    /// `g(s) = sup_y <y, s> - g*(y)`.
    pub fn conjugate(&self, s: &[f64]) -> f64 {
        match self {
            DualFn::Linear { b } => {
                if s.iter().zip(b).all(|(x, y)| x == y) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            DualFn::Quadratic { b } => 0.5 * s.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>(),
            DualFn::BoxLinear { c } => s.iter().map(|x| (x - c).max(0.0)).sum(),
        }
    }

    /// Maximizer of `<y, s> - g*(y)` where it is unique. For the box on
    /// ties (`s_k = c`) the coordinate of `fallback` is kept, clipped to the box.
    pub fn maximizer(&self, s: &[f64], fallback: &[f64]) -> Option<Vec<f64>> {
        match self {
            DualFn::Linear { .. } => None,
            DualFn::Quadratic { b } => Some(s.iter().zip(b).map(|(x, y)| x - y).collect()),
            DualFn::BoxLinear { c } => Some(
                s.iter()
                    .zip(fallback)
                    .map(|(x, f)| {
                        if *x > *c {
                            1.0
                        } else if *x < *c {
                            0.0
                        } else {
                            f.clamp(0.0, 1.0)
                        }
                    })
                    .collect(),
            ),
        }
    }

    /// Distance from `y` to the set of maximizers of `<y, s> - g*(y)`.
    pub fn maximizer_distance(&self, s: &[f64], y: &[f64]) -> f64 {
        match self {
            DualFn::Linear { b } => s
                .iter()
                .zip(b)
                .map(|(x, bk)| (x - bk).powi(2))
                .sum::<f64>()
                .sqrt(),
            DualFn::Quadratic { .. } | DualFn::BoxLinear { .. } => {
                let best = self.maximizer(s, y).expect("unique up to ties");
                best.iter()
                    .zip(y)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            }
        }
    }

    pub fn is_box(&self) -> bool {
        matches!(self, DualFn::BoxLinear { .. })
    }
}
