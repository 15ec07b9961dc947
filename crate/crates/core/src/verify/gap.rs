use crate::error::{Error, Result};
use crate::matrix::dot;
use crate::problems::{BlockFn, DualFn, SepCCSPInstance};

/// `G(x', y') = max_y L(x', y) - min_x L(x, y')`, with the inner
/// minimum optionally restricted to the box `|x_d| <= radius`.
///
/// Both inner problems are solved in closed form; an unbounded inner
/// minimum gives `+inf`. Constrained problems (linear conjugate) and
/// nuclear-norm blocks are refused.
pub fn saddle_gap(
    instance: &SepCCSPInstance,
    x: &[f64],
    y: &[f64],
    radius: Option<f64>,
) -> Result<f64> {
    if x.len() != instance.cols() || y.len() != instance.rows() {
        return Err(Error::Input("point does not match the instance".into()));
    }
    let coupling = instance.coupling();
    let ax = coupling.apply(x);
    let upper = primal_value(instance, x)? + conjugate_sup(instance.dual_fn(), &ax)?;
    let dual_term = match instance.dual_fn() {
        DualFn::Quadratic { b } => y.iter().zip(b).map(|(y, b)| 0.5 * y * y + b * y).sum(),
        DualFn::BoxLinear { c } => {
            if y.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Ok(f64::INFINITY);
            }
            c * y.iter().sum::<f64>()
        }
        DualFn::Linear { .. } => return refuse("linear conjugate"),
    };
    let s = coupling.apply_t(y);
    let p = instance.partition();
    let mut lower = -dual_term;
    for (j, f) in instance.block_fns().iter().enumerate() {
        lower += block_min(f, &s[p.range(j)], radius)?;
        if lower == f64::NEG_INFINITY {
            return Ok(f64::INFINITY);
        }
    }
    Ok(upper - lower)
}

fn refuse<T>(what: &str) -> Result<T> {
    Err(Error::Input(format!("saddle gap is unsupported for {what}")))
}

fn primal_value(instance: &SepCCSPInstance, x: &[f64]) -> Result<f64> {
    let p = instance.partition();
    let mut total = 0.0;
    for (j, f) in instance.block_fns().iter().enumerate() {
        let xj = &x[p.range(j)];
        total += match f {
            BlockFn::Zero => 0.0,
            BlockFn::L1 { weight } => weight * xj.iter().map(|v| v.abs()).sum::<f64>(),
            BlockFn::GroupL2 { weight } => weight * dot(xj, xj).sqrt(),
            BlockFn::QuadFrob => 0.5 * dot(xj, xj),
            BlockFn::Nuclear { .. } => return refuse("nuclear-norm blocks"),
        };
    }
    Ok(total)
}

/// `sup_y <y, s> - g*(y)`.
fn conjugate_sup(dual: &DualFn, s: &[f64]) -> Result<f64> {
    match dual {
        DualFn::Quadratic { b } => Ok(s.iter().zip(b).map(|(s, b)| 0.5 * (s - b) * (s - b)).sum()),
        DualFn::BoxLinear { c } => Ok(s.iter().map(|s| (s - c).max(0.0)).sum()),
        DualFn::Linear { .. } => refuse("linear conjugate"),
    }
}

/// `min_x f_j(x) + <s, x>` over `R^d` or the box.
fn block_min(f: &BlockFn, s: &[f64], radius: Option<f64>) -> Result<f64> {
    Ok(match (f, radius) {
        (BlockFn::Zero, None) => {
            if s.iter().all(|v| *v == 0.0) {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        }
        (BlockFn::Zero, Some(r)) => -r * s.iter().map(|v| v.abs()).sum::<f64>(),
        (BlockFn::L1 { weight }, None) => {
            if s.iter().all(|v| v.abs() <= *weight) {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        }
        (BlockFn::L1 { weight }, Some(r)) => {
            -r * s.iter().map(|v| (v.abs() - weight).max(0.0)).sum::<f64>()
        }
        (BlockFn::GroupL2 { weight }, None) => {
            if dot(s, s).sqrt() <= *weight {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        }
        (BlockFn::QuadFrob, None) => -0.5 * dot(s, s),
        (BlockFn::QuadFrob, Some(r)) => s
            .iter()
            .map(|v| {
                let x = (-v).clamp(-r, r);
                0.5 * x * x + v * x
            })
            .sum(),
        (BlockFn::GroupL2 { .. }, Some(_)) => return refuse("group blocks on a box"),
        (BlockFn::Nuclear { .. }, _) => return refuse("nuclear-norm blocks"),
    })
}
