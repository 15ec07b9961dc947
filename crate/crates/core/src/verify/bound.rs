use crate::error::{Error, Result};
use crate::matrix::dot;
use crate::problems::SepCCSPInstance;

use super::SaddlePoint;

/// Lyapunov-type quantity of the convergence bound at `(x, y)` with dual
/// penalty `sigma`:
///
/// `(J/2K)||x - x*||^2_h + (1/2)||y - y*||^2_sigma - <y - y*, A(x - x*)>
///  + ((J-K)/K) (f(x) + <y*, A x> - f(x*) - <y*, A x*>)`.
///
/// At the starting point it is the constant `M(0)` of the gap bound.
#[allow(clippy::too_many_arguments)]
pub fn compute_m0(
    instance: &SepCCSPInstance,
    x0: &[f64],
    y0: &[f64],
    saddle: &SaddlePoint,
    h: &[f64],
    sigma0: &[f64],
    k: usize,
    num_blocks: usize,
) -> Result<f64> {
    let (xs, ys) = (&saddle.x_star, &saddle.y_star);
    if x0.len() != xs.len() || h.len() != xs.len() || y0.len() != ys.len() || sigma0.len() != ys.len()
    {
        return Err(Error::Input("vector lengths disagree".into()));
    }
    let (jf, kf) = (num_blocks as f64, k as f64);
    let dx: Vec<f64> = x0.iter().zip(xs).map(|(a, b)| a - b).collect();
    let dy: Vec<f64> = y0.iter().zip(ys).map(|(a, b)| a - b).collect();
    let primal: f64 = dx.iter().zip(h).map(|(d, h)| h * d * d).sum();
    let dual: f64 = dy.iter().zip(sigma0).map(|(d, s)| s * d * d).sum();
    let coupling = instance.coupling();
    let cross = dot(&dy, &coupling.apply(&dx));
    let mut total = jf / (2.0 * kf) * primal + 0.5 * dual - cross;
    if k != num_blocks {
        let gap = instance.f_value(x0)? + dot(ys, &coupling.apply(x0))
            - instance.f_value(xs)?
            - dot(ys, &coupling.apply(xs));
        total += (jf - kf) / kf * gap;
    }
    Ok(total)
}
