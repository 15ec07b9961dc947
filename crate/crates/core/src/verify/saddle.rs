use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::baselines::{LassoView, Pdcp, ProxGradient};
use crate::error::{Error, Result};
use crate::matrix::norm2;
use crate::problems::{DualFn, SepCCSPInstance};
use crate::solver::IterativeSolver;

/// Approximate saddle point with the first-order residual it was accepted
/// with.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddlePoint {
    pub x_star: Vec<f64>,
    pub y_star: Vec<f64>,
    /// Worst perturbation violation divided by the perturbation radius.
    pub tolerance: f64,
}

const WINDOW: usize = 50;
const CHECK_RADIUS: f64 = 1e-3;
const CHECK_DIRECTIONS: usize = 64;

/// Largest decrease of `L(., y*)` or increase of `L(x*, .)` over random
/// perturbations of norm `radius`. Dual perturbations are projected back
/// onto the box for box-constrained conjugates. Non-positive at an exact
/// saddle point.
pub fn perturbation_violation(
    instance: &SepCCSPInstance,
    x: &[f64],
    y: &[f64],
    directions: usize,
    radius: f64,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = instance.lagrangian(x, y)?;
    let mut worst = f64::NEG_INFINITY;
    let direction = |len: usize, rng: &mut ChaCha8Rng| -> Vec<f64> {
        let d: Vec<f64> = (0..len).map(|_| StandardNormal.sample(rng)).collect();
        let n = norm2(&d).max(f64::MIN_POSITIVE);
        d.into_iter().map(|v| v * radius / n).collect()
    };
    for _ in 0..directions {
        let dx = direction(x.len(), &mut rng);
        let xp: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        worst = worst.max(base - instance.lagrangian(&xp, y)?);
        let dy = direction(y.len(), &mut rng);
        let mut yp: Vec<f64> = y.iter().zip(&dy).map(|(a, b)| a + b).collect();
        if instance.dual_fn().is_box() {
            yp.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
        }
        worst = worst.max(instance.lagrangian(x, &yp)? - base);
    }
    Ok(worst)
}

/// High-accuracy saddle point by a long run: accelerated proximal gradient
/// for Lasso, diagonally preconditioned primal-dual otherwise. Stops once
/// the objective moved by less than `tol` (relative) over the last 50
/// passes, and for constrained problems the relative constraint residual
/// is below `sqrt(tol)`.
pub fn reference_optimum(instance: &SepCCSPInstance, tol: f64) -> Result<SaddlePoint> {
    reference_optimum_capped(instance, tol, 1_000_000)
}

pub fn reference_optimum_capped(
    instance: &SepCCSPInstance,
    tol: f64,
    max_passes: usize,
) -> Result<SaddlePoint> {
    if !(tol > 0.0) {
        return Err(Error::Config("tolerance must be positive".into()));
    }
    let (x, y_run) = match LassoView::from_instance(instance) {
        Ok(view) => {
            let mut solver = ProxGradient::new(view, true);
            let objective = |s: &ProxGradient<'_>| Ok(view.objective(s.primal()));
            let (x, y) = drive(&mut solver, instance, tol, max_passes, objective)?;
            match polish_lasso(&view, &x) {
                Some(p) if view.objective(&p) <= view.objective(&x) => (p, y),
                _ => (x, y),
            }
        }
        Err(_) => {
            let mut solver = Pdcp::preconditioned(instance)?;
            let objective = |s: &Pdcp<'_>| instance.primal_objective(s.primal());
            drive(&mut solver, instance, tol, max_passes, objective)?
        }
    };
    let ax = instance.coupling().apply(&x);
    let y = match instance.dual_fn() {
        DualFn::Quadratic { .. } => instance
            .dual_fn()
            .maximizer(&ax, &y_run)
            .expect("quadratic conjugate has a unique maximizer"),
        _ => y_run,
    };
    let violation =
        perturbation_violation(instance, &x, &y, CHECK_DIRECTIONS, CHECK_RADIUS, 0x5add1e)?;
    let scale = 1.0 + instance.lagrangian(&x, &y)?.abs();
    let tolerance = violation.max(0.0) / CHECK_RADIUS;
    if tolerance > tol.sqrt() * scale {
        return Err(Error::Numeric(format!(
            "reference point fails the perturbation check: residual {tolerance:e} at objective scale {scale:e}"
        )));
    }
    Ok(SaddlePoint {
        x_star: x,
        y_star: y,
        tolerance,
    })
}

const POLISH_MAX_SUPPORT: usize = 400;

/// Re-solves the optimality conditions on the support and sign pattern of
/// `x` exactly. Returns `None` unless the result keeps the signs and the
/// off-support conditions hold.
fn polish_lasso(view: &LassoView<'_>, x: &[f64]) -> Option<Vec<f64>> {
    let support: Vec<usize> = (0..x.len()).filter(|&d| x[d] != 0.0).collect();
    let s = support.len();
    if s == 0 || s > POLISH_MAX_SUPPORT || s > view.a.rows() {
        return None;
    }
    let mut gram = vec![0.0; s * s];
    let mut rhs = vec![0.0; s];
    for (p, &dp) in support.iter().enumerate() {
        let cp = view.a.col(dp);
        for (q, &dq) in support.iter().enumerate().take(p + 1) {
            let v = crate::matrix::dot(cp, view.a.col(dq));
            gram[p * s + q] = v;
            gram[q * s + p] = v;
        }
        rhs[p] = crate::matrix::dot(cp, view.b) - view.lambda * x[dp].signum();
    }
    let xs = cholesky_solve(gram, rhs, s)?;
    if support.iter().zip(&xs).any(|(&d, v)| v.signum() != x[d].signum()) {
        return None;
    }
    let mut out = vec![0.0; x.len()];
    for (&d, v) in support.iter().zip(xs) {
        out[d] = v;
    }
    let r: Vec<f64> = view.a.matvec(&out).iter().zip(view.b).map(|(p, b)| p - b).collect();
    let grad = view.a.matvec_t(&r);
    let off_ok = (0..x.len())
        .filter(|d| out[*d] == 0.0)
        .all(|d| grad[d].abs() <= view.lambda * (1.0 + 1e-9));
    off_ok.then_some(out)
}

fn cholesky_solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 1e-12 * a[j * n + j].abs().max(f64::MIN_POSITIVE)) {
            return None;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / d;
        }
    }
    for i in 0..n {
        for k in 0..i {
            b[i] -= a[i * n + k] * b[k];
        }
        b[i] /= a[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            b[i] -= a[k * n + i] * b[k];
        }
        b[i] /= a[i * n + i];
    }
    Some(b)
}

fn drive<S: IterativeSolver>(
    solver: &mut S,
    instance: &SepCCSPInstance,
    tol: f64,
    max_passes: usize,
    objective: impl Fn(&S) -> Result<f64>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let constrained = matches!(instance.dual_fn(), DualFn::Linear { .. });
    let b_scale = match instance.dual_fn() {
        DualFn::Linear { b } => norm2(b).max(1.0),
        _ => 1.0,
    };
    let mut history = std::collections::VecDeque::with_capacity(WINDOW + 1);
    history.push_back(objective(solver)?);
    let mut last_change = f64::INFINITY;
    for pass in 1..=max_passes {
        for _ in 0..solver.iterations_per_pass() {
            solver.step()?;
        }
        let obj = objective(solver)?;
        history.push_back(obj);
        if history.len() > WINDOW + 1 {
            history.pop_front();
        }
        if history.len() == WINDOW + 1 {
            let old = history[0];
            last_change = (old - obj).abs() / obj.abs().max(f64::MIN_POSITIVE);
            if last_change < tol {
                let feasible = !constrained || {
                    let ax = instance.coupling().apply(solver.primal());
                    instance.dual_fn().maximizer_distance(&ax, solver.dual()) / b_scale
                        <= tol.sqrt()
                };
                if feasible {
                    log::debug!("{} reference converged after {pass} passes", solver.name());
                    return Ok((solver.primal().to_vec(), solver.dual().to_vec()));
                }
            }
        }
    }
    Err(Error::Numeric(format!(
        "{} did not reach relative change {tol:e} within {max_passes} passes (last change {last_change:e})",
        solver.name()
    )))
}
