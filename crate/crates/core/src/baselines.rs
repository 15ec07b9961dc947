//! Reference solvers: full-dual primal-dual (fixed and diagonally
//! preconditioned penalties) and proximal gradient for Lasso.

use crate::error::{Error, Result};
use crate::matrix::{dot, spectral_norm_estimate, DenseMatrix};
use crate::problems::{BlockFn, DualFn, SepCCSPInstance};
use crate::prox;
use crate::solver::{IterativeSolver, FLOOR_EPS};

/// Scalar penalties for the full primal-dual method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdcpConfig {
    pub h: f64,
    pub sigma: f64,
    pub theta: f64,
}

impl PdcpConfig {
    /// `h = sigma = ||A||`, `theta = 1`.
    pub fn balanced(instance: &SepCCSPInstance) -> Self {
        let norm = instance.coupling().spectral_norm();
        Self {
            h: norm,
            sigma: norm,
            theta: 1.0,
        }
    }

    /// Requires `h sigma >= ||A||^2` and `theta` in `[0, 1]`.
    pub fn validate(&self, instance: &SepCCSPInstance) -> Result<()> {
        let norm = instance.coupling().spectral_norm();
        if !(self.h > 0.0 && self.sigma > 0.0 && self.h.is_finite() && self.sigma.is_finite()) {
            return Err(Error::Config("penalties must be positive and finite".into()));
        }
        if self.h * self.sigma < norm * norm * (1.0 - 1e-9) {
            return Err(Error::Config(format!(
                "h * sigma = {:e} is below ||A||^2 = {:e}",
                self.h * self.sigma,
                norm * norm
            )));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::Config(format!("theta = {} must lie in [0, 1]", self.theta)));
        }
        Ok(())
    }
}

/// State of the full primal-dual method.
#[derive(Debug, Clone, PartialEq)]
pub struct PdcpState {
    pub x: Vec<f64>,
    pub x_bar: Vec<f64>,
    pub y: Vec<f64>,
}

impl PdcpState {
    pub fn new(instance: &SepCCSPInstance, x0: Vec<f64>, y0: Vec<f64>) -> Result<Self> {
        if x0.len() != instance.cols() || y0.len() != instance.rows() {
            return Err(Error::Input("initial point does not match the instance".into()));
        }
        if x0.iter().chain(&y0).any(|v| !v.is_finite()) {
            return Err(Error::Input("initial point is not finite".into()));
        }
        Ok(Self {
            x_bar: x0.clone(),
            x: x0,
            y: y0,
        })
    }
}

fn full_prox(instance: &SepCCSPInstance, v: &[f64], h: &[f64]) -> Result<Vec<f64>> {
    let p = instance.partition();
    let mut out = Vec::with_capacity(v.len());
    for (j, f) in instance.block_fns().iter().enumerate() {
        out.extend(f.prox(&v[p.range(j)], &h[p.range(j)])?);
    }
    Ok(out)
}

/// Dual step first, then primal:
/// `y+ = res(y, A x_bar)`, `x+ = prox(x - A^T y+ / h)`,
/// `x_bar+ = x+ + theta (x+ - x)`.
fn pd_iterate(
    instance: &SepCCSPInstance,
    h: &[f64],
    sigma: &[f64],
    theta: f64,
    state: &mut PdcpState,
) -> Result<()> {
    let coupling = instance.coupling();
    let u = coupling.apply(&state.x_bar);
    let y_new = instance.dual_fn().resolvent(&state.y, &u, sigma);
    let g = coupling.apply_t(&y_new);
    let v: Vec<f64> = state
        .x
        .iter()
        .zip(&g)
        .zip(h)
        .map(|((x, g), h)| x - g / h)
        .collect();
    let x_new = full_prox(instance, &v, h)?;
    state.x_bar = x_new
        .iter()
        .zip(&state.x)
        .map(|(n, o)| n + theta * (n - o))
        .collect();
    state.x = x_new;
    state.y = y_new;
    if state.x.iter().chain(&state.y).any(|v| !v.is_finite()) {
        return Err(Error::Numeric("primal-dual iterate became non-finite".into()));
    }
    Ok(())
}

/// One iteration with scalar penalties.
pub fn pdcp_iterate(
    instance: &SepCCSPInstance,
    config: &PdcpConfig,
    state: &mut PdcpState,
) -> Result<()> {
    let h = vec![config.h; instance.cols()];
    let sigma = vec![config.sigma; instance.rows()];
    pd_iterate(instance, &h, &sigma, config.theta, state)
}

/// Diagonal penalties `h_d = sum_k |A_kd|`, `sigma_k = sum_d |A_kd|`
/// (floored), with blocks whose prox needs a scalar metric using their
/// largest `h_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreconditionedConfig {
    pub h: Vec<f64>,
    pub sigma: Vec<f64>,
    pub theta: f64,
}

impl PreconditionedConfig {
    pub fn new(instance: &SepCCSPInstance) -> Result<Self> {
        let coupling = instance.coupling();
        let mut h: Vec<f64> = coupling
            .col_abs_sums()
            .iter()
            .map(|v| v.max(FLOOR_EPS))
            .collect();
        let p = instance.partition();
        for (j, f) in instance.block_fns().iter().enumerate() {
            if !f.is_separable() {
                let top = h[p.range(j)].iter().cloned().fold(0.0, f64::max);
                h[p.range(j)].fill(top);
            }
        }
        let all: Vec<usize> = (0..instance.num_blocks()).collect();
        let sigma = coupling
            .row_abs_sums_over_blocks(&all)?
            .into_iter()
            .map(|v| v.max(FLOOR_EPS))
            .collect();
        Ok(Self {
            h,
            sigma,
            theta: 1.0,
        })
    }
}

pub fn preconditioned_pdcp_iterate(
    instance: &SepCCSPInstance,
    config: &PreconditionedConfig,
    state: &mut PdcpState,
) -> Result<()> {
    pd_iterate(instance, &config.h, &config.sigma, config.theta, state)
}

/// Full primal-dual method as a pass-driven solver (one iteration per pass).
pub struct Pdcp<'a> {
    instance: &'a SepCCSPInstance,
    h: Vec<f64>,
    sigma: Vec<f64>,
    theta: f64,
    preconditioned: bool,
    pub state: PdcpState,
}

impl<'a> Pdcp<'a> {
    pub fn new(instance: &'a SepCCSPInstance, config: PdcpConfig) -> Result<Self> {
        config.validate(instance)?;
        Ok(Self {
            instance,
            h: vec![config.h; instance.cols()],
            sigma: vec![config.sigma; instance.rows()],
            theta: config.theta,
            preconditioned: false,
            state: PdcpState::new(
                instance,
                vec![0.0; instance.cols()],
                vec![0.0; instance.rows()],
            )?,
        })
    }

    pub fn preconditioned(instance: &'a SepCCSPInstance) -> Result<Self> {
        let cfg = PreconditionedConfig::new(instance)?;
        Ok(Self {
            instance,
            h: cfg.h,
            sigma: cfg.sigma,
            theta: cfg.theta,
            preconditioned: true,
            state: PdcpState::new(
                instance,
                vec![0.0; instance.cols()],
                vec![0.0; instance.rows()],
            )?,
        })
    }
}

impl IterativeSolver for Pdcp<'_> {
    fn name(&self) -> &str {
        if self.preconditioned {
            "pdcp-precond"
        } else {
            "pdcp"
        }
    }

    fn step(&mut self) -> Result<()> {
        pd_iterate(self.instance, &self.h, &self.sigma, self.theta, &mut self.state)
    }

    fn iterations_per_pass(&self) -> usize {
        1
    }

    fn primal(&self) -> &[f64] {
        &self.state.x
    }

    fn dual(&self) -> &[f64] {
        &self.state.y
    }
}

/// Lasso data borrowed from an instance built by `make_lasso`.
#[derive(Debug, Clone, Copy)]
pub struct LassoView<'a> {
    pub a: &'a DenseMatrix,
    pub b: &'a [f64],
    pub lambda: f64,
}

impl<'a> LassoView<'a> {
    pub fn from_instance(instance: &'a SepCCSPInstance) -> Result<Self> {
        let refuse = || Error::Config("proximal gradient needs a Lasso instance".into());
        let a = instance.coupling().as_dense().ok_or_else(refuse)?;
        let b = match instance.dual_fn() {
            DualFn::Quadratic { b } => b.as_slice(),
            _ => return Err(refuse()),
        };
        let mut lambda = None;
        for f in instance.block_fns() {
            match (f, lambda) {
                (BlockFn::L1 { weight }, None) => lambda = Some(*weight),
                (BlockFn::L1 { weight }, Some(l)) if *weight == l => {}
                _ => return Err(refuse()),
            }
        }
        Ok(Self {
            a,
            b,
            lambda: lambda.ok_or_else(refuse)?,
        })
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let r: Vec<f64> = self.a.matvec(x).iter().zip(self.b).map(|(p, b)| p - b).collect();
        0.5 * dot(&r, &r) + self.lambda * x.iter().map(|v| v.abs()).sum::<f64>()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let r: Vec<f64> = self.a.matvec(x).iter().zip(self.b).map(|(p, b)| p - b).collect();
        self.a.matvec_t(&r)
    }
}

/// `1.01 ||A||^2` with the norm estimated by power iteration to `1e-6`.
pub fn lasso_lipschitz(a: &DenseMatrix) -> f64 {
    let est = spectral_norm_estimate(a, 1e-6, 10_000);
    1.01 * est.value * est.value
}

/// `x+ = soft(x - grad / L, lambda / L)`.
pub fn ista_step(problem: &LassoView<'_>, lipschitz: f64, x: &[f64]) -> Vec<f64> {
    let g = problem.gradient(x);
    let v: Vec<f64> = x.iter().zip(&g).map(|(x, g)| x - g / lipschitz).collect();
    let t = vec![problem.lambda / lipschitz; v.len()];
    prox::prox_l1(&v, &t)
}

/// Proximal gradient, plain or accelerated.
pub struct ProxGradient<'a> {
    problem: LassoView<'a>,
    lipschitz: f64,
    accelerated: bool,
    x: Vec<f64>,
    z: Vec<f64>,
    momentum: f64,
    y: Vec<f64>,
}

impl<'a> ProxGradient<'a> {
    pub fn new(problem: LassoView<'a>, accelerated: bool) -> Self {
        let n = problem.a.cols();
        let lipschitz = lasso_lipschitz(problem.a);
        Self {
            problem,
            lipschitz,
            accelerated,
            x: vec![0.0; n],
            z: vec![0.0; n],
            momentum: 1.0,
            y: problem.b.iter().map(|b| -b).collect(),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }
}

impl IterativeSolver for ProxGradient<'_> {
    fn name(&self) -> &str {
        if self.accelerated {
            "fista"
        } else {
            "ista"
        }
    }

    fn step(&mut self) -> Result<()> {
        if self.accelerated {
            let x_new = ista_step(&self.problem, self.lipschitz, &self.z);
            let t_new = 0.5 * (1.0 + (1.0 + 4.0 * self.momentum * self.momentum).sqrt());
            let beta = (self.momentum - 1.0) / t_new;
            self.z = x_new
                .iter()
                .zip(&self.x)
                .map(|(n, o)| n + beta * (n - o))
                .collect();
            self.x = x_new;
            self.momentum = t_new;
        } else {
            self.x = ista_step(&self.problem, self.lipschitz, &self.x);
        }
        if self.x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("proximal gradient iterate became non-finite".into()));
        }
        self.y = self
            .problem
            .a
            .matvec(&self.x)
            .iter()
            .zip(self.problem.b)
            .map(|(p, b)| p - b)
            .collect();
        Ok(())
    }

    fn iterations_per_pass(&self) -> usize {
        1
    }

    fn primal(&self) -> &[f64] {
        &self.x
    }

    /// `A x - b`, the dual point paired with `x`.
    fn dual(&self) -> &[f64] {
        &self.y
    }
}

/// FISTA for `iterations` steps from zero; returns the final iterate
/// and the objective after each step.
pub fn fista_run(problem: &LassoView<'_>, iterations: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut solver = ProxGradient::new(*problem, true);
    let mut objectives = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        solver.step()?;
        objectives.push(problem.objective(&solver.x));
    }
    Ok((solver.x, objectives))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_lasso, make_lasso};

    #[test]
    fn pdcp_rejects_small_penalties() {
        let data = gen_lasso(20, 30, 5, 1).unwrap();
        let inst = make_lasso(data.a, data.b, data.lambda).unwrap();
        let mut cfg = PdcpConfig::balanced(&inst);
        assert!(cfg.validate(&inst).is_ok());
        cfg.sigma *= 0.5;
        assert!(Pdcp::new(&inst, cfg).is_err());
    }

    #[test]
    fn ista_and_fista_decrease_lasso_objective() {
        let data = gen_lasso(30, 60, 5, 3).unwrap();
        let inst = make_lasso(data.a.clone(), data.b.clone(), data.lambda).unwrap();
        let view = LassoView::from_instance(&inst).unwrap();
        let start = view.objective(&vec![0.0; 60]);
        let mut ista = ProxGradient::new(view, false);
        let mut prev = start;
        for _ in 0..200 {
            ista.step().unwrap();
            let obj = view.objective(ista.x());
            assert!(obj <= prev + 1e-12);
            prev = obj;
        }
        let (_, fista) = fista_run(&view, 200).unwrap();
        assert!(*fista.last().unwrap() <= prev + 1e-9);
    }

    #[test]
    fn pdcp_and_preconditioned_reach_fista_objective() {
        let data = gen_lasso(30, 60, 5, 4).unwrap();
        let inst = make_lasso(data.a.clone(), data.b.clone(), data.lambda).unwrap();
        let view = LassoView::from_instance(&inst).unwrap();
        let (_, objs) = fista_run(&view, 5000).unwrap();
        let best = *objs.last().unwrap();
        for mut solver in [
            Pdcp::new(&inst, PdcpConfig::balanced(&inst)).unwrap(),
            Pdcp::preconditioned(&inst).unwrap(),
        ] {
            for _ in 0..20000 {
                solver.step().unwrap();
            }
            let obj = view.objective(solver.primal());
            assert!((obj - best).abs() <= 1e-6 * best, "{} {obj} vs {best}", solver.name());
        }
    }
}
