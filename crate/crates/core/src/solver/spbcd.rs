use rayon::prelude::*;

use super::sampling::BlockSampler;
use super::state::SolverState;
use super::stepsize::{preview, StepsizeConfig};
use super::IterativeSolver;
use crate::error::{Error, Result};
use crate::problems::SepCCSPInstance;

/// What one iteration touched.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationPlan {
    pub selected: Vec<usize>,
    pub sigma: Vec<f64>,
}

/// `x_j^new = prox_{f_j}(x_j - (A_j^T y) / h_j)` under the metric `h_j`.
pub fn primal_block_step(
    instance: &SepCCSPInstance,
    state: &SolverState,
    j: usize,
    h_j: &[f64],
) -> Result<Vec<f64>> {
    let range = instance.partition().range(j);
    let mut v = vec![0.0; range.len()];
    instance.coupling().block_apply_t(j, &state.y, &mut v);
    for ((vi, &xi), &hi) in v.iter_mut().zip(&state.x[range.clone()]).zip(h_j) {
        *vi = xi - *vi / hi;
    }
    instance.block_fns()[j].prox(&v, h_j)
}

/// `x_new + theta (x_new - x_old)`.
pub fn extrapolate(x_new: &[f64], x_old: &[f64], theta: f64) -> Vec<f64> {
    x_new
        .iter()
        .zip(x_old)
        .map(|(n, o)| n + theta * (n - o))
        .collect()
}

/// Sum of per-block contributions, accumulated in the order given (the
/// caller passes them by ascending block index).
pub fn sum_deltas(deltas: &[Vec<f64>], m: usize) -> Vec<f64> {
    let mut total = vec![0.0; m];
    for d in deltas {
        for (t, v) in total.iter_mut().zip(d) {
            *t += v;
        }
    }
    total
}

/// Dual resolvent at `u = r_bar + (J/K) delta_bar`.
pub fn dual_step(
    instance: &SepCCSPInstance,
    state: &SolverState,
    scale: f64,
    sigma: &[f64],
    delta_bar: &[f64],
) -> Vec<f64> {
    let u: Vec<f64> = state
        .r_bar
        .iter()
        .zip(delta_bar)
        .map(|(r, d)| r + scale * d)
        .collect();
    instance.dual_fn().resolvent(&state.y, &u, sigma)
}

/// `r_bar += delta_bar`.
pub fn update_rbar(r_bar: &mut [f64], delta_bar: &[f64]) {
    for (r, d) in r_bar.iter_mut().zip(delta_bar) {
        *r += d;
    }
}

struct BlockUpdate {
    x_new: Vec<f64>,
    x_bar_new: Vec<f64>,
    delta: Vec<f64>,
}

fn block_update(
    instance: &SepCCSPInstance,
    config: &StepsizeConfig,
    state: &SolverState,
    j: usize,
) -> Result<BlockUpdate> {
    let range = instance.partition().range(j);
    let x_new = primal_block_step(instance, state, j, &config.h[range.clone()])?;
    let x_bar_new = extrapolate(&x_new, &state.x[range.clone()], config.theta);
    let diff: Vec<f64> = x_bar_new
        .iter()
        .zip(&state.x_bar[range])
        .map(|(n, o)| n - o)
        .collect();
    let mut delta = vec![0.0; instance.rows()];
    instance.coupling().block_apply(j, &diff, &mut delta);
    Ok(BlockUpdate {
        x_new,
        x_bar_new,
        delta,
    })
}

/// One SP-BCD iteration on `state` with a pre-drawn block set.
///
/// Block updates may run on `pool`; their results are combined in
/// ascending block order, so the outcome does not depend on the pool size.
pub fn iterate_with(
    instance: &SepCCSPInstance,
    config: &StepsizeConfig,
    state: &mut SolverState,
    selected: &[usize],
    pool: Option<&rayon::ThreadPool>,
) -> Result<IterationPlan> {
    state.validate()?;
    if selected.len() != config.blocks_per_iter {
        return Err(Error::Input(format!(
            "{} blocks selected, configuration expects K = {}",
            selected.len(),
            config.blocks_per_iter
        )));
    }
    let sigma = config.sigma_for(instance, selected)?;
    let updates: Vec<BlockUpdate> = match pool {
        Some(pool) if selected.len() > 1 => pool.install(|| {
            selected
                .par_iter()
                .map(|&j| block_update(instance, config, state, j))
                .collect::<Result<Vec<_>>>()
        })?,
        _ => selected
            .iter()
            .map(|&j| block_update(instance, config, state, j))
            .collect::<Result<Vec<_>>>()?,
    };
    let mut delta_bar = vec![0.0; instance.rows()];
    for u in &updates {
        update_rbar(&mut delta_bar, &u.delta);
    }
    let scale = config.num_blocks as f64 / config.blocks_per_iter as f64;
    let y_new = dual_step(instance, state, scale, &sigma, &delta_bar);
    let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
    if !finite(&y_new) || updates.iter().any(|u| !finite(&u.x_bar_new)) {
        return Err(Error::Numeric(format!(
            "iteration {} produced non-finite values; the state is left at the last finite iterate",
            state.t + 1
        )));
    }

    let partition = instance.partition();
    for (&j, u) in selected.iter().zip(updates) {
        let range = partition.range(j);
        state.x[range.clone()].copy_from_slice(&u.x_new);
        state.x_bar[range].copy_from_slice(&u.x_bar_new);
    }
    state.y = y_new;
    update_rbar(&mut state.r_bar, &delta_bar);
    state.t += 1;
    Ok(IterationPlan {
        selected: selected.to_vec(),
        sigma,
    })
}

/// SP-BCD bound to an instance, a stepsize configuration, a seeded
/// sampler and an optional worker pool.
pub struct SpBcd<'a> {
    instance: &'a SepCCSPInstance,
    config: StepsizeConfig,
    sampler: BlockSampler,
    pool: Option<rayon::ThreadPool>,
    state: SolverState,
    last_plan: Option<IterationPlan>,
    warned_sigma_floor: bool,
}

impl<'a> SpBcd<'a> {
    pub fn new(
        instance: &'a SepCCSPInstance,
        config: StepsizeConfig,
        seed: u64,
        workers: usize,
    ) -> Result<Self> {
        let state = SolverState::zeros(instance)?;
        Self::with_state(instance, config, seed, workers, state)
    }

    pub fn with_state(
        instance: &'a SepCCSPInstance,
        config: StepsizeConfig,
        seed: u64,
        workers: usize,
        state: SolverState,
    ) -> Result<Self> {
        if config.h.len() != instance.cols() || config.num_blocks != instance.num_blocks() {
            return Err(Error::Config("stepsize configuration built for another instance".into()));
        }
        if state.x.len() != instance.cols() || state.y.len() != instance.rows() {
            return Err(Error::Input("state does not match the instance".into()));
        }
        state.validate()?;
        let pool = match workers {
            0 => return Err(Error::Config("at least one worker is required".into())),
            1 => None,
            w => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(w)
                    .build()
                    .map_err(|e| Error::Config(format!("thread pool: {e}")))?,
            ),
        };
        Ok(Self {
            instance,
            config,
            sampler: BlockSampler::new(seed),
            pool,
            state,
            last_plan: None,
            warned_sigma_floor: false,
        })
    }

    pub fn instance(&self) -> &SepCCSPInstance {
        self.instance
    }

    pub fn config(&self) -> &StepsizeConfig {
        &self.config
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut SolverState {
        &mut self.state
    }

    pub fn into_state(self) -> SolverState {
        self.state
    }

    pub fn last_plan(&self) -> Option<&IterationPlan> {
        self.last_plan.as_ref()
    }

    /// Draw a block set and take one iteration.
    pub fn iterate(&mut self) -> Result<&IterationPlan> {
        let selected = self
            .sampler
            .sample(self.config.num_blocks, self.config.blocks_per_iter)?;
        let plan = iterate_with(
            self.instance,
            &self.config,
            &mut self.state,
            &selected,
            self.pool.as_ref(),
        )?;
        if !self.warned_sigma_floor && self.config.sigma_override.is_none() {
            let floored: Vec<usize> = (0..plan.sigma.len())
                .filter(|&k| plan.sigma[k] <= self.config.floor_eps)
                .collect();
            if !floored.is_empty() {
                log::warn!(
                    "dual penalty floored at {:e} for {} row(s) at t = {}: {}",
                    self.config.floor_eps,
                    floored.len(),
                    self.state.t - 1,
                    preview(&floored)
                );
                self.warned_sigma_floor = true;
            }
        }
        Ok(self.last_plan.insert(plan))
    }
}

impl IterativeSolver for SpBcd<'_> {
    fn name(&self) -> &str {
        "spbcd"
    }

    fn step(&mut self) -> Result<()> {
        self.iterate().map(|_| ())
    }

    fn iterations_per_pass(&self) -> usize {
        self.config.iterations_per_pass()
    }

    fn primal(&self) -> &[f64] {
        &self.state.x
    }

    fn dual(&self) -> &[f64] {
        &self.state.y
    }

    fn end_of_pass(&mut self, pass: usize) -> Result<()> {
        if pass % RBAR_CHECK_PASSES == 0 {
            let drift = self.state.rbar_drift(self.instance);
            if drift > RBAR_DRIFT_TOL {
                log::warn!("cached A x_bar drifted by {drift:e} after {pass} passes; recomputing");
                self.state.refresh_rbar(self.instance);
            }
        }
        Ok(())
    }
}

const RBAR_CHECK_PASSES: usize = 100;
const RBAR_DRIFT_TOL: f64 = 1e-10;
