//! Stochastic primal-dual block coordinate descent and the pass-level
//! driver shared with the baselines.

mod sampling;
mod spbcd;
mod state;
mod stepsize;

use std::time::{Duration, Instant};

pub use sampling::{sample_blocks, BlockSampler};
pub use spbcd::{
    dual_step, extrapolate, iterate_with, primal_block_step, sum_deltas, update_rbar,
    IterationPlan, SpBcd,
};
pub use state::SolverState;
pub use stepsize::{compute_sigma_t, StepsizeConfig, StepsizeRule, FLOOR_EPS};

use crate::error::{Error, Result};

/// Anything the pass driver can advance.
pub trait IterativeSolver {
    fn name(&self) -> &str;
    fn step(&mut self) -> Result<()>;
    /// Iterations that, together, touch every primal block once.
    fn iterations_per_pass(&self) -> usize;
    fn primal(&self) -> &[f64];
    fn dual(&self) -> &[f64];
    /// Hook run after each completed pass, inside the timed region.
    fn end_of_pass(&mut self, _pass: usize) -> Result<()> {
        Ok(())
    }
}

/// View handed to the per-pass callback.
pub struct PassInfo<'s> {
    pub pass: usize,
    pub iterations: usize,
    /// Solver time so far; callback time is excluded.
    pub elapsed: Duration,
    pub x: &'s [f64],
    pub y: &'s [f64],
}

#[derive(Debug)]
pub struct RunReport<M> {
    pub trace: Vec<M>,
    pub passes: usize,
    pub iterations: usize,
    pub elapsed: Duration,
    /// Set when the run stopped early; `trace` holds what was recorded
    /// before the failure.
    pub failure: Option<Error>,
}

impl<M> RunReport<M> {
    pub fn into_result(self) -> Result<Vec<M>> {
        match self.failure {
            Some(e) => Err(e),
            None => Ok(self.trace),
        }
    }
}

/// Advance `solver` for `passes` passes, calling `callback` after every
/// pass. The callback may stop the run by returning an error.
pub fn run_passes<S, M, F>(solver: &mut S, passes: usize, mut callback: F) -> RunReport<M>
where
    S: IterativeSolver + ?Sized,
    F: FnMut(&PassInfo<'_>) -> Result<M>,
{
    let mut report = RunReport {
        trace: Vec::new(),
        passes: 0,
        iterations: 0,
        elapsed: Duration::ZERO,
        failure: None,
    };
    if passes == 0 {
        report.failure = Some(Error::Config("pass budget must be at least 1".into()));
        return report;
    }
    let per_pass = solver.iterations_per_pass();
    let mut observe = |report: &mut RunReport<M>, solver: &S| -> bool {
        let info = PassInfo {
            pass: report.passes,
            iterations: report.iterations,
            elapsed: report.elapsed,
            x: solver.primal(),
            y: solver.dual(),
        };
        match callback(&info) {
            Ok(m) => {
                report.trace.push(m);
                true
            }
            Err(e) => {
                report.failure = Some(e);
                false
            }
        }
    };
    for pass in 1..=passes {
        let start = Instant::now();
        for _ in 0..per_pass {
            if let Err(e) = solver.step() {
                report.elapsed += start.elapsed();
                report.failure = Some(e);
                return report;
            }
            report.iterations += 1;
        }
        let hook = solver.end_of_pass(pass);
        report.elapsed += start.elapsed();
        report.passes = pass;
        if let Err(e) = hook {
            report.failure = Some(e);
            return report;
        }
        if !observe(&mut report, solver) {
            return report;
        }
    }
    report
}
