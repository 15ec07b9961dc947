use spbcd::baselines::{LassoView, Pdcp, PdcpConfig, ProxGradient};
use spbcd::problems::{
    gen_group_lasso_with, BlockFn, gen_lasso, gen_rpca, make_group_lasso_hinge, make_lasso, make_rpca,
    rpca_default_weights, GroupSpec, ProblemData, ProblemKind, SepCCSPInstance,
};
use spbcd::solver::{run_passes, IterativeSolver, SpBcd, StepsizeConfig};
use spbcd::verify::saddle_gap;

use crate::config::{ProblemSpec, RunConfig, SolverKind};
use crate::error::{config_err, BenchError, Result};
use crate::trace::{TraceHeader, TraceRecord, TraceWriter};

/// Largest primal dimension for which traces carry the exact saddle gap.
pub const GAP_MAX_DIM: usize = 64;

/// Raw data for a generator spec; for `generate` and instance building.
pub fn generate_problem(spec: &ProblemSpec, seed: u64) -> Result<ProblemData> {
    Ok(match spec {
        ProblemSpec::Lasso { m, n, d } => {
            let data = gen_lasso(*m, *n, *d, seed)?;
            ProblemData::Lasso { a: data.a, b: data.b, lambda: data.lambda }
        }
        ProblemSpec::Rpca { m, n, rank } => {
            let sample = gen_rpca(*m, *n, *rank, seed)?;
            let (mu2, mu3) = rpca_default_weights(&sample.observation);
            ProblemData::Rpca { observation: sample.observation, mu2, mu3 }
        }
        ProblemSpec::GroupLasso { lambda, samples } => {
            let data = gen_group_lasso_with(GroupSpec::splice_site(), *samples, seed)?;
            ProblemData::GroupLasso {
                features: data.features,
                labels: data.labels,
                groups: data.groups,
                lambda: *lambda,
            }
        }
        ProblemSpec::File { dir } => ProblemData::load(dir)?.0,
    })
}

pub fn build_instance(cfg: &RunConfig) -> Result<SepCCSPInstance> {
    let inst = match (&cfg.problem, generate_problem(&cfg.problem, cfg.seed)?) {
        (_, ProblemData::Lasso { a, b, lambda }) => make_lasso(a, b, lambda)?,
        (_, ProblemData::Rpca { observation, mu2, mu3 }) => make_rpca(&observation, mu2, mu3)?,
        (_, ProblemData::GroupLasso { features, labels, groups, lambda }) => {
            make_group_lasso_hinge(&features, &labels, &groups, lambda)?
        }
    };
    Ok(match cfg.reference_objective {
        Some(r) => inst.with_reference_objective(r),
        None => inst,
    })
}

pub fn make_solver<'a>(
    cfg: &RunConfig,
    instance: &'a SepCCSPInstance,
) -> Result<Box<dyn IterativeSolver + 'a>> {
    Ok(match cfg.solver {
        SolverKind::SpBcd => {
            let mut steps = StepsizeConfig::new(instance, cfg.rule, cfg.k)?;
            if let Some(s) = cfg.sigma_override {
                steps = steps.with_sigma_override(s)?;
            }
            Box::new(SpBcd::new(instance, steps, cfg.sampling_seed(), cfg.workers)?)
        }
        SolverKind::Pdcp => Box::new(Pdcp::new(instance, PdcpConfig::balanced(instance))?),
        SolverKind::PreconditionedPdcp => Box::new(Pdcp::preconditioned(instance)?),
        SolverKind::Ista | SolverKind::Fista => {
            let view = LassoView::from_instance(instance)
                .map_err(|_| BenchError::Config(format!("{} only runs on Lasso", cfg.solver)))?;
            Box::new(ProxGradient::new(view, cfg.solver == SolverKind::Fista))
        }
    })
}

/// Whether traces for this instance include the saddle gap column.
pub fn gap_supported(instance: &SepCCSPInstance) -> bool {
    gap_radius(instance).is_some()
}

/// Half-width of the box over which the trace gap is taken.
///
/// Any point with `F(x) <= F(0)` satisfies `weight * |x_d| <= F(0)`, so the
/// box holds every minimizer and the gap stays finite off the optimum.
pub fn gap_radius(instance: &SepCCSPInstance) -> Option<f64> {
    if instance.kind() != ProblemKind::Lasso || instance.cols() > GAP_MAX_DIM {
        return None;
    }
    let mut min_weight = f64::INFINITY;
    for f in instance.block_fns() {
        match f {
            BlockFn::L1 { weight } => min_weight = min_weight.min(*weight),
            _ => return None,
        }
    }
    let f0 = instance.primal_objective(&vec![0.0; instance.cols()]).ok()?;
    let r = f0 / min_weight;
    (r.is_finite() && r > 0.0).then_some(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub label: String,
    pub header: TraceHeader,
    pub records: Vec<TraceRecord>,
}

pub fn trace_header(cfg: &RunConfig, instance: &SepCCSPInstance) -> TraceHeader {
    let mut h = TraceHeader::default();
    h.push("seed", cfg.sampling_seed());
    h.push("solver", cfg.solver);
    let k = match cfg.solver {
        SolverKind::SpBcd => cfg.k,
        _ => instance.num_blocks(),
    };
    h.push("K", k);
    h.push("problem", cfg.problem.name());
    h.push("problem_seed", cfg.seed);
    if cfg.solver == SolverKind::SpBcd {
        h.push("rule", cfg.rule.name());
        if let Some(s) = cfg.sigma_override {
            h.push("sigma_override", s);
        }
    }
    h.push("passes", cfg.passes);
    h
}

/// Builds the instance, runs the configured solver and, when `cfg.out` is
/// set, streams the trace to that file.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunOutput> {
    let instance = build_instance(cfg)?;
    run_on_instance(cfg, &instance)
}

pub fn run_on_instance(cfg: &RunConfig, instance: &SepCCSPInstance) -> Result<RunOutput> {
    let mut solver = make_solver(cfg, instance)?;
    let header = trace_header(cfg, instance);
    let radius = gap_radius(instance);
    let with_gap = radius.is_some();
    let mut writer = match &cfg.out {
        Some(path) => Some(TraceWriter::create(path, &header, with_gap)?),
        None => None,
    };
    let report = run_passes(solver.as_mut(), cfg.passes, |info| {
        let record = TraceRecord {
            pass: info.pass,
            elapsed_ms: info.elapsed.as_secs_f64() * 1e3,
            objective: instance.primal_objective(info.x)?,
            residual: instance.residual(info.x, info.y)?,
            gap: match radius {
                Some(r) => Some(saddle_gap(instance, info.x, info.y, Some(r))?),
                None => None,
            },
        };
        if let Some(w) = writer.as_mut() {
            w.write(&record).map_err(|e| match e {
                BenchError::Io(io) => spbcd::Error::Io(io),
                other => spbcd::Error::Numeric(other.to_string()),
            })?;
        }
        Ok(record)
    });
    if let Some(source) = report.failure {
        return Err(match source {
            spbcd::Error::Io(e) => BenchError::Io(e),
            source => BenchError::Solver {
                passes: report.passes,
                path: cfg.out.clone(),
                source,
            },
        });
    }
    if report.trace.len() != cfg.passes {
        return config_err("trace length disagrees with the pass budget");
    }
    Ok(RunOutput {
        label: cfg.display_label(),
        header,
        records: report.trace,
    })
}
