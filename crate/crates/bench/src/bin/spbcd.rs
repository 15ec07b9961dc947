use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spbcd_bench::trace::{columns, format_row};
use spbcd_bench::{
    compare, generate_problem, run_experiment, BenchError, ConfigMap, Metric, ProblemSpec, RunConfig,
};

#[derive(Parser)]
#[command(name = "spbcd", version, about = "Run and compare saddle-point solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic instance to a directory.
    Generate {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one solver and write its convergence trace.
    Run {
        /// `key = value` configuration file; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Trace CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run several configurations on the same instance and chart them.
    Compare {
        /// Configuration files, one per series.
        configs: Vec<PathBuf>,
        /// Expand the (single) configuration into one spbcd run per K.
        #[arg(long, value_delimiter = ',')]
        k_sweep: Vec<usize>,
        #[arg(long, value_enum, default_value_t = MetricArg::Objective)]
        metric: MetricArg,
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Objective,
    Residual,
}

#[derive(Args, Default)]
struct ProblemArgs {
    /// lasso, group-lasso, rpca or file
    #[arg(long)]
    problem: Option<String>,
    /// Instance directory for `--problem file`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reference_objective: Option<f64>,
}

#[derive(Args, Default)]
struct SolverArgs {
    /// spbcd, pdcp, preconditioned-pdcp, ista or fista
    #[arg(long)]
    solver: Option<String>,
    #[arg(long = "K", alias = "k")]
    k: Option<usize>,
    #[arg(long)]
    passes: Option<usize>,
    /// adaptive-l1 or block-spectral
    #[arg(long)]
    rule: Option<String>,
    #[arg(long)]
    sigma_override: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Sampling seed when it should differ from the problem seed.
    #[arg(long)]
    solver_seed: Option<u64>,
    #[arg(long)]
    label: Option<String>,
}

impl ProblemArgs {
    fn apply(&self, map: &mut ConfigMap) {
        let mut set = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                map.set(k, v);
            }
        };
        set("problem.kind", self.problem.clone());
        if let Some(dir) = &self.input {
            set("problem.dir", Some(dir.display().to_string()));
            if self.problem.is_none() {
                set("problem.kind", Some("file".into()));
            }
        }
        set("problem.m", self.m.map(|v| v.to_string()));
        set("problem.n", self.n.map(|v| v.to_string()));
        set("problem.d", self.d.map(|v| v.to_string()));
        set("problem.rank", self.rank.map(|v| v.to_string()));
        set("problem.lambda", self.lambda.map(|v| v.to_string()));
        set("problem.samples", self.samples.map(|v| v.to_string()));
        set("problem.seed", self.seed.map(|v| v.to_string()));
        set(
            "problem.reference_objective",
            self.reference_objective.map(|v| v.to_string()),
        );
    }
}

impl SolverArgs {
    fn apply(&self, map: &mut ConfigMap) {
        let mut set = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                map.set(k, v);
            }
        };
        set("solver.name", self.solver.clone());
        set("solver.K", self.k.map(|v| v.to_string()));
        set("solver.passes", self.passes.map(|v| v.to_string()));
        set("solver.rule", self.rule.clone());
        set("solver.sigma_override", self.sigma_override.map(|v| v.to_string()));
        set("solver.workers", self.workers.map(|v| v.to_string()));
        set("solver.seed", self.solver_seed.map(|v| v.to_string()));
        set("output.label", self.label.clone());
    }
}

fn load(path: Option<&PathBuf>, flags: &ConfigMap) -> Result<RunConfig, BenchError> {
    match path {
        Some(p) => RunConfig::from_file(p, flags),
        None => RunConfig::from_map(flags),
    }
}

fn execute(cli: Cli) -> Result<(), BenchError> {
    match cli.command {
        Command::Generate { problem, out } => {
            let mut flags = ConfigMap::new();
            problem.apply(&mut flags);
            let cfg = RunConfig::from_map(&flags)?;
            if matches!(cfg.problem, ProblemSpec::File { .. }) {
                return Err(BenchError::Config("generate needs a generator problem".into()));
            }
            let data = generate_problem(&cfg.problem, cfg.seed)?;
            data.save(&out, &[("seed", cfg.seed.to_string())])?;
            println!("wrote {} instance to {}", data.name(), out.display());
        }
        Command::Run {
            config,
            problem,
            solver,
            out,
        } => {
            let mut flags = ConfigMap::new();
            problem.apply(&mut flags);
            solver.apply(&mut flags);
            if let Some(o) = &out {
                flags.set("output.path", o.display());
            }
            let cfg = load(config.as_ref(), &flags)?;
            let run = run_experiment(&cfg)?;
            match &cfg.out {
                Some(path) => eprintln!("wrote {} rows to {}", run.records.len(), path.display()),
                None => {
                    for (k, v) in &run.header.entries {
                        println!("# {k}={v}");
                    }
                    let with_gap = run.records.first().is_some_and(|r| r.gap.is_some());
                    println!("{}", columns(with_gap));
                    for r in &run.records {
                        println!("{}", format_row(r));
                    }
                }
            }
        }
        Command::Compare {
            configs,
            k_sweep,
            metric,
            problem,
            solver,
            out_dir,
        } => {
            let mut flags = ConfigMap::new();
            problem.apply(&mut flags);
            solver.apply(&mut flags);
            let mut runs = Vec::new();
            if k_sweep.is_empty() {
                for path in &configs {
                    runs.push(RunConfig::from_file(path, &flags)?);
                }
            } else {
                if configs.len() > 1 {
                    return Err(BenchError::Config("--k-sweep takes at most one configuration".into()));
                }
                for k in k_sweep {
                    let mut f = flags.clone();
                    f.set("solver.K", k);
                    f.set("solver.name", "spbcd");
                    runs.push(load(configs.first(), &f)?);
                }
            }
            let metric = match metric {
                MetricArg::Objective => Metric::Objective,
                MetricArg::Residual => Metric::Residual,
            };
            let out = compare(&runs, &out_dir, metric)?;
            println!(
                "wrote {}, {} and {}",
                out.combined_csv.display(),
                out.by_pass_svg.display(),
                out.by_time_svg.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
