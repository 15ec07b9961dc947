use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::{config_err, Result};
use crate::experiment::{build_instance, run_on_instance, RunOutput};
use crate::svg::{render_svg, AxisSpec, Series};
use crate::trace::{columns, format_row, TraceRecord};

/// Quantity on the vertical axis of comparison charts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Objective,
    Residual,
}

impl Metric {
    fn pick(self, r: &TraceRecord) -> f64 {
        match self {
            Metric::Objective => r.objective,
            Metric::Residual => r.residual,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Metric::Objective => "objective",
            Metric::Residual => "residual",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompareOutput {
    pub runs: Vec<RunOutput>,
    pub combined_csv: PathBuf,
    pub by_pass_svg: PathBuf,
    pub by_time_svg: PathBuf,
}

/// Runs every configuration on one shared instance and writes
/// `combined.csv`, `<metric>_by_pass.svg` and `<metric>_by_time.svg` into
/// `out_dir`.
pub fn compare(configs: &[RunConfig], out_dir: &Path, metric: Metric) -> Result<CompareOutput> {
    if configs.len() < 2 {
        return config_err("compare needs at least two configurations");
    }
    let first = &configs[0];
    for c in &configs[1..] {
        if c.problem != first.problem || c.seed != first.seed || c.reference_objective != first.reference_objective {
            return config_err(format!(
                "configurations disagree on the problem ({} seed {} vs {} seed {})",
                first.problem.name(),
                first.seed,
                c.problem.name(),
                c.seed
            ));
        }
    }
    let instance = build_instance(first)?;
    let mut runs = Vec::with_capacity(configs.len());
    let mut seen = BTreeSet::new();
    for (i, cfg) in configs.iter().enumerate() {
        let mut cfg = cfg.clone();
        cfg.out = None;
        let mut label = cfg.display_label();
        if !seen.insert(label.clone()) {
            label = format!("{label}#{i}");
            seen.insert(label.clone());
        }
        cfg.label = Some(label);
        log::info!("running {}", cfg.display_label());
        runs.push(run_on_instance(&cfg, &instance)?);
    }
    fs::create_dir_all(out_dir)?;

    let with_gap = runs.iter().all(|r| r.records.iter().all(|x| x.gap.is_some()));
    let mut csv = String::new();
    let _ = writeln!(csv, "# problem={}", first.problem.name());
    let _ = writeln!(csv, "# problem_seed={}", first.seed);
    let _ = writeln!(csv, "solver,{}", columns(with_gap));
    for run in &runs {
        for r in &run.records {
            let mut r = r.clone();
            if !with_gap {
                r.gap = None;
            }
            let _ = writeln!(csv, "{},{}", run.label, format_row(&r));
        }
    }
    let combined_csv = out_dir.join("combined.csv");
    fs::write(&combined_csv, csv)?;

    let chart = |x_of: &dyn Fn(&TraceRecord) -> f64, x_label: &str| -> Result<String> {
        let series: Vec<Series> = runs
            .iter()
            .map(|run| Series {
                label: run.label.clone(),
                points: run.records.iter().map(|r| (x_of(r), metric.pick(r))).collect(),
            })
            .collect();
        render_svg(
            &series,
            &AxisSpec {
                title: format!("{} on {}", metric.name(), first.problem.name()),
                x_label: x_label.into(),
                y_label: metric.name().into(),
                y_scale: None,
            },
        )
    };
    let by_pass_svg = out_dir.join(format!("{}_by_pass.svg", metric.name()));
    fs::write(&by_pass_svg, chart(&|r| r.pass as f64, "pass")?)?;
    let by_time_svg = out_dir.join(format!("{}_by_time.svg", metric.name()));
    fs::write(&by_time_svg, chart(&|r| r.elapsed_ms, "elapsed (ms)")?)?;
    Ok(CompareOutput {
        runs,
        combined_csv,
        by_pass_svg,
        by_time_svg,
    })
}
