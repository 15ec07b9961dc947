//! Experiment runner for the spbcd solvers: configuration, convergence
//! traces, multi-solver comparisons and SVG charts.

pub mod compare;
pub mod config;
pub mod error;
pub mod experiment;
pub mod svg;
pub mod trace;

pub use compare::{compare, CompareOutput, Metric};
pub use config::{ConfigMap, ProblemSpec, RunConfig, SolverKind};
pub use error::{BenchError, Result};
pub use experiment::{build_instance, generate_problem, run_experiment, run_on_instance, RunOutput};
pub use svg::{render_svg, AxisSpec, Scale, Series};
pub use trace::{read_trace, TraceHeader, TraceRecord};
