//! Run configuration.
//!
//! A configuration file is plain text:
//!
//! ```text
//! # comment
//! [problem]
//! kind = lasso        # lasso | group-lasso | rpca | file
//! m = 1000
//! seed = 7
//!
//! [solver]
//! name = spbcd        # spbcd | pdcp | preconditioned-pdcp | ista | fista
//! K = 100
//! passes = 30
//! ```
//!
//! Every key lives in a section and is addressed as `section.key`
//! (`problem.m`, `solver.K`, `output.path`). Command-line flags write the
//! same keys and win over the file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use spbcd::solver::StepsizeRule;

use crate::error::{config_err, BenchError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Lasso { m: usize, n: usize, d: usize },
    GroupLasso { lambda: f64, samples: usize },
    Rpca { m: usize, n: usize, rank: usize },
    File { dir: PathBuf },
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::Lasso { .. } => "lasso",
            ProblemSpec::GroupLasso { .. } => "group-lasso",
            ProblemSpec::Rpca { .. } => "rpca",
            ProblemSpec::File { .. } => "file",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    SpBcd,
    Pdcp,
    PreconditionedPdcp,
    Ista,
    Fista,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::SpBcd => "spbcd",
            SolverKind::Pdcp => "pdcp",
            SolverKind::PreconditionedPdcp => "preconditioned-pdcp",
            SolverKind::Ista => "ista",
            SolverKind::Fista => "fista",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "spbcd" => SolverKind::SpBcd,
            "pdcp" => SolverKind::Pdcp,
            "preconditioned-pdcp" | "pdcp-precond" => SolverKind::PreconditionedPdcp,
            "ista" => SolverKind::Ista,
            "fista" => SolverKind::Fista,
            other => return config_err(format!("unknown solver {other:?}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    /// Generator seed; also the sampling seed unless `solver_seed` is set.
    pub seed: u64,
    pub solver: SolverKind,
    pub solver_seed: Option<u64>,
    pub k: usize,
    pub passes: usize,
    pub rule: StepsizeRule,
    pub sigma_override: Option<f64>,
    pub workers: usize,
    /// Attached to the instance so the residual reports relative
    /// suboptimality.
    pub reference_objective: Option<f64>,
    pub label: Option<String>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn sampling_seed(&self) -> u64 {
        self.solver_seed.unwrap_or(self.seed)
    }

    /// Series name used in merged traces and charts.
    pub fn display_label(&self) -> String {
        match (&self.label, self.solver) {
            (Some(l), _) => l.clone(),
            (None, SolverKind::SpBcd) => format!("spbcd-K{}", self.k),
            (None, s) => s.name().to_string(),
        }
    }

    pub fn from_file(path: impl AsRef<Path>, overrides: &ConfigMap) -> Result<Self> {
        let mut map = ConfigMap::parse_file(path.as_ref())?;
        map.merge(overrides);
        Self::from_map(&map)
    }

    pub fn from_map(map: &ConfigMap) -> Result<Self> {
        map.check_known()?;
        let kind = map.get("problem.kind").unwrap_or("lasso");
        let dir = map.get("problem.dir");
        let problem = match (kind, dir) {
            ("file", Some(d)) => ProblemSpec::File { dir: PathBuf::from(d) },
            ("file", None) => return config_err("problem.kind = file needs problem.dir"),
            (_, Some(_)) => {
                return config_err(format!(
                    "problem.dir given together with generator {kind:?}: exactly one problem source is allowed"
                ))
            }
            ("lasso", None) => ProblemSpec::Lasso {
                m: map.parse_or("problem.m", 1000)?,
                n: map.parse_or("problem.n", 5000)?,
                d: map.parse_or("problem.d", 500)?,
            },
            ("rpca", None) => ProblemSpec::Rpca {
                m: map.parse_or("problem.m", 200)?,
                n: map.parse_or("problem.n", 500)?,
                rank: map.parse_or("problem.rank", 10)?,
            },
            ("group-lasso", None) => ProblemSpec::GroupLasso {
                lambda: map.parse_or("problem.lambda", 1e-4)?,
                samples: map.parse_or("problem.samples", spbcd::problems::GROUP_LASSO_SAMPLES)?,
            },
            (other, None) => return config_err(format!("unknown problem kind {other:?}")),
        };
        let solver: SolverKind = map.get("solver.name").unwrap_or("spbcd").parse()?;
        let k = map.parse_or("solver.K", 1usize)?;
        let passes = map.parse_or("solver.passes", 100usize)?;
        if k == 0 {
            return config_err("K must be at least 1");
        }
        if passes == 0 {
            return config_err("passes must be at least 1");
        }
        let rule = match map.get("solver.rule") {
            Some(r) => r.parse::<StepsizeRule>()?,
            None => StepsizeRule::AdaptiveL1,
        };
        let sigma_override = map.parse_opt::<f64>("solver.sigma_override")?;
        if let Some(s) = sigma_override {
            if !(s > 0.0 && s.is_finite()) {
                return config_err(format!("sigma override {s} must be positive"));
            }
            if solver != SolverKind::SpBcd {
                return config_err("sigma override only applies to spbcd");
            }
        }
        let workers = map.parse_or("solver.workers", 1usize)?;
        if workers == 0 {
            return config_err("workers must be at least 1");
        }
        Ok(Self {
            seed: map.parse_or("problem.seed", 0u64)?,
            problem,
            solver,
            solver_seed: map.parse_opt("solver.seed")?,
            k,
            passes,
            rule,
            sigma_override,
            workers,
            reference_objective: map.parse_opt("problem.reference_objective")?,
            label: map.get("output.label").map(str::to_string),
            out: map.get("output.path").map(PathBuf::from),
        })
    }
}

const KNOWN_KEYS: &[&str] = &[
    "problem.kind",
    "problem.dir",
    "problem.m",
    "problem.n",
    "problem.d",
    "problem.rank",
    "problem.lambda",
    "problem.samples",
    "problem.seed",
    "problem.reference_objective",
    "solver.name",
    "solver.K",
    "solver.passes",
    "solver.rule",
    "solver.sigma_override",
    "solver.workers",
    "solver.seed",
    "output.path",
    "output.label",
];

/// Flat `section.key -> value` view of a configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| BenchError::Config(format!("{origin}:{}: unterminated section", i + 1)))?
                    .trim();
                if !matches!(name, "problem" | "solver" | "output") {
                    return config_err(format!("{origin}:{}: unknown section [{name}]", i + 1));
                }
                section = Some(name.to_string());
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| BenchError::Config(format!("{origin}:{}: expected key = value", i + 1)))?;
            let Some(sec) = &section else {
                return config_err(format!("{origin}:{}: key outside of a section", i + 1));
            };
            entries.insert(format!("{sec}.{}", k.trim()), v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn parse_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Entries of `other` replace ours.
    pub fn merge(&mut self, other: &ConfigMap) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }

    fn check_known(&self) -> Result<()> {
        match self.entries.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            Some(k) => config_err(format!("unknown key {k}")),
            None => Ok(()),
        }
    }

    fn parse_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| BenchError::Config(format!("{key} = {v:?} is not valid")))
            })
            .transpose()
    }

    fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parse_opt(key)?.unwrap_or(default))
    }
}
