//! Plain-text formats.
//!
//! * Matrix CSV: one row per line, comma-separated numbers, uniform width.
//! * libsvm: `label idx:val idx:val ...` with 1-based indices; absent
//!   entries are zero.
//! * Instance directory: `meta.txt` (`key = value` lines) plus the data
//!   CSVs: `A.csv`/`b.csv` for Lasso, `B.csv` for RPCA,
//!   `features.csv`/`labels.csv` for group Lasso.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{make_group_lasso_hinge, make_lasso, make_rpca, GroupSpec, SepCCSPInstance};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn format_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

/// Shortest text that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn load_matrix_csv(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|e| parse_err(path, i + 1, format!("bad number {tok:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(format_err(
                    path,
                    format!(
                        "line {} has {} columns, expected {}",
                        i + 1,
                        row.len(),
                        first.len()
                    ),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(format_err(path, "empty input"));
    }
    DenseMatrix::from_rows(&rows).map_err(|e| format_err(path, e.to_string()))
}

/// A vector stored as a single CSV column or a single row.
pub fn load_vector_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let m = load_matrix_csv(path)?;
    match (m.rows(), m.cols()) {
        (_, 1) | (1, _) => Ok(m.into_col_major()),
        (r, c) => Err(format_err(path, format!("expected a vector, found {r}x{c}"))),
    }
}

pub fn save_matrix_csv(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let mut out = String::new();
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if c > 0 {
                out.push(',');
            }
            out.push_str(&fmt_f64(m.get(r, c)));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

fn save_vector_csv(path: &Path, v: &[f64]) -> Result<()> {
    let mut out = String::new();
    for x in v {
        out.push_str(&fmt_f64(*x));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a libsvm file. Without `dim` the width is the largest index seen.
pub fn load_libsvm(path: impl AsRef<Path>, dim: Option<usize>) -> Result<(DenseMatrix, Vec<f64>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut labels = Vec::new();
    let mut entries: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut width = 0usize;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let label_tok = toks.next().expect("nonempty line");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| parse_err(path, i + 1, format!("bad label {label_tok:?}")))?;
        let mut row = Vec::new();
        for tok in toks {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(path, i + 1, format!("expected idx:val, got {tok:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(path, i + 1, format!("bad index {idx:?}")))?;
            if idx == 0 {
                return Err(parse_err(path, i + 1, "indices are 1-based"));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(path, i + 1, format!("bad value {val:?}")))?;
            if let Some(d) = dim {
                if idx > d {
                    return Err(parse_err(path, i + 1, format!("index {idx} exceeds dimension {d}")));
                }
            }
            width = width.max(idx);
            row.push((idx - 1, val));
        }
        labels.push(label);
        entries.push(row);
    }
    if labels.is_empty() {
        return Err(format_err(path, "empty input"));
    }
    let width = dim.unwrap_or(width).max(1);
    let n = labels.len();
    let mut data = vec![0.0; n * width];
    for (r, row) in entries.iter().enumerate() {
        for &(c, v) in row {
            data[c * n + r] = v;
        }
    }
    let m = DenseMatrix::from_col_major(n, width, data).map_err(|e| format_err(path, e.to_string()))?;
    Ok((m, labels))
}

/// Raw data of an application instance, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemData {
    Lasso {
        a: DenseMatrix,
        b: Vec<f64>,
        lambda: f64,
    },
    Rpca {
        observation: DenseMatrix,
        mu2: f64,
        mu3: f64,
    },
    GroupLasso {
        features: DenseMatrix,
        labels: Vec<f64>,
        groups: GroupSpec,
        lambda: f64,
    },
}

impl ProblemData {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemData::Lasso { .. } => "lasso",
            ProblemData::Rpca { .. } => "rpca",
            ProblemData::GroupLasso { .. } => "group-lasso",
        }
    }

    pub fn build(&self) -> Result<SepCCSPInstance> {
        match self {
            ProblemData::Lasso { a, b, lambda } => make_lasso(a.clone(), b.clone(), *lambda),
            ProblemData::Rpca { observation, mu2, mu3 } => make_rpca(observation, *mu2, *mu3),
            ProblemData::GroupLasso {
                features,
                labels,
                groups,
                lambda,
            } => make_group_lasso_hinge(features, labels, groups, *lambda),
        }
    }

    /// Writes the instance directory. `extra` lands in `meta.txt` after
    /// the problem parameters (e.g. the generator seed).
    pub fn save(&self, dir: impl AsRef<Path>, extra: &[(&str, String)]) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut meta = String::new();
        let _ = writeln!(meta, "problem = {}", self.name());
        match self {
            ProblemData::Lasso { a, b, lambda } => {
                let _ = writeln!(meta, "m = {}\nn = {}\nlambda = {}", a.rows(), a.cols(), fmt_f64(*lambda));
                save_matrix_csv(dir.join("A.csv"), a)?;
                save_vector_csv(&dir.join("b.csv"), b)?;
            }
            ProblemData::Rpca { observation, mu2, mu3 } => {
                let _ = writeln!(
                    meta,
                    "m = {}\nn = {}\nmu2 = {}\nmu3 = {}",
                    observation.rows(),
                    observation.cols(),
                    fmt_f64(*mu2),
                    fmt_f64(*mu3)
                );
                save_matrix_csv(dir.join("B.csv"), observation)?;
            }
            ProblemData::GroupLasso {
                features,
                labels,
                groups,
                lambda,
            } => {
                let sizes: Vec<String> = groups.sizes().iter().map(|s| s.to_string()).collect();
                let _ = writeln!(
                    meta,
                    "samples = {}\nd = {}\nlambda = {}\ngroups = {}",
                    features.rows(),
                    features.cols(),
                    fmt_f64(*lambda),
                    sizes.join(",")
                );
                save_matrix_csv(dir.join("features.csv"), features)?;
                save_vector_csv(&dir.join("labels.csv"), labels)?;
            }
        }
        for (k, v) in extra {
            let _ = writeln!(meta, "{k} = {v}");
        }
        fs::write(dir.join("meta.txt"), meta)?;
        Ok(())
    }

    /// Reads an instance directory; returns the data and every `meta.txt` entry.
    pub fn load(dir: impl AsRef<Path>) -> Result<(Self, BTreeMap<String, String>)> {
        let dir = dir.as_ref();
        let meta_path = dir.join("meta.txt");
        let meta = read_meta(&meta_path)?;
        let get = |key: &str| -> Result<&String> {
            meta.get(key)
                .ok_or_else(|| format_err(&meta_path, format!("missing key {key}")))
        };
        let num = |key: &str| -> Result<f64> {
            get(key)?
                .parse()
                .map_err(|_| format_err(&meta_path, format!("{key} is not a number")))
        };
        let data = match get("problem")?.as_str() {
            "lasso" => ProblemData::Lasso {
                a: load_matrix_csv(dir.join("A.csv"))?,
                b: load_vector_csv(dir.join("b.csv"))?,
                lambda: num("lambda")?,
            },
            "rpca" => ProblemData::Rpca {
                observation: load_matrix_csv(dir.join("B.csv"))?,
                mu2: num("mu2")?,
                mu3: num("mu3")?,
            },
            "group-lasso" => {
                let sizes = get("groups")?
                    .split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| format_err(&meta_path, "groups must be a list of sizes"))?;
                ProblemData::GroupLasso {
                    features: load_matrix_csv(dir.join("features.csv"))?,
                    labels: load_vector_csv(dir.join("labels.csv"))?,
                    groups: GroupSpec::new(sizes)?,
                    lambda: num("lambda")?,
                }
            }
            other => return Err(format_err(&meta_path, format!("unknown problem {other:?}"))),
        };
        Ok((data, meta))
    }
}

/// `key = value` lines; `#` starts a comment.
pub fn read_meta(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| parse_err(path, i + 1, "expected key = value"))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}
