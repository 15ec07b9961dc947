use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use spbcd::problems::fmt_f64;

use crate::error::{config_err, BenchError, Result};

/// One row of a convergence trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub pass: usize,
    /// Solver wall time, metric evaluation excluded.
    pub elapsed_ms: f64,
    pub objective: f64,
    pub residual: f64,
    pub gap: Option<f64>,
}

impl TraceRecord {
    /// Equality ignoring `elapsed_ms`.
    pub fn same_values(&self, other: &TraceRecord) -> bool {
        let bits = |v: f64| v.to_bits();
        self.pass == other.pass
            && bits(self.objective) == bits(other.objective)
            && bits(self.residual) == bits(other.residual)
            && self.gap.map(bits) == other.gap.map(bits)
    }
}

/// Header comment lines, in order, as `key=value`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraceHeader {
    pub entries: Vec<(String, String)>,
}

impl TraceHeader {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

pub fn columns(with_gap: bool) -> &'static str {
    if with_gap {
        "pass,elapsed_ms,objective,residual,gap"
    } else {
        "pass,elapsed_ms,objective,residual"
    }
}

pub fn format_row(r: &TraceRecord) -> String {
    let mut s = format!(
        "{},{:.3},{},{}",
        r.pass,
        r.elapsed_ms,
        fmt_f64(r.objective),
        fmt_f64(r.residual)
    );
    if let Some(g) = r.gap {
        let _ = write!(s, ",{}", fmt_f64(g));
    }
    s
}

/// Streams a trace to disk, flushing after every row so that a failed run
/// leaves the rows recorded so far.
pub struct TraceWriter {
    out: BufWriter<File>,
    with_gap: bool,
}

impl TraceWriter {
    pub fn create(path: &Path, header: &TraceHeader, with_gap: bool) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        for (k, v) in &header.entries {
            writeln!(out, "# {k}={v}")?;
        }
        writeln!(out, "{}", columns(with_gap))?;
        out.flush()?;
        Ok(Self { out, with_gap })
    }

    pub fn write(&mut self, record: &TraceRecord) -> Result<()> {
        if record.gap.is_some() != self.with_gap {
            return config_err("gap column presence changed mid-trace");
        }
        writeln!(self.out, "{}", format_row(record))?;
        self.out.flush()?;
        Ok(())
    }
}

fn parse_f64(field: &str, ctx: &str) -> Result<f64> {
    match field {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        "NaN" => Ok(f64::NAN),
        _ => field
            .parse()
            .map_err(|_| BenchError::Config(format!("{ctx}: bad number {field:?}"))),
    }
}

/// Reads a trace written by [`TraceWriter`].
pub fn read_trace(path: &Path) -> Result<(TraceHeader, Vec<TraceRecord>)> {
    let reader = BufReader::new(File::open(path)?);
    let mut header = TraceHeader::default();
    let mut records = Vec::new();
    let mut with_gap = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let ctx = format!("{}:{}", path.display(), i + 1);
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some((k, v)) = rest.split_once('=') {
                header.push(k, v);
            }
            continue;
        }
        if with_gap.is_none() {
            with_gap = Some(match line.as_str() {
                l if l == columns(true) => true,
                l if l == columns(false) => false,
                _ => return config_err(format!("{ctx}: unexpected column header")),
            });
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let expect = if with_gap == Some(true) { 5 } else { 4 };
        if fields.len() != expect {
            return config_err(format!("{ctx}: expected {expect} fields"));
        }
        records.push(TraceRecord {
            pass: fields[0]
                .parse()
                .map_err(|_| BenchError::Config(format!("{ctx}: bad pass")))?,
            elapsed_ms: parse_f64(fields[1], &ctx)?,
            objective: parse_f64(fields[2], &ctx)?,
            residual: parse_f64(fields[3], &ctx)?,
            gap: if expect == 5 { Some(parse_f64(fields[4], &ctx)?) } else { None },
        });
    }
    Ok((header, records))
}
