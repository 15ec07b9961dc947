//! Minimal line charts.

use std::fmt::Write as _;

use crate::error::{config_err, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// `None` picks log when every plotted value is positive.
    pub y_scale: Option<Scale>,
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Tick positions at 1, 2 or 5 times a power of ten.
fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if log {
            lo = lo.floor();
            hi = hi.ceil();
        }
        if hi - lo <= 0.0 {
            let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.05 };
            lo -= pad;
            hi += pad;
        }
        Self { lo, hi, log }
    }

    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            (self.lo as i64..=self.hi as i64)
                .map(|e| (10f64.powi(e as i32), format!("1e{e}")))
                .collect()
        } else {
            linear_ticks(self.lo, self.hi)
                .into_iter()
                .map(|t| (t, tick_label(t)))
                .collect()
        }
    }
}

/// Renders one polyline per series with axes, ticks and a legend. Points
/// with non-finite coordinates (or non-positive values on a log axis) are
/// dropped. Output depends only on the input.
pub fn render_svg(series: &[Series], axis: &AxisSpec) -> Result<String> {
    if series.is_empty() || series.iter().any(|s| s.points.is_empty()) {
        return config_err("cannot chart an empty trace");
    }
    let finite = |p: &&(f64, f64)| p.0.is_finite() && p.1.is_finite();
    let all_positive = series
        .iter()
        .flat_map(|s| s.points.iter().filter(finite))
        .all(|p| p.1 > 0.0);
    let log = match axis.y_scale {
        Some(Scale::Log) => true,
        Some(Scale::Linear) => false,
        None => all_positive,
    };
    let keep = |p: &(f64, f64)| p.0.is_finite() && p.1.is_finite() && (!log || p.1 > 0.0);
    let kept: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| s.points.iter().copied().filter(keep).collect())
        .collect();
    if kept.iter().all(|k| k.is_empty()) {
        return config_err("no plottable points");
    }
    let xs = Axis::fit(kept.iter().flatten().map(|p| p.0), false);
    let ys = Axis::fit(kept.iter().flatten().map(|p| p.1), log);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + xs.unit(x) * plot_w;
    let py = |y: f64| TOP + (1.0 - ys.unit(y)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&axis.title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for (t, label) in xs.ticks() {
        let x = px(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 18.0,
            escape(&label)
        );
    }
    for (t, label) in ys.ticks() {
        let y = py(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT - 5.0,
            LEFT + plot_w,
            LEFT - 8.0,
            y + 4.0,
            escape(&label)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        escape(&axis.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&axis.y_label)
    );
    for (i, (s, pts)) in series.iter().zip(&kept).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if !pts.is_empty() {
            let path: Vec<String> = pts
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis() -> AxisSpec {
        AxisSpec {
            title: "t".into(),
            x_label: "pass".into(),
            y_label: "objective".into(),
            y_scale: None,
        }
    }

    #[test]
    fn two_points_make_one_segment() {
        let s = Series { label: "a".into(), points: vec![(1.0, 2.0), (2.0, 1.0)] };
        let svg = render_svg(&[s], &axis()).unwrap();
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let pts = line.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
        assert_eq!(pts.split(' ').count(), 2);
    }

    #[test]
    fn log_axis_ticks_at_powers_of_ten() {
        let s = Series {
            label: "a".into(),
            points: (0..7).map(|i| (i as f64, 10f64.powi(-i))).collect(),
        };
        let svg = render_svg(&[s], &axis()).unwrap();
        for e in -6..=0 {
            assert!(svg.contains(&format!(">1e{e}<")), "missing 1e{e}");
        }
    }

    #[test]
    fn linear_when_values_cross_zero() {
        let s = Series { label: "a".into(), points: vec![(0.0, -1.0), (1.0, 1.0)] };
        let svg = render_svg(&[s], &axis()).unwrap();
        assert!(!svg.contains(">1e0<"));
        assert!(svg.contains(">0<"));
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(render_svg(&[], &axis()).is_err());
        let s = Series { label: "a".into(), points: vec![] };
        assert!(render_svg(&[s], &axis()).is_err());
    }

    #[test]
    fn labels_are_escaped() {
        let s = Series { label: "a<b & c".into(), points: vec![(0.0, 1.0), (1.0, 2.0)] };
        let svg = render_svg(&[s], &axis()).unwrap();
        assert!(svg.contains("a&lt;b &amp; c"));
    }
}
