use crate::error::{Error, Result};

/// Terms the numeric prox oracle knows how to evaluate. Kept separate from
/// the solver's own function types so the two never share code.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleTerm {
    Zero,
    L1 { weight: f64 },
    /// Coupled across coordinates; at most four of them.
    GroupL2 { weight: f64 },
    QuadFrob,
    /// `<y, b>`
    DualLinear { b: Vec<f64> },
    /// `sum y^2/2 + b y`
    DualQuadratic { b: Vec<f64> },
    /// `c sum y` restricted to `[0, 1]`
    DualBox { c: f64 },
}

const GRID: usize = 64;
const GOLDEN_TOL: f64 = 1e-10;
const MAX_GROUP_DIM: usize = 4;

/// Minimizer of a convex scalar function on `[lo, hi]`, where `diff(a, b)`
/// returns `phi(a) - phi(b)` computed without cancellation. Coarse grid,
/// then golden-section refinement until the bracket is below `1e-10`
/// relative to its scale, and a few bisection-grade steps past that.
pub fn minimize_scalar(diff: impl Fn(f64, f64) -> f64, lo: f64, hi: f64) -> f64 {
    assert!(lo <= hi);
    if lo == hi {
        return lo;
    }
    let step = (hi - lo) / GRID as f64;
    let point = |i: usize| if i == GRID { hi } else { lo + step * i as f64 };
    let mut best = 0;
    for i in 1..=GRID {
        if diff(point(i), point(best)) < 0.0 {
            best = i;
        }
    }
    let mut a = point(best.saturating_sub(1));
    let mut b = point((best + 1).min(GRID));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let scale = 1.0 + a.abs().max(b.abs());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    for _ in 0..400 {
        if b - a <= GOLDEN_TOL * 1e-3 * scale {
            break;
        }
        if diff(c, d) < 0.0 {
            b = d;
            d = c;
            c = b - inv_phi * (b - a);
        } else {
            a = c;
            c = d;
            d = a + inv_phi * (b - a);
        }
    }
    let mid = 0.5 * (a + b);
    // The bracket ends may beat the midpoint at a domain boundary.
    let mut out = mid;
    for cand in [lo, hi] {
        if diff(cand, out) < 0.0 {
            out = cand;
        }
    }
    out
}

fn l1_diff(w: f64) -> impl Fn(f64, f64) -> f64 {
    move |a, b| w * (a.abs() - b.abs())
}

fn quad_diff(center: f64, weight: f64) -> impl Fn(f64, f64) -> f64 {
    move |a, b| 0.5 * weight * (a - b) * (a + b - 2.0 * center)
}

/// `argmin_x term(x) + (1/2) sum metric_i (x_i - v_i)^2`.
pub fn prox_oracle(term: &OracleTerm, v: &[f64], metric: &[f64]) -> Result<Vec<f64>> {
    if v.len() != metric.len() {
        return Err(Error::Input("metric length differs from v".into()));
    }
    if metric.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
        return Err(Error::Input("metric weights must be positive".into()));
    }
    let coords = 0..v.len();
    match term {
        OracleTerm::Zero => Ok(v.to_vec()),
        OracleTerm::L1 { weight } => Ok(coords
            .map(|i| {
                let (f, q) = (l1_diff(*weight), quad_diff(v[i], metric[i]));
                let w = 2.0 * (1.0 + v[i].abs() + weight / metric[i]);
                minimize_scalar(|a, b| f(a, b) + q(a, b), v[i] - w, v[i] + w)
            })
            .collect()),
        OracleTerm::QuadFrob => Ok(coords
            .map(|i| {
                let (f, q) = (quad_diff(0.0, 1.0), quad_diff(v[i], metric[i]));
                let w = 2.0 * (1.0 + v[i].abs());
                minimize_scalar(|a, b| f(a, b) + q(a, b), v[i] - w, v[i] + w)
            })
            .collect()),
        OracleTerm::GroupL2 { weight } => group_oracle(*weight, v, metric),
        dual => {
            // Minimizing g*(y) + (1/2)||y - v||^2_metric, the dual terms
            // as plain prox objectives.
            let zero_u = vec![0.0; v.len()];
            resolvent_from(dual, v, &zero_u, metric)
        }
    }
}

/// `argmin_y g*(y) - <y, u> + (1/2) ||y - y_prev||^2_sigma`.
pub fn resolvent_oracle(
    term: &OracleTerm,
    y_prev: &[f64],
    u: &[f64],
    sigma: &[f64],
) -> Result<Vec<f64>> {
    if y_prev.len() != u.len() || u.len() != sigma.len() {
        return Err(Error::Input("resolvent inputs differ in length".into()));
    }
    resolvent_from(term, y_prev, u, sigma)
}

fn resolvent_from(term: &OracleTerm, y_prev: &[f64], u: &[f64], sigma: &[f64]) -> Result<Vec<f64>> {
    let m = y_prev.len();
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let (yp, uk, s) = (y_prev[k], u[k], sigma[k]);
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::Input(format!("sigma[{k}] = {s} is invalid")));
        }
        let lin = move |a: f64, b: f64| -uk * (a - b);
        let q = quad_diff(yp, s);
        let y = match term {
            OracleTerm::DualLinear { b } => {
                if s == 0.0 {
                    return Err(Error::Input("linear term with zero penalty is unbounded".into()));
                }
                let bk = b[k];
                let w = 2.0 * (1.0 + yp.abs() + (uk.abs() + bk.abs()) / s);
                minimize_scalar(|a, c| bk * (a - c) + lin(a, c) + q(a, c), yp - w, yp + w)
            }
            OracleTerm::DualQuadratic { b } => {
                let bk = b[k];
                let w = 2.0 * (1.0 + yp.abs() + uk.abs() + bk.abs());
                let f = quad_diff(0.0, 1.0);
                minimize_scalar(
                    |a, c| f(a, c) + bk * (a - c) + lin(a, c) + q(a, c),
                    yp - w,
                    yp + w,
                )
            }
            OracleTerm::DualBox { c } => {
                let c = *c;
                minimize_scalar(|a, d| c * (a - d) + lin(a, d) + q(a, d), 0.0, 1.0)
            }
            _ => return Err(Error::Input("not a dual term".into())),
        };
        out.push(y);
    }
    Ok(out)
}

fn group_oracle(weight: f64, v: &[f64], metric: &[f64]) -> Result<Vec<f64>> {
    let n = v.len();
    if n > MAX_GROUP_DIM {
        return Err(Error::Input(format!(
            "group of {n} coordinates is too large for the numeric oracle"
        )));
    }
    let mut x = v.to_vec();
    for _sweep in 0..20_000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let rest2: f64 = (0..n).filter(|&k| k != i).map(|k| x[k] * x[k]).sum();
            let norm_diff = move |a: f64, b: f64| {
                let (na, nb) = ((a * a + rest2).sqrt(), (b * b + rest2).sqrt());
                if na + nb == 0.0 {
                    0.0
                } else {
                    weight * (a - b) * (a + b) / (na + nb)
                }
            };
            let q = quad_diff(v[i], metric[i]);
            let w = 2.0 * (1.0 + v[i].abs() + weight / metric[i]);
            let xi = minimize_scalar(|a, b| norm_diff(a, b) + q(a, b), v[i] - w, v[i] + w);
            moved = moved.max((xi - x[i]).abs());
            x[i] = xi;
        }
        if moved <= 1e-14 * (1.0 + v.iter().fold(0.0f64, |m, e| m.max(e.abs()))) {
            break;
        }
    }
    // Coordinate descent can stall next to the kink at zero.
    let objective = |z: &[f64]| {
        weight * z.iter().map(|e| e * e).sum::<f64>().sqrt()
            + 0.5 * z.iter().zip(v).zip(metric).map(|((z, v), h)| h * (z - v) * (z - v)).sum::<f64>()
    };
    if objective(&vec![0.0; n]) <= objective(&x) {
        x.fill(0.0);
    }
    Ok(x)
}
