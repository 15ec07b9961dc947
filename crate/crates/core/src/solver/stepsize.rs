use crate::error::{Error, Result};
use crate::problems::SepCCSPInstance;

/// Lower bound applied to every primal and dual penalty.
pub const FLOOR_EPS: f64 = 1e-10;

/// How the proximal penalties are derived from the coupling matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepsizeRule {
    /// `h_d = sum_k |A_kd|`, `sigma_k = (J/K) sum_{j in S_t} sum_{d in j} |A_kd|`.
    AdaptiveL1,
    /// `h_j = ||A_j||` per block, `sigma_k = (J/K) max_j ||A_j||`.
    BlockSpectral,
}

impl StepsizeRule {
    pub fn name(self) -> &'static str {
        match self {
            StepsizeRule::AdaptiveL1 => "adaptive-l1",
            StepsizeRule::BlockSpectral => "block-spectral",
        }
    }
}

impl std::str::FromStr for StepsizeRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive-l1" | "adaptive" | "l1" => Ok(StepsizeRule::AdaptiveL1),
            "block-spectral" | "spectral" => Ok(StepsizeRule::BlockSpectral),
            other => Err(Error::Config(format!("unknown stepsize rule {other:?}"))),
        }
    }
}

/// Penalties and extrapolation weight for one SP-BCD run.
#[derive(Debug, Clone)]
pub struct StepsizeConfig {
    pub rule: StepsizeRule,
    /// Primal penalty per coordinate, as used by the block steps: floored,
    /// and replaced by the block maximum inside blocks whose prox has no
    /// closed form under a non-uniform metric.
    pub h: Vec<f64>,
    /// `K / J`.
    pub theta: f64,
    pub floor_eps: f64,
    /// `K`, blocks updated per iteration.
    pub blocks_per_iter: usize,
    /// `J`.
    pub num_blocks: usize,
    /// Replaces the dual penalty by this constant when set.
    pub sigma_override: Option<f64>,
}

impl StepsizeConfig {
    pub fn new(instance: &SepCCSPInstance, rule: StepsizeRule, k: usize) -> Result<Self> {
        let j_total = instance.num_blocks();
        if k == 0 || k > j_total {
            return Err(Error::Config(format!(
                "K = {k} must lie in 1..={j_total}"
            )));
        }
        let coupling = instance.coupling();
        let partition = coupling.partition();
        let mut h: Vec<f64> = match rule {
            StepsizeRule::AdaptiveL1 => coupling.col_abs_sums().to_vec(),
            StepsizeRule::BlockSpectral => {
                let norms = coupling.block_norms();
                (0..j_total)
                    .flat_map(|j| std::iter::repeat_n(norms[j], partition.size(j)))
                    .collect()
            }
        };
        let floored: Vec<usize> = (0..h.len()).filter(|&d| h[d] < FLOOR_EPS).collect();
        if !floored.is_empty() {
            log::warn!(
                "primal penalty floored at {FLOOR_EPS:e} for {} coordinate(s): {}",
                floored.len(),
                preview(&floored)
            );
            for d in floored {
                h[d] = FLOOR_EPS;
            }
        }
        for (j, f) in instance.block_fns().iter().enumerate() {
            if !f.is_separable() {
                let range = partition.range(j);
                let top = h[range.clone()].iter().cloned().fold(0.0, f64::max);
                h[range].fill(top);
            }
        }
        Ok(Self {
            rule,
            h,
            theta: k as f64 / j_total as f64,
            floor_eps: FLOOR_EPS,
            blocks_per_iter: k,
            num_blocks: j_total,
            sigma_override: None,
        })
    }

    pub fn with_sigma_override(mut self, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!("sigma override {sigma} must be positive")));
        }
        self.sigma_override = Some(sigma);
        Ok(self)
    }

    /// `ceil(J / K)` iterations make one pass over the blocks.
    pub fn iterations_per_pass(&self) -> usize {
        self.num_blocks.div_ceil(self.blocks_per_iter)
    }

    /// Dual penalty for the selected blocks.
    pub fn sigma_for(&self, instance: &SepCCSPInstance, selected: &[usize]) -> Result<Vec<f64>> {
        if let Some(s) = self.sigma_override {
            return Ok(vec![s; instance.rows()]);
        }
        compute_sigma_t(
            instance,
            selected,
            self.blocks_per_iter,
            self.num_blocks,
            self.rule,
            self.floor_eps,
        )
    }
}

/// Dual penalty `sigma^t` for the selected block set.
pub fn compute_sigma_t(
    instance: &SepCCSPInstance,
    selected: &[usize],
    k: usize,
    num_blocks: usize,
    rule: StepsizeRule,
    floor_eps: f64,
) -> Result<Vec<f64>> {
    let scale = num_blocks as f64 / k as f64;
    let coupling = instance.coupling();
    let mut sigma = match rule {
        StepsizeRule::AdaptiveL1 => {
            let mut s = coupling.row_abs_sums_over_blocks(selected)?;
            s.iter_mut().for_each(|v| *v *= scale);
            s
        }
        StepsizeRule::BlockSpectral => {
            let top = coupling.block_norms().iter().cloned().fold(0.0, f64::max);
            vec![scale * top; coupling.rows()]
        }
    };
    for v in &mut sigma {
        if *v < floor_eps {
            *v = floor_eps;
        }
    }
    Ok(sigma)
}

pub(crate) fn preview(idx: &[usize]) -> String {
    let shown: Vec<String> = idx.iter().take(10).map(|i| i.to_string()).collect();
    if idx.len() > 10 {
        format!("{}, ...", shown.join(", "))
    } else {
        shown.join(", ")
    }
}
