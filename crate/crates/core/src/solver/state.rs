use crate::error::{input_err, Result};
use crate::matrix::norm2;
use crate::problems::SepCCSPInstance;

/// Iterate of SP-BCD. `r_bar` caches `A x_bar` and is maintained
/// incrementally.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub x: Vec<f64>,
    pub x_bar: Vec<f64>,
    pub y: Vec<f64>,
    pub r_bar: Vec<f64>,
    pub t: usize,
}

impl SolverState {
    /// Start at `(x0, y0)` with `x_bar = x0`.
    pub fn new(instance: &SepCCSPInstance, x0: Vec<f64>, y0: Vec<f64>) -> Result<Self> {
        if x0.len() != instance.cols() || y0.len() != instance.rows() {
            return input_err(format!(
                "initial point has sizes ({}, {}), instance expects ({}, {})",
                x0.len(),
                y0.len(),
                instance.cols(),
                instance.rows()
            ));
        }
        let state = Self {
            r_bar: instance.coupling().apply(&x0),
            x_bar: x0.clone(),
            x: x0,
            y: y0,
            t: 0,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn zeros(instance: &SepCCSPInstance) -> Result<Self> {
        Self::new(instance, vec![0.0; instance.cols()], vec![0.0; instance.rows()])
    }

    /// Rejects NaN or infinite entries.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("x", &self.x),
            ("x_bar", &self.x_bar),
            ("y", &self.y),
            ("r_bar", &self.r_bar),
        ] {
            if let Some(i) = v.iter().position(|e| !e.is_finite()) {
                return input_err(format!("{name}[{i}] = {} is not finite", v[i]));
            }
        }
        Ok(())
    }

    /// `||r_bar - A x_bar|| / max(1, ||A x_bar||)`.
    pub fn rbar_drift(&self, instance: &SepCCSPInstance) -> f64 {
        let exact = instance.coupling().apply(&self.x_bar);
        let diff: Vec<f64> = exact.iter().zip(&self.r_bar).map(|(a, b)| a - b).collect();
        norm2(&diff) / norm2(&exact).max(1.0)
    }

    pub fn refresh_rbar(&mut self, instance: &SepCCSPInstance) {
        self.r_bar = instance.coupling().apply(&self.x_bar);
    }
}
