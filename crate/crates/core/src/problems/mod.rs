//! The three applications as saddle-point instances, their synthetic
//! generators, and file ingestion.

mod functions;
mod generate;
mod io;

pub use functions::{BlockFn, DualFn};
pub use generate::{
    gen_group_lasso, gen_group_lasso_with, gen_lasso, gen_rpca, GroupLassoData, LassoData,
    RpcaSample, GROUP_LASSO_SAMPLES,
};
pub use io::{
    fmt_f64, load_libsvm, load_matrix_csv, load_vector_csv, read_meta, save_matrix_csv, ProblemData,
};

use crate::error::{input_err, Error, Result};
use crate::matrix::{dot, BlockPartition, Coupling, DenseMatrix};

/// Which application an instance encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Lasso,
    Rpca,
    GroupLasso,
    Custom,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Lasso => "lasso",
            ProblemKind::Rpca => "rpca",
            ProblemKind::GroupLasso => "group-lasso",
            ProblemKind::Custom => "custom",
        }
    }
}

/// Group sizes with the `sqrt(d_g)` weights of the group-Lasso penalty.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpec {
    sizes: Vec<usize>,
    weights: Vec<f64>,
}

impl GroupSpec {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return input_err("groups must be nonempty");
        }
        let weights = sizes.iter().map(|&d| (d as f64).sqrt()).collect();
        Ok(Self { sizes, weights })
    }

    /// 7 groups of 4, 21 of 16 and 35 of 64 coordinates (2604 in total).
    pub fn splice_site() -> Self {
        let mut sizes = vec![4; 7];
        sizes.extend(std::iter::repeat_n(16, 21));
        sizes.extend(std::iter::repeat_n(64, 35));
        Self::new(sizes).expect("static sizes")
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn num_groups(&self) -> usize {
        self.sizes.len()
    }

    pub fn dim(&self) -> usize {
        self.sizes.iter().sum()
    }
}

/// `min_x max_y sum_j f_j(x_j) + <y, A x> - g*(y)`.
#[derive(Debug, Clone)]
pub struct SepCCSPInstance {
    kind: ProblemKind,
    coupling: Coupling,
    block_fns: Vec<BlockFn>,
    dual_fn: DualFn,
    reference_objective: Option<f64>,
}

impl SepCCSPInstance {
    pub fn new(
        kind: ProblemKind,
        coupling: Coupling,
        block_fns: Vec<BlockFn>,
        dual_fn: DualFn,
    ) -> Result<Self> {
        let partition = coupling.partition();
        if block_fns.len() != partition.num_blocks() {
            return Err(Error::Config(format!(
                "{} block functions for {} blocks",
                block_fns.len(),
                partition.num_blocks()
            )));
        }
        for (j, f) in block_fns.iter().enumerate() {
            f.check_size(partition.size(j))?;
        }
        dual_fn.check_size(coupling.rows())?;
        let inst = Self {
            kind,
            coupling,
            block_fns,
            dual_fn,
            reference_objective: None,
        };
        let at_zero = inst.primal_objective(&vec![0.0; inst.cols()])?;
        if !at_zero.is_finite() && inst.kind != ProblemKind::Custom {
            return Err(Error::Config("primal objective is not finite at zero".into()));
        }
        Ok(inst)
    }

    /// Attaches an optimal objective value to measure suboptimality against.
    pub fn with_reference_objective(mut self, value: f64) -> Self {
        self.reference_objective = Some(value);
        self
    }

    pub fn reference_objective(&self) -> Option<f64> {
        self.reference_objective
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    pub fn partition(&self) -> &BlockPartition {
        self.coupling.partition()
    }

    pub fn block_fns(&self) -> &[BlockFn] {
        &self.block_fns
    }

    pub fn dual_fn(&self) -> &DualFn {
        &self.dual_fn
    }

    pub fn num_blocks(&self) -> usize {
        self.block_fns.len()
    }

    /// Number of dual coordinates `m`.
    pub fn rows(&self) -> usize {
        self.coupling.rows()
    }

    /// Number of primal coordinates `n`.
    pub fn cols(&self) -> usize {
        self.coupling.cols()
    }

    /// `f(x) = sum_j f_j(x_j)`.
    pub fn f_value(&self, x: &[f64]) -> Result<f64> {
        let p = self.partition();
        let mut total = 0.0;
        for (j, f) in self.block_fns.iter().enumerate() {
            total += f.value(&x[p.range(j)])?;
        }
        Ok(total)
    }

    /// `L(x, y)`; `-inf` when `y` leaves the dual domain.
    pub fn lagrangian(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let ax = self.coupling.apply(x);
        Ok(self.f_value(x)? + dot(y, &ax) - self.dual_fn.value(y))
    }

    /// The application's own objective. For constrained problems (linear
    /// `g*`) this is `f(x)` and feasibility is reported by [`Self::residual`];
    /// otherwise it is `f(x) + g(A x)`.
    pub fn primal_objective(&self, x: &[f64]) -> Result<f64> {
        let fx = self.f_value(x)?;
        Ok(match &self.dual_fn {
            DualFn::Linear { .. } => fx,
            other => fx + other.conjugate(&self.coupling.apply(x)),
        })
    }

    /// Constraint violation `||A x - b||` for constrained problems. For the
    /// others: relative suboptimality against the reference objective when
    /// one is attached, else the distance of `y` to the conjugate maximizers
    /// at `A x`.
    pub fn residual(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let ax = self.coupling.apply(x);
        Ok(match (&self.dual_fn, self.reference_objective) {
            (DualFn::Linear { .. }, _) => self.dual_fn.maximizer_distance(&ax, y),
            (_, Some(reference)) => {
                let obj = self.primal_objective(x)?;
                (obj - reference) / reference.abs().max(f64::MIN_POSITIVE)
            }
            (dual, None) => dual.maximizer_distance(&ax, y),
        })
    }
}

/// Lasso `(1/2)||A x - b||^2 + lambda ||x||_1` with one block per coordinate.
pub fn make_lasso(a: DenseMatrix, b: Vec<f64>, lambda: f64) -> Result<SepCCSPInstance> {
    if b.len() != a.rows() {
        return input_err(format!("b has length {}, A has {} rows", b.len(), a.rows()));
    }
    if !(lambda > 0.0) {
        return input_err("lambda must be positive");
    }
    let n = a.cols();
    let coupling = Coupling::dense(a, BlockPartition::singletons(n))?;
    SepCCSPInstance::new(
        ProblemKind::Lasso,
        coupling,
        vec![BlockFn::L1 { weight: lambda }; n],
        DualFn::Quadratic { b },
    )
}

/// `mu2 = 0.15 ||B||_inf` (largest entry magnitude), `mu3 = 0.15 ||B||_2`.
pub fn rpca_default_weights(b: &DenseMatrix) -> (f64, f64) {
    let spectral = crate::svd::singular_values(b)
        .map(|s| s[0])
        .unwrap_or_else(|_| crate::matrix::spectral_norm_estimate(b, 1e-10, 10_000).value);
    (0.15 * b.max_abs(), 0.15 * spectral)
}

/// RPCA `(1/2)||X1||_F^2 + mu2 ||X2||_1 + mu3 ||X3||_*` s.t. `X1 + X2 + X3 = B`.
pub fn make_rpca(b: &DenseMatrix, mu2: f64, mu3: f64) -> Result<SepCCSPInstance> {
    if !(mu2 > 0.0 && mu3 > 0.0) {
        return input_err("mu2 and mu3 must be positive");
    }
    let (rows, cols) = (b.rows(), b.cols());
    let coupling = Coupling::stacked_identity(rows * cols, 3)?;
    SepCCSPInstance::new(
        ProblemKind::Rpca,
        coupling,
        vec![
            BlockFn::QuadFrob,
            BlockFn::L1 { weight: mu2 },
            BlockFn::Nuclear { weight: mu3, rows, cols },
        ],
        DualFn::Linear {
            b: b.as_col_major().to_vec(),
        },
    )
}

/// Hinge-loss group Lasso. Row `i` of the coupling is `-z_i a_i^T / N`.
pub fn make_group_lasso_hinge(
    features: &DenseMatrix,
    labels: &[f64],
    groups: &GroupSpec,
    lambda: f64,
) -> Result<SepCCSPInstance> {
    let n_samples = features.rows();
    if labels.len() != n_samples {
        return input_err(format!("{} labels for {n_samples} samples", labels.len()));
    }
    if let Some(i) = labels.iter().position(|&z| z != 1.0 && z != -1.0) {
        return input_err(format!("label {} at sample {i} is not +1 or -1", labels[i]));
    }
    if groups.dim() != features.cols() {
        return input_err(format!(
            "groups cover {} features, rows have {}",
            groups.dim(),
            features.cols()
        ));
    }
    if !(lambda >= 0.0) {
        return input_err("lambda must be nonnegative");
    }
    let scale = 1.0 / n_samples as f64;
    let mut data = features.as_col_major().to_vec();
    for col in data.chunks_exact_mut(n_samples) {
        for (v, z) in col.iter_mut().zip(labels) {
            *v *= -z * scale;
        }
    }
    let a = DenseMatrix::from_col_major(n_samples, features.cols(), data)?;
    let partition = BlockPartition::from_sizes(groups.sizes())?;
    let block_fns = groups
        .weights()
        .iter()
        .map(|w| BlockFn::GroupL2 { weight: lambda * w })
        .collect();
    SepCCSPInstance::new(
        ProblemKind::GroupLasso,
        Coupling::dense(a, partition)?,
        block_fns,
        DualFn::BoxLinear { c: -scale },
    )
}
