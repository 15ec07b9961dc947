use std::sync::OnceLock;

use super::norm::power_iteration;
use super::{col_abs_sums, BlockPartition, DenseMatrix};
use crate::error::{input_err, Result};

/// Storage behind a coupling operator.
#[derive(Debug, Clone)]
pub enum CouplingKind {
    /// An explicit matrix.
    Dense(DenseMatrix),
    /// `[I I ... I]` with `J` identity blocks of size `dim`, never materialized.
    StackedIdentity { dim: usize },
}

/// The linear operator `A` of the saddle problem together with its column
/// partition. Immutable; the absolute sums and norms are computed on first
/// use and cached.
#[derive(Debug)]
pub struct Coupling {
    kind: CouplingKind,
    partition: BlockPartition,
    col_sums: OnceLock<Vec<f64>>,
    block_norms: OnceLock<Vec<f64>>,
    norm: OnceLock<f64>,
}

const NORM_TOL: f64 = 1e-10;
const NORM_MAX_ITERS: usize = 20_000;

impl Coupling {
    pub fn dense(matrix: DenseMatrix, partition: BlockPartition) -> Result<Self> {
        if partition.total() != matrix.cols() {
            return input_err(format!(
                "partition covers {} columns, matrix has {}",
                partition.total(),
                matrix.cols()
            ));
        }
        Ok(Self::with_kind(CouplingKind::Dense(matrix), partition))
    }

    pub fn stacked_identity(dim: usize, blocks: usize) -> Result<Self> {
        if dim == 0 || blocks == 0 {
            return input_err("stacked identity needs positive sizes");
        }
        let partition = BlockPartition::uniform(dim * blocks, dim)?;
        Ok(Self::with_kind(CouplingKind::StackedIdentity { dim }, partition))
    }

    fn with_kind(kind: CouplingKind, partition: BlockPartition) -> Self {
        Self {
            kind,
            partition,
            col_sums: OnceLock::new(),
            block_norms: OnceLock::new(),
            norm: OnceLock::new(),
        }
    }

    pub fn kind(&self) -> &CouplingKind {
        &self.kind
    }

    pub fn as_dense(&self) -> Option<&DenseMatrix> {
        match &self.kind {
            CouplingKind::Dense(a) => Some(a),
            CouplingKind::StackedIdentity { .. } => None,
        }
    }

    /// Explicit matrix; materializes the stacked identity (small sizes only).
    pub fn to_dense(&self) -> DenseMatrix {
        match &self.kind {
            CouplingKind::Dense(a) => a.clone(),
            CouplingKind::StackedIdentity { dim } => {
                let id = DenseMatrix::identity(*dim);
                let blocks: Vec<&DenseMatrix> = (0..self.num_blocks()).map(|_| &id).collect();
                DenseMatrix::hstack(&blocks).expect("identity blocks share a row count")
            }
        }
    }

    pub fn rows(&self) -> usize {
        match &self.kind {
            CouplingKind::Dense(a) => a.rows(),
            CouplingKind::StackedIdentity { dim } => *dim,
        }
    }

    pub fn cols(&self) -> usize {
        self.partition.total()
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn num_blocks(&self) -> usize {
        self.partition.num_blocks()
    }

    /// `out = A_j v`.
    pub fn block_apply(&self, j: usize, v: &[f64], out: &mut [f64]) {
        match &self.kind {
            CouplingKind::Dense(a) => a.block_apply(self.partition.range(j), v, out),
            CouplingKind::StackedIdentity { .. } => out.copy_from_slice(v),
        }
    }

    /// `out = A_j^T y`.
    pub fn block_apply_t(&self, j: usize, y: &[f64], out: &mut [f64]) {
        match &self.kind {
            CouplingKind::Dense(a) => a.block_apply_t(self.partition.range(j), y, out),
            CouplingKind::StackedIdentity { .. } => out.copy_from_slice(y),
        }
    }

    /// `A x`, summing block contributions in ascending block order.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols());
        match &self.kind {
            CouplingKind::Dense(a) => a.matvec(x),
            CouplingKind::StackedIdentity { dim } => {
                let mut out = vec![0.0; *dim];
                for block in x.chunks_exact(*dim) {
                    for (o, v) in out.iter_mut().zip(block) {
                        *o += v;
                    }
                }
                out
            }
        }
    }

    /// `A^T y`.
    pub fn apply_t(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows());
        match &self.kind {
            CouplingKind::Dense(a) => a.matvec_t(y),
            CouplingKind::StackedIdentity { .. } => y.repeat(self.num_blocks()),
        }
    }

    /// Absolute column sums of `A` (cached).
    pub fn col_abs_sums(&self) -> &[f64] {
        self.col_sums.get_or_init(|| match &self.kind {
            CouplingKind::Dense(a) => col_abs_sums(a),
            CouplingKind::StackedIdentity { .. } => vec![1.0; self.cols()],
        })
    }

    /// `out[k] = sum_{j in blocks} sum_{d in block j} |A[k, d]|`.
    pub fn row_abs_sums_over_blocks(&self, blocks: &[usize]) -> Result<Vec<f64>> {
        match &self.kind {
            CouplingKind::Dense(a) => super::row_abs_sums_over_blocks(a, &self.partition, blocks),
            CouplingKind::StackedIdentity { dim } => {
                if blocks.is_empty() {
                    return input_err("block set must be nonempty");
                }
                if let Some(j) = blocks.iter().find(|&&j| j >= self.num_blocks()) {
                    return input_err(format!("block index {j} out of range"));
                }
                Ok(vec![blocks.len() as f64; *dim])
            }
        }
    }

    /// Spectral norm of each column block (cached).
    pub fn block_norms(&self) -> &[f64] {
        self.block_norms.get_or_init(|| match &self.kind {
            CouplingKind::Dense(a) => (0..self.num_blocks())
                .map(|j| {
                    let range = self.partition.range(j);
                    let rows = a.rows();
                    let cols = range.len();
                    let data = a.col_block(range.clone());
                    let sub = DenseMatrix::from_col_major(rows, cols, data.to_vec())
                        .expect("slice of a valid matrix");
                    power_iteration(
                        cols,
                        NORM_TOL,
                        NORM_MAX_ITERS,
                        |v| sub.matvec(v),
                        |w| sub.matvec_t(w),
                    )
                    .value
                })
                .collect(),
            CouplingKind::StackedIdentity { .. } => vec![1.0; self.num_blocks()],
        })
    }

    /// Spectral norm of `A` (cached). Exact `sqrt(J)` for stacked identities.
    pub fn spectral_norm(&self) -> f64 {
        *self.norm.get_or_init(|| match &self.kind {
            CouplingKind::Dense(a) => {
                power_iteration(
                    a.cols(),
                    NORM_TOL,
                    NORM_MAX_ITERS,
                    |v| a.matvec(v),
                    |w| a.matvec_t(w),
                )
                .value
            }
            CouplingKind::StackedIdentity { .. } => (self.num_blocks() as f64).sqrt(),
        })
    }
}

impl Clone for Coupling {
    fn clone(&self) -> Self {
        Self::with_kind(self.kind.clone(), self.partition.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structural_identity_matches_materialized() {
        let c = Coupling::stacked_identity(2, 3).unwrap();
        let dense = Coupling::dense(c.to_dense(), c.partition().clone()).unwrap();
        let x = [1.0, 2.0, -1.0, 0.5, 3.0, -2.0];
        assert_eq!(c.apply(&x), dense.apply(&x));
        assert_eq!(c.apply_t(&[1.0, -1.0]), dense.apply_t(&[1.0, -1.0]));
        assert_eq!(c.col_abs_sums(), dense.col_abs_sums());
        assert_eq!(
            c.row_abs_sums_over_blocks(&[0, 2]).unwrap(),
            dense.row_abs_sums_over_blocks(&[0, 2]).unwrap()
        );
        assert!((c.spectral_norm() - dense.spectral_norm()).abs() < 1e-9);
        for (a, b) in c.block_norms().iter().zip(dense.block_norms()) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
