//! Dense storage, column-block partitions and the coupling operator `A`.
//!
//! Matrices are stored column-major so that a column block `A_j` is one
//! contiguous slice of the backing buffer.

mod coupling;
mod dense;
mod norm;
mod partition;

pub use coupling::{Coupling, CouplingKind};
pub use dense::DenseMatrix;
pub use norm::{spectral_norm_estimate, SpectralEstimate};
pub use partition::BlockPartition;

use crate::error::{input_err, Result};

/// Absolute column sums `sum_k |A[k, d]|`.
pub fn col_abs_sums(a: &DenseMatrix) -> Vec<f64> {
    (0..a.cols())
        .map(|d| a.col(d).iter().map(|v| v.abs()).sum())
        .collect()
}

/// Row absolute sums restricted to the columns of the blocks in `blocks`.
pub fn row_abs_sums_over_blocks(
    a: &DenseMatrix,
    partition: &BlockPartition,
    blocks: &[usize],
) -> Result<Vec<f64>> {
    check_partition(a, partition)?;
    if blocks.is_empty() {
        return input_err("block set must be nonempty");
    }
    let mut out = vec![0.0; a.rows()];
    for &j in blocks {
        if j >= partition.num_blocks() {
            return input_err(format!(
                "block index {j} out of range for {} blocks",
                partition.num_blocks()
            ));
        }
        for d in partition.range(j) {
            for (o, v) in out.iter_mut().zip(a.col(d)) {
                *o += v.abs();
            }
        }
    }
    Ok(out)
}

/// `A_j v` for column block `j`.
pub fn block_matvec(
    a: &DenseMatrix,
    partition: &BlockPartition,
    j: usize,
    v: &[f64],
) -> Result<Vec<f64>> {
    check_partition(a, partition)?;
    if j >= partition.num_blocks() {
        return input_err(format!("block index {j} out of range"));
    }
    if v.len() != partition.size(j) {
        return input_err(format!(
            "block {j} has {} columns, got a vector of length {}",
            partition.size(j),
            v.len()
        ));
    }
    let mut out = vec![0.0; a.rows()];
    a.block_apply(partition.range(j), v, &mut out);
    Ok(out)
}

fn check_partition(a: &DenseMatrix, partition: &BlockPartition) -> Result<()> {
    if partition.total() != a.cols() {
        return input_err(format!(
            "partition covers {} columns but the matrix has {}",
            partition.total(),
            a.cols()
        ));
    }
    Ok(())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
