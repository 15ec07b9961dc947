use std::ops::Range;

use crate::error::{input_err, Result};

/// Split of the `n` primal coordinates into `J` contiguous column blocks.
///
/// `offsets` has `J + 1` entries, starts at 0, is strictly increasing
/// and ends at `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    offsets: Vec<usize>,
}

impl BlockPartition {
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() {
            return input_err("partition needs at least one block");
        }
        if let Some(j) = sizes.iter().position(|&s| s == 0) {
            return input_err(format!("block {j} is empty"));
        }
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        offsets.push(0);
        for s in sizes {
            offsets.push(offsets.last().unwrap() + s);
        }
        Ok(Self { offsets })
    }

    /// One block per coordinate.
    pub fn singletons(n: usize) -> Self {
        Self {
            offsets: (0..=n).collect(),
        }
    }

    /// `n / size` blocks of equal width.
    pub fn uniform(n: usize, size: usize) -> Result<Self> {
        if size == 0 || n % size != 0 {
            return input_err(format!("{n} columns do not split into blocks of {size}"));
        }
        Self::from_sizes(&vec![size; n / size])
    }

    #[inline]
    pub fn num_blocks(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    #[inline]
    pub fn range(&self, j: usize) -> Range<usize> {
        self.offsets[j]..self.offsets[j + 1]
    }

    #[inline]
    pub fn size(&self, j: usize) -> usize {
        self.offsets[j + 1] - self.offsets[j]
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }
}
