use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{input_err, Result};

/// Uniform fixed-size block sampler.
///
/// Backed by ChaCha8 seeded with `seed_from_u64`, so a 64-bit seed fixes
/// the whole sequence independently of platform and thread count.
#[derive(Debug, Clone)]
pub struct BlockSampler {
    rng: ChaCha8Rng,
    seed: u64,
}

impl BlockSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `K` distinct blocks out of `J`, sorted ascending.
    pub fn sample(&mut self, num_blocks: usize, k: usize) -> Result<Vec<usize>> {
        sample_blocks(&mut self.rng, num_blocks, k)
    }
}

/// Size-`k` subset of `0..num_blocks` drawn uniformly without replacement,
/// sorted ascending. `k == num_blocks` returns every block without
/// touching the generator.
pub fn sample_blocks(rng: &mut ChaCha8Rng, num_blocks: usize, k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > num_blocks {
        return input_err(format!("cannot pick {k} of {num_blocks} blocks"));
    }
    if k == num_blocks {
        return Ok((0..num_blocks).collect());
    }
    let mut picked = index::sample(rng, num_blocks, k).into_vec();
    picked.sort_unstable();
    Ok(picked)
}
