//! Counter-based random streams.
//!
//! Every trial owns a 256-bit key derived from `(master_seed, grid_key,
//! trial)`. Each arm draws its rewards from its own ChaCha stream under that
//! key, so the `n`-th reward of arm `i` is a fixed function of the key no
//! matter how pulls of different arms interleave. Privacy noise lives on a
//! separate stream. Two policies run from the same [`TrialStreams`] see the
//! same reward table, which is what the early-stopping coupling relies on.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const NOISE_STREAM: u64 = 0;
const OMEGA_STREAM: u64 = u64::MAX;

/// One reproducible sequence of uniform variates on the open interval (0, 1).
#[derive(Clone, Debug)]
pub struct UniformStream {
    rng: ChaCha8Rng,
}

impl UniformStream {
    pub fn from_seed_u64(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn keyed(key: [u8; 32], stream: u64) -> Self {
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Next uniform variate, strictly inside (0, 1).
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        // 53 random bits, offset by half an ulp so 0 and 1 are unreachable.
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

/// Key material for one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialStreams {
    key: [u8; 32],
}

impl TrialStreams {
    /// Derives the trial key by reading word block `trial` of the ChaCha
    /// stream `grid_key` under `master_seed`.
    pub fn new(master_seed: u64, grid_key: u64, trial: u64) -> Self {
        let mut root = ChaCha8Rng::seed_from_u64(master_seed);
        root.set_stream(grid_key);
        root.set_word_pos(u128::from(trial) * 8);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&root.next_u64().to_le_bytes());
        }
        Self { key }
    }

    pub fn from_key(key: [u8; 32]) -> Self {
        Self { key }
    }

    pub fn key(&self) -> [u8; 32] {
        self.key
    }

    /// Reward stream of the 0-based arm `arm`.
    pub fn arm(&self, arm: usize) -> UniformStream {
        UniformStream::keyed(self.key, arm as u64 + 1)
    }

    /// Stream consumed by privacy mechanisms.
    pub fn noise(&self) -> UniformStream {
        UniformStream::keyed(self.key, NOISE_STREAM)
    }

    /// Spare stream for auxiliary randomness (instance generation, tables).
    pub fn auxiliary(&self) -> UniformStream {
        UniformStream::keyed(self.key, OMEGA_STREAM)
    }
}
