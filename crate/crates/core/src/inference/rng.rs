//! Reproducible random streams.
//!
//! Draws come from ChaCha8 keyed by `(seed, stream)`: the 32-byte key is
//! `seed` and `stream` in little-endian followed by 16 zero bytes. Parallel
//! work uses the ChaCha stream counter as the block index, so every
//! replicate block has its own independent sequence and results do not
//! depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        SeededRng {
            seed,
            stream,
            inner: Self::generator(seed, stream, 0),
        }
    }

    fn generator(seed: u64, stream: u64, block: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&stream.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(block);
        rng
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Independent generator for replicate block `index`.
    pub fn block(&self, index: u64) -> SeededRng {
        SeededRng {
            seed: self.seed,
            stream: self.stream,
            inner: Self::generator(self.seed, self.stream, index),
        }
    }

    /// A different stream of the same seed.
    pub fn with_stream(&self, stream: u64) -> SeededRng {
        SeededRng::new(self.seed, stream)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on `(0, 1]`, safe to take logarithms of.
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.uniform()
    }
}
