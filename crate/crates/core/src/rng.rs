//! Seeded random stream shared by every stochastic component.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Name of the pinned generator, recorded in every manifest.
pub const GENERATOR_NAME: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

/// A deterministic stream of draws. The same seed yields the same sequence on
/// every platform: uniforms use the top 53 bits of a `u64`, integer draws use
/// rejection sampling on raw `u64` words.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniform integer in `0..n`. Panics if `n == 0`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index range must be non-empty");
        let n = n as u64;
        // largest multiple of n that fits; words at or above it are rejected
        let zone = u64::MAX - (u64::MAX % n + 1) % n;
        loop {
            let w = self.inner.next_u64();
            if w <= zone {
                return (w % n) as usize;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RngStream::new(42);
        let mut b = RngStream::new(42);
        for _ in 0..1000 {
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        }
        assert_eq!(a.index(7), b.index(7));
    }

    #[test]
    fn different_seeds_diverge() {
        let mut a = RngStream::new(1);
        let mut b = RngStream::new(2);
        let same = (0..100).filter(|_| a.uniform() == b.uniform()).count();
        assert!(same < 3);
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut r = RngStream::new(7);
        for _ in 0..100_000 {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn index_covers_range() {
        let mut r = RngStream::new(3);
        let mut seen = [0usize; 5];
        for _ in 0..5000 {
            seen[r.index(5)] += 1;
        }
        assert!(seen.iter().all(|&c| c > 800), "{seen:?}");
        assert_eq!(r.index(1), 0);
    }

    #[test]
    fn pinned_first_draws() {
        // freezes the generator; a dependency bump that changes the stream fails here
        let mut r = RngStream::new(0);
        let first: Vec<u64> = (0..3).map(|_| r.uniform().to_bits()).collect();
        assert_eq!(first, [0x3fe6b0beecf4f347, 0x3fddd1a957eeb630, 0x3fe65f61a6503c54]);
        assert_eq!(r.index(1000), 556);
    }
}
