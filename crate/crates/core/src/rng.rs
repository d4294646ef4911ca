//! Reproducible random streams.
//!
//! Every stochastic entry point in this crate is driven by a ChaCha12 stream
//! obtained from a [`StreamFactory`]. A factory is keyed by a 64-bit seed and
//! hands out counter-keyed substreams, so results are a pure function of
//! (seed, substream index) no matter how work is scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Factory for independent, reproducible substreams of one seeded generator.
#[derive(Debug, Clone, Copy)]
pub struct StreamFactory {
    seed: u64,
}

impl StreamFactory {
    pub fn new(seed: u64) -> Self {
        StreamFactory { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The `index`-th substream. Streams with distinct indices never overlap.
    pub fn stream(&self, index: u64) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

/// Uniform draw strictly inside (0, 1): (i + 1/2)·2⁻⁵³ for i uniform on
/// [0, 2⁵³). Keeps quantile transforms away from both endpoints.
pub fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    const SCALE: f64 = 1.0 / 9007199254740992.0; // 2^-53
    ((rng.random::<u64>() >> 11) as f64 + 0.5) * SCALE
}
