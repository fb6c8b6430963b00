//! Reproducible Gaussian substreams for parallel Monte Carlo.
//!
//! Every path owns one [`RngStream`], a `(master_seed, stream_index)` pair
//! mapped onto a distinct ChaCha12 stream. The generator output is a pure
//! function of the pair, so workers can be scheduled in any order, on any
//! number of threads, and still reproduce the same draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// Counter-based handle for one independent Gaussian substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// Instantiate the generator for this substream.
    ///
    /// ChaCha streams with distinct nonces are statistically independent,
    /// which is what makes one-stream-per-path sound.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Fill `out` with standard normal draws from `rng`.
pub fn fill_standard_normal(rng: &mut ChaCha12Rng, out: &mut [f64]) {
    for slot in out {
        *slot = rng.sample(StandardNormal);
    }
}
