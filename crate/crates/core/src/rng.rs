//! Seeded random number generation.
//!
//! All stochastic operations draw from one named, platform-independent
//! generator so that every run is reproducible from the seeds echoed in the
//! analysis report.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator name recorded in report metadata.
pub const RNG_NAME: &str = "chacha8";

/// Build the library's generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer. Used to derive independent sub-seeds from a master
/// seed and to drive the stateless pair-sampling stream in the correlation
/// kernel.
pub(crate) fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the sub-seed for stream `index` of a master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Tiny deterministic stream for index-addressable sampling. Each instance
/// is independent of every other, so consumers may be evaluated in any
/// order or in parallel without changing results.
pub(crate) struct SubStream {
    state: u64,
}

impl SubStream {
    pub(crate) fn new(seed: u64, index: u64) -> Self {
        SubStream {
            state: derive_seed(seed, index),
        }
    }

    pub(crate) fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        splitmix64(self.state)
    }

    /// Uniform draw from `[0, bound)` by rejection, bias-free.
    pub(crate) fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }
}
