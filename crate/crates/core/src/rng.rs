//! Counter-based pseudo-random numbers for replayable fixtures.
//!
//! The generator is SplitMix64 expressed in counter form: draw `i` of a stream
//! with key `k` is `mix64(k + (i + 1) * 0x9E37_79B9_7F4A_7C15)` (wrapping),
//! where `mix64` is the SplitMix64 finaliser
//!
//! ```text
//! z = (z ^ (z >> 30)) * 0xBF58_476D_1CE4_E5B9
//! z = (z ^ (z >> 27)) * 0x94D0_49BB_1331_11EB
//! z =  z ^ (z >> 31)
//! ```
//!
//! With `k = seed` the stream is the reference SplitMix64 sequence. Independent
//! sub-streams (one per subject, one per dataset in a sweep) use the key
//! `mix64(seed ^ mix64(index + 0x9E37_79B9_7F4A_7C15))`, so any draw is a pure
//! function of `(seed, index, counter)` and can be reproduced in isolation.
//!
//! Uniform doubles take the top 53 bits: `(x >> 11) * 2^-53`, in `[0, 1)`.

use rand_core::RngCore;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key of sub-stream `index` under `seed`.
#[inline]
pub fn stream_key(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index.wrapping_add(GOLDEN_GAMMA)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    /// Reference SplitMix64 stream seeded with `seed`.
    pub fn new(seed: u64) -> Self {
        Self {
            key: seed,
            counter: 0,
        }
    }

    pub fn for_stream(seed: u64, index: u64) -> Self {
        Self {
            key: stream_key(seed, index),
            counter: 0,
        }
    }

    /// Draw number `counter` of this stream without advancing it.
    #[inline]
    pub fn at(&self, counter: u64) -> u64 {
        mix64(
            self.key
                .wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)),
        )
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

impl RngCore for CounterRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        let out = self.at(self.counter);
        self.counter = self.counter.wrapping_add(1);
        out
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        rand_core::impls::fill_bytes_via_next(self, dst)
    }
}
