//! Counter-based random streams.
//!
//! Output `i` of a stream with key `k` is a pure function `mix(k ⊕ mix(i))`, so
//! any position of any stream can be reproduced without replaying the ones
//! before it. Sub-streams are derived by hashing `key ⊕ index`; this is how
//! per-instant and per-replication randomness is made independent of the
//! order in which work is scheduled.

use rand::RngCore;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer; a bijection on `u64` with full avalanche.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key of the sub-stream `index` of `seed`.
#[inline]
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ index)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng {
            key: mix64(seed),
            counter: 0,
        }
    }

    /// Independent stream for `index`, e.g. a sampling instant or a replication.
    pub fn substream(seed: u64, index: u64) -> Self {
        CounterRng::new(derive_seed(seed, index))
    }

    pub fn position(&self) -> u64 {
        self.counter
    }

    /// Value at an arbitrary position, without advancing.
    pub fn peek_at(&self, position: u64) -> u64 {
        mix64(self.key ^ mix64(position))
    }
}

impl RngCore for CounterRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        let out = self.peek_at(self.counter);
        self.counter = self.counter.wrapping_add(1);
        out
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
