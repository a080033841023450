//! Counter-based random streams keyed by `(seed, sample index, stream)`.
//!
//! ChaCha is itself a counter-mode generator: the key selects the sample, the
//! stream id selects the purpose, and the internal block counter indexes draws.
//! Two keys never share state, so results do not depend on iteration order or
//! thread count.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Well-known stream ids.
pub mod stream {
    pub const PLAN: u64 = 0;
    pub const VIEW_A: u64 = 1;
    pub const VIEW_B: u64 = 2;
    pub const PARTNER: u64 = 3;
    pub const SPLIT: u64 = 4;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngKey {
    pub seed: u64,
    pub index: u64,
    pub stream: u64,
}

impl RngKey {
    pub fn new(seed: u64, index: u64, stream: u64) -> Self {
        Self {
            seed,
            index,
            stream,
        }
    }

    pub fn rng(self) -> SampleRng {
        SampleRng::from_key(self)
    }
}

/// The random state handed to plan sampling.
#[derive(Debug, Clone)]
pub struct SampleRng(ChaCha8Rng);

impl SampleRng {
    pub fn new(seed: u64, index: u64) -> Self {
        Self::from_key(RngKey::new(seed, index, stream::PLAN))
    }

    pub fn from_key(key: RngKey) -> Self {
        let mut bytes = [0u8; 32];
        bytes[..8].copy_from_slice(&key.seed.to_le_bytes());
        bytes[8..16].copy_from_slice(&key.index.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(bytes);
        rng.set_stream(key.stream);
        Self(rng)
    }
}

impl RngCore for SampleRng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}
