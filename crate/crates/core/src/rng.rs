//! Seeded, splittable random streams.
//!
//! A stream is keyed by `(master_seed, stream_id, agent_substream)`. The
//! master seed and agent substream form the ChaCha key; the stream id selects
//! one of ChaCha's 2^64 independent streams under that key.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KEY_TAG: u64 = 0x6e61_6e6f_7369_6d31;

#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    agent_substream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64, agent_substream: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&agent_substream.to_le_bytes());
        key[16..24].copy_from_slice(&KEY_TAG.to_le_bytes());
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(stream_id);
        RngStream {
            master_seed,
            stream_id,
            agent_substream,
            inner,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn agent_substream(&self) -> u64 {
        self.agent_substream
    }

    /// Uniform draw on `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
