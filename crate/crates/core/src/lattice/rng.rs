//! Counter-based random streams.
//!
//! Every link update draws from its own generator seeded by
//! `(seed, epoch, link)`, so results do not depend on the order in which
//! links are visited or on the number of worker threads.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type StreamRng = Xoshiro256PlusPlus;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkStreams {
    seed: u64,
}

/// Epoch reserved for hot starts.
pub const HOT_START_EPOCH: u64 = u64::MAX;

impl LinkStreams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, epoch: u64, link: usize) -> StreamRng {
        let mut h = splitmix(self.seed ^ 0x6a09_e667_f3bc_c908);
        h = splitmix(h ^ epoch);
        h = splitmix(h ^ link as u64);
        StreamRng::seed_from_u64(h)
    }
}

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
