//! Seed handling. Every random draw in the toolkit derives from a single
//! user seed through counter-based splitting, so checks can run in any order
//! (or in parallel) and still see identical random inputs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// splitmix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed number `index` of `seed`, independent of any other draw.
pub fn split(seed: u64, index: u64) -> u64 {
    mix(mix(seed) ^ mix(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

/// Child seed for a named purpose (e.g. a verification suite).
pub fn split_named(seed: u64, name: &str) -> u64 {
    let h = name
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    split(seed, h)
}

/// Sequential view over `split(seed, 0), split(seed, 1), ...`.
#[derive(Debug, Clone)]
pub struct SeedStream {
    seed: u64,
    counter: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        SeedStream { seed, counter: 0 }
    }

    pub fn next_seed(&mut self) -> u64 {
        let s = split(self.seed, self.counter);
        self.counter += 1;
        s
    }

    pub fn next_rng(&mut self) -> Rng {
        seeded(self.next_seed())
    }
}
