//! Sub-seed derivation.
//!
//! Every random stream in a run is derived from the run seed with
//! [`sub_seed`], keyed by a stream domain and an index (robot id or area).
//! Streams never share generator state, so adding or removing consumers in
//! one domain cannot shift the draws of another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for every stochastic component.
pub type SimRng = ChaCha8Rng;

/// Stream domains.
pub mod domain {
    pub const EVENTS: u64 = 1;
    pub const ROBOT: u64 = 2;
    pub const ROBOT_EVENTS_B: u64 = 3;
    pub const ROBOT_EVENTS_R: u64 = 4;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `(seed ^ index, domain)` into an independent 64-bit seed.
pub fn sub_seed(seed: u64, domain: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ index) ^ splitmix64(domain.wrapping_mul(0xD6E8_FEB8_6659_FD93)))
}

pub fn rng_for(seed: u64, domain: u64, index: u64) -> SimRng {
    SimRng::seed_from_u64(sub_seed(seed, domain, index))
}
