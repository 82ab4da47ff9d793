//! Seed fan-out. A single run seed is mixed with a stream name so that the
//! split, initialization, sampling and dropout generators are independent of
//! each other and individually reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Derive a sub-seed for a named stream, optionally indexed (epoch, batch, run).
pub fn derive_seed(seed: u64, stream: &str, index: &[u64]) -> u64 {
    let mut s = splitmix64(seed ^ fnv1a(stream));
    for &i in index {
        s = splitmix64(s ^ i.wrapping_mul(0xA24B_AED4_963E_E407));
    }
    s
}

pub fn stream(seed: u64, name: &str, index: &[u64]) -> Rng {
    Rng::seed_from_u64(derive_seed(seed, name, index))
}
