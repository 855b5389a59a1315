//! Stable seed derivation and the generator type used by every stream.
//!
//! Seeds are derived by folding each component through SplitMix64:
//! `state = splitmix64(state ^ component)` starting from a fixed constant.
//! Policy tags are hashed to a component with 64-bit FNV-1a. The scheme only
//! depends on integer arithmetic, so seeds are stable across platforms and
//! toolchains.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

const FOLD_START: u64 = 0x243F_6A88_85A3_08D3;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xCBF2_9CE4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

pub fn derive_seed(components: &[u64]) -> u64 {
    components
        .iter()
        .fold(FOLD_START, |state, &c| splitmix64(state ^ c))
}

/// Environment seed for instance `k` under availability `rho`. Independent of
/// the policy, so every policy faces the same world.
pub fn environment_seed(master: u64, rho: f64, instance: u64) -> u64 {
    derive_seed(&[master, rho.to_bits(), instance])
}

pub fn policy_seed(master: u64, rho: f64, policy_tag: &str, instance: u64) -> u64 {
    derive_seed(&[
        master,
        rho.to_bits(),
        fnv1a(policy_tag.as_bytes()),
        instance,
    ])
}

/// Named sub-streams of one environment seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Ground truth and worker pool construction.
    World = 1,
    /// Tasks, availability and worker contexts.
    Arrivals = 2,
    /// Instantaneous performance noise.
    Noise = 3,
}

pub fn stream_rng(seed: u64, stream: Stream) -> SimRng {
    SimRng::seed_from_u64(derive_seed(&[seed, stream as u64]))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
