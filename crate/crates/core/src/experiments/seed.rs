//! Per-trial seed derivation.
//!
//! `derive_trial_seed` is bit-exact by definition:
//!
//! ```text
//! mix(x)  = SplitMix64 finalizer of x + 0x9E3779B97F4A7C15
//! s0      = mix(master)
//! s1      = mix(s0 ^ experiment_id)
//! seed    = mix(s1 ^ trial_index)
//! ```
//!
//! Each trial then draws from `ChaCha8Rng::seed_from_u64(seed)` on a fixed
//! stream per role, so results never depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stream carrying the occupancy realization of a trial.
pub const STREAM_REALIZATION: u64 = 0;
/// Stream used by the non-adaptive detector.
pub const STREAM_NONADAPTIVE: u64 = 1;

/// Stream used by the adaptive detector with `k` exploration cycles.
pub fn stream_adaptive(k: u32) -> u64 {
    2 + k as u64
}

/// One SplitMix64 step.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_trial_seed(master_seed: u64, experiment_id: u64, trial_index: u64) -> u64 {
    let s = splitmix64(master_seed);
    let s = splitmix64(s ^ experiment_id);
    splitmix64(s ^ trial_index)
}

/// 64-bit FNV-1a over `bytes`.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Identifier of a scenario cell. Deliberately ignores the detector and its
/// budget so every method and every budget probe sees the same realizations.
pub fn cell_id(n: usize, epsilon: f64, gamma: f64, target_holes: usize) -> u64 {
    let mut bytes = Vec::with_capacity(40);
    bytes.extend_from_slice(b"cell");
    bytes.extend_from_slice(&(n as u64).to_le_bytes());
    bytes.extend_from_slice(&epsilon.to_bits().to_le_bytes());
    bytes.extend_from_slice(&gamma.to_bits().to_le_bytes());
    bytes.extend_from_slice(&(target_holes as u64).to_le_bytes());
    fnv1a(&bytes)
}

pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
