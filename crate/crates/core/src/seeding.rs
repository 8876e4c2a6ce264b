//! Deterministic derivation of sub-seeds from a single master seed.
//!
//! Every source of randomness in the crate is seeded through here, so a run
//! is a pure function of its master seed: adding or removing parallelism
//! never changes results, and independently seeded components (one per
//! (ad, sample) cell, one per certification instance, ...) can be computed
//! in any order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Derive a labeled child seed from `master`.
///
/// The label separates domains ("live-edge", "solver", "instance", ...) and
/// `indices` separates cells within a domain. FNV-1a over the label and
/// indices feeds a splitmix64 finalizer; the scheme is fixed and
/// platform-independent.
pub fn child_seed(master: u64, label: &str, indices: &[u64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    for ix in indices {
        for b in ix.to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    splitmix64(master ^ splitmix64(h))
}

/// A ChaCha rng seeded from [`child_seed`]; portable across platforms.
pub fn child_rng(master: u64, label: &str, indices: &[u64]) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(child_seed(master, label, indices))
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
