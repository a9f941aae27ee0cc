//! Seed derivation for the deterministic simulations.
//!
//! Every random decision in the workspace flows from a single user seed
//! through [`derive_seed`], so two runs with the same seed are bit-identical
//! and the independent actors (sender, receiver, channel noise, eavesdropper,
//! sampling) never share an RNG stream.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Domain tags for the independent RNG streams of one protocol session.
pub mod domain {
    pub const SENDER: u64 = 1;
    pub const RECEIVER: u64 = 2;
    pub const CHANNEL_NOISE: u64 = 3;
    pub const EVE: u64 = 4;
    pub const SAMPLING: u64 = 5;
    /// Benchmark input-file generation.
    pub const BENCH_INPUT: u64 = 6;
    /// Per-session derivation when one run opens many sessions.
    pub const SESSION_BASE: u64 = 32;
}

/// splitmix64 output step; also usable as a standalone mixing finalizer.
pub(crate) fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent seed for `domain` from a base seed.
///
/// Distinct domains give unrelated streams even for adjacent base seeds;
/// the same (base, domain) pair always gives the same seed.
pub fn derive_seed(base: u64, domain: u64) -> u64 {
    let mut state = base ^ domain.wrapping_mul(0xD6E8_FEB8_6659_FD93);
    splitmix64(&mut state)
}

/// The workspace-standard seeded generator.
///
/// ChaCha12 rather than the `rand` default because its output is specified
/// and stable across platforms and crate versions, which the reproducibility
/// guarantees depend on.
pub fn seeded_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn derive_seed_is_deterministic_and_domain_separated() {
        assert_eq!(derive_seed(7, domain::SENDER), derive_seed(7, domain::SENDER));
        assert_ne!(derive_seed(7, domain::SENDER), derive_seed(7, domain::RECEIVER));
        assert_ne!(derive_seed(7, domain::SENDER), derive_seed(8, domain::SENDER));
    }

    #[test]
    fn splitmix64_reference_values() {
        // first outputs for state 0, cross-checked against the published
        // splitmix64 reference sequence
        let mut s = 0u64;
        assert_eq!(splitmix64(&mut s), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(&mut s), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn seeded_rng_reproduces() {
        let mut a = seeded_rng(42);
        let mut b = seeded_rng(42);
        for _ in 0..16 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}
