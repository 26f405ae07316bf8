//! Seeding and stream derivation.
//!
//! All randomness in the crate flows through [`Rng`], a ChaCha12 generator
//! seeded from a `u64`. Independent streams (replicates, worker chunks,
//! per-step noise) are derived with [`derive_seed`], never by sharing or
//! splitting generator state across consumers.

use rand::SeedableRng;

/// The crate-wide generator. ChaCha12 is counter-based, platform-independent,
/// and cheap to construct, so derived streams are practical at fine grain.
pub type Rng = rand_chacha::ChaCha12Rng;

/// Build a generator from a bare seed.
pub fn seeded_rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Derive the seed for substream `index` of a base seed.
///
/// Mixing function, frozen for reproducibility (changing it would silently
/// reseed every experiment): the state `base + (index + 1) * GOLDEN` is passed
/// through the SplitMix64 finalizer. `GOLDEN` is odd, so for a fixed base the
/// pre-mix state is injective in `index` (mod 2^64), and the finalizer is a
/// bijection on u64; distinct indices therefore always yield distinct seeds.
/// The `+ 1` keeps `derive_seed(base, 0)` from collapsing onto `base` itself.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut z = base.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for substream `index` of `base`.
pub fn derived_rng(base: u64, index: u64) -> Rng {
    seeded_rng(derive_seed(base, index))
}
