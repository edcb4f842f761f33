//! Seeded random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream keyed by
//! a 64-bit seed and a stream ordinal. Work items (replicates, trials) own
//! their stream, so results never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for all sampling.
pub type Stream = ChaCha8Rng;

/// Stream `ordinal` of the generator keyed by `seed`.
pub fn stream(seed: u64, ordinal: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ordinal);
    rng
}

/// Mix a master seed with a label and an ordinal into an independent seed.
///
/// SplitMix64 finalizer applied to each input in turn.
pub fn derive_seed(seed: u64, label: u64, ordinal: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(mix(mix(seed) ^ label) ^ ordinal)
}
