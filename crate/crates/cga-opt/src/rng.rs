//! Deterministic stream derivation.
//!
//! Every random decision in a campaign is drawn from a stream derived from
//! the master seed plus a small integer tag path, e.g. `(generation, index)`.
//! Re-running with the same seed therefore reproduces the campaign exactly,
//! and the stream consumed while mutating variable `i` of generation `g`
//! never depends on how many draws some other variable consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mix one 64-bit word into a state using the splitmix64 finalizer.
///
/// splitmix64 is a tiny, well-studied mixer with full avalanche; chaining it
/// over `(seed, tag0, tag1, ...)` gives a cheap keyed hash that is plenty for
/// decorrelating RNG streams (it is not a cryptographic construction).
fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Collapse a master seed and a tag path into a single stream seed.
pub fn mix_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut acc = splitmix64(seed);
    for &t in tags {
        acc = splitmix64(acc ^ t);
    }
    acc
}

/// Build the RNG for one logical decision stream.
///
/// Typical tag paths: `[0, i]` for individual `i` of the initial population,
/// `[g, i]` for the mutation of free variable `i` in generation `g >= 1`.
pub fn derive_stream(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(seed, tags))
}
