use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent RNG stream for one unit of work (a record, a tree, a fold).
///
/// Streams are keyed by `(seed, domain, index)` so results never depend on
/// the order in which units are scheduled.
pub(crate) fn stream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ domain.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(index);
    rng
}

pub(crate) const DOMAIN_GENERATOR: u64 = 1;
pub(crate) const DOMAIN_AUGMENT: u64 = 2;
pub(crate) const DOMAIN_FOLDS: u64 = 3;
pub(crate) const DOMAIN_FOREST: u64 = 4;
pub(crate) const DOMAIN_SMO: u64 = 5;
