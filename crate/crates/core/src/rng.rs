use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The crate's deterministic generator. Every random choice in the library
/// flows through one of these so that equal seeds give identical results.
pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for a sub-task, e.g. one k-means restart.
pub fn substream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
