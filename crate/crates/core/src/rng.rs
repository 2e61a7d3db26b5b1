//! Per-path random streams.
//!
//! Every path owns a ChaCha8 stream selected by its index, so results do not
//! depend on how paths are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type PathRng = ChaCha8Rng;

/// Generator for path `stream` of an experiment seeded with `seed`.
pub fn path_rng(seed: u64, stream: u64) -> PathRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Current position of the generator in 32-bit words.
pub fn word_pos(rng: &PathRng) -> u64 {
    rng.get_word_pos() as u64
}
