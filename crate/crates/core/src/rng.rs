//! Counter-derived random substreams.
//!
//! Every Monte Carlo routine derives one ChaCha8 stream per work item from the
//! run seed and the item index, so results do not depend on how work is
//! scheduled across threads.

use rand::distr::{Distribution, Open01};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Independent stream `index` of the generator seeded by `seed`.
pub fn substream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A draw from U(0, 1) that is never exactly 0 or 1.
pub fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Open01.sample(rng)
}
