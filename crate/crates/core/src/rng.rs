//! Named, independent random substreams derived from one master seed.
//!
//! Every consumer of randomness (building layout, trees, lights, users, the
//! ABS, per-bin vegetation geometry) draws from its own ChaCha stream, keyed
//! by a label and an index. Changing how many draws one consumer makes never
//! shifts another consumer's sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The consumer a substream belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Stream {
    Buildings = 1,
    Trees = 2,
    Lights = 3,
    Users = 4,
    Abs = 5,
    Vegetation = 6,
    Links = 7,
}

/// Builds the RNG for `(seed, stream, index)`.
///
/// `index` is usually the city index; two different indices give unrelated
/// streams.
pub fn substream(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 56) ^ (index & 0x00ff_ffff_ffff_ffff));
    rng
}
