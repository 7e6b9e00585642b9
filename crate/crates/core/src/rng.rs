//! Counter-based random substreams.
//!
//! Every experiment carries one 64-bit seed. A draw is identified by the pair
//! `(trial, purpose)` and gets its own ChaCha8 stream
//! `stream = trial << 8 | purpose`, keyed by the experiment seed. Streams never
//! overlap, so a trial's draws do not depend on which worker evaluates it or on
//! how many other trials ran before it. Changing one purpose's consumption
//! (for example a denser user process) leaves the other purposes untouched,
//! which keeps paired-seed comparisons aligned.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a substream is used for. The discriminant is the low byte of the stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    SmallCells = 0,
    SmallCellUsers = 1,
    MacroUsers = 2,
    Sleep = 3,
    BandSplit = 4,
    Fading = 5,
    Standalone = 0xff,
}

pub fn substream(seed: u64, trial: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((trial << 8) | purpose as u64);
    rng
}

/// Stream for single-shot operations that take a bare seed.
pub fn standalone(seed: u64) -> ChaCha8Rng {
    substream(seed, 0, Purpose::Standalone)
}
