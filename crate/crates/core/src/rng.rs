//! Counter-based random substreams.
//!
//! Every random quantity is drawn from a ChaCha stream addressed by
//! `(seed, domain, index)`, so results never depend on scheduling or on the
//! number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream domains. Distinct domains never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    /// Channel draws for one transmitted-symbol pattern.
    ChannelBank = 1,
    /// Channel draws for a stand-alone category estimate.
    Category = 2,
    /// End-to-end simulation trials, one stream per block.
    Oracle = 3,
    /// Plain observation sampling.
    Observations = 4,
    /// Points at which solver invariants are spot-checked.
    Audit = 5,
}

/// Block size for chunked trial streams.
pub const BLOCK: usize = 4096;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The generator for substream `index` of `domain` under `seed`.
pub fn stream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let key = splitmix(seed ^ splitmix(domain as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}
