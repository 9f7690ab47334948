use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Seeded generator on an independent stream. Streams keep the random
/// draws of different consumers (initialization, sampling per epoch, ...)
/// from shifting each other.
pub fn seeded(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) mod streams {
    pub const INIT: u64 = 1;
    pub const SKIPGRAM: u64 = 2;
    pub const SPLIT: u64 = 3;
    pub const ENLARGE: u64 = 4;
    pub const SYNTH: u64 = 5;
    pub const SVD: u64 = 6;
    /// Epoch samplers use `SAMPLER_BASE + epoch`.
    pub const SAMPLER_BASE: u64 = 1 << 32;
}
