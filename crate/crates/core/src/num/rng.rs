use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Concrete generator behind every sub-stream.
pub type StreamRng = ChaCha8Rng;

/// What a random sub-stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Channel,
    Symbols,
    Dither,
    Noise,
    Guess,
    Oracle,
    Custom(u32),
}

impl Purpose {
    fn code(self) -> u64 {
        match self {
            Purpose::Channel => 1,
            Purpose::Symbols => 2,
            Purpose::Dither => 3,
            Purpose::Noise => 4,
            Purpose::Guess => 5,
            Purpose::Oracle => 6,
            Purpose::Custom(c) => 0x1_0000_0000 | c as u64,
        }
    }
}

/// Root of a family of independent, reproducible random streams.
///
/// A stream is keyed by `(seed, outer, inner, purpose)`, so every unit of
/// work draws the same numbers no matter which thread runs it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededRng {
    seed: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, outer: u64, inner: u64, purpose: Purpose) -> StreamRng {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&outer.to_le_bytes());
        key[16..24].copy_from_slice(&inner.to_le_bytes());
        key[24..32].copy_from_slice(&purpose.code().to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }
}

/// One draw of `CN(0, variance)`.
#[inline]
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}
