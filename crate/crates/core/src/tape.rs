//! Explicit, reproducible randomness.
//!
//! Every probabilistic step in the crate draws from a [`RandomTape`] handed in
//! by the caller. Fixing the seed fixes the whole transcript.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::bits::Bits;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct RandomTape {
    rng: ChaCha8Rng,
}

impl RandomTape {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn from_seed_bytes(seed: [u8; 32]) -> Self {
        Self {
            rng: ChaCha8Rng::from_seed(seed),
        }
    }

    /// Derives an independent child tape. The parent advances by 32 bytes.
    pub fn split(&mut self) -> RandomTape {
        let mut seed = [0u8; 32];
        self.rng.fill_bytes(&mut seed);
        Self::from_seed_bytes(seed)
    }

    pub fn bits(&mut self, len: usize) -> Bits {
        let mut bytes = vec![0u8; len.div_ceil(8)];
        self.rng.fill_bytes(&mut bytes);
        Bits::from_prefix(bytes, len)
    }

    pub fn bit(&mut self) -> bool {
        self.rng.gen()
    }

    /// `true` with probability `p`; `p <= 0` never draws from the stream.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        if p <= 0.0 {
            return false;
        }
        self.rng.gen::<f64>() < p
    }

    /// Number of successes in `n` independent `p`-trials, from a single
    /// binomial draw.
    pub fn binomial(&mut self, n: usize, p: f64) -> usize {
        if p <= 0.0 || n == 0 {
            return 0;
        }
        if p >= 1.0 {
            return n;
        }
        let d = Binomial::new(n as u64, p).expect("p checked to lie in (0, 1)");
        d.sample(&mut self.rng) as usize
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    pub fn rng(&mut self) -> &mut impl RngCore {
        &mut self.rng
    }
}

/// A source of classical coin tosses for key generation.
///
/// Fresh sampling reads from a [`RandomTape`]; derandomized key generation
/// reads a fixed [`Bits`] string through a [`CoinReader`].
pub trait CoinSource {
    fn take(&mut self, len: usize) -> Result<Bits>;
}

impl CoinSource for RandomTape {
    fn take(&mut self, len: usize) -> Result<Bits> {
        Ok(self.bits(len))
    }
}

/// Consumes a fixed coin string front to back.
#[derive(Debug, Clone)]
pub struct CoinReader<'a> {
    coins: &'a Bits,
    pos: usize,
}

impl<'a> CoinReader<'a> {
    pub fn new(coins: &'a Bits) -> Self {
        Self { coins, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.coins.len() - self.pos
    }

    /// Fails unless every coin was consumed.
    pub fn finish(self) -> Result<()> {
        match self.remaining() {
            0 => Ok(()),
            _ => Err(Error::InvalidLength {
                expected: self.pos,
                actual: self.coins.len(),
            }),
        }
    }
}

impl CoinSource for CoinReader<'_> {
    fn take(&mut self, len: usize) -> Result<Bits> {
        if len > self.remaining() {
            return Err(Error::InvalidLength {
                expected: self.pos + len,
                actual: self.coins.len(),
            });
        }
        let out = self.coins.slice(self.pos..self.pos + len);
        self.pos += len;
        Ok(out)
    }
}
