//! Bit sources feeding the key generator.
//!
//! [`PrngSource`] is the deterministic stand-in for the electronic pRNG that
//! every node on a circuit runs from a shared initialization token. It is
//! SHA-256 in counter mode:
//!
//! ```text
//! block_i = SHA-256("photonion-prng-v1" || u64_be(len(ini)) || ini || u64_be(i))
//! ```
//!
//! with each block's 256 bits emitted most-significant-bit first. It is a
//! reproducible test generator, not a security claim.

use sha2::{Digest, Sha256};

use crate::bits::BitString;
use crate::error::{Error, Result};

pub const GENERATOR_NAME: &str = "sha256-ctr-v1";
const DOMAIN: &[u8] = b"photonion-prng-v1";

/// Anything that yields raw configuration bits.
pub trait BitSource {
    fn next_bit(&mut self) -> Option<bool>;

    /// Takes exactly `count` bits or reports how many were missing.
    fn take_bits(&mut self, count: usize) -> Result<BitString> {
        let mut out = BitString::with_capacity(count);
        for i in 0..count {
            match self.next_bit() {
                Some(b) => out.push(b),
                None => return Err(Error::Underrun { needed: count - i }),
            }
        }
        Ok(out)
    }
}

/// An explicit bit sequence, consumed front to back.
#[derive(Clone, Debug)]
pub struct InjectedBits {
    bits: BitString,
    pos: usize,
}

impl InjectedBits {
    pub fn new(bits: BitString) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }
}

impl BitSource for InjectedBits {
    fn next_bit(&mut self) -> Option<bool> {
        if self.pos < self.bits.len() {
            self.pos += 1;
            Some(self.bits.get(self.pos - 1))
        } else {
            None
        }
    }
}

#[derive(Clone, Debug)]
pub struct PrngSource {
    ini: String,
    /// Bit rate in bits/s; informational only.
    pub rate_bps: Option<f64>,
    counter: u64,
    block: [u8; 32],
    pos: usize,
}

impl PrngSource {
    pub fn new(ini: impl Into<String>) -> Self {
        Self {
            ini: ini.into(),
            rate_bps: None,
            counter: 0,
            block: [0; 32],
            pos: 256,
        }
    }

    pub fn ini(&self) -> &str {
        &self.ini
    }

    pub fn generator(&self) -> &'static str {
        GENERATOR_NAME
    }

    fn refill(&mut self) {
        let mut h = Sha256::new();
        h.update(DOMAIN);
        h.update((self.ini.len() as u64).to_be_bytes());
        h.update(self.ini.as_bytes());
        h.update(self.counter.to_be_bytes());
        self.block.copy_from_slice(&h.finalize());
        self.counter += 1;
        self.pos = 0;
    }
}

impl BitSource for PrngSource {
    fn next_bit(&mut self) -> Option<bool> {
        if self.pos == 256 {
            self.refill();
        }
        let byte = self.block[self.pos / 8];
        let bit = (byte >> (7 - self.pos % 8)) & 1 == 1;
        self.pos += 1;
        Some(bit)
    }
}

/// The first `count` bits produced from `ini`.
pub fn reference_prng(ini: &str, count: usize) -> BitString {
    PrngSource::new(ini)
        .take_bits(count)
        .expect("reference generator is unbounded")
}
