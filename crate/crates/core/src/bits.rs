//! Packed bit strings.
//!
//! Bits are stored most-significant-first in `u64` words so that index 0 is
//! the leftmost bit as written (`"1001"` has bit 0 set). Unused bits of the
//! last word are kept zero, which lets equality and XOR work word-wise.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(WORD)),
            len: 0,
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    /// `width` low bits of `value`, most significant first.
    pub fn from_uint(value: u64, width: usize) -> Self {
        assert!(width <= WORD);
        let mut out = Self::with_capacity(width);
        for i in (0..width).rev() {
            out.push((value >> i) & 1 == 1);
        }
        out
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut out = Self::new();
        for b in bits {
            out.push(b);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        (self.words[index / WORD] >> (WORD - 1 - index % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        let mask = 1u64 << (WORD - 1 - index % WORD);
        if value {
            self.words[index / WORD] |= mask;
        } else {
            self.words[index / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        if bit {
            let i = self.len - 1;
            self.words[i / WORD] |= 1u64 << (WORD - 1 - i % WORD);
        }
    }

    pub fn extend_from(&mut self, other: &BitString) {
        if self.len.is_multiple_of(WORD) {
            self.words.extend_from_slice(&other.words);
            self.len += other.len;
            return;
        }
        for b in other.iter() {
            self.push(b);
        }
    }

    pub fn truncate(&mut self, len: usize) {
        if len >= self.len {
            return;
        }
        self.len = len;
        self.words.truncate(len.div_ceil(WORD));
        let tail = len % WORD;
        if tail != 0 {
            let last = self.words.len() - 1;
            self.words[last] &= !0u64 << (WORD - tail);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_all_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Interprets the whole string as a big-endian unsigned integer.
    pub fn to_uint(&self) -> u64 {
        assert!(self.len <= WORD);
        if self.len == 0 {
            0
        } else {
            self.words[0] >> (WORD - self.len)
        }
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &BitString) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    /// Number of positions where the two strings differ (over the common prefix).
    pub fn hamming_distance(&self, other: &BitString) -> usize {
        let n = self.len.min(other.len);
        (0..n).filter(|&i| self.get(i) != other.get(i)).count()
    }

    /// Lowercase hex, left-aligned: the final nibble is zero-padded on the right.
    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4);
        let mut s = String::with_capacity(nibbles);
        for k in 0..nibbles {
            let word = self.words[k / 16];
            let nib = (word >> (60 - 4 * (k % 16))) & 0xf;
            s.push(char::from_digit(nib as u32, 16).unwrap());
        }
        s
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<BitString> {
        let digits: Vec<u32> = hex
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                c.to_digit(16)
                    .ok_or_else(|| Error::InvalidBits(format!("non-hex character {c:?}")))
            })
            .collect::<Result<_>>()?;
        if digits.len() != len.div_ceil(4) {
            return Err(Error::InvalidBits(format!(
                "{} hex digits cannot encode {len} bits",
                digits.len()
            )));
        }
        let mut out = BitString::with_capacity(len);
        for d in digits {
            for i in (0..4).rev() {
                if out.len() < len {
                    out.push((d >> i) & 1 == 1);
                } else if (d >> i) & 1 == 1 {
                    return Err(Error::InvalidBits("nonzero hex padding".into()));
                }
            }
        }
        Ok(out)
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Parses `'0'`/`'1'` characters; `_` is accepted as a visual separator.
    fn from_str(s: &str) -> Result<Self> {
        let mut out = BitString::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                '_' => {}
                other => {
                    return Err(Error::InvalidBits(format!(
                        "unexpected character {other:?}"
                    )))
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self::from_bools(iter)
    }
}
