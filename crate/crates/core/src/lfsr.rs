//! Bit-exact LFSR output streams.
//!
//! For a generator labelled `g(x)` of degree `n` and seed `h`, the output
//! sequence is defined by
//!
//! ```text
//! s_t = h[t]                                          0 <= t < n
//! s_t = s_{t-n} ^ XOR_{k in g, 1 <= k < n} s_{t-k}    t >= n
//! ```
//!
//! and the stream is `s_n, s_{n+1}, ...`: the seed bits are written into the
//! register and skipped, never emitted. This is a Fibonacci register whose
//! characteristic polynomial is the reciprocal of the label, so `x^3+x+1`
//! seeded with `101` yields `00111...`. The reciprocal of a primitive
//! polynomial is primitive, so the maximal-period guarantee carries over.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::gf2::GenPoly;

/// Largest register length the word-level generator handles.
pub const MAX_REGISTER: u32 = 64;

/// A running register. `state` bit `i` holds `s_{t-n+i}`, so bit 0 is the
/// oldest bit in the window.
#[derive(Clone, Debug)]
pub struct Lfsr {
    n: u32,
    taps: u64,
    state: u64,
}

impl Lfsr {
    pub fn new(poly: &GenPoly, seed: &BitString) -> Result<Self> {
        let n = poly.degree();
        if n > MAX_REGISTER {
            return Err(Error::UnsupportedDegree {
                degree: n,
                min: 2,
                max: MAX_REGISTER,
            });
        }
        if seed.len() != n as usize {
            return Err(Error::LengthMismatch {
                left: seed.len(),
                right: n as usize,
            });
        }
        // s_{t-n} sits at bit 0, s_{t-k} at bit n-k.
        let mut taps = 1u64;
        for k in poly.exponents().filter(|&k| k >= 1 && k < n) {
            taps |= 1 << (n - k);
        }
        let mut state = 0u64;
        for (i, b) in seed.iter().enumerate() {
            state |= (b as u64) << i;
        }
        Ok(Self { n, taps, state })
    }

    #[inline]
    pub fn next_bit(&mut self) -> bool {
        let bit = (self.state & self.taps).count_ones() & 1;
        self.state >>= 1;
        self.state |= (bit as u64) << (self.n - 1);
        bit == 1
    }

    /// Current length-`n` window, oldest bit first.
    pub fn window(&self) -> BitString {
        (0..self.n).map(|i| (self.state >> i) & 1 == 1).collect()
    }
}

impl Iterator for Lfsr {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        Some(self.next_bit())
    }
}

/// `count` output bits after the skipped seed.
pub fn lfsr_stream(poly: &GenPoly, seed: &BitString, count: usize) -> Result<BitString> {
    let mut reg = Lfsr::new(poly, seed)?;
    let mut out = BitString::with_capacity(count);
    for _ in 0..count {
        out.push(reg.next_bit());
    }
    Ok(out)
}

/// Smallest `t >= 1` after which the register window repeats the seed.
/// Brute force; limited to `n <= 20`.
pub fn lfsr_state_period(poly: &GenPoly, seed: &BitString) -> Result<u64> {
    let n = poly.degree();
    if n > 20 {
        return Err(Error::UnsupportedDegree {
            degree: n,
            min: 2,
            max: 20,
        });
    }
    let mut reg = Lfsr::new(poly, seed)?;
    let start = reg.state;
    // A singular register (no constant term) may never return to the seed.
    for t in 1..=(1u64 << n) {
        reg.next_bit();
        if reg.state == start {
            return Ok(t);
        }
    }
    Err(Error::InvalidPolynomial(format!(
        "{poly}: state sequence does not return to the seed"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::enumerate_primitive;
    use proptest::prelude::*;

    fn poly(s: &str) -> GenPoly {
        s.parse().unwrap()
    }

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    /// Direct transcription of the recurrence over a plain Vec, used as the
    /// oracle for the packed register.
    fn recurrence_oracle(p: &GenPoly, seed: &BitString, count: usize) -> BitString {
        let n = p.degree() as usize;
        let mut s: Vec<bool> = seed.iter().collect();
        for t in n..n + count {
            let mut b = s[t - n];
            for k in p.exponents().filter(|&k| k >= 1 && (k as usize) < n) {
                b ^= s[t - k as usize];
            }
            s.push(b);
        }
        s[n..].iter().copied().collect()
    }

    #[test]
    fn worked_example_key_parts() {
        assert_eq!(
            lfsr_stream(&poly("x^3+x+1"), &bs("101"), 5).unwrap(),
            bs("00111")
        );
        assert_eq!(
            lfsr_stream(&poly("x^3+x^2+1"), &bs("100"), 5).unwrap(),
            bs("10111")
        );
        assert_eq!(
            lfsr_stream(&poly("x^3+x^2+1"), &bs("010"), 5).unwrap(),
            bs("11100")
        );
        assert_eq!(
            lfsr_stream(&poly("x^3+x+1"), &bs("110"), 5).unwrap(),
            bs("10011")
        );
    }

    #[test]
    fn zero_seed_is_fixed_point() {
        let out = lfsr_stream(&poly("x^5+x^2+1"), &BitString::zeros(5), 40).unwrap();
        assert!(out.is_all_zero());
        assert_eq!(out.len(), 40);
    }

    #[test]
    fn seed_length_mismatch() {
        assert!(matches!(
            lfsr_stream(&poly("x^3+x+1"), &bs("10"), 4),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn empty_stream() {
        assert!(lfsr_stream(&poly("x^3+x+1"), &bs("111"), 0)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn period_examples() {
        assert_eq!(lfsr_state_period(&poly("x^3+x+1"), &bs("101")).unwrap(), 7);
        assert_eq!(lfsr_state_period(&poly("x^3+x+1"), &bs("000")).unwrap(), 1);
        assert_eq!(
            lfsr_state_period(&poly("x^4+x^3+x^2+x+1"), &bs("0001")).unwrap(),
            5
        );
    }

    #[test]
    fn period_is_maximal_for_primitive_polys() {
        for n in 2..=10u32 {
            for p in enumerate_primitive(n).unwrap() {
                for seed in 1..(1u64 << n) {
                    let seed = BitString::from_uint(seed, n as usize);
                    assert_eq!(lfsr_state_period(&p, &seed).unwrap(), (1 << n) - 1);
                }
            }
        }
    }

    #[test]
    fn window_tracks_recent_bits() {
        let mut reg = Lfsr::new(&poly("x^3+x+1"), &bs("101")).unwrap();
        assert_eq!(reg.window(), bs("101"));
        reg.next_bit();
        assert_eq!(reg.window(), bs("010"));
    }

    proptest! {
        #[test]
        fn packed_register_matches_recurrence(
            idx in 0usize..6, seed in any::<u64>(), count in 0usize..300
        ) {
            let p = enumerate_primitive(9).unwrap()[idx];
            let seed = BitString::from_uint(seed & 0x1ff, 9);
            prop_assert_eq!(lfsr_stream(&p, &seed, count).unwrap(), recurrence_oracle(&p, &seed, count));
        }

        #[test]
        fn deterministic(seed in 0u64..(1 << 16), count in 0usize..500) {
            let p = poly("x^16+x^14+x^13+x^11+1");
            let seed = BitString::from_uint(seed, 16);
            prop_assert_eq!(lfsr_stream(&p, &seed, count).unwrap(), lfsr_stream(&p, &seed, count).unwrap());
        }
    }
}
