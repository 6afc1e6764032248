//! Polynomials over GF(2): parsing, modular arithmetic, irreducibility and
//! primitivity, and exhaustive enumeration of primitive polynomials.
//!
//! A polynomial is stored as a bitmask where bit `k` is the coefficient of
//! `x^k`, so `x^3+x^2+1` is `0b1101`. Degrees up to 64 are supported, which
//! keeps every product of two residues inside a `u128`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::factor::{factor_mersenne, DEFAULT_FACTOR_BUDGET};

pub const MAX_DEGREE: u32 = 64;
/// Largest degree accepted by [`enumerate_primitive`].
pub const MAX_ENUM_DEGREE: u32 = 32;

/// A monic binary polynomial, the identity of one LFSR.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenPoly {
    mask: u128,
}

impl GenPoly {
    pub fn from_mask(mask: u128) -> Result<Self> {
        if mask < 2 {
            return Err(Error::InvalidPolynomial(format!(
                "mask {mask:#b} has degree < 1"
            )));
        }
        let degree = 127 - mask.leading_zeros();
        if degree > MAX_DEGREE {
            return Err(Error::UnsupportedDegree {
                degree,
                min: 1,
                max: MAX_DEGREE,
            });
        }
        Ok(Self { mask })
    }

    /// Builds a polynomial from the exponents of its nonzero terms.
    pub fn from_exponents<I: IntoIterator<Item = u32>>(exps: I) -> Result<Self> {
        let mut mask = 0u128;
        for e in exps {
            if e > MAX_DEGREE {
                return Err(Error::UnsupportedDegree {
                    degree: e,
                    min: 1,
                    max: MAX_DEGREE,
                });
            }
            if mask & (1 << e) != 0 {
                return Err(Error::InvalidPolynomial(format!("repeated term x^{e}")));
            }
            mask |= 1 << e;
        }
        Self::from_mask(mask)
    }

    pub fn mask(&self) -> u128 {
        self.mask
    }

    pub fn degree(&self) -> u32 {
        127 - self.mask.leading_zeros()
    }

    pub fn has_constant_term(&self) -> bool {
        self.mask & 1 == 1
    }

    pub fn coefficient(&self, k: u32) -> bool {
        k < 128 && (self.mask >> k) & 1 == 1
    }

    /// Exponents with nonzero coefficient, ascending.
    pub fn exponents(&self) -> impl Iterator<Item = u32> + '_ {
        (0..=self.degree()).filter(move |&k| self.coefficient(k))
    }

    /// `x^n p(1/x)`.
    pub fn reciprocal(&self) -> GenPoly {
        let n = self.degree();
        let mut out = 0u128;
        for k in self.exponents() {
            out |= 1 << (n - k);
        }
        // A zero constant term drops the degree; still nonzero since x^n maps to 1.
        GenPoly { mask: out }
    }

    /// Checks the invariants required of an LFSR generator.
    pub fn validate_generator(&self) -> Result<()> {
        if self.degree() < 2 {
            return Err(Error::InvalidPolynomial(format!(
                "{self}: generator degree must be at least 2"
            )));
        }
        if !self.has_constant_term() {
            return Err(Error::InvalidPolynomial(format!(
                "{self}: generator needs a nonzero constant term"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for GenPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for k in (0..=self.degree()).rev().filter(|&k| self.coefficient(k)) {
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match k {
                0 => f.write_str("1")?,
                1 => f.write_str("x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GenPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GenPoly({self} = {:#b})", self.mask)
    }
}

impl FromStr for GenPoly {
    type Err = Error;

    /// Accepts caret notation (`x^3+x^2+1`, variable `x` or `b`) or an integer
    /// bitmask (`13`, `0b1101`, `0xd`).
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::InvalidPolynomial("empty".into()));
        }
        if let Some(mask) = parse_mask(&compact) {
            return GenPoly::from_mask(mask);
        }
        let mut exps = Vec::new();
        for term in compact.split('+') {
            let e = match term {
                "1" => 0,
                "x" | "b" => 1,
                t if t.starts_with("x^") || t.starts_with("b^") => t[2..]
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidPolynomial(format!("bad term {t:?}")))?,
                t => return Err(Error::InvalidPolynomial(format!("bad term {t:?}"))),
            };
            exps.push(e);
        }
        GenPoly::from_exponents(exps)
    }
}

fn parse_mask(s: &str) -> Option<u128> {
    if let Some(bin) = s.strip_prefix("0b") {
        u128::from_str_radix(bin, 2).ok()
    } else if let Some(hex) = s.strip_prefix("0x") {
        u128::from_str_radix(hex, 16).ok()
    } else if s.chars().all(|c| c.is_ascii_digit()) && s != "1" {
        s.parse().ok()
    } else {
        None
    }
}

/// Parses a polynomial list: one polynomial per line, `#` starts a comment.
pub fn parse_poly_list(text: &str) -> Result<Vec<GenPoly>> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|line| !line.is_empty())
        .map(str::parse)
        .collect()
}

pub fn format_poly_list(polys: &[GenPoly]) -> String {
    polys.iter().map(|p| format!("{p}\n")).collect()
}

/// Carry-less product of two polynomials of degree < 64.
#[inline]
fn clmul(a: u64, b: u64) -> u128 {
    let mut acc = 0u128;
    let a = a as u128;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

/// Residue arithmetic in GF(2)[x] / (p).
#[derive(Clone, Copy, Debug)]
struct ModRing {
    modulus: u128,
    degree: u32,
}

impl ModRing {
    fn new(p: &GenPoly) -> Self {
        Self {
            modulus: p.mask,
            degree: p.degree(),
        }
    }

    fn reduce(&self, mut v: u128) -> u64 {
        let n = self.degree;
        while v != 0 {
            let top = 127 - v.leading_zeros();
            if top < n {
                break;
            }
            v ^= self.modulus << (top - n);
        }
        v as u64
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(clmul(a, b))
    }

    fn x(&self) -> u64 {
        self.reduce(2)
    }

    fn pow(&self, base: u64, mut e: u64) -> u64 {
        let mut result = self.reduce(1);
        let mut b = base;
        while e != 0 {
            if e & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        result
    }

    /// `x^(2^k) mod p` by repeated squaring.
    fn x_pow_two_pow(&self, k: u32) -> u64 {
        let mut v = self.x();
        for _ in 0..k {
            v = self.mul(v, v);
        }
        v
    }
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let db = 127 - b.leading_zeros();
        while a != 0 && 127 - a.leading_zeros() >= db {
            let da = 127 - a.leading_zeros();
            a ^= b << (da - db);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

fn distinct_prime_factors_small(mut m: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Rabin's test: `p` of degree `n` is irreducible iff `x^(2^n) = x (mod p)`
/// and `gcd(x^(2^(n/q)) - x, p) = 1` for every prime `q | n`.
pub fn is_irreducible(p: &GenPoly) -> bool {
    let n = p.degree();
    if n == 1 {
        return true;
    }
    if !p.has_constant_term() {
        return false;
    }
    let ring = ModRing::new(p);
    let x = ring.x();
    if ring.x_pow_two_pow(n) != x {
        return false;
    }
    distinct_prime_factors_small(n).into_iter().all(|q| {
        let h = ring.x_pow_two_pow(n / q) ^ x;
        poly_gcd(p.mask, h as u128) == 1
    })
}

/// Precomputed data for testing many polynomials of one degree.
#[derive(Clone, Debug)]
pub struct PrimitivityTester {
    degree: u32,
    order: u64,
    cofactors: Vec<u64>,
}

impl PrimitivityTester {
    pub fn new(degree: u32) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(Error::UnsupportedDegree {
                degree,
                min: 1,
                max: MAX_DEGREE,
            });
        }
        let order = if degree == 64 {
            u64::MAX
        } else {
            (1u64 << degree) - 1
        };
        let cofactors = factor_mersenne(degree, DEFAULT_FACTOR_BUDGET)?
            .into_iter()
            .map(|(q, _)| order / q)
            .collect();
        Ok(Self {
            degree,
            order,
            cofactors,
        })
    }

    /// The multiplicative order of `x` modulo `p` is exactly `2^n - 1`.
    ///
    /// That order is only reachable in a field, so a pass also proves `p`
    /// irreducible.
    pub fn is_primitive(&self, p: &GenPoly) -> bool {
        if p.degree() != self.degree || !p.has_constant_term() {
            return false;
        }
        let ring = ModRing::new(p);
        let x = ring.x();
        let one = ring.reduce(1);
        ring.pow(x, self.order) == one && self.cofactors.iter().all(|&e| ring.pow(x, e) != one)
    }
}

pub fn is_primitive(p: &GenPoly) -> bool {
    if !p.has_constant_term() {
        return false;
    }
    match PrimitivityTester::new(p.degree()) {
        Ok(t) => t.is_primitive(p),
        Err(_) => false,
    }
}

/// All primitive polynomials of degree `n`, ascending by bitmask.
pub fn enumerate_primitive(n: u32) -> Result<Vec<GenPoly>> {
    if !(2..=MAX_ENUM_DEGREE).contains(&n) {
        return Err(Error::UnsupportedDegree {
            degree: n,
            min: 2,
            max: MAX_ENUM_DEGREE,
        });
    }
    let tester = PrimitivityTester::new(n)?;
    let top = 1u128 << n;
    let middles = 1u64 << (n - 1);
    let check = |mid: u64| {
        let mask = top | ((mid as u128) << 1) | 1;
        // Even weight means divisibility by x+1.
        if mask.count_ones().is_multiple_of(2) {
            return None;
        }
        let p = GenPoly { mask };
        tester.is_primitive(&p).then_some(p)
    };
    let out: Vec<GenPoly> = if n >= 14 {
        (0..middles).into_par_iter().filter_map(check).collect()
    } else {
        (0..middles).filter_map(check).collect()
    };
    Ok(out)
}

/// `phi(2^n - 1) / n`, the number of primitive polynomials of degree `n`.
pub fn max_primitive_count(n: u32) -> Result<u64> {
    max_primitive_count_with_budget(n, DEFAULT_FACTOR_BUDGET)
}

pub fn max_primitive_count_with_budget(n: u32, budget: u64) -> Result<u64> {
    if !(2..=MAX_DEGREE).contains(&n) {
        return Err(Error::UnsupportedDegree {
            degree: n,
            min: 2,
            max: MAX_DEGREE,
        });
    }
    let mut phi: u128 = 1;
    for (p, e) in factor_mersenne(n, budget)? {
        phi *= (p as u128 - 1) * (p as u128).pow(e - 1);
    }
    Ok((phi / n as u128) as u64)
}
