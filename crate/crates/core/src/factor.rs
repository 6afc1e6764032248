//! Integer factorization of `2^n - 1` for `n <= 64`.
//!
//! Trial division strips small primes, Miller-Rabin (deterministic for
//! `u64`) certifies primes, and Brent's variant of Pollard rho splits what
//! remains. The rho stage is capped by an iteration budget.

use crate::error::{Error, Result};

pub const DEFAULT_FACTOR_BUDGET: u64 = 1 << 26;

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Finds a nontrivial factor of composite odd `n`, spending at most `*budget` steps.
fn brent_rho(n: u64, budget: &mut u64) -> Option<u64> {
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g, mut q) = (2u64, 2u64, 1u64, 1u64);
        let mut r = 1u64;
        let m = 128u64;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += m;
                *budget = budget.checked_sub(m.min(r))?;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
    }
    None
}

fn factor_into(n: u64, budget: &mut u64, out: &mut Vec<u64>) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    if is_prime(n) {
        out.push(n);
        return Ok(());
    }
    let d = brent_rho(n, budget).ok_or(Error::FactorBudget(0))?;
    factor_into(d, budget, out)?;
    factor_into(n / d, budget, out)
}

/// Prime factorization of `m` as ascending `(prime, exponent)` pairs.
pub fn factor_u64(mut m: u64, budget: u64) -> Result<Vec<(u64, u32)>> {
    let mut primes = Vec::new();
    for p in 2u64..1000 {
        while m.is_multiple_of(p) {
            primes.push(p);
            m /= p;
        }
    }
    let mut budget = budget;
    factor_into(m, &mut budget, &mut primes)?;
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}

/// Prime factorization of `2^n - 1`.
pub fn factor_mersenne(n: u32, budget: u64) -> Result<Vec<(u64, u32)>> {
    if !(1..=64).contains(&n) {
        return Err(Error::UnsupportedDegree {
            degree: n,
            min: 1,
            max: 64,
        });
    }
    let m = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    factor_u64(m, budget).map_err(|e| match e {
        Error::FactorBudget(_) => Error::FactorBudget(n),
        other => other,
    })
}
