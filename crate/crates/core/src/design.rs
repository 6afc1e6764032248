//! Closed-form system design: key-part length, reset count, switching time,
//! pRNG bit rates and brute-force durations, plus `(n, P)` sweeps.
//!
//! The relations implemented here:
//!
//! ```text
//! T^b   = P^N tau (2^n - 1)
//! T^b'  = P (P-1)^(N-1) tau (2^n - 1)            (no repeated LFSR)
//! L_k   = floor(L_M log2 P / log2(T / (tau (2^n - 1))))
//! N     = L_M / L_k
//! t_rc  = L_k / C
//! C1_R  = (n + log2 P) C_L / (2n + L_k)
//! C2_R  = (n + log2 P) C_L / (L_k - n)
//! C_R   = C1_R / P + (P - 1) C2_R / P
//! ```
//!
//! ## Container-length calibration
//!
//! A "1.25 Gbit" container read as `1.25 * 2^30` bits together with a target
//! of `2^128 * tau` reproduces the reference switching-time table to within
//! 0.25%; read as `1.25e9` bits every entry is about 7% low. Binary is the
//! default, decimal stays selectable through [`GbitUnit`].
//!
//! `N` is reported as `floor(L_M / L_k)`, the number of whole key parts the
//! container ratio admits; [`key_parts`] gives the `ceil` needed to cover the
//! container, with the last part truncated.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::One;

use crate::attack::keyspace_nominal;
use crate::error::{Error, Result};
use crate::timing::{log2_mersenne, LogDuration};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GbitUnit {
    /// 1 Gbit = 2^30 bits.
    #[default]
    Binary,
    /// 1 Gbit = 10^9 bits.
    Decimal,
}

impl GbitUnit {
    pub fn to_bits(self, gbits: f64) -> u64 {
        let scale = match self {
            GbitUnit::Binary => (1u64 << 30) as f64,
            GbitUnit::Decimal => 1e9,
        };
        (gbits * scale).round() as u64
    }

    pub fn mbits(self, bits: u64) -> f64 {
        match self {
            GbitUnit::Binary => bits as f64 / (1u64 << 20) as f64,
            GbitUnit::Decimal => bits as f64 / 1e6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignInput {
    /// LFSR register length.
    pub n: u32,
    /// Parallel LFSR count.
    pub p: u64,
    /// Container length `L_M` in bits.
    pub container_bits: u64,
    /// Line rate `C` in bits/s.
    pub line_rate: f64,
    /// LFSR output rate `C_L` in bits/s.
    pub lfsr_rate: f64,
    /// Seconds per decoding try.
    pub tau: f64,
    /// Required single-layer attack duration.
    pub target: LogDuration,
    /// Fix `N` instead of deriving it from the target.
    pub resets_override: Option<u64>,
    /// Layers the attacker must strip, for `T^M`.
    pub layers_to_remove: usize,
    /// Key-holding nodes on the circuit, for `T^L`.
    pub circuit_len: usize,
}

impl DesignInput {
    pub const CONTAINER_GBITS: f64 = 1.25;
    pub const RATE: f64 = 1e11;
    pub const TAU: f64 = 1e-18;

    /// 1.25 Gbit containers at 100 Gb/s, `tau = 1e-18` s, AES-128-equivalent target.
    pub fn calibrated(n: u32, p: u64) -> Self {
        Self::calibrated_with_unit(n, p, GbitUnit::Binary)
    }

    pub fn calibrated_with_unit(n: u32, p: u64, unit: GbitUnit) -> Self {
        Self {
            n,
            p,
            container_bits: unit.to_bits(Self::CONTAINER_GBITS),
            line_rate: Self::RATE,
            lfsr_rate: Self::RATE,
            tau: Self::TAU,
            target: aes_reference(128, Self::TAU),
            resets_override: None,
            layers_to_remove: 1,
            circuit_len: 3,
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("line rate", self.line_rate),
            ("LFSR rate", self.lfsr_rate),
            ("tau", self.tau),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if self.n < 1 || self.p < 1 || self.container_bits < 1 {
            return Err(Error::InvalidConfig("n, P and L_M must be positive".into()));
        }
        if self.resets_override == Some(0) {
            return Err(Error::InvalidConfig("reset count must be positive".into()));
        }
        Ok(())
    }
}

/// Largest key part that keeps `P^(L_M/L_k) tau (2^n - 1)` at or above the target.
pub fn optimal_key_length(input: &DesignInput) -> Result<u64> {
    input.validate()?;
    if input.p < 2 {
        return Err(Error::Infeasible(
            "a single LFSR gives log2(P) = 0 and no usable key-part length".into(),
        ));
    }
    let denom = input.target.log2_seconds() - input.tau.log2() - log2_mersenne(input.n);
    if denom <= 1e-9 {
        return Err(Error::Infeasible(format!(
            "target does not exceed tau (2^{} - 1); one seed search already meets it",
            input.n
        )));
    }
    let lk = (input.container_bits as f64 * (input.p as f64).log2() / denom).floor();
    if lk < 1.0 {
        return Err(Error::Infeasible("key part shorter than one bit".into()));
    }
    Ok(lk as u64)
}

/// Whole key parts in a container: `floor(L_M / L_k)`, at least 1.
pub fn resets(container_bits: u64, key_part_len: u64) -> u64 {
    assert!(key_part_len >= 1);
    (container_bits / key_part_len).max(1)
}

/// Key parts needed to cover a container: `ceil(L_M / L_k)`.
pub fn key_parts(container_bits: u64, key_part_len: u64) -> u64 {
    assert!(key_part_len >= 1);
    container_bits.div_ceil(key_part_len)
}

/// Shortest reset cycle: `L_k / C` seconds.
pub fn switch_time(key_part_len: u64, line_rate: f64) -> f64 {
    key_part_len as f64 / line_rate
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrngRates {
    /// Required rate when the same LFSR is chosen twice in a row.
    pub interrupted: f64,
    /// Required rate when the next LFSR is initialized in the background.
    pub clean: f64,
    /// Probability-weighted mean.
    pub mean: f64,
}

pub fn prng_rates(input: &DesignInput, key_part_len: u64) -> Result<PrngRates> {
    input.validate()?;
    let n = input.n as f64;
    let lk = key_part_len as f64;
    if key_part_len <= input.n as u64 {
        return Err(Error::Infeasible(format!(
            "key part of {key_part_len} bits does not exceed the {}-bit seed",
            input.n
        )));
    }
    let p = input.p as f64;
    let record_bits = n + p.log2();
    let interrupted = record_bits * input.lfsr_rate / (2.0 * n + lk);
    let clean = record_bits * input.lfsr_rate / (lk - n);
    let mean = interrupted / p + (p - 1.0) / p * clean;
    Ok(PrngRates {
        interrupted,
        clean,
        mean,
    })
}

/// `P^N tau (2^n - 1)`.
pub fn bfa_time(p: u64, resets: u64, n: u32, tau: f64) -> LogDuration {
    LogDuration::from_log2_seconds(
        resets as f64 * (p as f64).log2() + log2_mersenne(n) + tau.log2(),
    )
}

/// Exact `P^N (2^n - 1)` via big integers, scaled by `tau`.
pub fn bfa_time_exact(p: u64, resets: u32, n: u32, tau: f64) -> LogDuration {
    LogDuration::from_count(&keyspace_nominal(p, resets, n), tau)
}

/// `P (P-1)^(N-1) tau (2^n - 1)`, the keyspace when no LFSR is picked twice in a row.
pub fn bfa_time_interrupted(p: u64, resets: u64, n: u32, tau: f64) -> Result<LogDuration> {
    if p < 2 {
        return Err(Error::Infeasible(
            "with one LFSR every consecutive pick repeats; the restricted keyspace is empty".into(),
        ));
    }
    Ok(LogDuration::from_log2_seconds(
        (p as f64).log2()
            + (resets.saturating_sub(1)) as f64 * ((p - 1) as f64).log2()
            + log2_mersenne(n)
            + tau.log2(),
    ))
}

/// `2^key_bits * tau`.
pub fn aes_reference(key_bits: u32, tau: f64) -> LogDuration {
    LogDuration::from_log2_seconds(key_bits as f64 + tau.log2())
}

/// Exact comparison `P^N (2^n - 1) >= 2^key_bits` (tau cancels).
pub fn meets_aes(p: u64, resets: u32, n: u32, key_bits: u32) -> bool {
    keyspace_nominal(p, resets, n) >= BigUint::one() << key_bits
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignReport {
    pub input: DesignInput,
    pub key_part_len: u64,
    /// Reset count used for the security figures.
    pub resets: u64,
    /// Parts needed to cover the container.
    pub key_parts: u64,
    pub switch_time_s: f64,
    pub rates: PrngRates,
    pub t_b: LogDuration,
    pub t_b_hat: Option<LogDuration>,
    /// `layers_to_remove * T^b`.
    pub t_m: LogDuration,
    /// `circuit_len * T^b`.
    pub t_l: LogDuration,
}

fn key_part_for(input: &DesignInput) -> Result<(u64, u64)> {
    match input.resets_override {
        Some(n_fixed) => {
            let lk = key_parts(input.container_bits, n_fixed);
            Ok((lk, n_fixed))
        }
        None => {
            let lk = optimal_key_length(input)?;
            Ok((lk, resets(input.container_bits, lk)))
        }
    }
}

pub fn design(input: &DesignInput) -> Result<DesignReport> {
    input.validate()?;
    let (lk, n_resets) = key_part_for(input)?;
    let rates = prng_rates(input, lk)?;
    let t_b = bfa_time(input.p, n_resets, input.n, input.tau);
    Ok(DesignReport {
        input: input.clone(),
        key_part_len: lk,
        resets: n_resets,
        key_parts: key_parts(input.container_bits, lk),
        switch_time_s: switch_time(lk, input.line_rate),
        rates,
        t_b,
        t_b_hat: bfa_time_interrupted(input.p, n_resets, input.n, input.tau).ok(),
        t_m: t_b.scaled(input.layers_to_remove as f64),
        t_l: t_b.scaled(input.circuit_len as f64),
    })
}

/// One `(n, P)` cell; `None` marks a quantity that is infeasible there.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: u32,
    pub p: u64,
    pub key_part_len: Option<u64>,
    pub resets: Option<u64>,
    pub switch_time_s: Option<f64>,
    pub rates: Option<PrngRates>,
    pub t_b: Option<LogDuration>,
    pub t_b_hat: Option<LogDuration>,
    pub aes128: Option<bool>,
    pub aes256: Option<bool>,
}

fn sweep_cell(base: &DesignInput, n: u32, p: u64) -> SweepRow {
    let input = DesignInput {
        n,
        p,
        ..base.clone()
    };
    let cell = key_part_for(&input).ok();
    let rates = cell.and_then(|(lk, _)| prng_rates(&input, lk).ok());
    let t_b = cell.map(|(_, nr)| bfa_time(p, nr, n, input.tau));
    let flag = |bits| cell.map(|(_, nr)| meets_aes(p, nr as u32, n, bits));
    SweepRow {
        n,
        p,
        key_part_len: cell.map(|c| c.0),
        resets: cell.map(|c| c.1),
        switch_time_s: cell.map(|(lk, _)| switch_time(lk, input.line_rate)),
        rates,
        t_b,
        t_b_hat: cell.and_then(|(_, nr)| bfa_time_interrupted(p, nr, n, input.tau).ok()),
        aes128: flag(128),
        aes256: flag(256),
    }
}

/// Rows in `(n, P)` order, `n` major.
pub fn design_sweep(ns: &[u32], ps: &[u64], base: &DesignInput) -> Vec<SweepRow> {
    use rayon::prelude::*;
    let cells: Vec<(u32, u64)> = ns
        .iter()
        .flat_map(|&n| ps.iter().map(move |&p| (n, p)))
        .collect();
    cells
        .par_iter()
        .map(|&(n, p)| sweep_cell(base, n, p))
        .collect()
}

pub const SWEEP_HEADER: &str = "n,P,L_k_bits,N,t_rc_us,C1R_bps,C2R_bps,CR_bps,Tb_log10_years,Tbhat_log10_years,aes128_flag,aes256_flag";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
        v.map(f).unwrap_or_else(|| "NA".to_string())
    }
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.p,
            opt(r.key_part_len, |v| v.to_string()),
            opt(r.resets, |v| v.to_string()),
            opt(r.switch_time_s, |v| format!("{:.3}", v * 1e6)),
            opt(r.rates, |v| format!("{:.3}", v.interrupted)),
            opt(r.rates, |v| format!("{:.3}", v.clean)),
            opt(r.rates, |v| format!("{:.3}", v.mean)),
            opt(r.t_b, |v| format!("{:.6}", v.log10_years())),
            opt(r.t_b_hat, |v| format!("{:.6}", v.log10_years())),
            opt(r.aes128, |v| (v as u8).to_string()),
            opt(r.aes256, |v| (v as u8).to_string()),
        );
    }
    out
}

/// Smallest `n` at which `P^N (2^n - 1) >= 2^key_bits`, compared exactly.
pub fn aes_crossover(p: u64, resets: u32, key_bits: u32, max_n: u32) -> Option<u32> {
    (2..=max_n).find(|&n| meets_aes(p, resets, n, key_bits))
}

/// A crossover register length quoted for comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossoverClaim {
    pub p: u64,
    pub key_bits: u32,
    pub n: u32,
}

/// Claimed crossover points at `N = 100`: two LFSRs reach AES-128 from
/// `n = 28`; four and three LFSRs reach AES-256 from `n = 52` and `n = 98`.
pub const CLAIMED_CROSSOVERS: [CrossoverClaim; 3] = [
    CrossoverClaim {
        p: 2,
        key_bits: 128,
        n: 28,
    },
    CrossoverClaim {
        p: 4,
        key_bits: 256,
        n: 52,
    },
    CrossoverClaim {
        p: 3,
        key_bits: 256,
        n: 98,
    },
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossoverCheck {
    pub claim: CrossoverClaim,
    pub computed: Option<u32>,
}

impl CrossoverCheck {
    pub fn deviates(&self) -> bool {
        self.computed != Some(self.claim.n)
    }
}

pub fn check_crossovers(claims: &[CrossoverClaim], resets: u32, max_n: u32) -> Vec<CrossoverCheck> {
    claims
        .iter()
        .map(|&claim| CrossoverCheck {
            claim,
            computed: aes_crossover(claim.p, resets, claim.key_bits, max_n),
        })
        .collect()
}

pub fn crossover_report(checks: &[CrossoverCheck]) -> String {
    let mut out = String::from("P,aes_bits,claimed_n,computed_n,deviation\n");
    for c in checks {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            c.claim.p,
            c.claim.key_bits,
            c.claim.n,
            c.computed.map_or("none".into(), |n| n.to_string()),
            if c.deviates() { "DEVIATES" } else { "ok" }
        );
    }
    out
}
