//! The key generator: a bank of parallel LFSRs reconfigured once per reset
//! cycle from a true-secret-key record `[index, seed]`.

use std::collections::HashSet;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::gf2::{self, GenPoly};
use crate::lfsr::{lfsr_stream, MAX_REGISTER};
use crate::prng::BitSource;

/// Key-generation parameters shared by every node on a circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct OkgConfig {
    polys: Vec<GenPoly>,
    key_part_len: usize,
    resets: usize,
    /// Reject all-zero seeds instead of flagging them.
    pub strict_seeds: bool,
}

impl OkgConfig {
    pub fn new(polys: Vec<GenPoly>, key_part_len: usize, resets: usize) -> Result<Self> {
        let Some(first) = polys.first() else {
            return Err(Error::InvalidConfig("at least one LFSR is required".into()));
        };
        let n = first.degree();
        if !(2..=MAX_REGISTER).contains(&n) {
            return Err(Error::UnsupportedDegree {
                degree: n,
                min: 2,
                max: MAX_REGISTER,
            });
        }
        let tester = gf2::PrimitivityTester::new(n)?;
        let mut seen = HashSet::new();
        for p in &polys {
            if p.degree() != n {
                return Err(Error::InvalidConfig(format!(
                    "{p} has degree {}, expected {n}",
                    p.degree()
                )));
            }
            if !tester.is_primitive(p) {
                return Err(Error::InvalidConfig(format!("{p} is not primitive")));
            }
            if !seen.insert(*p) {
                return Err(Error::InvalidConfig(format!("{p} listed twice")));
            }
        }
        // Distinct primitive polynomials already bound P by P_max; this keeps
        // the check explicit where the count is cheap to obtain.
        if n <= 32 {
            let p_max = gf2::max_primitive_count(n)?;
            if polys.len() as u64 > p_max {
                return Err(Error::InvalidConfig(format!(
                    "P = {} exceeds P_max = {p_max} for n = {n}",
                    polys.len()
                )));
            }
        }
        if key_part_len == 0 {
            return Err(Error::InvalidConfig("key part length must be >= 1".into()));
        }
        if resets == 0 {
            return Err(Error::InvalidConfig("reset count must be >= 1".into()));
        }
        Ok(Self {
            polys,
            key_part_len,
            resets,
            strict_seeds: false,
        })
    }

    /// The first `p` primitive polynomials of degree `n` in ascending order.
    pub fn with_first_primitives(
        n: u32,
        p: usize,
        key_part_len: usize,
        resets: usize,
    ) -> Result<Self> {
        let all = gf2::enumerate_primitive(n)?;
        if p == 0 || p > all.len() {
            return Err(Error::InvalidConfig(format!(
                "P = {p} outside 1..={} for n = {n}",
                all.len()
            )));
        }
        Self::new(all[..p].to_vec(), key_part_len, resets)
    }

    pub fn polys(&self) -> &[GenPoly] {
        &self.polys
    }

    pub fn lfsr_count(&self) -> usize {
        self.polys.len()
    }

    pub fn register_len(&self) -> usize {
        self.polys[0].degree() as usize
    }

    pub fn key_part_len(&self) -> usize {
        self.key_part_len
    }

    pub fn resets(&self) -> usize {
        self.resets
    }

    pub fn key_len(&self) -> usize {
        self.resets * self.key_part_len
    }

    /// Bits consumed for the LFSR index: `ceil(log2 P)`, zero when `P = 1`.
    pub fn index_width(&self) -> usize {
        let p = self.polys.len();
        (usize::BITS - (p - 1).leading_zeros()) as usize
    }

    /// Bits consumed per reset cycle.
    pub fn record_len(&self) -> usize {
        self.index_width() + self.register_len()
    }

    /// Same polynomials and part length, different reset count.
    pub fn with_resets(&self, resets: usize) -> Result<Self> {
        if resets == 0 {
            return Err(Error::InvalidConfig("reset count must be >= 1".into()));
        }
        Ok(Self {
            resets,
            ..self.clone()
        })
    }
}

/// One reset cycle's configuration: which LFSR and which seed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TrueSecretRecord {
    pub lfsr_index: usize,
    pub seed: BitString,
}

impl TrueSecretRecord {
    /// An all-zero seed makes the key part all zeros.
    pub fn is_weak(&self) -> bool {
        self.seed.is_all_zero()
    }
}

/// Reads `index_width` bits as a big-endian index (reduced modulo `P` when
/// `P` is not a power of two), then `n` seed bits.
pub fn parse_record<S: BitSource + ?Sized>(
    source: &mut S,
    config: &OkgConfig,
) -> Result<TrueSecretRecord> {
    let width = config.index_width();
    let index_bits = source.take_bits(width).map_err(|e| match e {
        Error::Underrun { needed } => Error::Underrun {
            needed: needed + config.register_len(),
        },
        other => other,
    })?;
    let lfsr_index = index_bits.to_uint() as usize % config.lfsr_count();
    let seed = source.take_bits(config.register_len())?;
    Ok(TrueSecretRecord { lfsr_index, seed })
}

/// An anonymization key with the schedule that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnonKey {
    pub bits: BitString,
    pub schedule: Vec<TrueSecretRecord>,
}

impl AnonKey {
    /// Reset cycles (0-based) whose seed was all zeros.
    pub fn weak_cycles(&self) -> Vec<usize> {
        self.schedule
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_weak())
            .map(|(i, _)| i)
            .collect()
    }

    /// Key part produced in reset cycle `cycle`.
    pub fn part(&self, config: &OkgConfig, cycle: usize) -> BitString {
        let lk = config.key_part_len();
        BitString::from_bools((cycle * lk..(cycle + 1) * lk).map(|i| self.bits.get(i)))
    }
}

pub fn key_part(config: &OkgConfig, record: &TrueSecretRecord) -> Result<BitString> {
    let poly = config.polys.get(record.lfsr_index).ok_or_else(|| {
        Error::InvalidConfig(format!(
            "LFSR index {} outside 0..{}",
            record.lfsr_index,
            config.lfsr_count()
        ))
    })?;
    lfsr_stream(poly, &record.seed, config.key_part_len)
}

/// Rebuilds key bits by concatenating the part of every scheduled cycle.
pub fn key_from_schedule(config: &OkgConfig, schedule: &[TrueSecretRecord]) -> Result<BitString> {
    let mut bits = BitString::with_capacity(schedule.len() * config.key_part_len);
    for rec in schedule {
        bits.extend_from(&key_part(config, rec)?);
    }
    Ok(bits)
}

/// Runs `N` reset cycles: parse a record, emit `L_k` bits from the selected LFSR.
pub fn generate_key<S: BitSource + ?Sized>(config: &OkgConfig, source: &mut S) -> Result<AnonKey> {
    let mut schedule = Vec::with_capacity(config.resets);
    let mut bits = BitString::with_capacity(config.key_len());
    for cycle in 0..config.resets {
        let rec = parse_record(source, config).map_err(|e| match e {
            Error::Underrun { needed } => Error::Underrun {
                needed: needed + (config.resets - cycle - 1) * config.record_len(),
            },
            other => other,
        })?;
        if config.strict_seeds && rec.is_weak() {
            return Err(Error::ZeroSeed { cycle });
        }
        bits.extend_from(&key_part(config, &rec)?);
        schedule.push(rec);
    }
    Ok(AnonKey { bits, schedule })
}

/// `(interrupted, clean)` reset transitions: a transition is interrupted when
/// the same LFSR is selected in two consecutive cycles.
pub fn interruption_profile(key: &AnonKey) -> (usize, usize) {
    let interrupted = key
        .schedule
        .windows(2)
        .filter(|w| w[0].lfsr_index == w[1].lfsr_index)
        .count();
    let transitions = key.schedule.len().saturating_sub(1);
    (interrupted, transitions - interrupted)
}
