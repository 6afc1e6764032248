//! Exhaustive schedule search against one encryption layer.
//!
//! A schedule is one `(lfsr_index, seed)` choice per reset cycle. Schedules
//! are numbered as an odometer over cycles: cycle 0 is the most significant
//! digit and each digit runs LFSR index major, seed minor. Nonzero seeds form
//! the main space of `(P (2^n - 1))^N` schedules; schedules with at least one
//! all-zero seed form a separately counted degenerate class.
//!
//! Every candidate key is assembled to full flow length before comparison.
//! There is no early rejection on a partial key.

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::okg::{key_from_schedule, OkgConfig, TrueSecretRecord};
use crate::timing::LogDuration;

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Part tables above this many entries are computed on the fly instead.
const PART_TABLE_LIMIT: usize = 1 << 20;

/// Count from the closed-form model: `P^N (2^n - 1)`.
pub fn keyspace_nominal(p: u64, resets: u32, n: u32) -> BigUint {
    BigUint::from(p).pow(resets) * ((BigUint::one() << n) - 1u32)
}

/// Exhaustive schedule count: `(P (2^n - 1))^N`.
pub fn keyspace_true(p: u64, resets: u32, n: u32) -> BigUint {
    (BigUint::from(p) * ((BigUint::one() << n) - 1u32)).pow(resets)
}

/// `keyspace * tau`.
pub fn attack_time(keyspace: &BigUint, tau: f64) -> LogDuration {
    LogDuration::from_count(keyspace, tau)
}

/// Time to strip `layers` encryption layers: `layers * T^b`.
pub fn layered_attack_time(single_layer: LogDuration, layers: usize) -> LogDuration {
    single_layer.scaled(layers as f64)
}

/// Time to reveal a whole circuit of `r` key-holding nodes: `r * T^b`.
pub fn circuit_attack_time(single_layer: LogDuration, r: usize) -> LogDuration {
    single_layer.scaled(r as f64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reference {
    /// Known plaintext for the intercepted flow.
    Plaintext(BitString),
    /// Candidate outgoing flows at the attacked node.
    Outgoing(Vec<BitString>),
}

#[derive(Clone, Debug)]
pub struct AttackScenario {
    pub intercepted: BitString,
    pub reference: Reference,
    pub config: OkgConfig,
    pub layers_to_remove: usize,
}

#[derive(Clone, Debug)]
pub struct AttackOptions {
    pub budget: u64,
    /// Worker threads; 0 uses the global pool.
    pub threads: usize,
    /// Contiguous index ranges per class; 0 picks one per worker.
    pub partitions: usize,
    /// Seconds per decoding try, for the model-time column.
    pub tau: f64,
    /// Also search schedules containing an all-zero seed.
    pub include_degenerate: bool,
}

impl Default for AttackOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            threads: 0,
            partitions: 0,
            tau: 1e-18,
            include_degenerate: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleMatch {
    pub schedule: Vec<TrueSecretRecord>,
    /// At least one cycle used an all-zero seed.
    pub degenerate: bool,
    /// Index into the outgoing set for correlation attacks.
    pub flow: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct AttackReport {
    pub matches: Vec<ScheduleMatch>,
    /// Main-space candidates tested.
    pub tries: u64,
    /// Degenerate-class candidates tested.
    pub degenerate_tries: u64,
    pub keyspace_nominal: BigUint,
    pub keyspace_true: BigUint,
    pub elapsed_s: f64,
    pub tau: f64,
}

impl AttackReport {
    /// `tries * tau`, comparable with the closed-form attack time.
    pub fn tau_equivalent_s(&self) -> f64 {
        self.tries as f64 * self.tau
    }
}

/// What a candidate key is checked against.
enum Target<'a> {
    Key(BitString),
    Flows {
        intercepted: &'a BitString,
        index: HashMap<&'a BitString, Vec<usize>>,
    },
}

/// One schedule space: `digits^N` schedules, digit = index * seeds + seed slot.
#[derive(Clone, Copy)]
struct Space {
    seeds: u64,
    /// Seed slot 0 encodes seed value 1 in the main space, 0 in the degenerate.
    seed_offset: u64,
    digits: u64,
    cycles: usize,
}

impl Space {
    fn new(config: &OkgConfig, with_zero: bool) -> Self {
        let n = config.register_len() as u32;
        let seeds = if with_zero {
            1u64 << n
        } else {
            (1u64 << n) - 1
        };
        Self {
            seeds,
            seed_offset: if with_zero { 0 } else { 1 },
            digits: config.lfsr_count() as u64 * seeds,
            cycles: config.resets(),
        }
    }

    fn size(&self) -> Option<u64> {
        self.digits.checked_pow(self.cycles as u32)
    }

    fn decode(&self, mut index: u64, digits: &mut [u64]) {
        for d in digits.iter_mut().rev() {
            *d = index % self.digits;
            index /= self.digits;
        }
    }

    fn record(&self, digit: u64, n: usize) -> TrueSecretRecord {
        TrueSecretRecord {
            lfsr_index: (digit / self.seeds) as usize,
            seed: BitString::from_uint(digit % self.seeds + self.seed_offset, n),
        }
    }
}

/// Key parts per digit, precomputed when small enough.
struct Parts<'a> {
    config: &'a OkgConfig,
    space: Space,
    table: Option<Vec<BitString>>,
}

impl<'a> Parts<'a> {
    fn new(config: &'a OkgConfig, space: Space) -> Result<Self> {
        let table = if (space.digits as usize) <= PART_TABLE_LIMIT {
            let n = config.register_len();
            Some(
                (0..space.digits)
                    .map(|d| crate::okg::key_part(config, &space.record(d, n)))
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        Ok(Self {
            config,
            space,
            table,
        })
    }

    fn get(&self, digit: u64) -> BitString {
        match &self.table {
            Some(t) => t[digit as usize].clone(),
            None => {
                let rec = self.space.record(digit, self.config.register_len());
                crate::okg::key_part(self.config, &rec).expect("index within bank")
            }
        }
    }
}

fn check_flow_length(config: &OkgConfig, len: usize) -> Result<()> {
    let full = config.key_len();
    if len > full || len + config.key_part_len() <= full {
        return Err(Error::LengthMismatch {
            left: len,
            right: full,
        });
    }
    Ok(())
}

fn write_part(key: &mut BitString, part: &BitString, offset: usize) {
    let end = (offset + part.len()).min(key.len());
    for i in offset..end {
        key.set(i, part.get(i - offset));
    }
}

/// Searches `[start, end)` of `space`, returning `(index, match)` pairs in order.
fn search_range(
    space: Space,
    parts: &Parts<'_>,
    target: &Target<'_>,
    len: usize,
    start: u64,
    end: u64,
    degenerate: bool,
) -> Vec<(u64, Option<usize>)> {
    let lk = parts.config.key_part_len();
    let zero_digit = |d: u64| d.is_multiple_of(space.seeds);
    let mut digits = vec![0u64; space.cycles];
    space.decode(start, &mut digits);
    let mut key = BitString::zeros(len);
    for (j, &d) in digits.iter().enumerate() {
        write_part(&mut key, &parts.get(d), j * lk);
    }
    let mut found = Vec::new();
    for index in start..end {
        let in_class = !degenerate || digits.iter().any(|&d| zero_digit(d));
        if in_class {
            match target {
                Target::Key(k) => {
                    if &key == k {
                        found.push((index, None));
                    }
                }
                Target::Flows {
                    intercepted,
                    index: flows,
                } => {
                    let plain = intercepted.xor(&key).expect("lengths checked");
                    if let Some(hits) = flows.get(&plain) {
                        found.extend(hits.iter().map(|&f| (index, Some(f))));
                    }
                }
            }
        }
        // Odometer step: rewrite only the parts whose digit changed.
        for j in (0..space.cycles).rev() {
            digits[j] += 1;
            if digits[j] < space.digits {
                write_part(&mut key, &parts.get(digits[j]), j * lk);
                break;
            }
            digits[j] = 0;
            write_part(&mut key, &parts.get(0), j * lk);
        }
    }
    found
}

fn run_space(
    config: &OkgConfig,
    space: Space,
    target: &Target<'_>,
    len: usize,
    partitions: usize,
    degenerate: bool,
) -> Result<Vec<ScheduleMatch>> {
    let total = space.size().expect("size checked against budget");
    let parts = Parts::new(config, space)?;
    let chunks = partitions.max(1) as u64;
    let step = total.div_ceil(chunks).max(1);
    let ranges: Vec<(u64, u64)> = (0..chunks)
        .map(|c| (c * step, ((c + 1) * step).min(total)))
        .filter(|(s, e)| s < e)
        .collect();
    let found: Vec<Vec<(u64, Option<usize>)>> = ranges
        .par_iter()
        .map(|&(s, e)| search_range(space, &parts, target, len, s, e, degenerate))
        .collect();
    let n = config.register_len();
    let mut digits = vec![0u64; space.cycles];
    Ok(found
        .into_iter()
        .flatten()
        .map(|(index, flow)| {
            space.decode(index, &mut digits);
            ScheduleMatch {
                schedule: digits.iter().map(|&d| space.record(d, n)).collect(),
                degenerate,
                flow,
            }
        })
        .collect())
}

fn search(
    config: &OkgConfig,
    target: Target<'_>,
    len: usize,
    opts: &AttackOptions,
) -> Result<AttackReport> {
    let started = Instant::now();
    let p = config.lfsr_count() as u64;
    let resets = config.resets() as u32;
    let n = config.register_len() as u32;
    let ks_true = keyspace_true(p, resets, n);
    let main = Space::new(config, false);
    let full = Space::new(config, true);

    let mut required = ks_true.clone();
    if opts.include_degenerate {
        required = BigUint::from(p << n).pow(resets);
    }
    if required > BigUint::from(opts.budget) {
        return Err(Error::BudgetExceeded {
            required: required.to_string(),
            budget: opts.budget,
        });
    }

    let go = || -> Result<(Vec<ScheduleMatch>, u64)> {
        let workers = rayon::current_num_threads();
        let partitions = if opts.partitions == 0 {
            workers
        } else {
            opts.partitions
        };
        let mut matches = run_space(config, main, &target, len, partitions, false)?;
        let mut degenerate_tries = 0;
        if opts.include_degenerate {
            matches.extend(run_space(config, full, &target, len, partitions, true)?);
            degenerate_tries = full.size().unwrap() - main.size().unwrap();
        }
        Ok((matches, degenerate_tries))
    };
    let (matches, degenerate_tries) = if opts.threads == 0 {
        go()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(go)?
    };

    Ok(AttackReport {
        matches,
        tries: ks_true.to_u64().expect("within budget"),
        degenerate_tries,
        keyspace_nominal: keyspace_nominal(p, resets, n),
        keyspace_true: ks_true,
        elapsed_s: started.elapsed().as_secs_f64(),
        tau: opts.tau,
    })
}

/// Known-plaintext search: every schedule whose key maps `intercepted` onto
/// the plaintext.
pub fn brute_force_recover(
    scenario: &AttackScenario,
    opts: &AttackOptions,
) -> Result<AttackReport> {
    if scenario.layers_to_remove != 1 {
        return Err(Error::InvalidConfig(format!(
            "exhaustive recovery removes one layer, got {}",
            scenario.layers_to_remove
        )));
    }
    let Reference::Plaintext(plain) = &scenario.reference else {
        return Err(Error::InvalidConfig(
            "brute-force recovery needs a known plaintext".into(),
        ));
    };
    let len = scenario.intercepted.len();
    check_flow_length(&scenario.config, len)?;
    let target = scenario.intercepted.xor(plain)?;
    search(&scenario.config, Target::Key(target), len, opts)
}

/// Routing correlation: every `(schedule, outgoing flow)` pair such that
/// peeling the schedule's key off `intercepted` yields that flow.
pub fn correlate_flows(
    intercepted: &BitString,
    outgoing: &[BitString],
    config: &OkgConfig,
    opts: &AttackOptions,
) -> Result<AttackReport> {
    let len = intercepted.len();
    check_flow_length(config, len)?;
    let mut index: HashMap<&BitString, Vec<usize>> = HashMap::new();
    for (i, flow) in outgoing.iter().enumerate() {
        if flow.len() != len {
            return Err(Error::LengthMismatch {
                left: flow.len(),
                right: len,
            });
        }
        index.entry(flow).or_default().push(i);
    }
    // A set holding every possible flow matches every schedule.
    if len < 64 && index.len() as u64 >= 1u64 << len {
        return Err(Error::BudgetExceeded {
            required: format!("outgoing set covers all 2^{len} flows"),
            budget: opts.budget,
        });
    }
    let target = Target::Flows { intercepted, index };
    search(config, target, len, opts)
}

/// Replays a schedule and checks that it maps `intercepted` onto `reference`.
pub fn verify_schedule(
    config: &OkgConfig,
    schedule: &[TrueSecretRecord],
    intercepted: &BitString,
    reference: &BitString,
) -> Result<bool> {
    let mut key = key_from_schedule(config, schedule)?;
    key.truncate(intercepted.len());
    Ok(&intercepted.xor(&key)? == reference)
}
