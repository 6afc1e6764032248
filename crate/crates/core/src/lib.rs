//! Layered XOR encryption with keys from a bank of parallel LFSRs.
//!
//! A low-rate pRNG supplies one `[index, seed]` record per reset cycle; the
//! selected LFSR expands the seed into a key part, and `N` parts form one
//! layer key. A source applies one layer per downstream node and each node
//! peels its own. The crate also provides an exhaustive schedule-search
//! oracle and a calculator for the closed-form design relations.

pub mod attack;
pub mod bits;
pub mod design;
pub mod error;
pub mod factor;
pub mod formats;
pub mod gf2;
pub mod lfsr;
pub mod okg;
pub mod onion;
pub mod prng;
pub mod timing;

pub use attack::{
    attack_time, brute_force_recover, correlate_flows, keyspace_nominal, keyspace_true,
    AttackOptions, AttackReport, AttackScenario, Reference, ScheduleMatch,
};
pub use bits::BitString;
pub use design::{
    aes_reference, bfa_time, bfa_time_interrupted, design, design_sweep, optimal_key_length,
    prng_rates, resets, switch_time, DesignInput, DesignReport, GbitUnit, PrngRates, SweepRow,
};
pub use error::{Error, Result};
pub use gf2::{enumerate_primitive, is_irreducible, is_primitive, max_primitive_count, GenPoly};
pub use lfsr::{lfsr_state_period, lfsr_stream, Lfsr};
pub use okg::{
    generate_key, interruption_profile, parse_record, AnonKey, OkgConfig, TrueSecretRecord,
};
pub use onion::{
    peel_layer, run_circuit, source_encrypt, xor_bits, Circuit, FlowTrace, KeySeed, Node, Role,
};
pub use prng::{reference_prng, BitSource, InjectedBits, PrngSource};
pub use timing::{LogDuration, SECONDS_PER_YEAR};
