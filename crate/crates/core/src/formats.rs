//! Text file formats: bit strings, key-generator configs, circuit and attack
//! descriptions, and the exported key, trace and report tables.

use std::fmt::Write as _;

use serde::Deserialize;

use crate::attack::{AttackReport, Reference};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::gf2::GenPoly;
use crate::okg::{AnonKey, OkgConfig, TrueSecretRecord};
use crate::onion::{Circuit, FlowTrace, KeySeed, Node, Role};

/// Flows longer than this are written as hex.
pub const HEX_THRESHOLD: usize = 10_000;

/// Reads a bit-string file.
///
/// A first non-comment line of `hex <len>` switches to hex digits for the
/// remaining lines; otherwise the content is `0`/`1` characters with free
/// whitespace, optionally preceded by a `bin` line. `#` starts a comment.
pub fn read_bits(text: &str) -> Result<BitString> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .peekable();
    let header = lines.peek().copied().unwrap_or("");
    if let Some(len) = header.strip_prefix("hex") {
        let len: usize = len
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad hex header {header:?}")))?;
        lines.next();
        let digits: String = lines.collect();
        return BitString::from_hex(&digits, len);
    }
    if header == "bin" {
        lines.next();
    }
    let body: String = lines.flat_map(|l| l.split_whitespace()).collect();
    body.parse()
}

/// Writes a bit string: plain `0`/`1` up to [`HEX_THRESHOLD`] bits, hex beyond.
pub fn write_bits(bits: &BitString) -> String {
    if bits.len() > HEX_THRESHOLD {
        let hex = bits.to_hex();
        let mut out = format!("hex {}\n", bits.len());
        for chunk in hex.as_bytes().chunks(64) {
            out.push_str(std::str::from_utf8(chunk).unwrap());
            out.push('\n');
        }
        out
    } else {
        format!("{bits}\n")
    }
}

/// Bits for a table cell: plain when short, `0x`-prefixed hex when long.
pub fn bits_cell(bits: &BitString) -> String {
    if bits.len() > HEX_THRESHOLD {
        format!("0x{}", bits.to_hex())
    } else {
        bits.to_string()
    }
}

/// Key-generator section shared by every config file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OkgSpec {
    /// Register length; needed when `polys` is absent.
    pub n: Option<u32>,
    /// LFSR count when taking the first primitives of degree `n`.
    pub lfsr_count: Option<usize>,
    pub polys: Option<Vec<String>>,
    /// Path to a polynomial list; resolved by the caller.
    pub poly_file: Option<String>,
    pub key_part_len: usize,
    pub resets: usize,
    #[serde(default)]
    pub strict_seeds: bool,
}

impl OkgSpec {
    /// Builds the config; `file_polys` supplies the contents of `poly_file`.
    pub fn build(&self, file_polys: Option<Vec<GenPoly>>) -> Result<OkgConfig> {
        let polys = match (&self.polys, file_polys) {
            (Some(_), Some(_)) => {
                return Err(Error::Parse(
                    "give either polys or poly_file, not both".into(),
                ))
            }
            (Some(list), None) => {
                let mut ps: Vec<GenPoly> = list.iter().map(|s| s.parse()).collect::<Result<_>>()?;
                if let Some(p) = self.lfsr_count {
                    ps.truncate(p);
                }
                Some(ps)
            }
            (None, Some(mut ps)) => {
                if let Some(p) = self.lfsr_count {
                    ps.truncate(p);
                }
                Some(ps)
            }
            (None, None) => None,
        };
        let mut cfg = match polys {
            Some(ps) => {
                if let (Some(n), Some(first)) = (self.n, ps.first()) {
                    if first.degree() != n {
                        return Err(Error::InvalidConfig(format!(
                            "n = {n} but polynomials have degree {}",
                            first.degree()
                        )));
                    }
                }
                OkgConfig::new(ps, self.key_part_len, self.resets)?
            }
            None => {
                let n = self
                    .n
                    .ok_or_else(|| Error::Parse("okg needs n or polys".into()))?;
                OkgConfig::with_first_primitives(
                    n,
                    self.lfsr_count.unwrap_or(1),
                    self.key_part_len,
                    self.resets,
                )?
            }
        };
        cfg.strict_seeds = self.strict_seeds;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeSpec {
    id: String,
    role: String,
    ini: Option<String>,
    inject: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    pub okg: OkgSpec,
    #[serde(rename = "node")]
    nodes: Vec<NodeSpec>,
}

impl CircuitFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn circuit(&self) -> Result<Circuit> {
        let nodes = self
            .nodes
            .iter()
            .map(|spec| {
                let role = match spec.role.as_str() {
                    "source" => Role::Source,
                    "anonymizer" => Role::Anonymizer,
                    "destination" => Role::Destination,
                    other => return Err(Error::Parse(format!("unknown role {other:?}"))),
                };
                let key_seed = match (&spec.inject, &spec.ini) {
                    (Some(bits), _) => Some(KeySeed::Injected(bits.parse()?)),
                    (None, Some(ini)) => Some(KeySeed::Ini(ini.clone())),
                    (None, None) => None,
                };
                Ok(Node {
                    id: spec.id.clone(),
                    role,
                    key_seed,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Circuit::new(nodes)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackFile {
    pub okg: OkgSpec,
    pub intercepted: String,
    pub plaintext: Option<String>,
    pub outgoing: Option<Vec<String>>,
    #[serde(default = "one")]
    pub layers_to_remove: usize,
    pub budget: Option<u64>,
    pub threads: Option<usize>,
    pub tau: Option<f64>,
}

fn one() -> usize {
    1
}

impl AttackFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn intercepted(&self) -> Result<BitString> {
        self.intercepted.parse()
    }

    pub fn reference(&self) -> Result<Reference> {
        match (&self.plaintext, &self.outgoing) {
            (Some(p), None) => Ok(Reference::Plaintext(p.parse()?)),
            (None, Some(flows)) => Ok(Reference::Outgoing(
                flows.iter().map(|f| f.parse()).collect::<Result<_>>()?,
            )),
            _ => Err(Error::Parse(
                "attack file needs exactly one of plaintext or outgoing".into(),
            )),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeygenFile {
    pub okg: OkgSpec,
    pub ini: Option<String>,
    pub inject: Option<String>,
}

impl KeygenFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn schedule_cell(schedule: &[TrueSecretRecord]) -> String {
    schedule
        .iter()
        .map(|r| format!("({},{})", r.lfsr_index, r.seed))
        .collect::<Vec<_>>()
        .join(";")
}

/// `cycle,index,seed,keypart` rows, cycles numbered from 1.
pub fn schedule_table(key: &AnonKey, config: &OkgConfig) -> String {
    let mut out = String::from("cycle,index,seed,keypart\n");
    for (i, rec) in key.schedule.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            i + 1,
            rec.lfsr_index,
            rec.seed,
            bits_cell(&key.part(config, i))
        );
    }
    out
}

/// One row per hop: `hop,node,incoming,outgoing`.
pub fn trace_table(trace: &FlowTrace) -> String {
    let mut out = String::from("hop,node,incoming,outgoing\n");
    for (i, hop) in trace.hops.iter().enumerate() {
        let _ = writeln!(
            out,
            "{i},{},{},{}",
            hop.node,
            bits_cell(&hop.incoming),
            bits_cell(&hop.outgoing)
        );
    }
    out
}

/// Match table followed by the summary header and line. With
/// `include_elapsed = false` the wall-clock column reads `NA` so that
/// repeated runs produce identical bytes.
pub fn attack_report_text(report: &AttackReport, include_elapsed: bool) -> String {
    let mut out = String::from("match,degenerate,flow,schedule\n");
    for (i, m) in report.matches.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            i + 1,
            m.degenerate as u8,
            m.flow.map_or("-".into(), |f| f.to_string()),
            schedule_cell(&m.schedule)
        );
    }
    out.push_str("tries,keyspace_nominal,keyspace_true,elapsed_s,tau_equivalent_s\n");
    let elapsed = if include_elapsed {
        format!("{:.6}", report.elapsed_s)
    } else {
        "NA".into()
    };
    let _ = writeln!(
        out,
        "{},{},{},{},{:e}",
        report.tries,
        report.keyspace_nominal,
        report.keyspace_true,
        elapsed,
        report.tau_equivalent_s()
    );
    out
}
