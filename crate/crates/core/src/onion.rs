//! Layered XOR encryption over a chain of nodes.
//!
//! The source applies one key per downstream key-holding node, innermost
//! (destination) first:
//!
//! ```text
//! M_i = M_{i+1} ^ K_i,   M_{r+1} = M,   i = r, ..., 1
//! ```
//!
//! and node `i` turns `M_i` back into `M_{i+1}` with the same key.

use std::fmt;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::okg::{generate_key, AnonKey, OkgConfig};
use crate::prng::{InjectedBits, PrngSource};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Source,
    Anonymizer,
    Destination,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Source => "source",
            Role::Anonymizer => "anonymizer",
            Role::Destination => "destination",
        })
    }
}

/// Where a node's key-generator configuration bits come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KeySeed {
    /// Initialization token for the reference pRNG.
    Ini(String),
    /// Explicit pRNG output, bypassing the generator.
    Injected(BitString),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub role: Role,
    /// Absent only for the source, which holds no layer.
    pub key_seed: Option<KeySeed>,
}

impl Node {
    pub fn source(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            role: Role::Source,
            key_seed: None,
        }
    }

    pub fn anonymizer(id: impl Into<String>, seed: KeySeed) -> Self {
        Self {
            id: id.into(),
            role: Role::Anonymizer,
            key_seed: Some(seed),
        }
    }

    pub fn destination(id: impl Into<String>, seed: KeySeed) -> Self {
        Self {
            id: id.into(),
            role: Role::Destination,
            key_seed: Some(seed),
        }
    }

    /// Generates this node's layer key from its own pRNG configuration.
    pub fn generate_key(&self, config: &OkgConfig) -> Result<AnonKey> {
        match &self.key_seed {
            Some(KeySeed::Ini(ini)) => generate_key(config, &mut PrngSource::new(ini.clone())),
            Some(KeySeed::Injected(bits)) => {
                generate_key(config, &mut InjectedBits::new(bits.clone()))
            }
            None => Err(Error::InvalidCircuit(format!(
                "node {} has no key configuration",
                self.id
            ))),
        }
    }
}

/// An ordered path from source to destination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    nodes: Vec<Node>,
}

impl Circuit {
    pub fn new(nodes: Vec<Node>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidCircuit(
                "a circuit needs a source and a destination".into(),
            ));
        }
        let last = nodes.len() - 1;
        for (i, node) in nodes.iter().enumerate() {
            let expected = match i {
                0 => Role::Source,
                i if i == last => Role::Destination,
                _ => Role::Anonymizer,
            };
            if node.role != expected {
                return Err(Error::InvalidCircuit(format!(
                    "node {} at position {i} is a {}, expected {expected}",
                    node.id, node.role
                )));
            }
            if i > 0 && node.key_seed.is_none() {
                return Err(Error::InvalidCircuit(format!(
                    "node {} holds a layer but has no ini",
                    node.id
                )));
            }
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Number of key-holding nodes.
    pub fn layers(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Key-holding node `i`, 1-based (1 = first anonymizer, r = destination).
    pub fn key_node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }
}

pub fn xor_bits(a: &BitString, b: &BitString) -> Result<BitString> {
    a.xor(b)
}

pub fn peel_layer(data: &BitString, key: &BitString) -> Result<BitString> {
    data.xor(key)
}

/// Result of the source's encryption loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layered {
    pub ciphertext: BitString,
    /// Data after each key application, in application order: `M_r, ..., M_1`.
    pub intermediates: Vec<BitString>,
}

/// Applies `keys` in order; pass `[K_r, ..., K_1]` so that `K_1` goes on last.
pub fn source_encrypt(message: &BitString, keys: &[BitString]) -> Result<Layered> {
    if keys.is_empty() {
        return Err(Error::NoKeys);
    }
    let mut data = message.clone();
    let mut intermediates = Vec::with_capacity(keys.len());
    for k in keys {
        data.xor_assign(k)?;
        intermediates.push(data.clone());
    }
    Ok(Layered {
        ciphertext: data,
        intermediates,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hop {
    pub node: String,
    pub incoming: BitString,
    pub outgoing: BitString,
}

/// Per-hop record of one flow through a circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowTrace {
    /// One entry per node, source first.
    pub hops: Vec<Hop>,
    /// The source's loop values `M_r, ..., M_1`.
    pub source_layers: Vec<BitString>,
    /// Keys `K_1, ..., K_r` as regenerated by their owning nodes.
    pub keys: Vec<AnonKey>,
}

impl FlowTrace {
    pub fn delivered(&self) -> &BitString {
        &self.hops.last().expect("trace has a destination").outgoing
    }
}

fn key_for_flow(node: &Node, config: &OkgConfig, len: usize) -> Result<AnonKey> {
    let lk = config.key_part_len();
    let full = config.key_len();
    // Only the final key part may be cut short.
    if len > full || len + lk <= full {
        return Err(Error::LengthMismatch {
            left: len,
            right: full,
        });
    }
    let mut key = node.generate_key(config)?;
    key.bits.truncate(len);
    Ok(key)
}

/// Sends `message` through `circuit`: the source regenerates every
/// downstream key from that node's ini and applies them destination-first,
/// then each key-holding node regenerates its own key and peels one layer.
pub fn run_circuit(
    circuit: &Circuit,
    config: &OkgConfig,
    message: &BitString,
) -> Result<FlowTrace> {
    let r = circuit.layers();
    let len = message.len();

    // Source side: K_r first, K_1 last.
    let mut source_keys = Vec::with_capacity(r);
    for i in (1..=r).rev() {
        source_keys.push(key_for_flow(circuit.key_node(i), config, len)?.bits);
    }
    let layered = source_encrypt(message, &source_keys)?;

    let mut hops = Vec::with_capacity(r + 1);
    hops.push(Hop {
        node: circuit.nodes[0].id.clone(),
        incoming: message.clone(),
        outgoing: layered.ciphertext.clone(),
    });

    let mut keys = Vec::with_capacity(r);
    let mut data = layered.ciphertext.clone();
    for i in 1..=r {
        let node = circuit.key_node(i);
        let key = key_for_flow(node, config, len)?;
        let out = peel_layer(&data, &key.bits)?;
        hops.push(Hop {
            node: node.id.clone(),
            incoming: data,
            outgoing: out.clone(),
        });
        keys.push(key);
        data = out;
    }

    Ok(FlowTrace {
        hops,
        source_layers: layered.intermediates,
        keys,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn worked_config() -> OkgConfig {
        OkgConfig::new(
            vec!["x^3+x+1".parse().unwrap(), "x^3+x^2+1".parse().unwrap()],
            5,
            2,
        )
        .unwrap()
    }

    fn worked_circuit() -> Circuit {
        Circuit::new(vec![
            Node::source("A"),
            Node::anonymizer("C", KeySeed::Injected(bs("10100110"))),
            Node::destination("E", KeySeed::Injected(bs("01011100"))),
        ])
        .unwrap()
    }

    #[test]
    fn xor_examples() {
        assert_eq!(
            xor_bits(&bs("1001101011"), &bs("0011110111")).unwrap(),
            bs("1010011100")
        );
        assert_eq!(
            xor_bits(&bs("1010011100"), &bs("1110010011")).unwrap(),
            bs("0100001111")
        );
        assert!(xor_bits(&bs("10"), &bs("1")).is_err());
    }

    #[test]
    fn source_encrypt_examples() {
        let m = bs("1001101011");
        let out = source_encrypt(&m, &[bs("0011110111"), bs("1110010011")]).unwrap();
        assert_eq!(out.ciphertext, bs("0100001111"));
        assert_eq!(out.intermediates, vec![bs("1010011100"), bs("0100001111")]);

        let z = source_encrypt(&m, &[BitString::zeros(10)]).unwrap();
        assert_eq!(z.ciphertext, m);
        let k = bs("0110100101");
        assert_eq!(source_encrypt(&m, &[k.clone(), k]).unwrap().ciphertext, m);
        assert_eq!(source_encrypt(&m, &[]), Err(Error::NoKeys));
        assert!(source_encrypt(&m, &[bs("1")]).is_err());
    }

    #[test]
    fn peel_examples() {
        assert_eq!(
            peel_layer(&bs("0100001111"), &bs("1110010011")).unwrap(),
            bs("1010011100")
        );
        assert_eq!(
            peel_layer(&bs("1010011100"), &bs("0011110111")).unwrap(),
            bs("1001101011")
        );
        assert_eq!(
            peel_layer(&bs("1010011100"), &BitString::zeros(10)).unwrap(),
            bs("1010011100")
        );
    }

    #[test]
    fn worked_circuit_trace() {
        let trace = run_circuit(&worked_circuit(), &worked_config(), &bs("1001101011")).unwrap();
        let rows: Vec<(&str, String, String)> = trace
            .hops
            .iter()
            .map(|h| {
                (
                    h.node.as_str(),
                    h.incoming.to_string(),
                    h.outgoing.to_string(),
                )
            })
            .collect();
        assert_eq!(
            rows,
            vec![
                ("A", "1001101011".into(), "0100001111".into()),
                ("C", "0100001111".into(), "1010011100".into()),
                ("E", "1010011100".into(), "1001101011".into()),
            ]
        );
        assert_eq!(
            trace.source_layers,
            vec![bs("1010011100"), bs("0100001111")]
        );
        assert_eq!(trace.keys[0].bits, bs("1110010011"));
        assert_eq!(trace.keys[1].bits, bs("0011110111"));
    }

    #[test]
    fn direct_circuit() {
        let c = Circuit::new(vec![
            Node::source("S"),
            Node::destination("D", KeySeed::Ini("INI.D".into())),
        ])
        .unwrap();
        let cfg = worked_config();
        let m = bs("1100110011");
        let trace = run_circuit(&c, &cfg, &m).unwrap();
        assert_eq!(trace.hops.len(), 2);
        assert_eq!(trace.hops[0].outgoing, m.xor(&trace.keys[0].bits).unwrap());
        assert_eq!(trace.delivered(), &m);
    }

    #[test]
    fn truncated_final_part() {
        let cfg = worked_config();
        let m = bs("1001101");
        let trace = run_circuit(&worked_circuit(), &cfg, &m).unwrap();
        assert_eq!(trace.delivered(), &m);
        assert_eq!(trace.keys[1].bits, bs("0011110"));
        // Too short for two parts, too long for the key.
        assert!(run_circuit(&worked_circuit(), &cfg, &bs("10011")).is_err());
        assert!(run_circuit(&worked_circuit(), &cfg, &BitString::zeros(11)).is_err());
    }

    #[test]
    fn circuit_validation() {
        let ini = || KeySeed::Ini("x".into());
        assert!(Circuit::new(vec![Node::source("A")]).is_err());
        assert!(Circuit::new(vec![
            Node::anonymizer("A", ini()),
            Node::destination("B", ini())
        ])
        .is_err());
        assert!(Circuit::new(vec![
            Node::source("A"),
            Node::destination("B", ini()),
            Node::destination("C", ini())
        ])
        .is_err());
        let mut d = Node::destination("B", ini());
        d.key_seed = None;
        assert!(Circuit::new(vec![Node::source("A"), d]).is_err());
    }

    #[test]
    fn underrun_surfaces() {
        let c = Circuit::new(vec![
            Node::source("A"),
            Node::destination("E", KeySeed::Injected(bs("0101"))),
        ])
        .unwrap();
        assert!(matches!(
            run_circuit(&c, &worked_config(), &bs("1001101011")),
            Err(Error::Underrun { .. })
        ));
    }
}
