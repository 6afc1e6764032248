//! Design inputs from a config file with command-line overrides.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use photonion::{aes_reference, DesignInput, GbitUnit};

use crate::DesignFlags;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignFile {
    pub n: Option<u32>,
    pub p: Option<u64>,
    pub ns: Option<Vec<u32>>,
    pub ps: Option<Vec<u64>>,
    pub container_gbit: Option<f64>,
    /// `binary` or `decimal`.
    pub unit: Option<String>,
    pub rate: Option<f64>,
    pub lfsr_rate: Option<f64>,
    pub tau: Option<f64>,
    pub target_bits: Option<u32>,
    pub resets: Option<u64>,
    pub layers: Option<usize>,
    pub circuit_len: Option<usize>,
}

impl DesignFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

fn unit(file: &DesignFile, flags: &DesignFlags) -> Result<GbitUnit> {
    if flags.decimal {
        return Ok(GbitUnit::Decimal);
    }
    match file.unit.as_deref() {
        None | Some("binary") => Ok(GbitUnit::Binary),
        Some("decimal") => Ok(GbitUnit::Decimal),
        Some(other) => bail!("unit must be binary or decimal, got {other:?}"),
    }
}

/// Calibrated defaults, then file values, then flags.
pub fn base_input(file: &DesignFile, flags: &DesignFlags, n: u32, p: u64) -> Result<DesignInput> {
    let unit = unit(file, flags)?;
    let mut input = DesignInput::calibrated_with_unit(n, p, unit);
    if let Some(g) = flags.container_gbit.or(file.container_gbit) {
        input.container_bits = unit.to_bits(g);
    }
    if let Some(v) = flags.rate.or(file.rate) {
        input.line_rate = v;
    }
    if let Some(v) = flags.lfsr_rate.or(file.lfsr_rate) {
        input.lfsr_rate = v;
    }
    if let Some(v) = flags.tau.or(file.tau) {
        input.tau = v;
    }
    let target_bits = flags.target_bits.or(file.target_bits).unwrap_or(128);
    input.target = aes_reference(target_bits, input.tau);
    input.resets_override = flags.resets.or(file.resets);
    if let Some(v) = flags.layers.or(file.layers) {
        input.layers_to_remove = v;
    }
    if let Some(v) = flags.circuit_len.or(file.circuit_len) {
        input.circuit_len = v;
    }
    Ok(input)
}

/// Parses `a:b:step`, `a:b` or `a,b,c`.
pub fn parse_grid<T>(spec: &str) -> Result<Vec<T>>
where
    T: std::str::FromStr + Copy + PartialOrd + std::ops::Add<Output = T> + From<u8>,
    T::Err: std::error::Error + Send + Sync + 'static,
{
    let parse = |s: &str| -> Result<T> {
        s.trim()
            .parse::<T>()
            .with_context(|| format!("bad number {s:?} in {spec:?}"))
    };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let (start, end, step) = match parts.as_slice() {
            [a, b] => (parse(a)?, parse(b)?, T::from(1)),
            [a, b, s] => (parse(a)?, parse(b)?, parse(s)?),
            _ => bail!("range {spec:?} must be a:b or a:b:step"),
        };
        if step <= T::from(0) {
            bail!("range step must be positive in {spec:?}");
        }
        let mut out = Vec::new();
        let mut v = start;
        while v <= end {
            out.push(v);
            v = v + step;
        }
        Ok(out)
    } else {
        spec.split(',').map(parse).collect()
    }
}
