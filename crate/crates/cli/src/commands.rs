use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use photonion::design::{
    check_crossovers, crossover_report, design_sweep, meets_aes, sweep_csv, CLAIMED_CROSSOVERS,
};
use photonion::formats::{
    attack_report_text, read_bits, schedule_table, trace_table, write_bits, AttackFile,
    CircuitFile, KeygenFile, OkgSpec,
};
use photonion::gf2::parse_poly_list;
use photonion::{
    brute_force_recover, correlate_flows, enumerate_primitive, generate_key, max_primitive_count,
    run_circuit, AttackOptions, AttackScenario, BitString, InjectedBits, OkgConfig, PrngSource,
    Reference,
};

use crate::design_config::{base_input, parse_grid, DesignFile};
use crate::{AttackArgs, CircuitArgs, DesignArgs, KeygenArgs, LayerArgs, SweepArgs};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_flow(path: &Path) -> Result<BitString> {
    read_bits(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// Builds the generator config, resolving `poly_file` against `config_path`'s directory.
fn load_okg(spec: &OkgSpec, config_path: &Path) -> Result<OkgConfig> {
    let file_polys = match &spec.poly_file {
        Some(rel) => {
            let dir = config_path.parent().unwrap_or(Path::new("."));
            let path = dir.join(rel);
            Some(parse_poly_list(&read(&path)?)?)
        }
        None => None,
    };
    Ok(spec.build(file_polys)?)
}

pub fn polys(n: u32, count_only: bool) -> Result<()> {
    if count_only {
        println!("{}", max_primitive_count(n)?);
    } else {
        let mut out = String::new();
        for p in enumerate_primitive(n)? {
            let _ = writeln!(out, "{p}");
        }
        print!("{out}");
    }
    Ok(())
}

pub fn keygen(args: KeygenArgs, verbose: u8) -> Result<()> {
    let file = KeygenFile::parse(&read(&args.config)?)?;
    let config = load_okg(&file.okg, &args.config)?;
    let (ini, inject) = match (args.ini, args.inject) {
        (Some(ini), None) => (Some(ini), None),
        (None, Some(bits)) => (None, Some(bits)),
        _ => (file.ini, file.inject),
    };
    let key = match (ini, inject) {
        (_, Some(bits)) => {
            let bits: BitString = bits.parse().context("parsing injected bits")?;
            generate_key(&config, &mut InjectedBits::new(bits))?
        }
        (Some(ini), None) => generate_key(&config, &mut PrngSource::new(ini))?,
        (None, None) => bail!("keygen needs an ini or injected bits"),
    };
    let weak = key.weak_cycles();
    if !weak.is_empty() {
        eprintln!(
            "warning: all-zero seed in cycle(s) {}",
            weak.iter()
                .map(|c| (c + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
    }
    if verbose > 0 {
        eprintln!(
            "P={} n={} L_k={} N={} key_len={}",
            config.lfsr_count(),
            config.register_len(),
            config.key_part_len(),
            config.resets(),
            config.key_len()
        );
    }
    let key_text = write_bits(&key.bits);
    let schedule = schedule_table(&key, &config);
    match (&args.key_out, &args.schedule_out) {
        (None, None) => print!("{key_text}{schedule}"),
        (k, s) => {
            emit(k.as_ref(), &key_text)?;
            emit(s.as_ref(), &schedule)?;
        }
    }
    Ok(())
}

fn load_keys(paths: &[PathBuf], len: usize) -> Result<Vec<BitString>> {
    paths
        .iter()
        .map(|p| {
            let mut k = read_flow(p)?;
            if k.len() < len {
                bail!("key {} has {} bits, flow has {len}", p.display(), k.len());
            }
            k.truncate(len);
            Ok(k)
        })
        .collect()
}

pub fn encrypt(args: LayerArgs) -> Result<()> {
    let message = read_flow(&args.input)?;
    let mut keys = load_keys(&args.keys, message.len())?;
    keys.reverse();
    let layered = photonion::source_encrypt(&message, &keys)?;
    emit(args.out.as_ref(), &write_bits(&layered.ciphertext))
}

pub fn decrypt(args: LayerArgs) -> Result<()> {
    let mut data = read_flow(&args.input)?;
    for key in load_keys(&args.keys, data.len())? {
        data = photonion::peel_layer(&data, &key)?;
    }
    emit(args.out.as_ref(), &write_bits(&data))
}

pub fn circuit(args: CircuitArgs) -> Result<()> {
    let file = CircuitFile::parse(&read(&args.circuit)?)?;
    let config = load_okg(&file.okg, &args.circuit)?;
    let circuit = file.circuit()?;
    let message = match (&args.message, args.random) {
        (Some(path), _) => read_flow(path)?,
        (None, Some(len)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            (0..len).map(|_| rng.gen::<bool>()).collect()
        }
        (None, None) => bail!("give a message file or --random"),
    };
    let trace = run_circuit(&circuit, &config, &message)?;
    if trace.delivered() != &message {
        bail!("destination output differs from the message");
    }
    emit(args.out.as_ref(), &trace_table(&trace))
}

pub fn attack(args: AttackArgs, verbose: u8) -> Result<()> {
    let file = AttackFile::parse(&read(&args.scenario)?)?;
    let config = load_okg(&file.okg, &args.scenario)?;
    let defaults = AttackOptions::default();
    let opts = AttackOptions {
        budget: args.budget.or(file.budget).unwrap_or(defaults.budget),
        threads: args.threads.or(file.threads).unwrap_or(defaults.threads),
        tau: file.tau.unwrap_or(defaults.tau),
        include_degenerate: !args.no_degenerate,
        ..defaults
    };
    let intercepted = file.intercepted()?;
    let report = match file.reference()? {
        Reference::Outgoing(flows) => {
            if file.layers_to_remove != 1 {
                bail!(
                    "flow correlation removes one layer, got {}",
                    file.layers_to_remove
                );
            }
            correlate_flows(&intercepted, &flows, &config, &opts)?
        }
        reference => {
            let scenario = AttackScenario {
                intercepted,
                reference,
                config,
                layers_to_remove: file.layers_to_remove,
            };
            brute_force_recover(&scenario, &opts)?
        }
    };
    if verbose > 0 {
        eprintln!(
            "{} matches after {} + {} degenerate tries in {:.3} s",
            report.matches.len(),
            report.tries,
            report.degenerate_tries,
            report.elapsed_s
        );
    }
    emit(
        args.out.as_ref(),
        &attack_report_text(&report, !args.reproducible),
    )
}

pub fn design(args: DesignArgs) -> Result<()> {
    let file = DesignFile::load(args.flags.config.as_deref())?;
    let n = args.n.or(file.n).context("design needs --n")?;
    let p = args.p.or(file.p).context("design needs --p")?;
    let input = base_input(&file, &args.flags, n, p)?;
    let r = photonion::design(&input)?;
    let mut out = String::from("quantity,value\n");
    let mut row = |k: &str, v: String| {
        let _ = writeln!(out, "{k},{v}");
    };
    row("n", n.to_string());
    row("P", p.to_string());
    row("L_M_bits", input.container_bits.to_string());
    row("L_k_bits", r.key_part_len.to_string());
    row("N", r.resets.to_string());
    row("key_parts", r.key_parts.to_string());
    row("t_rc_us", format!("{:.3}", r.switch_time_s * 1e6));
    row("C1R_bps", format!("{:.3}", r.rates.interrupted));
    row("C2R_bps", format!("{:.3}", r.rates.clean));
    row("CR_bps", format!("{:.3}", r.rates.mean));
    row("Tb_log10_years", format!("{:.6}", r.t_b.log10_years()));
    row(
        "Tbhat_log10_years",
        r.t_b_hat
            .map_or("NA".into(), |t| format!("{:.6}", t.log10_years())),
    );
    row("TM_log10_years", format!("{:.6}", r.t_m.log10_years()));
    row("TL_log10_years", format!("{:.6}", r.t_l.log10_years()));
    let resets = u32::try_from(r.resets).context("reset count too large")?;
    row(
        "aes128_flag",
        (meets_aes(p, resets, n, 128) as u8).to_string(),
    );
    row(
        "aes256_flag",
        (meets_aes(p, resets, n, 256) as u8).to_string(),
    );
    print!("{out}");
    Ok(())
}

pub fn sweep(args: SweepArgs) -> Result<()> {
    let file = DesignFile::load(args.flags.config.as_deref())?;
    if args.crossovers {
        let resets = args.flags.resets.or(file.resets).unwrap_or(100);
        let resets = u32::try_from(resets).context("reset count too large")?;
        let checks = check_crossovers(&CLAIMED_CROSSOVERS, resets, 512);
        return emit(args.out.as_ref(), &crossover_report(&checks));
    }
    let (default_n, default_p) = if args.table1 {
        (Some(vec![5, 10, 15, 20]), Some(vec![2, 3, 4]))
    } else {
        (file.ns.clone(), file.ps.clone())
    };
    let ns = match &args.n {
        Some(spec) => parse_grid::<u32>(spec)?,
        None => default_n.context("sweep needs --n")?,
    };
    let ps = match &args.p {
        Some(spec) => parse_grid::<u64>(spec)?,
        None => default_p.context("sweep needs --p")?,
    };
    if ns.is_empty() || ps.is_empty() {
        bail!("sweep grid is empty");
    }
    let base = base_input(&file, &args.flags, ns[0], ps[0])?;
    let rows = design_sweep(&ns, &ps, &base);
    emit(args.out.as_ref(), &sweep_csv(&rows))
}
