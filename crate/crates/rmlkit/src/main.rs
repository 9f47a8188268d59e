use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rmlkit_core::census::{self, CensusOptions, CountMode, Family};
use rmlkit_core::field::{prime_power, FieldTower};
use rmlkit_core::geometry;
use rmlkit_core::lattice::{self, LatticeParams, RankMetricLattice};

const MISMATCH: u8 = 2;

#[derive(Parser)]
#[command(name = "rmlkit", version, about = "Exact enumeration for rank-metric codes and lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustive and formula code counts.
    #[command(subcommand)]
    Census(CensusCommand),
    /// Whitney numbers of L_i(n, m; q).
    Whitney(WhitneyArgs),
    /// Geometric checks.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Exact family densities against their envelopes and printed forms.
    Density(DensityArgs),
}

#[derive(Subcommand)]
enum CensusCommand {
    /// 2-dimensional MRD codes in F_{q^m}^m.
    Mrd {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        heavy: bool,
        #[arg(long)]
        threads: Option<usize>,
        /// Directory for the resumable shard log.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        split_depth: usize,
        /// Record idealizer dimension and light-word count of every hit.
        #[arg(long)]
        fingerprints: bool,
        /// Stop after this many new shards (the result is then partial).
        #[arg(long)]
        max_shards: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// [mk, k, m] one-weight codes.
    OneWeight {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Formula,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Build the lattice and compare with every applicable formula.
    Verify,
    Brute,
    Recursion,
    Closed,
}

#[derive(clap::Args)]
struct WhitneyArgs {
    #[arg(long)]
    i: u32,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    q: u32,
    #[arg(long)]
    j: Option<u32>,
    #[arg(long, value_enum, default_value_t = Method::Verify)]
    method: Method,
    /// Directory for built lattices.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Translation hyperovals of PG(2, q) among additive-map graphs.
    Hyperovals {
        #[arg(long)]
        q: u32,
    },
    /// Scattered pairs against MRD codes; `--samples 0` sweeps every pair.
    ScatteredMrd {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 0)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct DensityArgs {
    #[arg(long, value_parser = ["m4_mrd", "q2_mrd", "one_weight"])]
    family: String,
    /// `a..b`, `a..=b` (both inclusive) or a comma list.
    #[arg(long)]
    range: String,
    #[arg(long)]
    csv: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(MISMATCH),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn emit(value: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    if let Some(path) = out {
        std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{text}");
    Ok(())
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Census(c) => run_census(c),
        Command::Whitney(w) => run_whitney(w),
        Command::Verify(v) => run_verify(v),
        Command::Density(d) => run_density(d),
    }
}

fn run_census(c: CensusCommand) -> Result<bool> {
    let (result, out) = match c {
        CensusCommand::Mrd {
            q,
            m,
            heavy,
            threads,
            checkpoint,
            split_depth,
            fingerprints,
            max_shards,
            out,
        } => {
            let checkpoint = match checkpoint {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    Some(dir.join(format!("census-mrd-q{q}-m{m}.log")))
                }
                None => None,
            };
            let opts = CensusOptions {
                threads,
                split_depth,
                checkpoint,
                heavy,
                stop_after: max_shards,
                fingerprints,
            };
            (census::count_mrd_exhaustive(q, m, &opts)?, out)
        }
        CensusCommand::OneWeight { q, m, k, mode, out } => {
            let mode = match mode {
                Mode::Exhaustive => CountMode::Exhaustive,
                Mode::Formula => CountMode::Formula,
            };
            (census::count_one_weight(m, k, q, mode, &CensusOptions::default())?, out)
        }
    };
    emit(&serde_json::to_value(&result)?, out.as_deref())?;
    Ok(result.matches != Some(false))
}

fn cached_lattice(params: LatticeParams, cache: Option<&Path>) -> Result<RankMetricLattice> {
    let Some(dir) = cache else {
        return Ok(lattice::build_lattice(params)?);
    };
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("L{}_{}_{}_{}.lattice", params.i, params.n, params.m, params.q));
    if path.exists() {
        let l = RankMetricLattice::load_cache(&path)?;
        if l.params() == params {
            return Ok(l);
        }
    }
    let l = lattice::build_lattice(params)?;
    l.save_cache(&path)?;
    Ok(l)
}

fn run_whitney(w: WhitneyArgs) -> Result<bool> {
    let params = LatticeParams::new(w.i, w.n, w.m, w.q)?;
    let mut pass = true;
    let value = match w.method {
        Method::Recursion | Method::Closed => {
            let Some(j) = w.j else {
                bail!("--j is required for this method");
            };
            let v = if w.method == Method::Recursion {
                let base = lattice::recursion_base(&params, j)?;
                lattice::whitney_recursion(&params, j, &base)?
            } else {
                if params.i != 2 || params.m != 3 {
                    bail!("the closed formula covers i = 2, m = 3");
                }
                lattice::closed_formula_i2m3(params.n, j, params.q as u64)?
            };
            json!({ "params": params, "j": j, "method": method_name(w.method), "value": v.to_string() })
        }
        Method::Brute | Method::Verify => {
            let l = cached_lattice(params, w.cache.as_deref())?;
            let wv = l.whitney();
            let violations = wv.invariant_violations();
            let mobius = l.mobius_identity_violations();
            pass &= violations.is_empty() && mobius == 0;
            let mut value = json!({
                "params": params,
                "layer_sizes": l.layer_sizes(),
                "whitney_first_kind": wv.first_kind.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "whitney_second_kind": wv.second_kind.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "invariant_violations": violations,
                "mobius_identity_violations": mobius,
            });
            if w.method == Method::Verify {
                let js: Vec<u32> = match w.j {
                    Some(j) => vec![j],
                    None => (1..=l.rank() as u32).collect(),
                };
                let mut records = Vec::new();
                for j in js {
                    let r = lattice::verify_whitney(&l, j)?;
                    pass &= !r.has_mismatch();
                    records.push(serde_json::to_value(&r)?);
                }
                value["verifications"] = Value::Array(records);
            }
            value
        }
    };
    emit(&value, w.out.as_deref())?;
    Ok(pass)
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Verify => "verify",
        Method::Brute => "brute",
        Method::Recursion => "recursion",
        Method::Closed => "closed",
    }
}

fn run_verify(v: VerifyCommand) -> Result<bool> {
    match v {
        VerifyCommand::Hyperovals { q } => {
            let h = match prime_power(q) {
                Some((2, h)) => h,
                _ => bail!("hyperovals need q a power of 2, got {q}"),
            };
            let r = geometry::classify_translation_hyperovals(h)?;
            emit(&serde_json::to_value(&r)?, None)?;
            Ok(r.prediction_match)
        }
        VerifyCommand::ScatteredMrd { q, m, samples, seed } => {
            let tower = FieldTower::for_q(q, m)?;
            let r = if samples == 0 {
                geometry::scattered_mrd_exhaustive(&tower)?
            } else {
                geometry::scattered_mrd_sampled(&tower, samples, seed)?
            };
            emit(&serde_json::to_value(&r)?, None)?;
            Ok(r.violations.is_empty())
        }
    }
}

fn parse_range(text: &str) -> Result<Vec<u32>> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (u32, u32) = (a.trim().parse()?, b.trim().parse()?);
        if a > b {
            bail!("empty range {text}");
        }
        return Ok((a..=b).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse().with_context(|| format!("bad range entry {s:?}")))
        .collect()
}

fn run_density(d: DensityArgs) -> Result<bool> {
    let family: Family = d.family.parse()?;
    let mut values = parse_range(&d.range)?;
    if family != Family::Q2Mrd && d.range.contains("..") {
        // Ranges over q keep the field orders only.
        values.retain(|&q| prime_power(q).is_some());
    }
    let report = census::asymptotic_report(family, &values.into_iter().collect::<BTreeSet<_>>())?;
    if d.csv {
        println!("parameter,density,decimal,ratio,printed,printed_matches");
        for r in &report.rows {
            println!(
                "{},{},{},{},{},{}",
                r.parameter, r.density.exact, r.density.decimal, r.ratio, r.printed.exact, r.printed_matches
            );
        }
    } else {
        emit(&serde_json::to_value(&report)?, None)?;
    }
    Ok(report.printed_mismatches.is_empty())
}
