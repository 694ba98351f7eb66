//! Command-line front end. Exit codes: 0 ok, 2 usage, 3 data shape,
//! 4 numerical, 5 failed `--check`.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::baseline::DEFAULT_SEED;
use crate::basis::{PrimeBasis, StaticBasis};
use crate::csvio::{column_names, read_matrix, write_matrix};
use crate::encoder::{forward_batch, generate_static, max_abs_phase, reverse_batch, Source};
use crate::error::Error;
use crate::harness::bundle::{self, DatasetParams, RegimeRunConfig};
use crate::harness::checks::{self, CheckOutcome};
use crate::harness::{self, BenchConfig, ClassificationConfig, GridSpec, RegimeConfig};
use crate::primes::PrimeTable;
use crate::synth::{self, DatasetKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SHAPE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_CHECK: i32 = 5;

/// Recovered phases closer than this to ±π trigger a wrap warning.
const WRAP_MARGIN: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "primefeat",
    version,
    about = "Prime-frequency feature maps and their evaluation"
)]
pub struct Cli {
    /// Seed for the Gaussian baseline (first of the grid seeds in `eval`).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Print summaries as JSON.
    #[arg(long, global = true)]
    pub json: bool,

    /// Binary prime cache to read and update instead of sieving from scratch.
    #[arg(long, global = true, value_name = "PATH")]
    pub prime_cache: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the N × D static sequence codebook as CSV.
    Static {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dim: usize,
        /// Output file, `-` for stdout.
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Encode an N × d CSV into N × D torus embeddings.
    Encode(CodecArgs),
    /// Decode an N × D CSV of embeddings back to N × d.
    Decode(CodecArgs),
    /// Run an evaluation study and write its report bundle.
    Eval {
        #[command(subcommand)]
        study: Study,
    },
    /// Time the kernels across doubling sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct CodecArgs {
    #[arg(long)]
    pub din: usize,
    #[arg(long)]
    pub dout: usize,
    #[arg(long)]
    pub sigma: f64,
    /// Input CSV, `-` for stdin.
    #[arg(long = "in", default_value = "-")]
    pub input: String,
    /// Output CSV, `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Input has a header row; output gets one.
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Args)]
pub struct BundleArgs {
    /// Report bundle directory.
    #[arg(long, default_value = "report")]
    pub out: PathBuf,
    /// Run the pass/fail assertions and exit 5 if any fails.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [500, 1000, 2000])]
    pub n_values: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [16, 64, 256])]
    pub d_values: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [Source::StaticPrime, Source::GaussianBaseline])]
    pub sources: Vec<Source>,
    /// Number of consecutive Gaussian seeds starting at `--seed`.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    #[command(flatten)]
    pub bundle: BundleArgs,
}

#[derive(Debug, Subcommand)]
pub enum Study {
    /// E_RMS and coherence of static-prime vs Gaussian codebooks over a grid.
    Orthogonality(GridArgs),
    /// Optimality-ratio and excess-coherence populations over cells with N > D.
    Welch(GridArgs),
    /// Reconstruction error and latent geometry per (σ, D) on synthetic data.
    Regimes {
        #[arg(long, value_delimiter = ',', default_values_t = [0.007, 1.0])]
        sigmas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [4, 128])]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [DatasetKind::Spiral, DatasetKind::Circles])]
        datasets: Vec<DatasetKind>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0])]
        noise: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Cells with σ at or below this must satisfy the injectivity check.
        #[arg(long, default_value_t = 0.007)]
        manifold_sigma: f64,
        #[command(flatten)]
        bundle: BundleArgs,
    },
    /// Cosine similarity of reconstructed clean/noisy spirals and circles.
    Classify {
        #[arg(long, value_delimiter = ',', default_values_t = [0.007, 0.02, 1.0])]
        sigmas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [4, 128])]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        noise: f64,
        #[command(flatten)]
        bundle: BundleArgs,
    },
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [20_000, 40_000, 80_000])]
    pub n_sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [64, 128, 256])]
    pub d_sizes: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub base_n: usize,
    #[arg(long, default_value_t = 128)]
    pub base_dout: usize,
    #[arg(long, default_value_t = 8)]
    pub din: usize,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[command(flatten)]
    pub bundle: BundleArgs,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidDimension(_) | Error::InvalidArgument(_) => EXIT_USAGE,
            Error::DimensionMismatch { .. }
            | Error::EmptyInput(_)
            | Error::DegenerateRow(_)
            | Error::NotNormalized { .. }
            | Error::InjectivityViolation(_)
            | Error::MalformedCache(_)
            | Error::Csv(_)
            | Error::Json(_) => EXIT_SHAPE,
            Error::NumericalFailure(_) | Error::ResourceExhausted { .. } => EXIT_NUMERICAL,
            Error::Io(_) => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = std::result::Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn run(cli: &Cli) -> CliResult {
    let mut primes = load_primes(cli.prime_cache.as_deref())?;
    let before = primes.len();
    let code = match &cli.command {
        Command::Static { n, dim, out } => cmd_static(cli, *n, *dim, out, &mut primes),
        Command::Encode(args) => cmd_encode(args, &mut primes),
        Command::Decode(args) => cmd_decode(cli, args, &mut primes),
        Command::Eval { study } => cmd_eval(cli, study, &mut primes),
        Command::Bench(args) => cmd_bench(cli, args),
    }?;
    if let Some(path) = &cli.prime_cache {
        if primes.len() > before {
            primes.save(path)?;
        }
    }
    Ok(code)
}

fn load_primes(path: Option<&Path>) -> std::result::Result<PrimeTable, Failure> {
    match path {
        Some(p) if p.exists() => Ok(PrimeTable::load(p)?),
        _ => Ok(PrimeTable::new()),
    }
}

fn open_output(path: &str) -> crate::Result<Box<dyn Write>> {
    if path == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        Ok(Box::new(BufWriter::new(File::create(path)?)))
    }
}

fn read_input(
    path: &str,
    header: bool,
    cols: usize,
    flag: &str,
) -> std::result::Result<crate::Matrix, Failure> {
    if path == "-" {
        return Ok(read_matrix(io::stdin().lock(), header, Some(cols))?);
    }
    let file = File::open(path).map_err(|e| Failure::usage(format!("{flag} {path}: {e}")))?;
    Ok(read_matrix(BufReader::new(file), header, Some(cols))?)
}

/// Human lines go to stdout unless stdout carries data.
fn say(to_stdout: bool, line: &str) {
    if to_stdout {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn emit_json<T: Serialize>(value: &T) -> std::result::Result<(), Failure> {
    println!("{}", serde_json::to_string_pretty(value).map_err(Error::from)?);
    Ok(())
}

fn require_even(flag: &str, value: usize) -> std::result::Result<(), Failure> {
    if value == 0 || !value.is_multiple_of(2) {
        return Err(Failure::usage(format!(
            "{flag} must be a positive even number, got {value}"
        )));
    }
    Ok(())
}

fn cmd_static(cli: &Cli, n: usize, dim: usize, out: &str, primes: &mut PrimeTable) -> CliResult {
    require_even("--dim", dim)?;
    if n == 0 {
        return Err(Failure::usage("--n must be at least 1"));
    }
    let basis = StaticBasis::build(dim, primes)?;
    let codebook = generate_static(&basis, n);
    write_matrix(open_output(out)?, &codebook.rows, None)?;
    if cli.json {
        if out != "-" {
            emit_json(&codebook.meta)?;
        }
    } else {
        say(out != "-", &format!("wrote {n} x {dim} static codebook"));
    }
    Ok(EXIT_OK)
}

fn codec_basis(args: &CodecArgs, primes: &mut PrimeTable) -> std::result::Result<PrimeBasis, Failure> {
    if args.din == 0 {
        return Err(Failure::usage("--din must be at least 1"));
    }
    require_even("--dout", args.dout)?;
    if !(args.sigma.is_finite() && args.sigma > 0.0) {
        return Err(Failure::usage(format!(
            "--sigma must be positive, got {}",
            args.sigma
        )));
    }
    Ok(PrimeBasis::build(args.din, args.dout, args.sigma, primes)?)
}

fn cmd_encode(args: &CodecArgs, primes: &mut PrimeTable) -> CliResult {
    let basis = codec_basis(args, primes)?;
    let xs = read_input(&args.input, args.header, args.din, "--in")?;
    let zs = forward_batch(&basis, &xs)?;
    let k = basis.k();
    let header: Option<Vec<String>> = args.header.then(|| {
        let mut h = column_names("cos", k);
        h.extend(column_names("sin", k));
        h
    });
    write_matrix(open_output(&args.out)?, &zs, header.as_deref())?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct DecodeSummary {
    rows: usize,
    injectivity_radius: f64,
    max_abs_phase: f64,
    wrap_warning: bool,
    hashing_regime: bool,
}

fn cmd_decode(cli: &Cli, args: &CodecArgs, primes: &mut PrimeTable) -> CliResult {
    let basis = codec_basis(args, primes)?;
    let zs = read_input(&args.input, args.header, args.dout, "--in")?;
    let xs = reverse_batch(&basis, &zs)?;
    write_matrix(
        open_output(&args.out)?,
        &xs,
        args.header.then(|| column_names("x", args.din)).as_deref(),
    )?;

    let phase = max_abs_phase(&zs);
    let summary = DecodeSummary {
        rows: xs.nrows(),
        injectivity_radius: basis.injectivity_radius(),
        max_abs_phase: phase,
        wrap_warning: std::f64::consts::PI - phase < WRAP_MARGIN,
        hashing_regime: !basis.is_overdetermined(),
    };
    let to_stdout = args.out != "-";
    if cli.json && to_stdout {
        emit_json(&summary)?;
        return Ok(EXIT_OK);
    }
    say(
        to_stdout,
        &format!("injectivity radius: {:.17e}", summary.injectivity_radius),
    );
    if summary.wrap_warning {
        eprintln!(
            "warning: a recovered phase lies within {WRAP_MARGIN:e} of pi ({phase:.17e}); inputs may have wrapped"
        );
    }
    if summary.hashing_regime {
        eprintln!(
            "warning: D = {} < 2d = {}; hashing regime, output is the least-squares solution",
            args.dout,
            2 * args.din
        );
    }
    Ok(EXIT_OK)
}

fn grid_spec(cli: &Cli, args: &GridArgs) -> GridSpec {
    GridSpec {
        n_values: args.n_values.clone(),
        d_values: args.d_values.clone(),
        sources: args.sources.clone(),
        seeds: (0..args.seeds).map(|i| cli.seed + i).collect(),
    }
}

/// Prints summaries and check outcomes; returns the exit code.
fn finish<T: Serialize>(
    cli: &Cli,
    bundle: &BundleArgs,
    summary: &T,
    outcomes: Option<Vec<CheckOutcome>>,
) -> CliResult {
    if cli.json {
        emit_json(&serde_json::json!({
            "bundle": bundle.out,
            "summary": summary,
            "checks": outcomes,
        }))?;
    } else {
        println!("report bundle: {}", bundle.out.display());
        println!("{}", serde_json::to_string_pretty(summary).map_err(Error::from)?);
        for o in outcomes.iter().flatten() {
            println!("{o}");
        }
    }
    match outcomes {
        Some(o) if !checks::all_passed(&o) => Ok(EXIT_CHECK),
        _ => Ok(EXIT_OK),
    }
}

fn cmd_eval(cli: &Cli, study: &Study, primes: &mut PrimeTable) -> CliResult {
    match study {
        Study::Orthogonality(args) => {
            let table = harness::run_orthogonality_grid(&grid_spec(cli, args), primes)?;
            bundle::write_orthogonality(&args.bundle.out, &table)?;
            let outcomes = args.bundle.check.then(|| checks::check_orthogonality(&table));
            finish(
                cli,
                &args.bundle,
                &serde_json::json!({"summary": table.summary, "paired": table.paired}),
                outcomes,
            )
        }
        Study::Welch(args) => {
            let pop = harness::run_welch_population(&grid_spec(cli, args), primes)?;
            bundle::write_welch(&args.bundle.out, &pop)?;
            let outcomes = args.bundle.check.then(|| checks::check_welch(&pop));
            let summary: Vec<_> = pop
                .populations
                .iter()
                .map(|p| {
                    serde_json::json!({
                        "source": p.source,
                        "cells": p.cells.len(),
                        "optimality_ratio": p.ratio_quantiles,
                        "excess_coherence": p.excess_quantiles,
                    })
                })
                .collect();
            finish(cli, &args.bundle, &summary, outcomes)
        }
        Study::Regimes {
            sigmas,
            dims,
            datasets,
            noise,
            n,
            manifold_sigma,
            bundle: out,
        } => {
            let cfg = RegimeConfig {
                sigmas: sigmas.clone(),
                d_outs: dims.clone(),
                manifold_sigma: *manifold_sigma,
            };
            let mut data = Vec::new();
            let mut params = Vec::new();
            for &kind in datasets {
                for &eps in noise {
                    data.push(synth::make(kind, *n, eps, cli.seed)?);
                    params.push(DatasetParams {
                        kind: kind.to_string(),
                        n: *n,
                        noise: eps,
                        seed: cli.seed,
                    });
                }
            }
            let results = harness::run_regime_study(&data, &cfg, primes)?;
            let run_cfg = RegimeRunConfig {
                study: &cfg,
                datasets: params,
            };
            bundle::write_regimes(&out.out, &run_cfg, &results)?;
            let outcomes = out.check.then(|| {
                let low = (fold(sigmas, f64::min), dims.iter().copied().max().unwrap_or(0));
                let high = (fold(sigmas, f64::max), dims.iter().copied().min().unwrap_or(0));
                checks::check_regimes(&results, low, high)
            });
            let summary: Vec<_> = results
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "dataset": r.dataset,
                        "noise": r.noise,
                        "sigma": r.sigma,
                        "d_out": r.d_out,
                        "regime": r.regime,
                        "recon_mse": r.recon_mse,
                        "intra_class_sim": r.intra_class_sim,
                        "inter_class_sim": r.inter_class_sim,
                    })
                })
                .collect();
            finish(cli, out, &summary, outcomes)
        }
        Study::Classify {
            sigmas,
            dims,
            n,
            noise,
            bundle: out,
        } => {
            let cfg = ClassificationConfig {
                sigmas: sigmas.clone(),
                d_outs: dims.clone(),
                n: *n,
                noise: *noise,
                seed: cli.seed,
            };
            let results = harness::run_classification_study(&cfg, primes)?;
            bundle::write_classification(&out.out, &cfg, &results)?;
            let outcomes = out.check.then(|| {
                let full = fold(sigmas, f64::max);
                let linear: Vec<f64> = sigmas.iter().copied().filter(|&s| s < full).collect();
                let d = dims.iter().copied().max().unwrap_or(0);
                checks::check_classification(&results, d, &linear, full)
            });
            let summary: Vec<_> = results
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "sigma": r.sigma,
                        "d_out": r.d_out,
                        "intra_class": r.intra_class(),
                        "max_inter_class": r.max_inter_class(),
                    })
                })
                .collect();
            finish(cli, out, &summary, outcomes)
        }
    }
}

fn fold(values: &[f64], f: fn(f64, f64) -> f64) -> f64 {
    values.iter().copied().reduce(f).unwrap_or(f64::NAN)
}

fn cmd_bench(cli: &Cli, args: &BenchArgs) -> CliResult {
    let cfg = BenchConfig {
        n_sizes: args.n_sizes.clone(),
        d_out_sizes: args.d_sizes.clone(),
        base_n: args.base_n,
        base_d_out: args.base_dout,
        d_in: args.din,
        trials: args.trials,
        threads: args.threads,
    };
    for &d in cfg.d_out_sizes.iter().chain([&cfg.base_d_out]) {
        require_even("--d-sizes/--base-dout", d)?;
    }
    let table = harness::bench(&cfg)?;
    bundle::write_bench(&args.bundle.out, &table)?;
    let outcomes = args.bundle.check.then(|| checks::check_bench(&table));
    finish(cli, &args.bundle, &table.rows, outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_defaults() {
        let cli = Cli::try_parse_from([
            "primefeat",
            "eval",
            "orthogonality",
            "--n-values",
            "10,20",
            "--seeds",
            "2",
        ])
        .unwrap();
        let Command::Eval {
            study: Study::Orthogonality(args),
        } = &cli.command
        else {
            panic!("wrong subcommand");
        };
        assert_eq!(args.n_values, vec![10, 20]);
        assert_eq!(args.d_values, vec![16, 64, 256]);
        assert_eq!(grid_spec(&cli, args).seeds, vec![42, 43]);
    }

    #[test]
    fn usage_errors_map_to_two() {
        assert_eq!(main_with_args(["primefeat", "nope"]), EXIT_USAGE);
        assert_eq!(
            main_with_args(["primefeat", "static", "--n", "4", "--dim", "3"]),
            EXIT_USAGE
        );
        assert_eq!(main_with_args(["primefeat", "--version"]), EXIT_OK);
    }

    #[test]
    fn error_codes() {
        let shape: Failure = Error::DimensionMismatch {
            expected: 1,
            actual: 2,
        }
        .into();
        assert_eq!(shape.code, EXIT_SHAPE);
        let num: Failure = Error::NumericalFailure("svd".into()).into();
        assert_eq!(num.code, EXIT_NUMERICAL);
    }
}
