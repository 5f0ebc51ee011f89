//! `longmem` — rescaled range analysis from the command line.
//!
//! Three subcommands:
//!
//! * `simulate` — run a Monte Carlo experiment described by a JSON
//!   configuration file and write `summary.csv` / `run.json` (and optionally
//!   `estimates.csv`) into an output directory;
//! * `estimate` — estimate the Hurst exponent of a series stored in a text
//!   file, one value per line;
//! * `expected` — print the finite-sample expected rescaled range curve for
//!   an independent series, plus the Hurst level it implies.
//!
//! Exit codes: 0 on success, 1 for usage errors (bad flags, malformed
//! configuration or input values), 2 for runtime failures (I/O, estimation).
//!
//! The `LONGMEM_WORKERS` environment variable caps the worker-thread count;
//! results are bit-identical for any worker count.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use longmem::baselines::expected_rs_curve;
use longmem::{
    estimate_hurst, expected_hurst, load_config, load_increments, run_experiment, summarize,
    write_outputs, BaselineFormula, Error, Method, OutputOptions, Result, RunMetadata, ScaleGrid,
    SeriesKind, SummandConvention,
};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "longmem",
    version,
    about = "Rescaled range analysis: Hurst estimation, finite-sample baselines, Monte Carlo experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment from a JSON configuration file.
    Simulate {
        /// Path to the JSON experiment configuration.
        #[arg(long)]
        config: PathBuf,
        /// Directory to write summary.csv and run.json into (created if missing).
        #[arg(long)]
        out: PathBuf,
        /// Also write every per-replication Hurst estimate to estimates.csv.
        #[arg(long)]
        dump_estimates: bool,
        /// Round summary values to four decimals instead of full precision.
        #[arg(long)]
        paper_format: bool,
    },
    /// Estimate the Hurst exponent of a series file (one value per line).
    Estimate {
        /// Input series file.
        #[arg(long)]
        input: PathBuf,
        /// Whether the file holds `increments` or `levels` (differenced first).
        #[arg(long)]
        kind: String,
        /// Estimator: `rs` (classical) or `mrs` (modified).
        #[arg(long)]
        method: String,
        /// Smallest window size; a power of two, at least 2.
        #[arg(long, default_value_t = 32)]
        min_scale: usize,
    },
    /// Print the expected rescaled range of an i.i.d. series, scale by scale.
    Expected {
        /// Series length the expectation is computed for.
        #[arg(long)]
        length: usize,
        /// Baseline formula: `anis-lloyd` or `peters`.
        #[arg(long)]
        formula: String,
        /// Inner-sum convention: `conventional` (default) or `printed`.
        #[arg(long, default_value = "conventional")]
        summand: String,
        /// Smallest window size; a power of two, at least 2.
        #[arg(long, default_value_t = 32)]
        min_scale: usize,
    },
}

fn min_power_from_scale(min_scale: usize) -> Result<u32> {
    if min_scale >= 2 && min_scale.is_power_of_two() {
        Ok(min_scale.trailing_zeros())
    } else {
        Err(Error::InvalidParameter {
            name: "min-scale",
            value: min_scale.to_string(),
            constraint: "must be a power of two, at least 2",
        })
    }
}

fn configure_workers() -> Result<usize> {
    if let Ok(raw) = std::env::var("LONGMEM_WORKERS") {
        let workers: usize = raw.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::Config(format!(
                "LONGMEM_WORKERS must be a positive integer, got `{raw}`"
            ))
        })?;
        // Ignore the error a second global-pool initialization would raise;
        // the pool can only be configured once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
        Ok(workers)
    } else {
        Ok(rayon::current_num_threads())
    }
}

fn run_simulate(
    config_path: &PathBuf,
    out: &PathBuf,
    dump_estimates: bool,
    paper_format: bool,
    workers: usize,
) -> Result<()> {
    let config = load_config(config_path)?;
    let cells = longmem::mc::cells(&config);
    println!(
        "running {} cells x {} replications on {} worker{}",
        cells.len(),
        config.replications,
        workers,
        if workers == 1 { "" } else { "s" }
    );
    let start = Instant::now();
    let results = run_experiment(&config)?;
    let table = summarize(&results, &config)?;
    let wall_seconds = start.elapsed().as_secs_f64();
    let artifacts = write_outputs(
        out,
        &config,
        &results,
        &table,
        OutputOptions {
            paper_format,
            dump_estimates,
        },
        RunMetadata {
            workers,
            wall_seconds,
        },
    )?;
    println!("finished in {wall_seconds:.2}s");
    println!("wrote {}", artifacts.summary.display());
    if let Some(estimates) = &artifacts.estimates {
        println!("wrote {}", estimates.display());
    }
    println!("wrote {}", artifacts.run_meta.display());
    Ok(())
}

fn run_estimate(input: &PathBuf, kind: &str, method: &str, min_scale: usize) -> Result<()> {
    let kind = SeriesKind::from_name(kind)?;
    let method = Method::from_name(method)?;
    let min_power = min_power_from_scale(min_scale)?;
    let series = load_increments(input, kind)?;
    let estimate = estimate_hurst(&series, method, min_power)?;
    println!("method: {}", estimate.method.name());
    println!(
        "observations: {} (analyzed prefix: {})",
        series.len(),
        estimate.analyzed_len
    );
    println!(
        "scales: {}..{} ({} scales)",
        estimate.scales.first().expect("fit has at least two scales"),
        estimate.scales.last().expect("fit has at least two scales"),
        estimate.scales.len()
    );
    println!("hurst: {:.6}", estimate.hurst);
    println!("intercept: {:.6}", estimate.intercept);
    Ok(())
}

fn run_expected(length: usize, formula: &str, summand: &str, min_scale: usize) -> Result<()> {
    let formula = BaselineFormula::from_name(formula)?;
    let summand = SummandConvention::from_name(summand)?;
    let min_power = min_power_from_scale(min_scale)?;
    let grid = ScaleGrid::dyadic(length, min_power)?;
    let curve = expected_rs_curve(&grid, formula, summand)?;
    println!("scale,expected-rs");
    for (scale, value) in &curve {
        println!("{scale},{value}");
    }
    let hurst = expected_hurst(length, min_power, formula, summand)?;
    println!("# expected-h = {hurst}");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    // Validate LONGMEM_WORKERS up front for every subcommand; only
    // `simulate` actually fans work out, but a malformed value should never
    // pass silently.
    let workers = configure_workers()?;
    match &cli.command {
        Command::Simulate {
            config,
            out,
            dump_estimates,
            paper_format,
        } => run_simulate(config, out, *dump_estimates, *paper_format, workers),
        Command::Estimate {
            input,
            kind,
            method,
            min_scale,
        } => run_estimate(input, kind, method, *min_scale),
        Command::Expected {
            length,
            formula,
            summand,
            min_scale,
        } => run_expected(*length, formula, summand, *min_scale),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
