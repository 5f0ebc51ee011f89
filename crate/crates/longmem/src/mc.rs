//! Deterministic parallel Monte Carlo harness.
//!
//! An experiment is a factorial grid of cells (method × distribution ×
//! process × length), each replicated many times. Replications are
//! embarrassingly parallel and are distributed over a thread pool, but the
//! results are bit-for-bit independent of scheduling:
//!
//! * every replication derives its own random stream from the master seed,
//!   the canonical *cell label*, and the replication index — never from
//!   anything positional, so reordering or pruning the grid leaves the
//!   remaining cells' draws untouched;
//! * parallel results are collected in job order, not completion order;
//! * summary statistics are reduced with fixed-shape pairwise summation.
//!
//! Cells where more than 1% of replications fail (a replication fails when
//! its series cannot be generated or estimated, e.g. a heavy-tail draw
//! overflowed) abort the experiment; rarer failures are recorded on the
//! cell and excluded from its summary.

use crate::baselines::expected_hurst;
use crate::config::ExperimentConfig;
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::estimators::{fit_hurst, rescaled_range_curve, Method, ScaleGrid};
use crate::processes::{ProcessGenerator, ProcessKind, ProcessSpec};
use crate::stream::RandomStream;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// One point of the experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub method: Method,
    pub distribution: DistributionSpec,
    pub process: ProcessSpec,
    pub length: usize,
}

impl Cell {
    /// Canonical identity of the cell; results are keyed and sorted by it.
    pub fn label(&self) -> String {
        format!(
            "{}/{}/{}/{}",
            self.method.name(),
            self.distribution.label(),
            self.process.label(),
            self.length
        )
    }

    /// The string that keys this cell's random streams. With common random
    /// numbers the method is omitted, so every method sees the same
    /// innovation sequences for a given (distribution, process, length,
    /// replication).
    pub fn stream_key(&self, common_random_numbers: bool) -> String {
        if common_random_numbers {
            format!(
                "{}/{}/{}",
                self.distribution.label(),
                self.process.label(),
                self.length
            )
        } else {
            self.label()
        }
    }
}

/// All replications of one cell.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub cell: Cell,
    /// `(replication, Hurst estimate)` for the successful replications, in
    /// ascending replication order.
    pub estimates: Vec<(u64, f64)>,
    /// `(replication, reason)` for the failed ones.
    pub failures: Vec<(u64, String)>,
    /// Windows skipped for zero dispersion or overflow, summed over
    /// replications and scales.
    pub skipped_windows: u64,
    /// Windows whose Bartlett lag hit its cap, summed likewise.
    pub lag_capped_windows: u64,
}

/// Bias/variance/MSE summary of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: Method,
    pub distribution: String,
    pub process: String,
    pub length: usize,
    /// Successful replications behind the statistics.
    pub replications: usize,
    pub mean_hurst: f64,
    /// The reference value bias is measured against: the finite-sample
    /// expected Hurst value for short-memory processes, `d + 1/2` for
    /// fractionally integrated ones.
    pub expected_hurst: f64,
    pub bias: f64,
    pub variance: f64,
    pub mse: f64,
}

/// Summary of a whole experiment, one row per cell, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
}

struct JobOutcome {
    hurst: f64,
    skipped_windows: u64,
    lag_capped_windows: u64,
}

/// Sum with a fixed recursive pairing, so the result does not depend on how
/// work was scheduled and rounding error stays logarithmic in the length.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        acc
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// Mean, bias, population variance, and MSE of a sample of estimates
/// against a reference value. MSE is computed as `bias² + variance`, which
/// ties the three numbers together exactly.
pub(crate) fn summarize_values(values: &[f64], expected: f64) -> (f64, f64, f64, f64) {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let variance = pairwise_sum(&sq) / n;
    let bias = mean - expected;
    (mean, bias, variance, bias * bias + variance)
}

fn cell_failed(failed: usize, total: usize) -> bool {
    // Strictly more than 1% of replications.
    failed * 100 > total
}

/// Build the canonical cell list of a configuration: the full factorial
/// grid, sorted by label.
pub fn cells(config: &ExperimentConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    for method in &config.methods {
        for distribution in &config.distributions {
            for process in &config.processes {
                for &length in &config.lengths {
                    cells.push(Cell {
                        method: *method,
                        distribution: *distribution,
                        process: *process,
                        length,
                    });
                }
            }
        }
    }
    cells.sort_by(|a, b| a.label().cmp(&b.label()).then(a.length.cmp(&b.length)));
    cells
}

/// Run every replication of every cell. Returns one [`CellResult`] per
/// cell, in canonical order, bit-for-bit identical for a given
/// configuration regardless of thread count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<CellResult>> {
    config.validate()?;
    let cells = cells(config);
    let generators: Vec<ProcessGenerator> = cells
        .iter()
        .map(|c| ProcessGenerator::new(c.process))
        .collect::<Result<_>>()?;
    let stream_keys: Vec<String> = cells
        .iter()
        .map(|c| c.stream_key(config.common_random_numbers))
        .collect();

    let reps = config.replications;
    let total_jobs = cells.len() * reps;
    let outcomes: Vec<std::result::Result<JobOutcome, String>> = (0..total_jobs)
        .into_par_iter()
        .map(|job| {
            let cell_index = job / reps;
            let replication = (job % reps) as u64;
            let cell = &cells[cell_index];
            let mut stream =
                RandomStream::derive(config.master_seed, &stream_keys[cell_index], replication);
            let generator = &generators[cell_index];
            let innovations = cell
                .distribution
                .sample(generator.innovations_needed(cell.length), &mut stream);
            run_replication(cell, generator, &innovations, config).map_err(|e| e.to_string())
        })
        .collect();

    let mut results = Vec::with_capacity(cells.len());
    for (cell_index, cell) in cells.into_iter().enumerate() {
        let mut estimates = Vec::with_capacity(reps);
        let mut failures = Vec::new();
        let mut skipped_windows = 0u64;
        let mut lag_capped_windows = 0u64;
        for (r, outcome) in outcomes[cell_index * reps..(cell_index + 1) * reps]
            .iter()
            .enumerate()
        {
            match outcome {
                Ok(out) => {
                    estimates.push((r as u64, out.hurst));
                    skipped_windows += out.skipped_windows;
                    lag_capped_windows += out.lag_capped_windows;
                }
                Err(reason) => failures.push((r as u64, reason.clone())),
            }
        }
        if cell_failed(failures.len(), reps) {
            return Err(Error::CellFailed {
                cell: cell.label(),
                failed: failures.len(),
                total: reps,
                first_error: failures[0].1.clone(),
            });
        }
        results.push(CellResult {
            cell,
            estimates,
            failures,
            skipped_windows,
            lag_capped_windows,
        });
    }
    Ok(results)
}

fn run_replication(
    cell: &Cell,
    generator: &ProcessGenerator,
    innovations: &[f64],
    config: &ExperimentConfig,
) -> Result<JobOutcome> {
    let x = generator.generate(innovations)?;
    let grid = ScaleGrid::dyadic(x.len(), config.min_power)?;
    let curve = rescaled_range_curve(&x, &grid, cell.method, config.aggregation)?;
    let estimate = fit_hurst(&curve)?;
    Ok(JobOutcome {
        hurst: estimate.hurst,
        skipped_windows: curve.points.iter().map(|p| p.skipped as u64).sum(),
        lag_capped_windows: curve.points.iter().map(|p| p.lag_capped as u64).sum(),
    })
}

/// Reduce cell results to bias/variance/MSE rows. The reference value per
/// cell is the finite-sample expected Hurst estimate of a memoryless series
/// of the same length (under the configured baseline formula and summand)
/// for `iid` and `ar1` processes, and the asymptotic `d + 1/2` for
/// fractionally integrated ones.
pub fn summarize(results: &[CellResult], config: &ExperimentConfig) -> Result<SummaryTable> {
    let mut reference_cache: BTreeMap<usize, f64> = BTreeMap::new();
    let mut rows = Vec::with_capacity(results.len());
    for result in results {
        let cell = &result.cell;
        let expected = match cell.process.kind() {
            ProcessKind::Arfima { .. } => cell.process.asymptotic_hurst(),
            _ => match reference_cache.get(&cell.length) {
                Some(&v) => v,
                None => {
                    let v = expected_hurst(
                        cell.length,
                        config.min_power,
                        config.baseline,
                        config.summand,
                    )?;
                    reference_cache.insert(cell.length, v);
                    v
                }
            },
        };
        if result.estimates.len() < 2 {
            return Err(Error::Estimation(format!(
                "cell `{}` has {} usable replications; need at least 2 to summarize",
                cell.label(),
                result.estimates.len()
            )));
        }
        let values: Vec<f64> = result.estimates.iter().map(|&(_, h)| h).collect();
        let (mean_hurst, bias, variance, mse) = summarize_values(&values, expected);
        rows.push(SummaryRow {
            method: cell.method,
            distribution: cell.distribution.label(),
            process: cell.process.label(),
            length: cell.length,
            replications: values.len(),
            mean_hurst,
            expected_hurst: expected,
            bias,
            variance,
            mse,
        });
    }
    Ok(SummaryTable { rows })
}
