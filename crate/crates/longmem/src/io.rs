//! File input and output.
//!
//! Input series are plain text, one value per line; blank lines and lines
//! starting with `#` are ignored, and a single leading header line is
//! tolerated. All other malformed content is an error naming the one-based
//! line number. Values must be finite.
//!
//! An experiment writes up to three artifacts into its output directory:
//!
//! * `summary.csv` — one row per (cell, statistic) with statistics `bias`,
//!   `variance`, and `mse`, in canonical cell order;
//! * `estimates.csv` (optional) — every per-replication Hurst estimate;
//! * `run.json` — the fully resolved configuration echo plus provenance
//!   (RNG scheme, library version, worker count, wall time).
//!
//! `summary.csv` and `estimates.csv` are byte-identical across reruns of
//! the same configuration; `run.json` varies only in its timing field.

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::mc::{CellResult, SummaryTable};
use crate::processes::{increments_from_levels, IncrementSeries};
use crate::stream::RNG_DESCRIPTION;
use serde_json::json;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Whether a text file holds increments directly or levels to difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Increments,
    Levels,
}

impl SeriesKind {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "increments" => Ok(SeriesKind::Increments),
            "levels" => Ok(SeriesKind::Levels),
            other => Err(Error::Config(format!(
                "unknown series kind `{other}` (expected one of: increments, levels)"
            ))),
        }
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Load a numeric series: one value per line, `#` comments and blank lines
/// skipped, one leading header line tolerated.
pub fn load_series(path: &Path) -> Result<Vec<f64>> {
    let text = read_to_string(path)?;
    let mut values = Vec::new();
    let mut saw_data = false;
    for (index, raw_line) in text.lines().enumerate() {
        let line_number = index + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                values.push(v);
                saw_data = true;
            }
            Ok(_) => {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    line: line_number,
                    message: format!("non-finite value `{line}`"),
                });
            }
            Err(_) if !saw_data && values.is_empty() => {
                // One leading non-numeric line is treated as a header.
                saw_data = true;
            }
            Err(_) => {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    line: line_number,
                    message: format!("expected a number, got `{line}`"),
                });
            }
        }
    }
    if values.is_empty() {
        return Err(Error::InsufficientData {
            what: "series file",
            required: 1,
            actual: 0,
        });
    }
    Ok(values)
}

/// Load a series as increments, differencing first when the file holds
/// levels.
pub fn load_increments(path: &Path, kind: SeriesKind) -> Result<IncrementSeries> {
    let values = load_series(path)?;
    match kind {
        SeriesKind::Increments => IncrementSeries::new(values),
        SeriesKind::Levels => increments_from_levels(&values),
    }
}

/// Load and resolve an experiment configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = read_to_string(path)?;
    match ExperimentConfig::from_json_str(&text) {
        Ok(config) => Ok(config),
        Err(Error::Config(message)) => Err(Error::Parse {
            path: path.display().to_string(),
            line: serde_json::from_str::<serde_json::Value>(&text)
                .err()
                .map(|e| e.line())
                .unwrap_or(1),
            message,
        }),
        Err(other) => Err(other),
    }
}

/// Output switches for [`write_outputs`].
#[derive(Debug, Clone, Copy, Default)]
pub struct OutputOptions {
    /// Round summary values to four decimals (presentation format) instead
    /// of full shortest-round-trip precision.
    pub paper_format: bool,
    /// Also write every per-replication estimate to `estimates.csv`.
    pub dump_estimates: bool,
}

/// Provenance recorded in `run.json`.
#[derive(Debug, Clone, Copy)]
pub struct RunMetadata {
    pub workers: usize,
    pub wall_seconds: f64,
}

/// Paths of the artifacts a run produced.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub summary: PathBuf,
    pub estimates: Option<PathBuf>,
    pub run_meta: PathBuf,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn format_value(v: f64, paper_format: bool) -> String {
    if paper_format {
        format!("{v:.4}")
    } else {
        format!("{v}")
    }
}

/// Render the summary table as CSV.
pub fn summary_csv(table: &SummaryTable, paper_format: bool) -> String {
    let mut out = String::from("method,distribution,process,length,statistic,value\n");
    for row in &table.rows {
        for (statistic, value) in [
            ("bias", row.bias),
            ("variance", row.variance),
            ("mse", row.mse),
        ] {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                row.method.name(),
                row.distribution,
                row.process,
                row.length,
                statistic,
                format_value(value, paper_format)
            )
            .expect("writing to a String cannot fail");
        }
    }
    out
}

/// Render every per-replication estimate as CSV (always full precision).
pub fn estimates_csv(results: &[CellResult]) -> String {
    let mut out = String::from("method,distribution,process,length,replication,hurst\n");
    for result in results {
        for &(replication, hurst) in &result.estimates {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                result.cell.method.name(),
                result.cell.distribution.label(),
                result.cell.process.label(),
                result.cell.length,
                replication,
                hurst
            )
            .expect("writing to a String cannot fail");
        }
    }
    out
}

/// Write `summary.csv`, optionally `estimates.csv`, and `run.json` into
/// `dir` (created if missing).
pub fn write_outputs(
    dir: &Path,
    config: &ExperimentConfig,
    results: &[CellResult],
    table: &SummaryTable,
    options: OutputOptions,
    metadata: RunMetadata,
) -> Result<RunArtifacts> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;

    let summary = dir.join("summary.csv");
    write_file(&summary, &summary_csv(table, options.paper_format))?;

    let estimates = if options.dump_estimates {
        let path = dir.join("estimates.csv");
        write_file(&path, &estimates_csv(results))?;
        Some(path)
    } else {
        None
    };

    let failed_replications: u64 = results.iter().map(|r| r.failures.len() as u64).sum();
    let skipped_windows: u64 = results.iter().map(|r| r.skipped_windows).sum();
    let lag_capped_windows: u64 = results.iter().map(|r| r.lag_capped_windows).sum();
    let meta = json!({
        "config": config.to_json_value(),
        "rng": RNG_DESCRIPTION,
        "library-version": env!("CARGO_PKG_VERSION"),
        "workers": metadata.workers,
        "wall-seconds": metadata.wall_seconds,
        "cells": results.len(),
        "failed-replications": failed_replications,
        "skipped-windows": skipped_windows,
        "lag-capped-windows": lag_capped_windows,
    });
    let run_meta = dir.join("run.json");
    let mut rendered = serde_json::to_string_pretty(&meta).expect("metadata serialization is infallible");
    rendered.push('\n');
    write_file(&run_meta, &rendered)?;

    Ok(RunArtifacts {
        summary,
        estimates,
        run_meta,
    })
}
