use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BenchRow, ExperimentConfig, HeatmapGrid, RayCountRow};
use crate::error::{Error, Result};
use crate::numerics::fmt_f64;

/// Slope of the reference curves `p = exp(REFERENCE_SLOPE n + c)`.
pub const REFERENCE_SLOPE: f64 = 0.16;
pub const REFERENCE_OFFSETS: [f64; 3] = [-1.5, 0.0, 2.0];

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_rows(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    for r in rows {
        w.write_record(&r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Plain-text PGM of a fraction grid. Columns run over `n` ascending, rows
/// over `p` with the largest `p` on top. Fraction 0 renders white and 1
/// black.
pub fn heatmap_pgm(fraction: &[Vec<f64>]) -> String {
    let rows = fraction.len();
    let cols = fraction.first().map_or(0, Vec::len);
    let mut s = format!("P2\n{cols} {rows}\n255\n");
    for row in fraction.iter().rev() {
        let line: Vec<String> = row
            .iter()
            .map(|&f| ((255.0 * (1.0 - f.clamp(0.0, 1.0))).round() as u8).to_string())
            .collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}

pub fn write_fractions_csv(path: &Path, grid: &HeatmapGrid) -> Result<()> {
    let mut rows = Vec::new();
    for (pi, &p) in grid.p_axis.iter().enumerate() {
        for (ni, &n) in grid.n_axis.iter().enumerate() {
            rows.push(vec![
                n.to_string(),
                p.to_string(),
                fmt_f64(grid.fraction[pi][ni]),
                fmt_f64(grid.fraction_1se[pi][ni]),
                grid.trials.to_string(),
            ]);
        }
    }
    write_rows(path, &["n", "p", "fraction", "fraction_1se", "trials"], rows)
}

/// Reference curves sampled at every integer `n` in `[n_min, n_max]`.
pub fn reference_lines_csv(path: &Path, n_min: usize, n_max: usize) -> Result<()> {
    let mut rows = Vec::new();
    for &c in &REFERENCE_OFFSETS {
        for n in n_min..=n_max {
            let p = (REFERENCE_SLOPE * n as f64 + c).exp();
            rows.push(vec![fmt_f64(c), n.to_string(), fmt_f64(p)]);
        }
    }
    write_rows(path, &["c", "n", "p"], rows)
}

pub fn write_raycount_csv(path: &Path, rows: &[RayCountRow]) -> Result<()> {
    let rows = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.p.to_string(),
                fmt_f64(r.mean_extreme),
                fmt_f64(r.sd),
                r.trials.to_string(),
            ]
        })
        .collect();
    write_rows(path, &["n", "p", "mean_extreme", "sd", "trials"], rows)
}

pub fn write_bench_csv(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let rows = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.p.to_string(),
                r.s.to_string(),
                fmt_f64(r.t_outputsensitive),
                fmt_f64(r.t_brute),
                r.membership_calls.to_string(),
                r.brute_calls.to_string(),
                r.kept_classes.to_string(),
            ]
        })
        .collect();
    write_rows(
        path,
        &[
            "n",
            "p",
            "s",
            "t_outputsensitive_ms",
            "t_brute_ms",
            "membership_calls",
            "brute_calls",
            "kept_classes",
        ],
        rows,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub version: String,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(config: &ExperimentConfig, outputs: Vec<String>) -> Self {
        Manifest {
            config: config.clone(),
            seed: config.seed,
            version: concat!("persist-core ", env!("CARGO_PKG_VERSION")).to_string(),
            outputs,
        }
    }
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    crate::json::write_json(path, manifest)
}
