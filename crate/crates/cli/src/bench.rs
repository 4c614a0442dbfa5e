//! Horizon sweeps comparing the engines on one model.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;
use zonovol::{binomial, Method, MethodChoice, Region, SystemModel, VolumeResult};

use crate::error::CliError;
use crate::render::{format_volume, Precision};

pub const DEFAULT_DET_BUDGET: u64 = 500_000_000;

/// Relative spread tolerated between engines at the same horizon.
pub const AGREEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub region: Region,
    pub methods: Vec<Method>,
    pub horizons: Vec<usize>,
    /// Exact runs needing more determinants than this are skipped.
    pub det_budget: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub horizon: usize,
    pub method: String,
    /// `None` when the method was skipped or failed; see `note`.
    pub volume: Option<f64>,
    pub det_count: u64,
    pub mult_count: u64,
    pub wall_ms: f64,
    pub note: Option<String>,
}

fn region_volume(
    model: &SystemModel,
    region: Region,
    horizon: usize,
    method: Method,
) -> zonovol::Result<VolumeResult> {
    let choice = MethodChoice::Use(method);
    match region {
        Region::Reachable => zonovol::reachable_volume(model, horizon, choice),
        Region::Controllable => zonovol::controllable_volume(model, horizon, choice),
    }
}

/// Determinants a full enumeration at `horizon` would evaluate.
pub fn exact_cost(model: &SystemModel, horizon: usize) -> u64 {
    binomial((model.r() * horizon) as u64, model.n() as u64)
}

/// One row per (horizon, method), in input order. Failures and skips are
/// recorded on the row and the sweep continues.
pub fn run_bench(model: &SystemModel, cfg: &BenchConfig) -> Vec<BenchRow> {
    let mut rows = Vec::with_capacity(cfg.horizons.len() * cfg.methods.len());
    for &horizon in &cfg.horizons {
        let first = rows.len();
        for &method in &cfg.methods {
            let mut row = BenchRow {
                horizon,
                method: method.as_str().to_string(),
                volume: None,
                det_count: 0,
                mult_count: 0,
                wall_ms: 0.0,
                note: None,
            };
            if method == Method::Exact && exact_cost(model, horizon) > cfg.det_budget {
                row.note = Some(format!(
                    "skipped: {} determinants exceed the budget of {}",
                    exact_cost(model, horizon),
                    cfg.det_budget
                ));
                rows.push(row);
                continue;
            }
            let start = Instant::now();
            let res = region_volume(model, cfg.region, horizon, method);
            row.wall_ms = start.elapsed().as_secs_f64() * 1e3;
            match res {
                Ok(res) => {
                    row.volume = Some(res.volume);
                    row.det_count = res.det_count;
                    row.mult_count = res.mult_count;
                    if !res.notes.is_empty() {
                        row.note = Some(res.notes.join("; "));
                    }
                }
                Err(e) => row.note = Some(format!("not applicable: {e}")),
            }
            rows.push(row);
        }
        flag_disagreement(&mut rows[first..]);
    }
    rows
}

fn flag_disagreement(rows: &mut [BenchRow]) {
    let Some((ref_method, ref_v)) = rows
        .iter()
        .find_map(|r| r.volume.map(|v| (r.method.clone(), v)))
    else {
        return;
    };
    for row in rows.iter_mut() {
        let Some(v) = row.volume else { continue };
        let scale = v.abs().max(ref_v.abs());
        if scale > 0.0 && (v - ref_v).abs() > AGREEMENT_TOL * scale {
            let msg = format!(
                "disagrees with {ref_method} (relative gap {:.3e})",
                (v - ref_v).abs() / scale
            );
            row.note = Some(match row.note.take() {
                Some(n) => format!("{n}; {msg}"),
                None => msg,
            });
        }
    }
}

pub const CSV_HEADER: [&str; 6] = ["N", "v_r", "method", "n_d", "n_p", "wall_ms"];

/// Skipped or failed rows carry `NA` in `v_r` and empty counters.
pub fn write_csv<W: Write>(
    rows: &[BenchRow],
    precision: Precision,
    out: W,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        let (v, nd, np) = match row.volume {
            Some(v) => (
                format_volume(v, precision),
                row.det_count.to_string(),
                row.mult_count.to_string(),
            ),
            None => ("NA".to_string(), String::new(), String::new()),
        };
        w.write_record([
            row.horizon.to_string(),
            v,
            row.method.clone(),
            nd,
            np,
            format!("{:.3}", row.wall_ms),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_text<W: Write>(
    rows: &[BenchRow],
    precision: Precision,
    mut out: W,
) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    writeln!(
        out,
        "{:>6}  {:<10}  {:>12}  {:>12}  {:>10}  {:>10}",
        "N", "method", "v_r", "n_d", "n_p", "wall_ms"
    )
    .map_err(io)?;
    for row in rows {
        let v = row
            .volume
            .map_or_else(|| "NA".to_string(), |v| format_volume(v, precision));
        writeln!(
            out,
            "{:>6}  {:<10}  {:>12}  {:>12}  {:>10}  {:>10.3}",
            row.horizon, row.method, v, row.det_count, row.mult_count, row.wall_ms
        )
        .map_err(io)?;
        if let Some(note) = &row.note {
            writeln!(out, "        note: {note}").map_err(io)?;
        }
    }
    Ok(())
}

pub fn write_json<W: Write>(rows: &[BenchRow], mut out: W) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, rows).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(out).map_err(|e| CliError::Io(e.to_string()))
}
