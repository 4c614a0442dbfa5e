use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use zonovol::{Horizon, Method, MethodChoice, Region, RegionQuery, VolumeResult};

use crate::bench::{self, BenchConfig, DEFAULT_DET_BUDGET};
use crate::error::CliError;
use crate::model_file::resolve_model;
use crate::render::{format_volume, Format, Precision};
use crate::verify::{run_verify, VerifyConfig};

#[derive(Debug, Parser)]
#[command(
    name = "zonovol",
    version,
    about = "Exact volumes of reachable and controllable regions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Region volume at one finite horizon.
    Volume(VolumeArgs),
    /// Region volume for the infinite horizon.
    Infinite(InfiniteArgs),
    /// Sweep horizons and compare the engines.
    Bench(BenchArgs),
    /// Seeded property checks on random models.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// text, csv or json.
    #[arg(long, default_value = "text", value_parser = parse_format)]
    pub format: Format,
    /// default (4 significant digits) or full.
    #[arg(long, default_value = "default", value_parser = parse_precision)]
    pub precision: Precision,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VolumeArgs {
    /// Model file, or a built-in name (ex1, ex2).
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub horizon: usize,
    #[arg(long, default_value = "reachable", value_parser = parse_region)]
    pub region: Region,
    /// exact, recursive, spectral or auto.
    #[arg(long, default_value = "auto", value_parser = parse_method_choice)]
    pub method: MethodChoice,
    /// Refuse exact runs needing more determinants than this.
    #[arg(long, default_value_t = DEFAULT_DET_BUDGET)]
    pub det_budget: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct InfiniteArgs {
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value = "controllable", value_parser = parse_region)]
    pub region: Region,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub model: String,
    /// start:stop:step (inclusive), a comma list, or a single horizon.
    #[arg(long)]
    pub horizons: String,
    #[arg(long, default_value = "reachable", value_parser = parse_region)]
    pub region: Region,
    /// Comma-separated engines to compare.
    #[arg(long, default_value = "exact,recursive,spectral")]
    pub method: String,
    #[arg(long, default_value_t = DEFAULT_DET_BUDGET)]
    pub det_budget: u64,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    pub format: Format,
    #[arg(long, default_value = "default", value_parser = parse_precision)]
    pub precision: Precision,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Random models per property and dimension.
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// lo:hi (inclusive) or a single dimension.
    #[arg(long, default_value = "2:4", value_parser = parse_dims)]
    pub dims: (usize, usize),
    #[arg(long, default_value = "text", value_parser = parse_format)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, hide = true)]
    pub inject_ordering_fault: bool,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn parse_region(s: &str) -> Result<Region, String> {
    s.parse().map_err(|e: zonovol::Error| e.to_string())
}

fn parse_method_choice(s: &str) -> Result<MethodChoice, String> {
    s.parse().map_err(|e: zonovol::Error| e.to_string())
}

fn parse_count(s: &str) -> Result<usize, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("'{s}' is not a non-negative integer"))
}

pub fn expand_methods(s: &str) -> Result<Vec<Method>, CliError> {
    s.split(',')
        .map(|m| {
            m.trim()
                .parse()
                .map_err(|e: zonovol::Error| CliError::Usage(e.to_string()))
        })
        .collect()
}

/// `start:stop:step` with an inclusive stop, `a,b,c`, or `N`.
pub fn expand_horizons(s: &str) -> Result<Vec<usize>, CliError> {
    let usage = |m: String| CliError::Usage(m);
    let parts: Vec<&str> = s.split(':').collect();
    let out: Vec<usize> = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (
                parse_count(start).map_err(usage)?,
                parse_count(stop).map_err(usage)?,
                parse_count(step).map_err(usage)?,
            );
            if step == 0 || start > stop {
                return Err(usage(format!("bad horizon range '{s}'")));
            }
            (start..=stop).step_by(step).collect()
        }
        [single] => single
            .split(',')
            .map(parse_count)
            .collect::<Result<_, _>>()
            .map_err(usage)?,
        _ => return Err(usage(format!("bad horizon list '{s}'"))),
    };
    if out.contains(&0) {
        return Err(usage("horizons must be at least 1".into()));
    }
    Ok(out)
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    match s.split_once(':') {
        Some((lo, hi)) => Ok((parse_count(lo)?, parse_count(hi)?)),
        None => parse_count(s).map(|n| (n, n)),
    }
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn io_err(e: io::Error) -> CliError {
    CliError::Io(e.to_string())
}

#[derive(Debug, Serialize)]
struct VolumeReport<'a> {
    model: &'a str,
    region: String,
    horizon: String,
    method: String,
    volume: f64,
    volume_display: String,
    n_d: u64,
    n_p: u64,
    wall_ms: f64,
    notes: &'a [String],
}

fn write_volume(
    model: &str,
    region: Region,
    res: &VolumeResult,
    wall_ms: f64,
    output: &Output,
) -> Result<(), CliError> {
    let mut out = open_out(&output.out)?;
    let shown = format_volume(res.volume, output.precision);
    match output.format {
        Format::Text => {
            writeln!(out, "model    {model}").map_err(io_err)?;
            writeln!(out, "region   {region}").map_err(io_err)?;
            writeln!(out, "horizon  {}", res.horizon).map_err(io_err)?;
            writeln!(out, "method   {}", res.method).map_err(io_err)?;
            writeln!(out, "volume   {shown}").map_err(io_err)?;
            writeln!(out, "n_d      {}", res.det_count).map_err(io_err)?;
            writeln!(out, "n_p      {}", res.mult_count).map_err(io_err)?;
            writeln!(out, "wall_ms  {wall_ms:.3}").map_err(io_err)?;
            for note in &res.notes {
                writeln!(out, "note: {note}").map_err(io_err)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            let csv_err = |e: csv::Error| CliError::Io(e.to_string());
            w.write_record(bench::CSV_HEADER).map_err(csv_err)?;
            w.write_record([
                res.horizon.to_string(),
                shown,
                res.method.to_string(),
                res.det_count.to_string(),
                res.mult_count.to_string(),
                format!("{wall_ms:.3}"),
            ])
            .map_err(csv_err)?;
            w.flush().map_err(io_err)?;
        }
        Format::Json => {
            let report = VolumeReport {
                model,
                region: region.to_string(),
                horizon: res.horizon.to_string(),
                method: res.method.to_string(),
                volume: res.volume,
                volume_display: shown,
                n_d: res.det_count,
                n_p: res.mult_count,
                wall_ms,
                notes: &res.notes,
            };
            serde_json::to_writer_pretty(&mut out, &report)
                .map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out).map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)
}

pub fn cmd_volume(args: &VolumeArgs) -> Result<(), CliError> {
    let model = resolve_model(&args.model)?;
    if args.method == MethodChoice::Use(Method::Exact) {
        let cost = bench::exact_cost(&model, args.horizon);
        if cost > args.det_budget {
            return Err(zonovol::Error::Domain(format!(
                "exact enumeration needs {cost} determinants, over the budget of {}",
                args.det_budget
            ))
            .into());
        }
    }
    let query = RegionQuery::new(
        model,
        args.region,
        Horizon::Finite(args.horizon),
        args.method,
    )?;
    let start = Instant::now();
    let res = query.run()?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    write_volume(&query.model.name, args.region, &res, wall_ms, &args.output)
}

pub fn cmd_infinite(args: &InfiniteArgs) -> Result<(), CliError> {
    let model = resolve_model(&args.model)?;
    let query = RegionQuery::new(
        model,
        args.region,
        Horizon::Infinite,
        MethodChoice::Use(Method::Analytic),
    )?;
    let start = Instant::now();
    let res = query.run()?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    write_volume(&query.model.name, args.region, &res, wall_ms, &args.output)
}

pub fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let horizons = expand_horizons(&args.horizons)?;
    let methods = expand_methods(&args.method)?;
    let model = resolve_model(&args.model)?;
    let cfg = BenchConfig {
        region: args.region,
        methods,
        horizons,
        det_budget: args.det_budget,
    };
    let rows = bench::run_bench(&model, &cfg);
    for row in &rows {
        if let Some(note) = &row.note {
            eprintln!("# N={} {}: {note}", row.horizon, row.method);
        }
    }
    let out = open_out(&args.out)?;
    match args.format {
        Format::Csv => bench::write_csv(&rows, args.precision, out),
        Format::Text => bench::write_text(&rows, args.precision, out),
        Format::Json => bench::write_json(&rows, out),
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<bool, CliError> {
    let cfg = VerifyConfig {
        seed: args.seed,
        trials: args.trials,
        dims: args.dims.0..=args.dims.1,
        inject_ordering_fault: args.inject_ordering_fault,
    };
    let report = run_verify(&cfg)?;
    let mut out = open_out(&args.out)?;
    match args.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report)
                .map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out).map_err(io_err)?;
        }
        Format::Text | Format::Csv => writeln!(out, "{report}").map_err(io_err)?,
    }
    out.flush().map_err(io_err)?;
    Ok(report.all_passed())
}
