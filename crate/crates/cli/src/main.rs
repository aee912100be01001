mod io;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fir_core::bench::{run_bench, summarize, BenchConfig, MeanStd, RunStatus};
use fir_core::fir::{FirConfig, DEFAULT_BOX_EXPAND, DEFAULT_DIRECTIONS};
use fir_core::numerics::sample_unit_directions;
use fir_core::robust_pca::{estimate, fit_with, CenterForm, EstimateMethod, OdCutoffRule, PcaOptions, VarianceForm};
use fir_core::simdata::{generate, SimKind, SimSpec, DEFAULT_LOWRANK_SCALE, DEFAULT_R};
use fir_core::RngStream;
use serde::Serialize;
use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable input or unwritable output (exit 2).
    Input(String),
    /// The computation itself failed (exit 3).
    Numeric(String),
}

impl From<fir_core::Error> for CliError {
    fn from(e: fir_core::Error) -> Self {
        match e {
            fir_core::Error::InvalidArgument(_) => CliError::Input(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "fir", version, about = "Fast iterative robust location, covariance and PCA")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Base random seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of random projection directions.
    #[arg(long, global = true, default_value_t = DEFAULT_DIRECTIONS)]
    directions: usize,
    /// Fraction of points in the inlier subset.
    #[arg(long, global = true, default_value_t = 0.75)]
    alpha: f64,
    /// Points added per iteration (default: max(p + 1, ceil(n / 10))).
    #[arg(long, global = true)]
    batch: Option<usize>,
    /// Output path: file prefix for `simulate`, file for `estimate`,
    /// directory for `pca` and `bench`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Global {
    fn fir_config(&self) -> FirConfig {
        FirConfig {
            alpha: self.alpha,
            batch_m: self.batch,
            n_directions: self.directions,
            seed: RngStream::new(self.seed, 0),
            box_expand: DEFAULT_BOX_EXPAND,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled synthetic dataset.
    Simulate {
        #[arg(long, default_value = "clean")]
        kind: SimKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Outlier distance (point and cluster kinds).
        #[arg(long, default_value_t = DEFAULT_R)]
        r: f64,
        /// Factor count (lowrank kind).
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Offset magnitude (lowrank kind).
        #[arg(long, default_value_t = DEFAULT_LOWRANK_SCALE)]
        scale: f64,
    },
    /// Robust location and covariance of a CSV dataset.
    Estimate {
        input: PathBuf,
        #[arg(long, default_value = "fir")]
        method: EstimateMethod,
    },
    /// Robust PCA with score/orthogonal distance outlier map.
    Pca {
        input: PathBuf,
        #[arg(long, default_value = "fir")]
        method: EstimateMethod,
        /// Accept p >= n by reducing to the data rank first.
        #[arg(long)]
        allow_wide: bool,
        #[arg(long, value_enum, default_value_t = VarianceArg::Eigenvalues)]
        variance: VarianceArg,
        #[arg(long, value_enum, default_value_t = CenterArg::Corrected)]
        center: CenterArg,
        #[arg(long, value_enum, default_value_t = OdCutoffArg::WilsonHilferty)]
        od_cutoff: OdCutoffArg,
        /// Also write an SVG outlier map.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Monte Carlo comparison driven by a JSON config.
    Bench { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum VarianceArg {
    Eigenvalues,
    Squared,
}

#[derive(Clone, Copy, ValueEnum)]
enum CenterArg {
    Corrected,
    Literal,
}

#[derive(Clone, Copy, ValueEnum)]
enum OdCutoffArg {
    WilsonHilferty,
    Raw,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate {
            kind,
            n,
            p,
            eps,
            r,
            rank,
            scale,
        } => {
            let mut spec = SimSpec::new(*kind, *n, *p, *eps, RngStream::new(cli.global.seed, 0));
            spec.r = *r;
            spec.rank = *rank;
            spec.scale = *scale;
            simulate(&cli.global, &spec)
        }
        Command::Estimate { input, method } => estimate_cmd(&cli.global, input, *method),
        Command::Pca {
            input,
            method,
            allow_wide,
            variance,
            center,
            od_cutoff,
            svg,
        } => {
            let options = PcaOptions {
                variance_form: match variance {
                    VarianceArg::Eigenvalues => VarianceForm::Eigenvalues,
                    VarianceArg::Squared => VarianceForm::SquaredEigenvalues,
                },
                center_form: match center {
                    CenterArg::Corrected => CenterForm::Corrected,
                    CenterArg::Literal => CenterForm::Literal,
                },
                od_cutoff: match od_cutoff {
                    OdCutoffArg::WilsonHilferty => OdCutoffRule::WilsonHilferty,
                    OdCutoffArg::Raw => OdCutoffRule::Raw,
                },
                allow_wide: *allow_wide,
            };
            pca(&cli.global, input, *method, &options, svg.as_deref())
        }
        Command::Bench { config } => bench(&cli.global, config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            ExitCode::from(3)
        }
    }
}

fn simulate(global: &Global, spec: &SimSpec) -> Result<(), CliError> {
    let prefix = global
        .out
        .clone()
        .ok_or_else(|| CliError::Input("simulate needs --out <prefix>".into()))?;
    let data = generate(spec)?;
    io::write_matrix(&io::with_suffix(&prefix, ".csv"), data.x.as_matrix(), "x")?;
    io::write_records(
        &io::with_suffix(&prefix, ".labels.csv"),
        data.labels.iter().map(|&l| LabelRow {
            is_outlier: u8::from(l),
        }),
    )?;
    let truth = json!({
        "kind": spec.kind.as_str(),
        "n": spec.n,
        "p": spec.p,
        "eps": spec.eps,
        "r": spec.r,
        "rank": spec.rank,
        "scale": spec.scale,
        "seed": global.seed,
        "n_outliers": data.labels.iter().filter(|&&l| l).count(),
        "true_mu": io::vector(&data.true_mu),
        "true_sigma": io::rows(&data.true_sigma),
        "reference_sigma": io::rows(&data.reference_sigma),
    });
    io::write_json(&io::with_suffix(&prefix, ".truth.json"), &truth)
}

#[derive(Serialize)]
struct LabelRow {
    is_outlier: u8,
}

fn estimate_cmd(global: &Global, input: &Path, method: EstimateMethod) -> Result<(), CliError> {
    let x = io::read_matrix(input)?;
    let (n, p) = (x.nrows(), x.ncols());
    if p >= n {
        return Err(CliError::Input(format!("p exceeds n unsupported (n={n}, p={p})")));
    }
    let config = global.fir_config();
    let warnings = if method == EstimateMethod::Fir {
        config.warnings(n, p)
    } else {
        Vec::new()
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let start = Instant::now();
    let result = match method {
        EstimateMethod::Classical => fir_core::robust_pca::classical_estimate(&x),
        _ => {
            if method == EstimateMethod::Fir {
                config.plan(n, p)?;
            }
            let dirs = sample_unit_directions(p, config.n_directions, &config.seed)?;
            estimate(&x, method, &config, &dirs)?
        }
    };
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let batch = match method {
        EstimateMethod::Fir => Some(config.plan(n, p)?.batch_m),
        _ => None,
    };
    let out = json!({
        "method": method.as_str(),
        "n": n,
        "p": p,
        "mu": io::vector(&result.mu),
        "sigma": io::rows(&result.sigma),
        "h_indices": result.h_indices,
        "n_selected": result.n_selected,
        "runtime_ms": runtime_ms,
        "warnings": warnings,
        "config": {
            "alpha": config.alpha,
            "batch": batch,
            "directions": config.n_directions,
            "seed": global.seed,
            "box_expand": config.box_expand,
        },
    });
    match &global.out {
        Some(path) => io::write_json(path, &out),
        None => {
            println!(
                "{}",
                serde_json::to_string_pretty(&out).map_err(|e| CliError::Input(e.to_string()))?
            );
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct OutlierRow {
    index: usize,
    sd: f64,
    od: f64,
    flag: u8,
}

fn pca(
    global: &Global,
    input: &Path,
    method: EstimateMethod,
    options: &PcaOptions,
    svg_path: Option<&Path>,
) -> Result<(), CliError> {
    let x = io::read_matrix(input)?;
    let config = global.fir_config();
    let model = fit_with(&x, method, &config, options, None)?;
    let dir = global.out.clone().unwrap_or_else(|| PathBuf::from("."));
    io::ensure_dir(&dir)?;
    let doc = json!({
        "method": method.as_str(),
        "n": x.nrows(),
        "p": x.ncols(),
        "r0": model.r0,
        "r1": model.r1,
        "loadings": io::rows(&model.loadings),
        "variances": io::vector(&model.variances),
        "eigenvalues": io::vector(&model.eigenvalues),
        "center": io::vector(&model.center),
        "cutoff_sd": model.cutoff_sd,
        "cutoff_od": model.cutoff_od,
        "h_indices": model.h_indices,
        "n_flagged": model.outlier_flags.iter().filter(|&&f| f).count(),
        "config": {
            "alpha": config.alpha,
            "batch": config.batch_m,
            "directions": config.n_directions,
            "seed": global.seed,
            "variance_form": options.variance_form,
            "center_form": options.center_form,
            "od_cutoff": options.od_cutoff,
            "allow_wide": options.allow_wide,
        },
    });
    io::write_json(&dir.join("model.json"), &doc)?;
    io::write_matrix(&dir.join("scores.csv"), &model.scores, "t")?;
    io::write_records(
        &dir.join("outliermap.csv"),
        (0..model.sd.len()).map(|i| OutlierRow {
            index: i,
            sd: model.sd[i],
            od: model.od[i],
            flag: u8::from(model.outlier_flags[i]),
        }),
    )?;
    if let Some(path) = svg_path {
        let title = format!("{} outlier map", method.as_str());
        let text = svg::outlier_map(
            &model.sd,
            &model.od,
            &model.outlier_flags,
            model.cutoff_sd,
            model.cutoff_od,
            &title,
        );
        io::write_text(path, &text)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ResultRow<'a> {
    method: &'a str,
    dataset: &'a str,
    kind: &'a str,
    eps: f64,
    replication: usize,
    status: &'a str,
    reason: &'a str,
    e_mu: Option<f64>,
    e_sigma: Option<f64>,
    e_kl: Option<f64>,
    outliers_in_h: Option<usize>,
}

fn stat(v: &Option<MeanStd>) -> serde_json::Value {
    match v {
        Some(m) => json!({ "mean": m.mean, "std": m.std, "table": m.table_entry() }),
        None => serde_json::Value::Null,
    }
}

fn bench_threads() -> Result<Option<usize>, CliError> {
    match std::env::var("FIR_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(|k| (k > 0).then_some(k))
            .map_err(|_| CliError::Input(format!("FIR_THREADS must be a non-negative integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

fn bench(global: &Global, config_path: &PathBuf) -> Result<(), CliError> {
    let text =
        std::fs::read_to_string(config_path).map_err(|e| CliError::Input(format!("{}: {e}", config_path.display())))?;
    let config: BenchConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", config_path.display())))?;
    let threads = bench_threads()?;
    let start = Instant::now();
    let records = run_bench(&config, threads)?;
    let wall_seconds = start.elapsed().as_secs_f64();

    let dir = global.out.clone().unwrap_or_else(|| PathBuf::from("."));
    io::ensure_dir(&dir)?;
    io::write_records(
        &dir.join("results.csv"),
        records.iter().map(|r| {
            let (status, reason) = match &r.status {
                RunStatus::Ok => ("ok", ""),
                RunStatus::Skipped(why) => ("skipped", why.as_str()),
                RunStatus::Failed(why) => ("failed", why.as_str()),
            };
            ResultRow {
                method: r.method.as_str(),
                dataset: &r.dataset,
                kind: r.kind.as_str(),
                eps: r.eps,
                replication: r.replication,
                status,
                reason,
                e_mu: r.report.map(|x| x.e_mu),
                e_sigma: r.report.map(|x| x.e_sigma),
                e_kl: r.report.map(|x| x.e_kl),
                outliers_in_h: r.outliers_in_h,
            }
        }),
    )?;
    let cells: Vec<serde_json::Value> = summarize(&records)
        .iter()
        .map(|c| {
            json!({
                "method": c.method.as_str(),
                "dataset": c.dataset,
                "kind": c.kind.as_str(),
                "eps": c.eps,
                "ok": c.ok,
                "skipped": c.skipped,
                "failed": c.failed,
                "e_mu": stat(&c.e_mu),
                "e_sigma": stat(&c.e_sigma),
                "e_kl": stat(&c.e_kl),
                "runtime_seconds": stat(&c.runtime_seconds),
                "outliers_in_h": stat(&c.outliers_in_h),
            })
        })
        .collect();
    let summary = json!({
        "config": config,
        "wall_seconds": wall_seconds,
        "cells": cells,
    });
    io::write_json(&dir.join("summary.json"), &summary)?;
    if records.iter().all(|r| r.status != RunStatus::Ok) {
        return Err(CliError::Numeric("every benchmark cell failed or was skipped".into()));
    }
    Ok(())
}
