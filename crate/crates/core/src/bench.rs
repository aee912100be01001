//! Monte Carlo runner comparing estimators on simulated contamination.
//!
//! Every replication is a pure function of `(config, cell, replication)`:
//! its random stream is derived from the base seed and a stable hash of the
//! cell, so results do not depend on worker count or scheduling.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fir::{FirConfig, DEFAULT_BOX_EXPAND, DEFAULT_DIRECTIONS};
use crate::metrics::{cov_error, kl_divergence, location_error, ErrorReport};
use crate::numerics::{sample_unit_directions, RngStream};
use crate::robust_pca::{estimate, EstimateMethod};
use crate::simdata::{generate, LabeledData, SimKind, SimSpec, DEFAULT_R};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    pub n: usize,
    pub p: usize,
}

/// Which covariance the error metrics compare against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaTarget {
    /// [`LabeledData::reference_sigma`].
    #[default]
    Reference,
    /// [`LabeledData::true_sigma`].
    Population,
}

fn default_replications() -> usize {
    100
}
fn default_alpha() -> f64 {
    0.75
}
fn default_tau() -> usize {
    DEFAULT_DIRECTIONS
}
fn default_r() -> f64 {
    DEFAULT_R
}
fn default_methods() -> Vec<EstimateMethod> {
    vec![EstimateMethod::Classical, EstimateMethod::Fdb, EstimateMethod::Fir]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub datasets: Vec<DatasetSpec>,
    pub kinds: Vec<SimKind>,
    #[serde(default)]
    pub eps_list: Vec<f64>,
    #[serde(default = "default_methods")]
    pub methods: Vec<EstimateMethod>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub batch_m: Option<usize>,
    #[serde(default = "default_tau")]
    pub tau: usize,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub sigma_target: SigmaTarget,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::invalid("replications must be >= 1"));
        }
        if self.datasets.is_empty() || self.kinds.is_empty() || self.methods.is_empty() {
            return Err(Error::invalid("datasets, kinds and methods must be non-empty"));
        }
        if self.kinds.iter().any(|k| *k != SimKind::Clean) && self.eps_list.is_empty() {
            return Err(Error::invalid("eps_list must be non-empty for contaminated kinds"));
        }
        Ok(())
    }

    pub fn fir_config(&self, seed: RngStream) -> FirConfig {
        FirConfig {
            alpha: self.alpha,
            batch_m: self.batch_m,
            n_directions: self.tau,
            seed,
            box_expand: DEFAULT_BOX_EXPAND,
        }
    }

    /// `(dataset index, kind index, eps)` for every cell, clean kinds
    /// collapsing to a single `eps = 0` cell.
    fn cells(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for d in 0..self.datasets.len() {
            for (k, kind) in self.kinds.iter().enumerate() {
                if *kind == SimKind::Clean {
                    out.push((d, k, 0.0));
                } else {
                    out.extend(self.eps_list.iter().map(|&e| (d, k, e)));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Skipped(String),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: EstimateMethod,
    pub dataset: String,
    pub kind: SimKind,
    pub eps: f64,
    pub replication: usize,
    pub status: RunStatus,
    pub report: Option<ErrorReport>,
    /// Number of true outliers inside the selected subset.
    pub outliers_in_h: Option<usize>,
}

/// FNV-1a, used to give each cell a stable stream id.
fn cell_stream_id(dataset: &DatasetSpec, kind: SimKind, eps: f64) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |bytes: &[u8]| {
        for b in bytes {
            hash ^= u64::from(*b);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    feed(dataset.name.as_bytes());
    feed(&(dataset.n as u64).to_le_bytes());
    feed(&(dataset.p as u64).to_le_bytes());
    feed(kind.as_str().as_bytes());
    feed(&eps.to_bits().to_le_bytes());
    hash
}

/// Random stream for one replication of one cell.
pub fn replication_stream(
    base_seed: u64,
    dataset: &DatasetSpec,
    kind: SimKind,
    eps: f64,
    replication: usize,
) -> RngStream {
    RngStream::new(base_seed, cell_stream_id(dataset, kind, eps)).child(replication as u64)
}

/// Generate one dataset and run every configured method on it.
pub fn run_replication(
    config: &BenchConfig,
    dataset: &DatasetSpec,
    kind: SimKind,
    eps: f64,
    replication: usize,
) -> Vec<RunRecord> {
    let stream = replication_stream(config.base_seed, dataset, kind, eps, replication);
    let mut spec = SimSpec::new(kind, dataset.n, dataset.p, eps, stream);
    spec.r = config.r;
    let record = |method, status, report, overlap| RunRecord {
        method,
        dataset: dataset.name.clone(),
        kind,
        eps,
        replication,
        status,
        report,
        outliers_in_h: overlap,
    };
    let data = match generate(&spec) {
        Ok(d) => d,
        Err(e) => {
            return config
                .methods
                .iter()
                .map(|&m| record(m, RunStatus::Skipped(e.to_string()), None, None))
                .collect()
        }
    };
    let dir_seed = stream.child(u64::MAX);
    config
        .methods
        .iter()
        .map(|&method| match run_method(config, &data, method, dir_seed) {
            Ok((report, overlap)) => record(method, RunStatus::Ok, Some(report), Some(overlap)),
            Err(e @ Error::InvalidArgument(_)) => record(method, RunStatus::Skipped(e.to_string()), None, None),
            Err(e) => record(method, RunStatus::Failed(e.to_string()), None, None),
        })
        .collect()
}

/// Run one estimator on one simulated dataset and score it.
pub fn run_method(
    config: &BenchConfig,
    data: &LabeledData,
    method: EstimateMethod,
    dir_seed: RngStream,
) -> Result<(ErrorReport, usize)> {
    let (n, p) = (data.x.nrows(), data.x.ncols());
    let fir = config.fir_config(dir_seed);
    match method {
        EstimateMethod::Fir => {
            fir.plan(n, p)?;
        }
        EstimateMethod::Fdb if !(0.5..1.0).contains(&config.alpha) => {
            return Err(Error::invalid(format!(
                "fdb needs alpha in [0.5, 1), got {}",
                config.alpha
            )));
        }
        _ => {}
    }
    let start = Instant::now();
    let est = if method == EstimateMethod::Classical {
        crate::robust_pca::classical_estimate(&data.x)
    } else {
        let dirs = sample_unit_directions(p, config.tau, &dir_seed)?;
        estimate(&data.x, method, &fir, &dirs)?
    };
    let runtime_seconds = start.elapsed().as_secs_f64();
    let target = match config.sigma_target {
        SigmaTarget::Reference => &data.reference_sigma,
        SigmaTarget::Population => &data.true_sigma,
    };
    let report = ErrorReport {
        e_mu: location_error(&est.mu, &data.true_mu)?,
        e_sigma: cov_error(&est.sigma, target)?,
        e_kl: kl_divergence(&est.sigma, target)?,
        runtime_seconds,
    };
    let overlap = est.h_indices.iter().filter(|&&i| data.labels[i]).count();
    Ok((report, overlap))
}

/// Run the whole grid. `threads` caps the worker count when the `parallel`
/// feature is enabled (`None` or `Some(0)` = rayon default).
pub fn run_bench(config: &BenchConfig, threads: Option<usize>) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let cells = config.cells();
    let reps = config.replications;
    let tasks = cells.len() * reps;
    let work = |exec: Exec| {
        exec.map_range(tasks, |t| {
            let (d, k, eps) = cells[t / reps];
            run_replication(config, &config.datasets[d], config.kinds[k], eps, t % reps)
        })
    };
    let nested = with_threads(threads, || work(Exec::Parallel))?;
    let mut records: Vec<RunRecord> = nested.into_iter().flatten().collect();
    sort_records(config, &mut records);
    Ok(records)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    #[cfg(feature = "parallel")]
    if let Some(k) = threads.filter(|&k| k > 0) {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::invalid(format!("cannot build thread pool: {e}")))?;
        return Ok(pool.install(f));
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(f())
}

fn sort_records(config: &BenchConfig, records: &mut [RunRecord]) {
    let pos = |name: &str| config.datasets.iter().position(|d| d.name == name);
    let kind_pos = |k: SimKind| config.kinds.iter().position(|x| *x == k);
    let method_pos = |m: EstimateMethod| config.methods.iter().position(|x| *x == m);
    records.sort_by(|a, b| {
        pos(&a.dataset)
            .cmp(&pos(&b.dataset))
            .then(kind_pos(a.kind).cmp(&kind_pos(b.kind)))
            .then(a.eps.total_cmp(&b.eps))
            .then(method_pos(a.method).cmp(&method_pos(b.method)))
            .then(a.replication.cmp(&b.replication))
    });
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Sample mean and standard deviation (zero spread for a single value).
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let k = values.len() as f64;
        let mean = values.iter().sum::<f64>() / k;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, std })
    }

    /// `"0.18 (0.06)"`.
    pub fn table_entry(&self) -> String {
        format!("{:.2} ({:.2})", self.mean, self.std)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub method: EstimateMethod,
    pub dataset: String,
    pub kind: SimKind,
    pub eps: f64,
    pub ok: usize,
    pub skipped: usize,
    pub failed: usize,
    pub e_mu: Option<MeanStd>,
    pub e_sigma: Option<MeanStd>,
    pub e_kl: Option<MeanStd>,
    pub runtime_seconds: Option<MeanStd>,
    pub outliers_in_h: Option<MeanStd>,
}

/// Aggregate sorted records into one summary per cell, preserving order.
pub fn summarize(records: &[RunRecord]) -> Vec<CellSummary> {
    let mut out: Vec<CellSummary> = Vec::new();
    let mut start = 0;
    while start < records.len() {
        let head = &records[start];
        let same = |r: &RunRecord| {
            r.method == head.method && r.dataset == head.dataset && r.kind == head.kind && r.eps == head.eps
        };
        let end = start + records[start..].iter().take_while(|r| same(r)).count();
        let group = &records[start..end];
        let reports: Vec<&ErrorReport> = group.iter().filter_map(|r| r.report.as_ref()).collect();
        let pick = |f: fn(&ErrorReport) -> f64| MeanStd::of(&reports.iter().map(|r| f(r)).collect::<Vec<_>>());
        let overlaps: Vec<f64> = group.iter().filter_map(|r| r.outliers_in_h.map(|v| v as f64)).collect();
        out.push(CellSummary {
            method: head.method,
            dataset: head.dataset.clone(),
            kind: head.kind,
            eps: head.eps,
            ok: group.iter().filter(|r| r.status == RunStatus::Ok).count(),
            skipped: group
                .iter()
                .filter(|r| matches!(r.status, RunStatus::Skipped(_)))
                .count(),
            failed: group
                .iter()
                .filter(|r| matches!(r.status, RunStatus::Failed(_)))
                .count(),
            e_mu: pick(|r| r.e_mu),
            e_sigma: pick(|r| r.e_sigma),
            e_kl: pick(|r| r.e_kl),
            runtime_seconds: pick(|r| r.runtime_seconds),
            outliers_in_h: MeanStd::of(&overlaps),
        });
        start = end;
    }
    out
}
