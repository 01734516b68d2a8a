use std::fmt::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kprototypes::kprototypes;
use super::mcar::inject_missing;
use super::scores::{ari, mrmse};
use crate::clustering::silhouette;
use crate::data::{format_number, Dataset};
use crate::error::{Error, Result};
use crate::imputer::{hmvi_impute, knnmi_impute, mms_impute, Ablation, HmviConfig};
use crate::metric::{distance_matrix, DissimilarityModel};

/// An imputation method under evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Hmvi(Ablation),
    Mms,
    Knnmi,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Hmvi(a) => a.label(),
            Method::Mms => "MMS",
            Method::Knnmi => "KNNMI",
        }
    }

    /// Imputes `corrupted` with this method.
    pub fn impute(&self, corrupted: &Dataset, hmvi: &HmviConfig) -> Result<Dataset> {
        match self {
            Method::Hmvi(ablation) => {
                let cfg = HmviConfig { ablation: *ablation, ..hmvi.clone() };
                Ok(hmvi_impute(corrupted, &cfg)?.dataset)
            }
            Method::Mms => mms_impute(corrupted),
            Method::Knnmi => {
                let model = DissimilarityModel::fit(corrupted)?;
                knnmi_impute(corrupted, hmvi.knn_k, &model)
            }
        }
    }
}

pub const ORI_LABEL: &str = "ORI";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Name written in the dataset column of the report.
    pub dataset_name: String,
    pub methods: Vec<Method>,
    pub rates: Vec<f64>,
    pub repeats: usize,
    pub base_seed: u64,
    /// Clusters for downstream k-prototypes; also used by HMVI.
    pub k: usize,
    /// HMVI settings; its seed is replaced by each grid cell's seed.
    pub hmvi: HmviConfig,
    /// k-prototypes categorical weight (`None`: heuristic default).
    pub gamma: Option<f64>,
}

impl ExperimentConfig {
    /// Rates 10%..50% in steps of 10%, 10 repeats, HMVI + MMS + KNNMI.
    pub fn new(k: usize) -> Self {
        ExperimentConfig {
            dataset_name: "dataset".into(),
            methods: vec![Method::Hmvi(Ablation::Full), Method::Mms, Method::Knnmi],
            rates: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            repeats: 10,
            base_seed: 0,
            k,
            hmvi: HmviConfig::new(k),
            gamma: None,
        }
    }
}

/// One (method, rate, repeat) entry of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub dataset: String,
    pub method: String,
    pub rate: f64,
    pub repeat: usize,
    pub seed: u64,
    /// Absent for the uncorrupted baseline.
    pub mrmse: Option<f64>,
    pub ari: Option<f64>,
    pub cvi: Option<f64>,
    pub wall_ms: f64,
    pub error: Option<String>,
}

/// Averages of one (method, rate) over its successful repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanRow {
    pub dataset: String,
    pub method: String,
    pub rate: f64,
    pub runs: usize,
    pub mrmse: Option<f64>,
    pub ari: Option<f64>,
    pub cvi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub base_seed: u64,
    pub cells: Vec<GridCell>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format_number(x, Some(6))).unwrap_or_default()
}

fn mean(xs: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = xs.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

impl ExperimentReport {
    pub fn cell(&self, method: &str, rate: f64, repeat: usize) -> Option<&GridCell> {
        self.cells.iter().find(|c| c.method == method && c.rate == rate && c.repeat == repeat)
    }

    /// Means per (method, rate), ordered by first appearance in the grid.
    pub fn means(&self) -> Vec<MeanRow> {
        let mut keys: Vec<(String, f64)> = Vec::new();
        for c in &self.cells {
            if !keys.iter().any(|(m, r)| *m == c.method && *r == c.rate) {
                keys.push((c.method.clone(), c.rate));
            }
        }
        keys.into_iter()
            .map(|(method, rate)| {
                let group: Vec<&GridCell> =
                    self.cells.iter().filter(|c| c.method == method && c.rate == rate && c.error.is_none()).collect();
                MeanRow {
                    dataset: group.first().map(|c| c.dataset.clone()).unwrap_or_default(),
                    runs: group.len(),
                    mrmse: mean(group.iter().map(|c| c.mrmse)),
                    ari: mean(group.iter().map(|c| c.ari)),
                    cvi: mean(group.iter().map(|c| c.cvi)),
                    method,
                    rate,
                }
            })
            .collect()
    }

    pub fn mean_of(&self, method: &str, rate: f64) -> Option<MeanRow> {
        self.means().into_iter().find(|m| m.method == method && m.rate == rate)
    }

    /// One row per grid cell. Wall time is only written when `timings` is
    /// set, since it differs between otherwise identical runs.
    pub fn grid_csv(&self, timings: bool) -> String {
        let mut out = String::from("dataset,method,rate,repeat,seed,mrmse,ari,cvi,status");
        if timings {
            out.push_str(",wall_ms");
        }
        out.push('\n');
        for c in &self.cells {
            let status = c
                .error
                .as_deref()
                .map(|e| format!("\"error: {}\"", e.replace('"', "'")))
                .unwrap_or_else(|| "ok".into());
            let _ = write!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                c.dataset,
                c.method,
                c.rate,
                c.repeat,
                c.seed,
                opt(c.mrmse),
                opt(c.ari),
                opt(c.cvi),
                status
            );
            if timings {
                let _ = write!(out, ",{}", format_number(c.wall_ms, Some(6)));
            }
            out.push('\n');
        }
        out
    }

    pub fn means_csv(&self) -> String {
        let mut out = String::from("dataset,method,rate,runs,mrmse,ari,cvi\n");
        for m in self.means() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                m.dataset,
                m.method,
                m.rate,
                m.runs,
                opt(m.mrmse),
                opt(m.ari),
                opt(m.cvi)
            );
        }
        out
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of one grid cell, derived from the base seed, the rate (to 0.1%)
/// and the repeat index.
pub fn cell_seed(base_seed: u64, rate: f64, repeat: usize) -> u64 {
    let permille = (rate * 1000.0).round() as u64;
    splitmix64(base_seed ^ splitmix64(permille ^ splitmix64(repeat as u64).rotate_left(17)))
}

/// Downstream clustering scores of a complete dataset: ARI of
/// k-prototypes against the true labels, and the silhouette of that
/// clustering under the unified distance fitted on the same data.
fn clustering_scores(data: &Dataset, labels: &[usize], k: usize, seed: u64, gamma: Option<f64>) -> Result<(f64, f64)> {
    let kp = kprototypes(data, k, seed, gamma)?;
    let score = ari(&kp.labels, labels)?;
    let model = DissimilarityModel::fit(data)?;
    let cvi = silhouette(&distance_matrix(data, &model), &kp.labels)?;
    Ok((score, cvi))
}

/// Runs the evaluation grid. See [`run_experiment_with`].
pub fn run_experiment(truth: &Dataset, labels: &[usize], config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_with(truth, labels, config, |_, _, _, _| {})
}

/// Runs every (rate, repeat) of the grid: corrupts `truth` with the cell's
/// seed, imputes with each method, scores imputation error against the
/// truth and k-prototypes clustering (ARI against `labels`, silhouette),
/// and scores the uncorrupted baseline the same way.
///
/// `inspect(method, rate, corrupted, imputed)` sees every successful
/// imputation. A failing method fails only its own grid cell.
pub fn run_experiment_with<F>(
    truth: &Dataset,
    labels: &[usize],
    config: &ExperimentConfig,
    inspect: F,
) -> Result<ExperimentReport>
where
    F: Fn(Method, f64, &Dataset, &Dataset) + Sync,
{
    if labels.len() != truth.n() {
        return Err(Error::invalid(format!("{} labels for {} objects", labels.len(), truth.n())));
    }
    if truth.missing_count() > 0 {
        return Err(Error::invalid("the reference dataset must be complete"));
    }
    if config.repeats == 0 || config.rates.is_empty() {
        return Err(Error::invalid("the grid needs at least one rate and one repeat"));
    }
    let jobs: Vec<(f64, usize)> =
        config.rates.iter().flat_map(|&rate| (0..config.repeats).map(move |rep| (rate, rep))).collect();
    let blocks: Vec<Vec<GridCell>> = jobs
        .par_iter()
        .map(|&(rate, repeat)| {
            let seed = cell_seed(config.base_seed, rate, repeat);
            let make = |method: &str, started: Instant, outcome: Result<(Option<f64>, f64, f64)>| {
                let wall_ms = started.elapsed().as_secs_f64() * 1e3;
                let base = GridCell {
                    dataset: config.dataset_name.clone(),
                    method: method.to_string(),
                    rate,
                    repeat,
                    seed,
                    mrmse: None,
                    ari: None,
                    cvi: None,
                    wall_ms,
                    error: None,
                };
                match outcome {
                    Ok((m, a, c)) => GridCell { mrmse: m, ari: Some(a), cvi: Some(c), ..base },
                    Err(e) => GridCell { error: Some(e.to_string()), ..base },
                }
            };
            let mut block = Vec::with_capacity(config.methods.len() + 1);
            let started = Instant::now();
            let ori = clustering_scores(truth, labels, config.k, seed, config.gamma).map(|(a, c)| (None, a, c));
            block.push(make(ORI_LABEL, started, ori));

            let corrupted = inject_missing(truth, rate, seed);
            for &method in &config.methods {
                let started = Instant::now();
                let outcome = corrupted.as_ref().map_err(|e| Error::invalid(e.to_string())).and_then(|(data, mask)| {
                    let hmvi = HmviConfig { seed, ..config.hmvi.clone() };
                    let imputed = method.impute(data, &hmvi)?;
                    inspect(method, rate, data, &imputed);
                    let err = if mask.is_empty() { None } else { Some(mrmse(truth, &imputed, mask)?) };
                    let (a, c) = clustering_scores(&imputed, labels, config.k, seed, config.gamma)?;
                    Ok((err, a, c))
                });
                block.push(make(method.label(), started, outcome));
            }
            block
        })
        .collect();
    Ok(ExperimentReport { base_seed: config.base_seed, cells: blocks.into_iter().flatten().collect() })
}
