//! Clustering-coupled imputation plus the mean/mode and kNN baselines.

use serde::{Deserialize, Serialize};

use crate::clustering::{cluster, cluster_from, ClusterModel, DEFAULT_MAX_ITER};
use crate::data::{AttributeCatalog, CellValue, Dataset, ValueCatalog};
use crate::error::{Error, Result};
use crate::metric::{distance_matrix, object_distance, DissimilarityModel, WeightMatrix};
use crate::neighbors::{natural_neighbors_within, NeighborOrigin};

/// How distances and clusters are refreshed between targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefreshPolicy {
    /// Recompute the distance matrix and re-run the swap loop for every
    /// target (warm-started from the previous medoids).
    #[default]
    Full,
    /// Only update the changed row and reassign the target.
    Incremental,
}

/// Which parts of the procedure run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ablation {
    #[default]
    Full,
    /// Impute from the whole containing cluster, no neighbor search.
    NoNaturalNeighbors,
    /// Natural neighbors over the whole dataset, no clustering.
    NoPreclustering,
}

impl Ablation {
    pub fn label(&self) -> &'static str {
        match self {
            Ablation::Full => "HMVI",
            Ablation::NoNaturalNeighbors => "HMVI-0",
            Ablation::NoPreclustering => "HMVI-1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmviConfig {
    /// Number of clusters.
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub refresh: RefreshPolicy,
    pub ablation: Ablation,
    /// Neighbor count of the kNN baseline.
    pub knn_k: usize,
}

impl HmviConfig {
    pub fn new(k: usize) -> Self {
        HmviConfig {
            k,
            seed: 0,
            max_iter: DEFAULT_MAX_ITER,
            refresh: RefreshPolicy::Full,
            ablation: Ablation::Full,
            knn_k: 5,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_ablation(mut self, ablation: Ablation) -> Self {
        self.ablation = ablation;
        self
    }

    pub fn with_refresh(mut self, refresh: RefreshPolicy) -> Self {
        self.refresh = refresh;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::invalid("k must be at least 2"));
        }
        if self.knn_k < 1 {
            return Err(Error::invalid("knn_k must be at least 1"));
        }
        Ok(())
    }
}

/// Pool the donors of an imputed cell were drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DonorSource {
    NaturalNeighbors,
    /// Nearest members taken because the natural set was empty.
    NearestMembers,
    Cluster,
    Global,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImputedCell {
    pub row: usize,
    pub column: usize,
    pub value: CellValue,
    pub donors: usize,
    pub source: DonorSource,
    /// Cluster of the target when the cell was filled.
    pub cluster: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ImputationReport {
    pub cells: Vec<ImputedCell>,
    /// Outer iterations, one per incomplete object.
    pub iterations: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct HmviOutcome {
    pub dataset: Dataset,
    pub clusters: ClusterModel,
    pub report: ImputationReport,
}

/// Orders the missing attributes of `row` by their strongest symmetrized
/// weight to any observed attribute, strongest first, ties by index.
///
/// Returns `true` alongside when the row has no observed attribute, in which
/// case the order is plain ascending index.
pub fn order_missing_attributes(row: &[CellValue], weights: &WeightMatrix) -> (Vec<usize>, bool) {
    let missing: Vec<usize> = (0..row.len()).filter(|&r| row[r].is_missing()).collect();
    let observed: Vec<usize> = (0..row.len()).filter(|&r| !row[r].is_missing()).collect();
    if observed.is_empty() {
        return (missing, !row.is_empty());
    }
    let score = |r: usize| observed.iter().map(|&s| weights.mutual(r, s)).fold(f64::NEG_INFINITY, f64::max);
    let mut scored: Vec<(usize, f64)> = missing.into_iter().map(|r| (r, score(r))).collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    (scored.into_iter().map(|(r, _)| r).collect(), false)
}

/// Aggregates attribute `attr` over `donors`: mean for numerical
/// attributes, mode for categorical ones (ties to the earlier catalog
/// entry). Donors missing the attribute, and the target itself, are ignored;
/// an error is returned if none remain.
pub fn impute_cell(
    dataset: &Dataset,
    catalog: &ValueCatalog,
    target: usize,
    attr: usize,
    donors: &[usize],
) -> Result<CellValue> {
    let values: Vec<CellValue> =
        donors.iter().filter(|&&j| j != target).map(|&j| dataset.get(j, attr)).filter(|v| !v.is_missing()).collect();
    aggregate(catalog.attr(attr), &values)
        .ok_or_else(|| Error::invalid(format!("no donor observes attribute {attr} for object {target}")))
}

fn aggregate(attr: &AttributeCatalog, values: &[CellValue]) -> Option<CellValue> {
    if values.is_empty() {
        return None;
    }
    match attr {
        AttributeCatalog::Numerical { range, .. } => {
            let xs: Vec<f64> = values.iter().filter_map(|v| v.as_numeric()).collect();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            Some(CellValue::Numeric(mean.clamp(range.min, range.max)))
        }
        _ => {
            let mut counts = vec![0usize; attr.levels()];
            for &v in values {
                if let Some(idx) = attr.index_of(v) {
                    counts[idx] += 1;
                }
            }
            let mut best = 0;
            for (idx, &c) in counts.iter().enumerate() {
                if c > counts[best] {
                    best = idx;
                }
            }
            (counts[best] > 0).then(|| attr.value_at(best)).flatten()
        }
    }
}

/// Fills every missing cell with its column mean (numerical) or mode.
pub fn mms_impute(dataset: &Dataset) -> Result<Dataset> {
    let catalog = ValueCatalog::build(dataset)?;
    let fills: Vec<CellValue> = (0..dataset.d())
        .map(|r| {
            let observed: Vec<CellValue> = dataset.column(r).filter(|v| !v.is_missing()).collect();
            aggregate(catalog.attr(r), &observed)
                .ok_or_else(|| Error::EmptyColumn(dataset.schema().column(r).name.clone()))
        })
        .collect::<Result<_>>()?;
    let mut out = dataset.clone();
    for i in 0..dataset.n() {
        for (r, &fill) in fills.iter().enumerate() {
            if dataset.is_missing(i, r) {
                out.set(i, r, fill)?;
            }
        }
    }
    Ok(out)
}

/// Fills each incomplete row from its `knn_k` nearest complete rows under
/// the missing-aware distance (all complete rows if there are fewer).
/// Without any complete row it degrades to [`mms_impute`].
pub fn knnmi_impute(dataset: &Dataset, knn_k: usize, model: &DissimilarityModel) -> Result<Dataset> {
    if knn_k == 0 {
        return Err(Error::invalid("knn_k must be at least 1"));
    }
    let complete = dataset.complete_rows();
    if complete.is_empty() {
        log::warn!("no complete rows; falling back to mean/mode substitution");
        return mms_impute(dataset);
    }
    let mut out = dataset.clone();
    for i in dataset.incomplete_rows() {
        let row = dataset.row(i);
        let mut cand: Vec<(f64, usize)> =
            complete.iter().map(|&j| (object_distance(row, dataset.row(j), model), j)).collect();
        cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let donors: Vec<usize> = cand.iter().take(knn_k).map(|&(_, j)| j).collect();
        for r in (0..dataset.d()).filter(|&r| row[r].is_missing()) {
            let v = impute_cell(dataset, model.catalog(), i, r, &donors)?;
            out.set(i, r, v)?;
        }
    }
    Ok(out)
}

/// Clustering-coupled imputation.
///
/// Incomplete objects are processed fewest-missing first. For each target
/// the objects are clustered, the target's natural neighbors inside its
/// cluster are found, and its missing attributes are filled in
/// interdependence order from those neighbors (mean or mode); after every
/// filled cell the target is moved to its nearest medoid and its neighbors
/// are looked up again. The dissimilarity model is fitted once on the
/// observed data and kept fixed.
pub fn hmvi_impute(dataset: &Dataset, config: &HmviConfig) -> Result<HmviOutcome> {
    config.validate()?;
    let n = dataset.n();
    if n < config.k {
        return Err(Error::invalid(format!("{n} objects cannot form {} clusters", config.k)));
    }
    let catalog = ValueCatalog::build(dataset)?;
    let model = DissimilarityModel::fit_with_catalog(dataset, &catalog);

    let mut targets = dataset.incomplete_rows();
    targets.sort_by_key(|&i| (dataset.row_missing_count(i), i));

    let mut work = dataset.clone();
    let mut report = ImputationReport::default();
    if model.fallbacks() > 0 {
        report.warnings.push(format!("{} value pairs without co-observed rows", model.fallbacks()));
    }
    let mut matrix = distance_matrix(&work, &model);
    let mut clusters = match config.ablation {
        Ablation::NoPreclustering => None,
        _ => Some(cluster(&matrix, config.k, config.seed, config.max_iter)?),
    };
    let everyone: Vec<usize> = (0..n).collect();

    for &target in &targets {
        if config.refresh == RefreshPolicy::Full {
            matrix = distance_matrix(&work, &model);
            if let Some(prev) = clusters.take() {
                clusters = Some(cluster_from(&matrix, prev.medoids().to_vec(), config.max_iter)?);
            }
        }
        let (order, degenerate) = order_missing_attributes(work.row(target), model.weights());
        if degenerate {
            report.warnings.push(format!("object {target} has no observed attribute; imputing in column order"));
        }
        for attr in order {
            let cluster_idx = clusters.as_ref().map(|c| c.cluster_of(target));
            let members = match (&clusters, cluster_idx) {
                (Some(c), Some(idx)) => c.members(idx),
                _ => everyone.clone(),
            };
            let primary = match config.ablation {
                Ablation::NoNaturalNeighbors => (members.clone(), DonorSource::Cluster),
                _ => {
                    let nb = natural_neighbors_within(&matrix, &members, target)?;
                    let source = match nb.origin {
                        NeighborOrigin::Natural => DonorSource::NaturalNeighbors,
                        _ => DonorSource::NearestMembers,
                    };
                    (nb.indices, source)
                }
            };
            let mut pools = vec![primary];
            if clusters.is_some() {
                pools.push((members, DonorSource::Cluster));
            }
            pools.push((everyone.clone(), DonorSource::Global));

            let mut filled = None;
            for (pool, source) in &pools {
                if let Ok(v) = impute_cell(&work, &catalog, target, attr, pool) {
                    let donors = pool.iter().filter(|&&j| j != target && !work.is_missing(j, attr)).count();
                    filled = Some((v, donors, *source));
                    break;
                }
            }
            let (value, donors, source) =
                filled.ok_or_else(|| Error::Invariant(format!("no donor for object {target}, attribute {attr}")))?;
            if source != pools[0].1 {
                report.warnings.push(format!(
                    "object {target}, attribute {attr}: neighbors lack the attribute, used {source:?} donors"
                ));
            }
            work.set(target, attr, value)?;
            matrix.update_row(&work, &model, target)?;
            if let Some(c) = clusters.as_mut() {
                c.reassign(&matrix, target)?;
            }
            report.cells.push(ImputedCell { row: target, column: attr, value, donors, source, cluster: cluster_idx });
        }
        report.iterations += 1;
    }

    let clusters = match clusters {
        Some(c) => c,
        None => cluster(&matrix, config.k, config.seed, config.max_iter)?,
    };
    check_outcome(dataset, &work, &report)?;
    Ok(HmviOutcome { dataset: work, clusters, report })
}

fn check_outcome(input: &Dataset, output: &Dataset, report: &ImputationReport) -> Result<()> {
    if output.missing_count() != 0 {
        return Err(Error::Invariant("imputed dataset still has missing cells".into()));
    }
    if report.cells.len() != input.missing_count() {
        return Err(Error::Invariant("imputation log does not cover the missing cells".into()));
    }
    for i in 0..input.n() {
        for r in 0..input.d() {
            let v = input.get(i, r);
            if !v.is_missing() && output.get(i, r) != v {
                return Err(Error::Invariant(format!("observed cell ({i}, {r}) was modified")));
            }
        }
    }
    Ok(())
}
