//! Unified dissimilarity for mixed-type rows with missing cells.
//!
//! Attribute interdependence is estimated from observed co-occurrences
//! ([`estimate_statistics`]), turned into weights ([`compute_weights`]) and
//! per-attribute value-pair tables ([`value_pair_dissimilarity`]). Those
//! feed the row distance ([`object_distance`]) and the dense
//! [`DistanceMatrix`] consumed by clustering and neighbor search.

mod distance;
mod stats;
mod weights;

pub use distance::{complete_distance, distance_matrix, object_distance, DistanceMatrix};
pub use stats::{estimate_statistics, psi_reflect, CoOccurrenceStats, Conditional};
pub use weights::{compute_weights, value_pair_dissimilarity, PairTable, WeightMatrix};

use std::fmt::Write;

use crate::data::{format_number, AttributeCatalog, AttributeKind, CellValue, Dataset, ValueCatalog};
use crate::error::Result;

/// Fitted dissimilarity: statistics, weights and pair tables. Immutable
/// after [`DissimilarityModel::fit`].
#[derive(Debug, Clone)]
pub struct DissimilarityModel {
    kinds: Vec<AttributeKind>,
    stats: CoOccurrenceStats,
    weights: WeightMatrix,
    tables: Vec<Option<PairTable>>,
    fallbacks: usize,
}

impl DissimilarityModel {
    /// Fits on the observed cells of `dataset`.
    pub fn fit(dataset: &Dataset) -> Result<Self> {
        let catalog = ValueCatalog::build(dataset)?;
        Ok(Self::fit_with_catalog(dataset, &catalog))
    }

    pub fn fit_with_catalog(dataset: &Dataset, catalog: &ValueCatalog) -> Self {
        let stats = estimate_statistics(dataset, catalog);
        let (weights, fallbacks) = weights::weights_with_fallbacks(&stats);
        if fallbacks > 0 {
            log::warn!("{fallbacks} value pairs had no co-observed rows; their reflected dissimilarity defaults to 1");
        }
        let tables = value_pair_dissimilarity(&stats, &weights);
        let kinds = dataset.schema().columns().iter().map(|c| c.kind.clone()).collect();
        DissimilarityModel { kinds, stats, weights, tables, fallbacks }
    }

    pub fn d(&self) -> usize {
        self.kinds.len()
    }

    pub fn catalog(&self) -> &ValueCatalog {
        self.stats.catalog()
    }

    pub fn stats(&self) -> &CoOccurrenceStats {
        &self.stats
    }

    pub fn weights(&self) -> &WeightMatrix {
        &self.weights
    }

    pub fn pair_table(&self, r: usize) -> Option<&PairTable> {
        self.tables[r].as_ref()
    }

    /// Count of zero-support fallbacks taken while computing the weights.
    pub fn fallbacks(&self) -> usize {
        self.fallbacks
    }

    /// Dissimilarity in `[0, 1]` of two non-missing cells of attribute `r`.
    ///
    /// Values absent from the catalog (never observed at fit time) fall back
    /// to the 0/1 indicator (nominal) or the normalized rank gap (ordinal).
    pub fn attribute_dissimilarity(&self, r: usize, a: CellValue, b: CellValue) -> f64 {
        let attr = self.catalog().attr(r);
        match (attr, a, b) {
            (AttributeCatalog::Numerical { range, .. }, CellValue::Numeric(x), CellValue::Numeric(y)) => {
                let w = range.width();
                if w > 0.0 {
                    ((x - y).abs() / w).min(1.0)
                } else {
                    0.0
                }
            }
            _ => match (attr.index_of(a), attr.index_of(b), &self.tables[r]) {
                (Some(m), Some(h), Some(table)) => table.get(m, h),
                _ => match (&self.kinds[r], a.as_code(), b.as_code()) {
                    (AttributeKind::Ordinal(levels), Some(p), Some(q)) if levels.len() > 1 => {
                        p.abs_diff(q) as f64 / (levels.len() - 1) as f64
                    }
                    _ => (a != b) as u8 as f64,
                },
            },
        }
    }

    /// CSV of the weight matrix, one row per target attribute.
    pub fn weights_csv(&self, names: &[String]) -> String {
        let mut out = String::from("attribute");
        for name in names {
            let _ = write!(out, ",{name}");
        }
        out.push('\n');
        for (r, name) in names.iter().enumerate() {
            out.push_str(name);
            for s in 0..self.d() {
                let _ = write!(out, ",{}", format_number(self.weights.get(r, s), Some(6)));
            }
            out.push('\n');
        }
        out
    }

    /// CSV of the pair table of categorical attribute `r`, labeled by value.
    pub fn pair_table_csv(&self, r: usize, dataset: &Dataset) -> Option<String> {
        let table = self.tables[r].as_ref()?;
        let attr = self.catalog().attr(r);
        let labels: Vec<String> = (0..table.levels())
            .map(|m| attr.value_at(m).and_then(|v| dataset.label_of(r, v)).unwrap_or_else(|| m.to_string()))
            .collect();
        let mut out = String::from("value");
        for l in &labels {
            let _ = write!(out, ",{l}");
        }
        out.push('\n');
        for (label, row) in labels.iter().zip(table.rows()) {
            out.push_str(label);
            for v in row {
                let _ = write!(out, ",{}", format_number(*v, Some(6)));
            }
            out.push('\n');
        }
        Some(out)
    }
}
