use super::dataset::{CellValue, Dataset, NumericRange};
use super::schema::AttributeKind;
use crate::error::{Error, Result};

/// Upper bound on equal-frequency bins for a numerical attribute.
pub const MAX_NUMERIC_BINS: usize = 5;

/// Distinct observed values of one attribute.
///
/// Numerical attributes are additionally discretized into at most
/// [`MAX_NUMERIC_BINS`] equal-frequency bins; the bins stand in for the
/// attribute's values whenever its value pairs are enumerated.
#[derive(Debug, Clone, PartialEq)]
pub enum AttributeCatalog {
    /// Category ids in order of first appearance. `index[id]` is the
    /// position of `id` in `values`.
    Nominal { values: Vec<u32>, index: Vec<Option<usize>> },
    /// Observed ranks in ascending order.
    Ordinal { ranks: Vec<u32>, index: Vec<Option<usize>> },
    Numerical {
        distinct: Vec<f64>,
        range: NumericRange,
        /// Interior bin boundaries; bin `b` holds `edges[b-1] <= x < edges[b]`.
        edges: Vec<f64>,
        /// Mean normalized value of each bin.
        bin_means: Vec<f64>,
    },
}

impl AttributeCatalog {
    /// Number of catalog entries (bins for numerical attributes).
    pub fn levels(&self) -> usize {
        match self {
            AttributeCatalog::Nominal { values, .. } => values.len(),
            AttributeCatalog::Ordinal { ranks, .. } => ranks.len(),
            AttributeCatalog::Numerical { bin_means, .. } => bin_means.len(),
        }
    }

    /// Catalog entry of a cell, `None` for missing or unseen values.
    pub fn index_of(&self, cell: CellValue) -> Option<usize> {
        match (self, cell) {
            (AttributeCatalog::Nominal { index, .. }, CellValue::Nominal(c))
            | (AttributeCatalog::Ordinal { index, .. }, CellValue::Ordinal(c)) => {
                index.get(c as usize).copied().flatten()
            }
            (AttributeCatalog::Numerical { edges, .. }, CellValue::Numeric(x)) => {
                Some(edges.partition_point(|&e| e <= x))
            }
            _ => None,
        }
    }

    /// Whether entries lie on a line (ordinal ranks, numeric bins), so that
    /// the path between entries `q < c` visits `c - q + 1` of them.
    pub fn is_ordered(&self) -> bool {
        !matches!(self, AttributeCatalog::Nominal { .. })
    }

    /// Range of a numerical attribute.
    pub fn range(&self) -> Option<NumericRange> {
        match self {
            AttributeCatalog::Numerical { range, .. } => Some(*range),
            _ => None,
        }
    }

    /// The cell value represented by catalog entry `idx` (categorical only).
    pub fn value_at(&self, idx: usize) -> Option<CellValue> {
        match self {
            AttributeCatalog::Nominal { values, .. } => values.get(idx).map(|&c| CellValue::Nominal(c)),
            AttributeCatalog::Ordinal { ranks, .. } => ranks.get(idx).map(|&k| CellValue::Ordinal(k)),
            AttributeCatalog::Numerical { .. } => None,
        }
    }
}

/// Per-attribute catalogs of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueCatalog {
    attrs: Vec<AttributeCatalog>,
}

impl ValueCatalog {
    /// Catalogs every column; fails on a column with no observed cell.
    pub fn build(dataset: &Dataset) -> Result<Self> {
        let attrs = (0..dataset.d()).map(|r| catalog_column(dataset, r)).collect::<Result<Vec<_>>>()?;
        Ok(ValueCatalog { attrs })
    }

    pub fn attr(&self, r: usize) -> &AttributeCatalog {
        &self.attrs[r]
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &AttributeCatalog> {
        self.attrs.iter()
    }
}

fn catalog_column(dataset: &Dataset, r: usize) -> Result<AttributeCatalog> {
    let name = || dataset.schema().column(r).name.clone();
    match dataset.schema().kind(r) {
        AttributeKind::Nominal => {
            let mut index = vec![None; dataset.nominal_labels(r).len()];
            let mut values = Vec::new();
            for c in dataset.column(r).filter_map(|c| c.as_code()) {
                if index[c as usize].is_none() {
                    index[c as usize] = Some(values.len());
                    values.push(c);
                }
            }
            if values.is_empty() {
                return Err(Error::EmptyColumn(name()));
            }
            Ok(AttributeCatalog::Nominal { values, index })
        }
        AttributeKind::Ordinal(levels) => {
            let mut seen = vec![false; levels.len()];
            for k in dataset.column(r).filter_map(|c| c.as_code()) {
                seen[k as usize] = true;
            }
            let ranks: Vec<u32> = (0..levels.len() as u32).filter(|&k| seen[k as usize]).collect();
            if ranks.is_empty() {
                return Err(Error::EmptyColumn(name()));
            }
            let mut index = vec![None; levels.len()];
            for (pos, &k) in ranks.iter().enumerate() {
                index[k as usize] = Some(pos);
            }
            Ok(AttributeCatalog::Ordinal { ranks, index })
        }
        AttributeKind::Numerical => {
            let mut sorted: Vec<f64> = dataset.column(r).filter_map(|c| c.as_numeric()).collect();
            if sorted.is_empty() {
                return Err(Error::EmptyColumn(name()));
            }
            sorted.sort_by(f64::total_cmp);
            let mut distinct = sorted.clone();
            distinct.dedup();
            let range = NumericRange { min: sorted[0], max: sorted[sorted.len() - 1] };
            let bins = distinct.len().min(MAX_NUMERIC_BINS);
            let edges = equal_frequency_edges(&sorted, bins);
            let mut sums = vec![0.0; edges.len() + 1];
            let mut counts = vec![0usize; edges.len() + 1];
            for &x in &sorted {
                let b = edges.partition_point(|&e| e <= x);
                sums[b] += range.normalize(x);
                counts[b] += 1;
            }
            let bin_means = sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
            Ok(AttributeCatalog::Numerical { distinct, range, edges, bin_means })
        }
    }
}

/// Interior edges splitting `sorted` into `bins` equal-frequency bins.
///
/// Edges are observed values, strictly increasing and above the minimum, so
/// every bin is non-empty; heavy ties can merge bins.
pub fn equal_frequency_edges(sorted: &[f64], bins: usize) -> Vec<f64> {
    let m = sorted.len();
    let mut edges: Vec<f64> = Vec::new();
    if m == 0 {
        return edges;
    }
    for b in 1..bins {
        let e = sorted[b * m / bins];
        if e > sorted[0] && edges.last().is_none_or(|&last| e > last) {
            edges.push(e);
        }
    }
    edges
}

/// Catalogs every column of `dataset`.
pub fn catalog_values(dataset: &Dataset) -> Result<ValueCatalog> {
    ValueCatalog::build(dataset)
}
