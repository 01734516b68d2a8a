use super::stats::{reflect, CoOccurrenceStats};

/// Interdependence weights `w[r][s]`: how well attribute `s` separates the
/// values of attribute `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    d: usize,
    w: Vec<f64>,
}

impl WeightMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let d = rows.len();
        assert!(rows.iter().all(|r| r.len() == d), "weight matrix must be square");
        WeightMatrix { d, w: rows.into_iter().flatten().collect() }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, r: usize, s: usize) -> f64 {
        self.w[r * self.d + s]
    }

    /// Symmetrized strength between two attributes.
    pub fn mutual(&self, r: usize, s: usize) -> f64 {
        0.5 * (self.get(r, s) + self.get(s, r))
    }
}

/// Averages the reflected dissimilarity over all unordered value pairs of
/// each target attribute, dividing each pair by its path correction.
///
/// Nominal pairs are adjacent (correction 1); ordinal and binned numerical
/// pairs `(q, c)` span `c - q + 1` catalog entries, correction `c - q`.
/// An attribute with a single observed value gets zero weights.
pub fn compute_weights(stats: &CoOccurrenceStats) -> WeightMatrix {
    let (w, _) = weights_with_fallbacks(stats);
    w
}

pub(crate) fn weights_with_fallbacks(stats: &CoOccurrenceStats) -> (WeightMatrix, usize) {
    let d = stats.d();
    let mut w = vec![0.0; d * d];
    let mut fallbacks = 0;
    for r in 0..d {
        let attr = stats.catalog().attr(r);
        let k = attr.levels();
        if k < 2 {
            continue;
        }
        let pairs = (k * (k - 1) / 2) as f64;
        for s in 0..d {
            let mut acc = 0.0;
            for q in 0..k - 1 {
                for c in q + 1..k {
                    let psi = reflect(stats, r, s, q, c);
                    fallbacks += psi.fallback as usize;
                    let correction = if attr.is_ordered() { (c - q) as f64 } else { 1.0 };
                    acc += psi.value / correction;
                }
            }
            w[r * d + s] = acc / pairs;
        }
    }
    (WeightMatrix { d, w }, fallbacks)
}

/// Symmetric `K x K` table of scaled value-pair dissimilarities.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTable {
    k: usize,
    values: Vec<f64>,
}

impl PairTable {
    pub fn levels(&self) -> usize {
        self.k
    }

    pub fn get(&self, m: usize, h: usize) -> f64 {
        self.values[m * self.k + h]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.k)
    }
}

/// Builds the pair table of every categorical attribute: the weighted sum of
/// reflected dissimilarities over all attributes (itself included), scaled
/// so the largest entry is 1. Numerical attributes get `None`.
pub fn value_pair_dissimilarity(stats: &CoOccurrenceStats, weights: &WeightMatrix) -> Vec<Option<PairTable>> {
    let d = stats.d();
    (0..d)
        .map(|r| {
            let attr = stats.catalog().attr(r);
            if attr.range().is_some() {
                return None;
            }
            let k = attr.levels();
            let mut values = vec![0.0; k * k];
            for m in 0..k {
                for h in m + 1..k {
                    let raw: f64 = (0..d).map(|s| reflect(stats, r, s, m, h).value * weights.get(r, s)).sum();
                    values[m * k + h] = raw;
                    values[h * k + m] = raw;
                }
            }
            let max = values.iter().copied().fold(0.0, f64::max);
            if max > 0.0 {
                values.iter_mut().for_each(|v| *v /= max);
            }
            Some(PairTable { k, values })
        })
        .collect()
}
