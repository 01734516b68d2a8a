use crate::data::{AttributeCatalog, CellValue, Dataset, ValueCatalog};
use crate::error::{Error, Result};

/// How attribute `s` is distributed given each catalog entry of attribute `r`.
#[derive(Debug, Clone, PartialEq)]
pub enum Conditional {
    /// `probs[o][t] = P(A^s = t | A^r = o)` over the catalog entries of a
    /// categorical `s`. Rows with zero support are all zeros.
    Distribution { probs: Vec<Vec<f64>>, support: Vec<usize> },
    /// Mean normalized value of a numerical `s` given each entry of `r`.
    Mean { means: Vec<f64>, support: Vec<usize> },
}

impl Conditional {
    pub fn support(&self) -> &[usize] {
        match self {
            Conditional::Distribution { support, .. } | Conditional::Mean { support, .. } => support,
        }
    }
}

/// Pairwise conditional statistics estimated from observed cells.
#[derive(Debug, Clone)]
pub struct CoOccurrenceStats {
    catalog: ValueCatalog,
    /// Indexed `r * d + s`; `None` on the diagonal.
    conditionals: Vec<Option<Conditional>>,
}

impl CoOccurrenceStats {
    pub fn d(&self) -> usize {
        self.catalog.len()
    }

    pub fn catalog(&self) -> &ValueCatalog {
        &self.catalog
    }

    /// Conditional of `s` given `r`; `None` when `r == s`.
    pub fn conditional(&self, r: usize, s: usize) -> Option<&Conditional> {
        self.conditionals[r * self.d() + s].as_ref()
    }

    /// Whether entry `o` of `r` never co-occurs with an observed `s`.
    pub fn zero_support(&self, r: usize, s: usize, o: usize) -> bool {
        self.conditional(r, s).is_some_and(|c| c.support()[o] == 0)
    }
}

/// Estimates the conditionals of every ordered attribute pair, each from the
/// rows where both cells are observed.
pub fn estimate_statistics(dataset: &Dataset, catalog: &ValueCatalog) -> CoOccurrenceStats {
    let d = dataset.d();
    let mut conditionals = Vec::with_capacity(d * d);
    for r in 0..d {
        for s in 0..d {
            conditionals.push((r != s).then(|| estimate_pair(dataset, catalog, r, s)));
        }
    }
    CoOccurrenceStats { catalog: catalog.clone(), conditionals }
}

fn estimate_pair(dataset: &Dataset, catalog: &ValueCatalog, r: usize, s: usize) -> Conditional {
    let src = catalog.attr(r);
    let dst = catalog.attr(s);
    let k_r = src.levels();
    let mut support = vec![0usize; k_r];
    match dst {
        AttributeCatalog::Numerical { range, .. } => {
            let mut sums = vec![0.0; k_r];
            for row in dataset.rows() {
                if let (Some(o), CellValue::Numeric(x)) = (src.index_of(row[r]), row[s]) {
                    sums[o] += range.normalize(x);
                    support[o] += 1;
                }
            }
            let means = sums.iter().zip(&support).map(|(&sum, &c)| if c > 0 { sum / c as f64 } else { 0.0 }).collect();
            Conditional::Mean { means, support }
        }
        _ => {
            let k_s = dst.levels();
            let mut counts = vec![vec![0usize; k_s]; k_r];
            for row in dataset.rows() {
                if let (Some(o), Some(t)) = (src.index_of(row[r]), dst.index_of(row[s])) {
                    counts[o][t] += 1;
                    support[o] += 1;
                }
            }
            let probs = counts
                .iter()
                .zip(&support)
                .map(|(row, &c)| row.iter().map(|&x| if c > 0 { x as f64 / c as f64 } else { 0.0 }).collect())
                .collect();
            Conditional::Distribution { probs, support }
        }
    }
}

/// Reflected dissimilarity together with whether the zero-support fallback fired.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Reflected {
    pub value: f64,
    pub fallback: bool,
}

/// Dissimilarity of entries `m` and `h` of attribute `r` as seen through
/// attribute `s`, in `[0, 1]`.
///
/// Through a nominal `s` this is the total variation distance between the
/// two conditionals, through an ordinal `s` the L1 distance of the
/// conditional CDFs over `K^s - 1`, through a numerical `s` the gap between
/// conditional means. For `s == r` the attribute's own value distance is
/// used. A side with no co-observed rows yields 1.
pub fn psi_reflect(stats: &CoOccurrenceStats, r: usize, s: usize, m: usize, h: usize) -> Result<f64> {
    let d = stats.d();
    for a in [r, s] {
        if a >= d {
            return Err(Error::OutOfRange { index: a, len: d });
        }
    }
    let k = stats.catalog().attr(r).levels();
    for o in [m, h] {
        if o >= k {
            return Err(Error::OutOfRange { index: o, len: k });
        }
    }
    let out = reflect(stats, r, s, m, h);
    if out.fallback {
        log::warn!("no co-observed rows for attribute {r} reflected through {s}; using dissimilarity 1");
    }
    Ok(out.value)
}

pub(crate) fn reflect(stats: &CoOccurrenceStats, r: usize, s: usize, m: usize, h: usize) -> Reflected {
    let ok = |value: f64| Reflected { value, fallback: false };
    if m == h {
        return ok(0.0);
    }
    let Some(cond) = stats.conditional(r, s) else {
        return ok(intrinsic(stats.catalog().attr(r), m, h));
    };
    let support = cond.support();
    if support[m] == 0 || support[h] == 0 {
        return Reflected { value: 1.0, fallback: true };
    }
    let value = match cond {
        Conditional::Mean { means, .. } => (means[m] - means[h]).abs(),
        Conditional::Distribution { probs, .. } => {
            let (pm, ph) = (&probs[m], &probs[h]);
            if stats.catalog().attr(s).is_ordered() {
                let k_s = pm.len();
                if k_s < 2 {
                    0.0
                } else {
                    let (mut cm, mut ch, mut acc) = (0.0, 0.0, 0.0);
                    for t in 0..k_s - 1 {
                        cm += pm[t];
                        ch += ph[t];
                        acc += (cm - ch).abs();
                    }
                    acc / (k_s - 1) as f64
                }
            } else {
                0.5 * pm.iter().zip(ph).map(|(a, b)| (a - b).abs()).sum::<f64>()
            }
        }
    };
    ok(value.clamp(0.0, 1.0))
}

/// Distance of two entries of an attribute on its own terms.
fn intrinsic(attr: &AttributeCatalog, m: usize, h: usize) -> f64 {
    if m == h {
        return 0.0;
    }
    match attr {
        AttributeCatalog::Nominal { .. } => 1.0,
        AttributeCatalog::Ordinal { ranks, .. } => m.abs_diff(h) as f64 / (ranks.len() - 1) as f64,
        AttributeCatalog::Numerical { bin_means, .. } => (bin_means[m] - bin_means[h]).abs(),
    }
}
