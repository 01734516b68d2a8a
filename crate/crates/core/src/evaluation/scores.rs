use super::mcar::MissingMask;
use crate::data::{AttributeKind, CellValue, Dataset};
use crate::error::{Error, Result};

/// Mixed root mean square error over the masked cells.
///
/// Per-cell error is `|x' - x| / (max - min)` for numerical attributes
/// (range taken from the truth column, 0 for a constant column), a 0/1
/// mismatch for nominal attributes and `|rank' - rank| / (K - 1)` for
/// ordinal ones. The result is the root of the mean squared error.
pub fn mrmse(truth: &Dataset, imputed: &Dataset, mask: &MissingMask) -> Result<f64> {
    if mask.is_empty() {
        return Err(Error::invalid("mRMSE needs at least one masked cell"));
    }
    if truth.schema() != imputed.schema() || truth.n() != imputed.n() {
        return Err(Error::invalid("truth and imputed datasets differ in shape"));
    }
    let mut sum = 0.0;
    for &(i, r) in &mask.cells {
        let (t, v) = (truth.get(i, r), imputed.get(i, r));
        if t.is_missing() || v.is_missing() {
            return Err(Error::invalid(format!("cell ({i}, {r}) is missing in an input")));
        }
        let e = match (truth.schema().kind(r), t, v) {
            (AttributeKind::Numerical, CellValue::Numeric(x), CellValue::Numeric(y)) => {
                let w = truth.numeric_range(r).map_or(0.0, |range| range.width());
                if w > 0.0 {
                    (y - x).abs() / w
                } else {
                    0.0
                }
            }
            (AttributeKind::Ordinal(levels), CellValue::Ordinal(a), CellValue::Ordinal(b)) => {
                if levels.len() > 1 {
                    a.abs_diff(b) as f64 / (levels.len() - 1) as f64
                } else {
                    0.0
                }
            }
            (AttributeKind::Nominal, a, b) => (truth.label_of(r, a) != imputed.label_of(r, b)) as u8 as f64,
            _ => return Err(Error::invalid(format!("cell ({i}, {r}) does not match its column kind"))),
        };
        sum += e * e;
    }
    Ok((sum / mask.len() as f64).sqrt())
}

fn choose2(x: usize) -> f64 {
    (x * x.saturating_sub(1)) as f64 / 2.0
}

/// Adjusted Rand index of two partitions given as label vectors.
///
/// When the expected index equals its maximum (both partitions trivial in
/// the same way) the value is 1.
pub fn ari(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!("label vectors differ in length: {} vs {}", a.len(), b.len())));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::invalid("ARI needs at least two objects"));
    }
    let compact = |labels: &[usize]| -> (Vec<usize>, usize) {
        let mut ids = labels.to_vec();
        ids.sort_unstable();
        ids.dedup();
        (labels.iter().map(|l| ids.binary_search(l).unwrap()).collect(), ids.len())
    };
    let (ca, ka) = compact(a);
    let (cb, kb) = compact(b);
    let mut table = vec![0usize; ka * kb];
    for (&x, &y) in ca.iter().zip(&cb) {
        table[x * kb + y] += 1;
    }
    let index: f64 = table.iter().map(|&c| choose2(c)).sum();
    let rows: f64 = (0..ka).map(|x| choose2(table[x * kb..(x + 1) * kb].iter().sum())).sum();
    let cols: f64 = (0..kb).map(|y| choose2((0..ka).map(|x| table[x * kb + y]).sum())).sum();
    let expected = rows * cols / choose2(n);
    let max = 0.5 * (rows + cols);
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}
