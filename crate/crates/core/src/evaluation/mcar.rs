use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{CellValue, Dataset};
use crate::error::{Error, Result};

const MAX_ATTEMPTS: usize = 64;

/// Cells removed by [`inject_missing`], sorted by (row, column).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingMask {
    pub cells: Vec<(usize, usize)>,
    pub rate: f64,
    pub seed: u64,
}

impl MissingMask {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// One `row,column` line per masked cell.
    pub fn to_csv(&self) -> String {
        self.cells.iter().map(|(i, r)| format!("{i},{r}\n")).collect()
    }
}

/// Removes `round(rate * n * d)` cells uniformly at random, never emptying
/// a row or a column.
pub fn inject_missing(dataset: &Dataset, rate: f64, seed: u64) -> Result<(Dataset, MissingMask)> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::invalid(format!("missing rate {rate} outside (0, 1)")));
    }
    if dataset.missing_count() > 0 {
        return Err(Error::invalid("missingness can only be injected into a complete dataset"));
    }
    let (n, d) = (dataset.n(), dataset.d());
    let target = (rate * (n * d) as f64).round() as usize;
    // keeping every row and column requires at least max(n, d) cells
    let capacity = n * d - n.max(d);
    if target > capacity {
        return Err(Error::Infeasible(format!(
            "{target} of {} cells cannot be removed while keeping every row and column observed",
            n * d
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n * d).collect();
    for _ in 0..MAX_ATTEMPTS {
        order.shuffle(&mut rng);
        let mut row_left = vec![d; n];
        let mut col_left = vec![n; d];
        let mut chosen = Vec::with_capacity(target);
        for &cell in &order {
            if chosen.len() == target {
                break;
            }
            let (i, r) = (cell / d, cell % d);
            if row_left[i] > 1 && col_left[r] > 1 {
                row_left[i] -= 1;
                col_left[r] -= 1;
                chosen.push((i, r));
            }
        }
        if chosen.len() == target {
            chosen.sort_unstable();
            let mut out = dataset.clone();
            for &(i, r) in &chosen {
                out.set(i, r, CellValue::Missing)?;
            }
            return Ok((out, MissingMask { cells: chosen, rate, seed }));
        }
    }
    Err(Error::Infeasible(format!("could not place {target} missing cells after {MAX_ATTEMPTS} attempts")))
}
