use rayon::prelude::*;

use super::DissimilarityModel;
use crate::data::{CellValue, Dataset};
use crate::error::{Error, Result};

/// Distance of two complete rows: the Euclidean combination of
/// per-attribute dissimilarities. `None` if either row has a missing cell.
pub fn complete_distance(a: &[CellValue], b: &[CellValue], model: &DissimilarityModel) -> Option<f64> {
    let mut sum = 0.0;
    for r in 0..a.len() {
        if a[r].is_missing() || b[r].is_missing() {
            return None;
        }
        let t = model.attribute_dissimilarity(r, a[r], b[r]);
        sum += t * t;
    }
    Some(sum.sqrt())
}

/// Missing-aware distance of two rows.
///
/// Attributes missing on either side contribute nothing and the remaining
/// sum is scaled by `d / (d - md)`, `md` being the count of such
/// attributes. With every attribute missing the result is `sqrt(d)`, the
/// largest distance unit-bounded terms can produce.
pub fn object_distance(a: &[CellValue], b: &[CellValue], model: &DissimilarityModel) -> f64 {
    let d = a.len();
    let mut sum = 0.0;
    let mut md = 0usize;
    for r in 0..d {
        if a[r].is_missing() || b[r].is_missing() {
            md += 1;
            continue;
        }
        let t = model.attribute_dissimilarity(r, a[r], b[r]);
        sum += t * t;
    }
    if md == d {
        return (d as f64).sqrt();
    }
    (sum * (d as f64 / (d - md) as f64)).sqrt()
}

/// Dense symmetric object distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Wraps a full row-major `n x n` buffer. Panics if it is not square.
    pub fn from_vec(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "distance buffer must be n*n");
        DistanceMatrix { n, data }
    }

    /// Builds a matrix from a symmetric distance function.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        DistanceMatrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Recomputes row and column `i` after that object's cells changed.
    pub fn update_row(&mut self, dataset: &Dataset, model: &DissimilarityModel, i: usize) -> Result<()> {
        let n = self.n;
        if i >= n || dataset.n() != n {
            return Err(Error::OutOfRange { index: i, len: n });
        }
        let xi = dataset.row(i);
        for j in 0..n {
            if j == i {
                continue;
            }
            let v = object_distance(xi, dataset.row(j), model);
            self.data[i * n + j] = v;
            self.data[j * n + i] = v;
        }
        Ok(())
    }
}

/// Distances between all objects; each unordered pair is evaluated once.
pub fn distance_matrix(dataset: &Dataset, model: &DissimilarityModel) -> DistanceMatrix {
    let n = dataset.n();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = dataset.row(i);
            (i + 1..n).map(|j| object_distance(xi, dataset.row(j), model)).collect()
        })
        .collect();
    let mut data = vec![0.0; n * n];
    for (i, row) in upper.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + 1 + off;
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    DistanceMatrix { n, data }
}
