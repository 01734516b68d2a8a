//! k-medoids over a precomputed distance matrix, and the silhouette index.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;

pub const DEFAULT_MAX_ITER: usize = 100;

/// Medoids and the assignment of every object to its nearest medoid.
///
/// Medoids are kept in ascending object order, so cluster `c` is the one
/// represented by `medoids()[c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    medoids: Vec<usize>,
    assignment: Vec<usize>,
    cost: f64,
    iterations: usize,
    cost_trace: Vec<f64>,
}

impl ClusterModel {
    pub fn medoids(&self) -> &[usize] {
        &self.medoids
    }

    pub fn k(&self) -> usize {
        self.medoids.len()
    }

    /// Cluster index of every object.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn cluster_of(&self, i: usize) -> usize {
        self.assignment[i]
    }

    /// Sum of object-to-medoid distances.
    pub fn cost(&self) -> f64 {
        self.cost
    }

    /// Swap iterations applied.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Cost before the first swap and after each applied swap.
    pub fn cost_trace(&self) -> &[f64] {
        &self.cost_trace
    }

    /// Objects of cluster `c`, ascending.
    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] == c).collect()
    }

    /// Moves object `i` to its nearest medoid under the current matrix and
    /// returns the cluster index.
    pub fn reassign(&mut self, matrix: &DistanceMatrix, i: usize) -> Result<usize> {
        if i >= self.assignment.len() || matrix.n() != self.assignment.len() {
            return Err(Error::OutOfRange { index: i, len: self.assignment.len() });
        }
        let c = match self.medoids.iter().position(|&m| m == i) {
            Some(own) => own,
            None => {
                let dists: Vec<f64> = self.medoids.iter().map(|&m| matrix.get(i, m)).collect();
                assign_object(&dists)
            }
        };
        self.assignment[i] = c;
        self.cost = assignment_cost(matrix, &self.medoids, &self.assignment);
        Ok(c)
    }
}

/// Index of the smallest distance; ties go to the lower index.
pub fn assign_object(medoid_distances: &[f64]) -> usize {
    let mut best = 0;
    for (c, &v) in medoid_distances.iter().enumerate().skip(1) {
        if v < medoid_distances[best] {
            best = c;
        }
    }
    best
}

/// PAM with random seeded initialization.
///
/// Each iteration evaluates every (medoid, non-medoid) swap and applies the
/// one with the lowest resulting cost if it improves on the current cost.
pub fn cluster(matrix: &DistanceMatrix, k: usize, seed: u64, max_iter: usize) -> Result<ClusterModel> {
    let n = matrix.n();
    check_k(n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let medoids = rand::seq::index::sample(&mut rng, n, k).into_vec();
    cluster_from(matrix, medoids, max_iter)
}

/// PAM swap loop starting from the given medoids.
pub fn cluster_from(matrix: &DistanceMatrix, mut medoids: Vec<usize>, max_iter: usize) -> Result<ClusterModel> {
    let n = matrix.n();
    check_k(n, medoids.len())?;
    medoids.sort_unstable();
    if medoids.windows(2).any(|w| w[0] == w[1]) || medoids.iter().any(|&m| m >= n) {
        return Err(Error::invalid("medoids must be distinct object indices"));
    }
    let k = medoids.len();
    let mut is_medoid = vec![false; n];
    for &m in &medoids {
        is_medoid[m] = true;
    }
    let mut assignment = assign_all(matrix, &medoids);
    let mut cost = assignment_cost(matrix, &medoids, &assignment);
    let mut trace = vec![cost];
    let mut iterations = 0;
    let mut nearest = vec![0.0; n];
    let mut second = vec![0.0; n];

    while iterations < max_iter {
        for o in 0..n {
            let (mut d1, mut d2) = (f64::INFINITY, f64::INFINITY);
            for (c, &m) in medoids.iter().enumerate() {
                let v = matrix.get(o, m);
                if c == assignment[o] {
                    d1 = v;
                } else if v < d2 {
                    d2 = v;
                }
            }
            nearest[o] = d1;
            second[o] = d2;
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for slot in 0..k {
            for x in (0..n).filter(|&x| !is_medoid[x]) {
                let row = matrix.row(x);
                let mut total = 0.0;
                for o in 0..n {
                    let keep = if assignment[o] == slot { second[o] } else { nearest[o] };
                    total += keep.min(row[o]);
                }
                if best.is_none_or(|(b, _, _)| total < b) {
                    best = Some((total, slot, x));
                }
            }
        }
        let Some((new_cost, slot, x)) = best else { break };
        if new_cost >= cost - 1e-12 * cost.abs().max(1.0) {
            break;
        }
        is_medoid[medoids[slot]] = false;
        is_medoid[x] = true;
        medoids[slot] = x;
        medoids.sort_unstable();
        assignment = assign_all(matrix, &medoids);
        cost = assignment_cost(matrix, &medoids, &assignment);
        trace.push(cost);
        iterations += 1;
    }
    Ok(ClusterModel { medoids, assignment, cost, iterations, cost_trace: trace })
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 2 || k > n {
        return Err(Error::invalid(format!("cluster count {k} outside 2..={n}")));
    }
    Ok(())
}

fn assign_all(matrix: &DistanceMatrix, medoids: &[usize]) -> Vec<usize> {
    (0..matrix.n())
        .map(|i| match medoids.iter().position(|&m| m == i) {
            Some(own) => own,
            None => {
                let dists: Vec<f64> = medoids.iter().map(|&m| matrix.get(i, m)).collect();
                assign_object(&dists)
            }
        })
        .collect()
}

fn assignment_cost(matrix: &DistanceMatrix, medoids: &[usize], assignment: &[usize]) -> f64 {
    assignment.iter().enumerate().map(|(i, &c)| matrix.get(i, medoids[c])).sum()
}

/// Mean silhouette width of a labeling, in `[-1, 1]`.
///
/// Objects in singleton clusters contribute 0, as does any object whose
/// intra- and nearest-cluster mean distances are both 0.
pub fn silhouette(matrix: &DistanceMatrix, labels: &[usize]) -> Result<f64> {
    let n = matrix.n();
    if labels.len() != n {
        return Err(Error::invalid(format!("{} labels for {n} objects", labels.len())));
    }
    let mut ids: Vec<usize> = labels.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() < 2 {
        return Err(Error::invalid("silhouette needs at least two non-empty clusters"));
    }
    let compact: Vec<usize> = labels.iter().map(|l| ids.binary_search(l).unwrap()).collect();
    let k = ids.len();
    let mut sizes = vec![0usize; k];
    for &c in &compact {
        sizes[c] += 1;
    }
    let mut total = 0.0;
    let mut sums = vec![0.0; k];
    for i in 0..n {
        let own = compact[i];
        if sizes[own] == 1 {
            continue;
        }
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            if j != i {
                sums[compact[j]] += matrix.get(i, j);
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k).filter(|&c| c != own).map(|c| sums[c] / sizes[c] as f64).fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}
