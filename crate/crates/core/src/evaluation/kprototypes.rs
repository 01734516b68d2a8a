use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{normalize_numeric, Dataset};
use crate::error::{Error, Result};

const MAX_ITER: usize = 100;

/// Outcome of a k-prototypes run.
#[derive(Debug, Clone, PartialEq)]
pub struct KPrototypes {
    pub labels: Vec<usize>,
    pub gamma: f64,
    pub iterations: usize,
    /// Total cost after each prototype update.
    pub cost_trace: Vec<f64>,
}

/// Half the mean standard deviation of the normalized numerical columns
/// (1 when there are none or all are constant).
pub fn default_gamma(dataset: &Dataset) -> f64 {
    let (norm, _) = normalize_numeric(dataset);
    let stds: Vec<f64> = (0..norm.d())
        .filter(|&r| norm.schema().kind(r).is_numerical())
        .map(|r| {
            let xs: Vec<f64> = norm.column(r).filter_map(|c| c.as_numeric()).collect();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
        })
        .collect();
    let gamma = if stds.is_empty() { 0.0 } else { 0.5 * stds.iter().sum::<f64>() / stds.len() as f64 };
    if gamma > 0.0 {
        gamma
    } else {
        1.0
    }
}

struct Features {
    numeric: Vec<Vec<f64>>,
    categorical: Vec<Vec<u32>>,
    levels: Vec<usize>,
}

/// Lloyd-style k-prototypes on a complete dataset.
///
/// Cost is the squared Euclidean distance over normalized numerical
/// attributes plus `gamma` times the number of categorical mismatches
/// (ordinal attributes count as categorical). Empty clusters take the
/// object farthest from its own prototype.
pub fn kprototypes(dataset: &Dataset, k: usize, seed: u64, gamma: Option<f64>) -> Result<KPrototypes> {
    let n = dataset.n();
    if k < 2 || k > n {
        return Err(Error::invalid(format!("cluster count {k} outside 2..={n}")));
    }
    if dataset.missing_count() > 0 {
        return Err(Error::invalid("k-prototypes needs a complete dataset"));
    }
    let gamma = gamma.unwrap_or_else(|| default_gamma(dataset));
    let f = features(dataset);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = rand::seq::index::sample(&mut rng, n, k).into_vec();
    let mut num_protos: Vec<Vec<f64>> = init.iter().map(|&i| f.numeric[i].clone()).collect();
    let mut cat_protos: Vec<Vec<u32>> = init.iter().map(|&i| f.categorical[i].clone()).collect();

    let cost_of = |i: usize, np: &[f64], cp: &[u32]| -> f64 {
        let num: f64 = f.numeric[i].iter().zip(np).map(|(a, b)| (a - b).powi(2)).sum();
        let mis = f.categorical[i].iter().zip(cp).filter(|(a, b)| a != b).count();
        num + gamma * mis as f64
    };

    let mut labels: Vec<usize> = vec![usize::MAX; n];
    let mut trace = Vec::new();
    let mut iterations = 0;
    while iterations < MAX_ITER {
        let mut next: Vec<usize> = (0..n)
            .map(|i| {
                let mut best = 0;
                let mut best_cost = f64::INFINITY;
                for c in 0..k {
                    let v = cost_of(i, &num_protos[c], &cat_protos[c]);
                    if v < best_cost {
                        best_cost = v;
                        best = c;
                    }
                }
                best
            })
            .collect();
        repair_empty(&mut next, k, |i, c| cost_of(i, &num_protos[c], &cat_protos[c]));
        if next == labels {
            break;
        }
        labels = next;
        iterations += 1;
        for c in 0..k {
            let members: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
            for (a, proto) in num_protos[c].iter_mut().enumerate() {
                *proto = members.iter().map(|&i| f.numeric[i][a]).sum::<f64>() / members.len() as f64;
            }
            for (a, proto) in cat_protos[c].iter_mut().enumerate() {
                let mut counts = vec![0usize; f.levels[a]];
                for &i in &members {
                    counts[f.categorical[i][a] as usize] += 1;
                }
                let mut best = 0;
                for (v, &cnt) in counts.iter().enumerate() {
                    if cnt > counts[best] {
                        best = v;
                    }
                }
                *proto = best as u32;
            }
        }
        trace.push((0..n).map(|i| cost_of(i, &num_protos[labels[i]], &cat_protos[labels[i]])).sum());
    }
    Ok(KPrototypes { labels, gamma, iterations, cost_trace: trace })
}

/// Gives every empty cluster the object farthest from its current
/// prototype, taken from a cluster that keeps at least one member.
fn repair_empty(labels: &mut [usize], k: usize, cost: impl Fn(usize, usize) -> f64) {
    let mut sizes = vec![0usize; k];
    for &c in labels.iter() {
        sizes[c] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut pick: Option<(f64, usize)> = None;
        for i in 0..labels.len() {
            if sizes[labels[i]] > 1 {
                let v = cost(i, labels[i]);
                if pick.is_none_or(|(best, _)| v > best) {
                    pick = Some((v, i));
                }
            }
        }
        if let Some((_, i)) = pick {
            sizes[labels[i]] -= 1;
            labels[i] = empty;
            sizes[empty] = 1;
        }
    }
}

fn features(dataset: &Dataset) -> Features {
    let (norm, _) = normalize_numeric(dataset);
    let num_cols: Vec<usize> = (0..norm.d()).filter(|&r| norm.schema().kind(r).is_numerical()).collect();
    let cat_cols: Vec<usize> = (0..norm.d()).filter(|&r| norm.schema().kind(r).is_categorical()).collect();
    let numeric =
        norm.rows().map(|row| num_cols.iter().map(|&r| row[r].as_numeric().unwrap_or(0.0)).collect()).collect();
    let categorical: Vec<Vec<u32>> =
        norm.rows().map(|row| cat_cols.iter().map(|&r| row[r].as_code().unwrap_or(0)).collect()).collect();
    let levels =
        (0..cat_cols.len()).map(|a| categorical.iter().map(|row| row[a] as usize + 1).max().unwrap_or(1)).collect();
    Features { numeric, categorical, levels }
}
