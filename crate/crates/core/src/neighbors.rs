//! k-nearest-neighbor queries and parameter-free natural-neighbor search.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;

/// Result of a natural-neighbor search.
///
/// Sets are indexed by position in the searched member list and contain
/// matrix indices; for a search over the whole matrix the two coincide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaNState {
    /// Terminating round: the natural eigenvalue.
    pub lambda: usize,
    /// Mutual neighbors of each member, ascending.
    pub nan_sets: Vec<Vec<usize>>,
    /// Reverse-neighbor count of each member at termination.
    pub rnn_counts: Vec<usize>,
}

/// The `r` nearest objects to `i` (excluding `i`), closest first. Ties go to
/// the lower index.
pub fn knn(matrix: &DistanceMatrix, i: usize, r: usize) -> Result<Vec<usize>> {
    let members: Vec<usize> = (0..matrix.n()).collect();
    knn_among(matrix, &members, i, r)
}

/// [`knn`] restricted to `members`.
pub fn knn_among(matrix: &DistanceMatrix, members: &[usize], i: usize, r: usize) -> Result<Vec<usize>> {
    if i >= matrix.n() {
        return Err(Error::OutOfRange { index: i, len: matrix.n() });
    }
    let others = members.iter().filter(|&&j| j != i).count();
    if r == 0 || r > others {
        return Err(Error::invalid(format!("neighbor count {r} outside 1..={others}")));
    }
    let mut order = sorted_neighbors(matrix, members, i);
    order.truncate(r);
    Ok(order)
}

fn sorted_neighbors(matrix: &DistanceMatrix, members: &[usize], i: usize) -> Vec<usize> {
    let row = matrix.row(i);
    let mut order: Vec<usize> = members.iter().copied().filter(|&j| j != i).collect();
    order.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
    order
}

/// Natural-neighbor search over every object of the matrix.
pub fn natural_neighbor_search(matrix: &DistanceMatrix) -> Result<NaNState> {
    let members: Vec<usize> = (0..matrix.n()).collect();
    natural_neighbor_search_among(matrix, &members)
}

/// Natural-neighbor search restricted to `members`.
///
/// Round `r` extends every member's neighborhood by its `r`-th nearest
/// member; two members become natural neighbors once each is within the
/// other's `r` nearest. The search stops at the first round where every
/// member has a natural neighbor, or where the number of members nobody
/// has reached yet has stayed the same for two consecutive rounds.
pub fn natural_neighbor_search_among(matrix: &DistanceMatrix, members: &[usize]) -> Result<NaNState> {
    let m = members.len();
    if m < 2 {
        return Err(Error::invalid("natural-neighbor search needs at least two objects"));
    }
    if let Some(&bad) = members.iter().find(|&&j| j >= matrix.n()) {
        return Err(Error::OutOfRange { index: bad, len: matrix.n() });
    }
    // local positions throughout; mapped back to matrix indices at the end
    let pos_of = |g: usize| members.iter().position(|&x| x == g).expect("member");
    let order: Vec<Vec<usize>> =
        members.iter().map(|&g| sorted_neighbors(matrix, members, g).into_iter().map(pos_of).collect()).collect();
    let mut rank = vec![0usize; m * m];
    for (x, ord) in order.iter().enumerate() {
        for (k, &y) in ord.iter().enumerate() {
            rank[x * m + y] = k;
        }
    }

    let mut nan: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    let mut rnn = vec![0usize; m];
    let mut zero_history = vec![m];
    let mut lambda = 0;
    for r in 1..m {
        lambda = r;
        for x in 0..m {
            let y = order[x][r - 1];
            rnn[y] += 1;
            if rank[y * m + x] < r {
                nan[x].insert(y);
                nan[y].insert(x);
            }
        }
        if nan.iter().all(|s| !s.is_empty()) {
            break;
        }
        let zeros = rnn.iter().filter(|&&c| c == 0).count();
        zero_history.push(zeros);
        let h = zero_history.len();
        if h >= 3 && zero_history[h - 1] == zero_history[h - 2] && zero_history[h - 2] == zero_history[h - 3] {
            break;
        }
    }
    let nan_sets = nan.into_iter().map(|s| s.into_iter().map(|y| members[y]).collect()).collect();
    Ok(NaNState { lambda, nan_sets, rnn_counts: rnn })
}

/// Where a neighbor set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborOrigin {
    /// Mutual natural neighbors.
    Natural,
    /// The target had no natural neighbor; its `lambda` nearest members.
    Fallback,
    /// Fewer than two members: no neighbors, caller must widen the pool.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighbors {
    pub indices: Vec<usize>,
    pub origin: NeighborOrigin,
    pub lambda: usize,
}

/// Natural neighbors of `i` among `members`, falling back to the `lambda`
/// nearest members when the natural set is empty.
pub fn natural_neighbors_within(matrix: &DistanceMatrix, members: &[usize], i: usize) -> Result<Neighbors> {
    let Some(local) = members.iter().position(|&x| x == i) else {
        return Err(Error::invalid(format!("object {i} is not among the members")));
    };
    if members.len() < 2 {
        return Ok(Neighbors { indices: Vec::new(), origin: NeighborOrigin::Degenerate, lambda: 0 });
    }
    let state = natural_neighbor_search_among(matrix, members)?;
    let own = &state.nan_sets[local];
    if !own.is_empty() {
        return Ok(Neighbors { indices: own.clone(), origin: NeighborOrigin::Natural, lambda: state.lambda });
    }
    let count = state.lambda.min(members.len() - 1);
    let indices = knn_among(matrix, members, i, count)?;
    Ok(Neighbors { indices, origin: NeighborOrigin::Fallback, lambda: state.lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(points: &[f64]) -> DistanceMatrix {
        DistanceMatrix::from_fn(points.len(), |i, j| (points[i] - points[j]).abs())
    }

    /// Mutual r-NN sets computed directly from sorted distance lists.
    fn brute_mutual(matrix: &DistanceMatrix, r: usize) -> Vec<Vec<usize>> {
        let n = matrix.n();
        let nn: Vec<Vec<usize>> = (0..n).map(|i| knn(matrix, i, r).unwrap()).collect();
        (0..n).map(|i| (0..n).filter(|&j| nn[i].contains(&j) && nn[j].contains(&i)).collect()).collect()
    }

    #[test]
    fn knn_on_a_line() {
        let m = line(&[0.0, 1.0, 3.0, 10.0]);
        assert_eq!(knn(&m, 0, 2).unwrap(), vec![1, 2]);
        assert_eq!(knn(&m, 3, 3).unwrap(), vec![2, 1, 0]);
        assert!(knn(&m, 0, 0).is_err());
        assert!(knn(&m, 0, 4).is_err());
    }

    #[test]
    fn knn_ties_prefer_lower_index() {
        let m = line(&[1.0, 0.0, 2.0]);
        assert_eq!(knn(&m, 0, 1).unwrap(), vec![1]);
    }

    #[test]
    fn four_points_on_a_line() {
        let m = line(&[0.0, 1.0, 3.0, 10.0]);
        let st = natural_neighbor_search(&m).unwrap();
        assert_eq!(st.lambda, 3);
        assert_eq!(st.nan_sets, brute_mutual(&m, 3));
        // round 3 reaches n - 1: every pair is mutual
        assert_eq!(st.nan_sets[3], vec![0, 1, 2]);
        assert_eq!(brute_mutual(&m, 1)[0], vec![1]);
        assert!(brute_mutual(&m, 2)[3].is_empty());
    }

    #[test]
    fn two_identical_points() {
        let m = line(&[2.0, 2.0]);
        let st = natural_neighbor_search(&m).unwrap();
        assert_eq!(st.lambda, 1);
        assert_eq!(st.nan_sets, vec![vec![1], vec![0]]);
        assert!(natural_neighbor_search(&line(&[1.0])).is_err());
    }

    #[test]
    fn grid_points_all_have_neighbors() {
        let pts: Vec<(f64, f64)> = (0..9).map(|k| ((k % 3) as f64, (k / 3) as f64)).collect();
        let m =
            DistanceMatrix::from_fn(9, |i, j| ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt());
        let st = natural_neighbor_search(&m).unwrap();
        assert_eq!(st.nan_sets, brute_mutual(&m, st.lambda));
        assert!(st.nan_sets.iter().all(|s| !s.is_empty()));
    }

    #[test]
    fn within_pair_and_singleton() {
        let m = line(&[0.0, 1.0, 3.0, 10.0]);
        let nb = natural_neighbors_within(&m, &[1, 3], 3).unwrap();
        assert_eq!(nb.indices, vec![1]);
        assert_eq!(nb.origin, NeighborOrigin::Natural);
        let nb = natural_neighbors_within(&m, &[2], 2).unwrap();
        assert_eq!(nb.origin, NeighborOrigin::Degenerate);
        assert!(nb.indices.is_empty());
        assert!(natural_neighbors_within(&m, &[0, 1], 2).is_err());
    }

    #[test]
    fn outlier_takes_fallback() {
        // six tight points and one far outlier: the outlier is nobody's
        // neighbor until the last round, so the search stalls first
        let pts = [0.0, 0.1, 0.25, 0.45, 0.7, 1.0, 100.0];
        let m = line(&pts);
        let members: Vec<usize> = (0..7).collect();
        let st = natural_neighbor_search(&m).unwrap();
        assert!(st.lambda < 6);
        assert!(st.nan_sets[6].is_empty());
        assert_eq!(st.nan_sets, brute_mutual(&m, st.lambda));
        let nb = natural_neighbors_within(&m, &members, 6).unwrap();
        assert_eq!(nb.origin, NeighborOrigin::Fallback);
        assert_eq!(nb.indices.len(), st.lambda);
        assert_eq!(nb.indices, knn(&m, 6, st.lambda).unwrap());
    }

    fn arb_matrix() -> impl Strategy<Value = DistanceMatrix> {
        (2usize..14).prop_flat_map(|n| {
            prop::collection::vec(0.0f64..10.0, n * 2).prop_map(move |xy| {
                DistanceMatrix::from_fn(n, |i, j| {
                    ((xy[2 * i] - xy[2 * j]).powi(2) + (xy[2 * i + 1] - xy[2 * j + 1]).powi(2)).sqrt()
                })
            })
        })
    }

    proptest! {
        #[test]
        fn nan_sets_are_mutual_and_match_brute_force(m in arb_matrix()) {
            let st = natural_neighbor_search(&m).unwrap();
            prop_assert!(st.lambda >= 1 && st.lambda < m.n());
            for (i, set) in st.nan_sets.iter().enumerate() {
                for &j in set {
                    prop_assert!(st.nan_sets[j].contains(&i));
                }
            }
            prop_assert_eq!(&st.nan_sets, &brute_mutual(&m, st.lambda));
            prop_assert_eq!(&st, &natural_neighbor_search(&m).unwrap());
        }

        #[test]
        fn restriction_to_all_members_is_consistent(m in arb_matrix()) {
            let st = natural_neighbor_search(&m).unwrap();
            let all: Vec<usize> = (0..m.n()).collect();
            for i in 0..m.n() {
                let nb = natural_neighbors_within(&m, &all, i).unwrap();
                if nb.origin == NeighborOrigin::Natural {
                    prop_assert_eq!(&nb.indices, &st.nan_sets[i]);
                } else {
                    prop_assert!(st.nan_sets[i].is_empty());
                }
            }
        }
    }
}
