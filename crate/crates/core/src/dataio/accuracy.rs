use crate::error::{Error, Result};
use crate::types::Assignment;

/// Largest cluster count handled by exhaustive permutation search.
const EXHAUSTIVE_MAX_K: usize = 8;

/// Fraction of points whose cluster maps to their label under the best
/// cluster-to-label bijection.
pub fn accuracy(assignment: &Assignment, labels: &[u32]) -> Result<f64> {
    if labels.len() != assignment.len() {
        return Err(Error::Eval(format!(
            "{} labels for {} points",
            labels.len(),
            assignment.len()
        )));
    }
    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let k = assignment.k();
    if classes.len() != k {
        return Err(Error::Eval(format!(
            "{} distinct labels but {k} clusters",
            classes.len()
        )));
    }
    let mut confusion = vec![vec![0usize; k]; k];
    for (&c, l) in assignment.as_slice().iter().zip(labels) {
        let class = classes.binary_search(l).expect("label is in classes");
        confusion[c][class] += 1;
    }
    let (_, matched) = best_matching(&confusion);
    Ok(matched as f64 / labels.len() as f64)
}

/// Maximum-weight perfect matching on a square count matrix, returned as
/// `(row -> column map, total)`.
pub fn best_matching(m: &[Vec<usize>]) -> (Vec<usize>, usize) {
    if m.len() <= EXHAUSTIVE_MAX_K {
        exhaustive(m)
    } else {
        hungarian(m)
    }
}

fn exhaustive(m: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let k = m.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = (perm.clone(), score(m, &perm));
    // Heap's algorithm
    let mut c = vec![0usize; k];
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            let s = score(m, &perm);
            if s > best.1 {
                best = (perm.clone(), s);
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

fn score(m: &[Vec<usize>], perm: &[usize]) -> usize {
    perm.iter().enumerate().map(|(r, &c)| m[r][c]).sum()
}

/// Kuhn-Munkres with potentials on the cost matrix `max - m`.
fn hungarian(m: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let n = m.len();
    let top = m.iter().flatten().copied().max().unwrap_or(0) as i64;
    let cost = |i: usize, j: usize| top - m[i][j] as i64;
    let inf = i64::MAX / 4;
    // 1-based arrays; column 0 is a sentinel.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    let total = score(m, &assignment);
    (assignment, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn acc(a: &[usize], l: &[u32]) -> f64 {
        let k = a.iter().max().unwrap() + 1;
        accuracy(&Assignment::new(a.to_vec(), k.max(2)).unwrap(), l).unwrap()
    }

    #[test]
    fn permutation_invariant() {
        assert_eq!(acc(&[1, 1, 0, 0], &[1, 1, 2, 2]), 1.0);
        assert_eq!(acc(&[0, 0, 1, 1], &[1, 1, 2, 2]), 1.0);
    }

    #[test]
    fn single_cluster_scores_half() {
        let a = Assignment::new(vec![0, 0, 0, 0], 2).unwrap();
        assert_eq!(accuracy(&a, &[1, 1, 2, 2]).unwrap(), 0.5);
    }

    #[test]
    fn class_count_must_match() {
        let a = Assignment::new(vec![0, 1, 2], 3).unwrap();
        assert!(matches!(accuracy(&a, &[1, 1, 2]).unwrap_err(), Error::Eval(_)));
    }

    proptest! {
        #[test]
        fn hungarian_matches_exhaustive(
            k in 2usize..7,
            seed in proptest::collection::vec(0usize..50, 49)
        ) {
            let m: Vec<Vec<usize>> = (0..k).map(|i| (0..k).map(|j| seed[i * 7 + j]).collect()).collect();
            prop_assert_eq!(hungarian(&m).1, exhaustive(&m).1);
        }

        #[test]
        fn accuracy_relabeling_and_floor(
            clusters in proptest::collection::vec(0usize..3, 30),
            shift in 0usize..3,
        ) {
            let labels: Vec<u32> = (0..30).map(|i| (i % 3) as u32 + 10).collect();
            let a = Assignment::new(clusters.clone(), 3).unwrap();
            let moved = Assignment::new(clusters.iter().map(|c| (c + shift) % 3).collect(), 3).unwrap();
            let base = accuracy(&a, &labels).unwrap();
            prop_assert_eq!(base, accuracy(&moved, &labels).unwrap());
            prop_assert!(base >= 1.0 / 3.0 - 1e-12);
        }
    }
}
