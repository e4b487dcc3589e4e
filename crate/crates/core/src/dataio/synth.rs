use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};

use crate::error::{Error, Result};
use crate::types::{make_dataset, DataSet};

/// Mean of component `k`: the origin for `k = 0`, otherwise
/// `separation * (floor((k-1)/d) + 1) * e_{(k-1) mod d}`.
pub fn mixture_center(k: usize, d: usize, separation: f64) -> Vec<f64> {
    let mut c = vec![0.0; d];
    if k > 0 {
        c[(k - 1) % d] = separation * ((k - 1) / d + 1) as f64;
    }
    c
}

/// `k` isotropic Gaussian blobs of `per_cluster_n` points each, labelled by
/// component, with uniform weights.
pub fn synth_mixture(
    k: usize,
    d: usize,
    per_cluster_n: usize,
    separation: f64,
    stddev: f64,
    seed: u64,
) -> Result<DataSet> {
    if k < 2 || d == 0 || per_cluster_n == 0 {
        return Err(Error::InvalidConfig(format!(
            "mixture needs k >= 2, d >= 1, per_cluster_n >= 1 (got {k}, {d}, {per_cluster_n})"
        )));
    }
    if !(separation > 0.0 && separation.is_finite()) || !(stddev >= 0.0 && stddev.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "separation {separation} must be > 0 and stddev {stddev} >= 0"
        )));
    }
    let normal = Normal::new(0.0, stddev).expect("finite stddev");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(k * per_cluster_n * d);
    let mut labels = Vec::with_capacity(k * per_cluster_n);
    for c in 0..k {
        let mean = mixture_center(c, d, separation);
        for _ in 0..per_cluster_n {
            points.extend(mean.iter().map(|m| m + normal.sample(&mut rng)));
            labels.push(c as u32);
        }
    }
    make_dataset(points, d, None, Some(labels))
}

/// `k` Dirichlet components on the restricted simplex
/// `{x : x_j >= epsilon, sum x = 1}`. Component `c` has concentration
/// `peak` on coordinate `c mod d` and 1 elsewhere; samples are mapped by
/// `x = epsilon + (1 - d * epsilon) z`.
pub fn synth_simplex_mixture(
    k: usize,
    d: usize,
    per_cluster_n: usize,
    epsilon: f64,
    peak: f64,
    seed: u64,
) -> Result<DataSet> {
    if k < 2 || d < 2 || per_cluster_n == 0 {
        return Err(Error::InvalidConfig(format!(
            "simplex mixture needs k >= 2, d >= 2, per_cluster_n >= 1 (got {k}, {d}, {per_cluster_n})"
        )));
    }
    if !(epsilon > 0.0 && epsilon * (d as f64) < 1.0) || !(peak > 0.0 && peak.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "epsilon {epsilon} must lie in (0, 1/d) and peak {peak} must be > 0"
        )));
    }
    let base = Gamma::new(1.0, 1.0).expect("valid gamma");
    let high = Gamma::new(peak, 1.0).expect("valid gamma");
    let scale = 1.0 - d as f64 * epsilon;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(k * per_cluster_n * d);
    let mut labels = Vec::with_capacity(k * per_cluster_n);
    let mut z = vec![0.0; d];
    for c in 0..k {
        for _ in 0..per_cluster_n {
            for (j, zj) in z.iter_mut().enumerate() {
                *zj = if j == c % d { high.sample(&mut rng) } else { base.sample(&mut rng) };
            }
            let s: f64 = z.iter().sum();
            points.extend(z.iter().map(|zj| epsilon + scale * zj / s));
            labels.push(c as u32);
        }
    }
    make_dataset(points, d, None, Some(labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::DivergencePair;

    #[test]
    fn sample_means_near_centers() {
        let n = 400;
        let data = synth_mixture(2, 1, n, 10.0, 0.5, 3).unwrap();
        let labels = data.labels().unwrap();
        for c in 0..2u32 {
            let vals: Vec<f64> = (0..data.len())
                .filter(|&i| labels[i] == c)
                .map(|i| data.point(i)[0])
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            assert!((mean - 10.0 * c as f64).abs() <= 3.0 * 0.5 / (n as f64).sqrt());
        }
    }

    #[test]
    fn degenerate_sizes() {
        let data = synth_mixture(3, 2, 1, 4.0, 0.3, 0).unwrap();
        assert_eq!(data.len(), 3);
        let exact = synth_mixture(4, 2, 5, 2.0, 0.0, 0).unwrap();
        for i in 0..exact.len() {
            let c = exact.labels().unwrap()[i] as usize;
            assert_eq!(exact.point(i), &mixture_center(c, 2, 2.0)[..]);
        }
        assert_eq!(mixture_center(3, 2, 2.0), vec![4.0, 0.0]);
        assert_eq!(mixture_center(2, 2, 2.0), vec![0.0, 2.0]);
    }

    #[test]
    fn simplex_points_are_feasible() {
        let pair = DivergencePair::jensen_shannon(0.05).unwrap();
        let data = synth_simplex_mixture(3, 10, 50, 0.05, 20.0, 1).unwrap();
        for p in data.points() {
            pair.check_point(p).unwrap();
        }
        assert_eq!(data, synth_simplex_mixture(3, 10, 50, 0.05, 20.0, 1).unwrap());
    }
}
