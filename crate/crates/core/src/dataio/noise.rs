use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::types::DataSet;

/// Adds i.i.d. `N(0, variance)` noise to every coordinate of
/// `floor(fraction * n_c)` points drawn without replacement from each class
/// `c`. Unlabeled data is treated as a single class. Values are not clamped.
pub fn inject_noise(data: &DataSet, fraction: f64, variance: f64, seed: u64) -> Result<DataSet> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidConfig(format!("noise fraction {fraction} not in [0, 1]")));
    }
    if !(variance >= 0.0 && variance.is_finite()) {
        return Err(Error::InvalidConfig(format!("noise variance {variance} must be >= 0")));
    }
    if fraction == 0.0 || variance == 0.0 {
        return Ok(data.clone());
    }
    let d = data.dim();
    let mut groups: Vec<Vec<usize>> = match (data.labels(), data.classes()) {
        (Some(labels), Some(classes)) => {
            let mut g = vec![Vec::new(); classes.len()];
            for (i, l) in labels.iter().enumerate() {
                g[classes.binary_search(l).expect("label is a class")].push(i);
            }
            g
        }
        _ => vec![(0..data.len()).collect()],
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, variance.sqrt()).expect("finite stddev");
    let mut points = data.raw_points().to_vec();
    for members in groups.iter_mut() {
        let m = (fraction * members.len() as f64).floor() as usize;
        let mut picked: Vec<usize> = index::sample(&mut rng, members.len(), m)
            .into_iter()
            .map(|j| members[j])
            .collect();
        picked.sort_unstable();
        for i in picked {
            for v in &mut points[i * d..(i + 1) * d] {
                *v += normal.sample(&mut rng);
            }
        }
    }
    data.with_points(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::make_dataset;

    fn two_classes(per: usize) -> DataSet {
        let mut pts = Vec::new();
        let mut labels = Vec::new();
        for c in 0..2u32 {
            for i in 0..per {
                pts.extend([c as f64 * 5.0 + i as f64 * 1e-3, 1.0]);
                labels.push(c + 1);
            }
        }
        make_dataset(pts, 2, None, Some(labels)).unwrap()
    }

    fn perturbed_per_class(a: &DataSet, b: &DataSet) -> [usize; 2] {
        let mut n = [0; 2];
        for i in 0..a.len() {
            if a.point(i) != b.point(i) {
                n[(a.labels().unwrap()[i] - 1) as usize] += 1;
            }
        }
        n
    }

    #[test]
    fn exact_stratified_counts() {
        let clean = two_classes(1000);
        let noisy = inject_noise(&clean, 0.2, 1.0, 9).unwrap();
        assert_eq!(perturbed_per_class(&clean, &noisy), [200, 200]);
        assert_eq!(noisy.weights(), clean.weights());
        assert_eq!(noisy.labels(), clean.labels());
        let odd = inject_noise(&two_classes(7), 0.5, 1.0, 1).unwrap();
        assert_eq!(perturbed_per_class(&two_classes(7), &odd), [3, 3]);
    }

    #[test]
    fn identity_cases_and_determinism() {
        let clean = two_classes(20);
        assert_eq!(inject_noise(&clean, 0.0, 3.0, 1).unwrap(), clean);
        assert_eq!(inject_noise(&clean, 0.7, 0.0, 1).unwrap(), clean);
        let a = inject_noise(&clean, 0.4, 2.0, 5).unwrap();
        assert_eq!(a, inject_noise(&clean, 0.4, 2.0, 5).unwrap());
        assert_ne!(a, inject_noise(&clean, 0.4, 2.0, 6).unwrap());
    }

    #[test]
    fn rejects_bad_parameters() {
        let clean = two_classes(4);
        assert!(inject_noise(&clean, 1.5, 1.0, 0).is_err());
        assert!(inject_noise(&clean, 0.5, -1.0, 0).is_err());
    }
}
