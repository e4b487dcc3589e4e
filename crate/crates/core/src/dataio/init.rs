use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::divergence::DivergencePair;
use crate::error::{Error, Result};
use crate::types::{Centers, DataSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    /// One uniformly chosen point from each of the first `K` classes.
    LabeledSample,
    /// `K` distinct points chosen uniformly without replacement.
    UniformRandom,
    /// D²-weighted seeding under the pair's metric.
    #[serde(rename = "kmeanspp")]
    KMeansPlusPlus,
}

impl InitStrategy {
    pub const ALL: [InitStrategy; 3] = [
        InitStrategy::LabeledSample,
        InitStrategy::UniformRandom,
        InitStrategy::KMeansPlusPlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InitStrategy::LabeledSample => "labeled_sample",
            InitStrategy::UniformRandom => "uniform_random",
            InitStrategy::KMeansPlusPlus => "kmeanspp",
        }
    }
}

impl FromStr for InitStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown init strategy `{s}`")))
    }
}

pub fn init_centers(
    strategy: InitStrategy,
    data: &DataSet,
    k: usize,
    pair: &DivergencePair,
    seed: u64,
) -> Result<Centers> {
    let n = data.len();
    if k > n {
        return Err(Error::InsufficientData(format!("{k} centers requested from {n} points")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks: Vec<usize> = match strategy {
        InitStrategy::LabeledSample => {
            let labels = data.labels().ok_or(Error::MissingLabels)?;
            let classes = data.classes().expect("labels present");
            if classes.len() < k {
                return Err(Error::InsufficientData(format!(
                    "{} classes for {k} centers",
                    classes.len()
                )));
            }
            classes[..k]
                .iter()
                .map(|c| {
                    let members: Vec<usize> = (0..n).filter(|&i| labels[i] == *c).collect();
                    members[rng.random_range(0..members.len())]
                })
                .collect()
        }
        InitStrategy::UniformRandom => index::sample(&mut rng, n, k).into_vec(),
        InitStrategy::KMeansPlusPlus => kmeanspp(data, k, pair, &mut rng),
    };
    let rows: Vec<&[f64]> = picks.iter().map(|&i| data.point(i)).collect();
    Centers::from_rows(&rows)
}

/// Probability of each point being chosen next, given the chosen set.
pub fn d2_probabilities(data: &DataSet, chosen: &[usize], pair: &DivergencePair) -> Vec<f64> {
    let scores: Vec<f64> = (0..data.len())
        .map(|i| {
            let dmin = chosen
                .iter()
                .map(|&c| pair.metric_unchecked(data.point(i), data.point(c)))
                .fold(f64::INFINITY, f64::min);
            data.weight(i) * dmin * dmin
        })
        .collect();
    let total: f64 = scores.iter().sum();
    if total > 0.0 {
        scores.iter().map(|s| s / total).collect()
    } else {
        // Every point coincides with a chosen one; fall back to uniform over the rest.
        let free = data.len() - chosen.len();
        (0..data.len())
            .map(|i| if chosen.contains(&i) { 0.0 } else { 1.0 / free as f64 })
            .collect()
    }
}

fn kmeanspp(data: &DataSet, k: usize, pair: &DivergencePair, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut chosen = vec![sample_weighted(data.weights(), rng)];
    while chosen.len() < k {
        let probs = d2_probabilities(data, &chosen, pair);
        chosen.push(sample_weighted(&probs, rng));
    }
    chosen
}

fn sample_weighted(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = probs.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            if u < p {
                return i;
            }
            u -= p;
            last = i;
        }
    }
    last
}
