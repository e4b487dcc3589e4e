//! Shared fixtures for the benchmarks.

use gradclust_core::dataio::{init_centers, synth_mixture, InitStrategy};
use gradclust_core::{Centers, DataSet, DivergencePair};

/// A labeled Gaussian mixture with `k` clusters and `kmeans++` starting centers.
pub fn fixture(k: usize, dim: usize, per_cluster: usize, pair: &DivergencePair) -> (DataSet, Centers) {
    let data = synth_mixture(k, dim, per_cluster, 4.0, 1.0, 7).expect("valid mixture");
    let init = init_centers(InitStrategy::KMeansPlusPlus, &data, k, pair, 11).expect("valid init");
    (data, init)
}
