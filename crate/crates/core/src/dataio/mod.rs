//! Dataset ingestion and experiment plumbing.

mod accuracy;
mod csvio;
mod idx;
mod init;
mod noise;
mod prepare;
mod synth;

pub use accuracy::{accuracy, best_matching};
pub use csvio::{read_csv_dataset, read_weights, write_csv_dataset};
pub use idx::{load_idx, parse_idx_images, parse_idx_labels, IDX_IMAGES_MAGIC, IDX_LABELS_MAGIC};
pub use init::{d2_probabilities, init_centers, InitStrategy};
pub use noise::inject_noise;
pub use prepare::{prepare, RawDataset};
pub use synth::{mixture_center, synth_mixture, synth_simplex_mixture};

/// Derives an independent 64-bit seed for a named sub-stream.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 finalizer over the combined input
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
