//! Gradient-based clustering.
//!
//! Each iteration reassigns every point to its nearest center under a metric
//! `g`, then moves every center by a single gradient step on a smooth loss
//! `f` that is nondecreasing in `g`. With a step size below `2 / L` the
//! weighted cost never increases and the iterates settle on a fixed point:
//! a Voronoi partition whose centers have zero cost gradient.
//!
//! Modules:
//! - [`types`]: datasets, centers, assignments, step configuration, traces
//! - [`divergence`]: the shipped `(g, f)` pairs and their smoothness bounds
//! - [`engine`]: reassignment, cost, gradients, update rules and the run loop
//! - [`diagnostics`]: fixed-point certificates, oracles and assumption samplers
//! - [`dataio`]: IDX/CSV ingestion, noise, synthetic mixtures, seeding, accuracy

pub mod dataio;
pub mod diagnostics;
pub mod divergence;
pub mod engine;
pub mod error;
pub mod types;

pub use divergence::{DivergencePair, PairKind, SmoothnessBound};
pub use engine::{RunResult, StepSizeMode};
pub use error::{Error, Result};
pub use types::{
    make_dataset, Assignment, Centers, DataSet, GradTolerance, IterationRecord, IterationTrace,
    StepConfig, TerminationReason, UpdateRule,
};
