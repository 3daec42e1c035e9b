//! Discrete factors from raw per-sample features.
//!
//! Four kinds of factor are supported: categorical columns copied as-is,
//! predicates over a categorical column, quantile bins of a scalar column,
//! and grid regions over the scaled top-two principal components of a
//! vector-valued feature (for example an autoencoder latent).

pub mod grid;
pub mod pipeline;
pub mod predicate;
pub mod projection;
pub mod quantile;

pub use grid::GridPartition;
pub use pipeline::{
    derive_dataset, fit_artifacts, DerivationSpec, FactorSpec, FittedArtifacts, FittedFactor,
    RawTable, ARTIFACT_FORMAT, ARTIFACT_VERSION,
};
pub use predicate::{PredicateFactor, PREDICATE_LABELS};
pub use projection::{fit_projection, Projection2D};
pub use quantile::{fit_quantile_bins, QuantileBinning};
