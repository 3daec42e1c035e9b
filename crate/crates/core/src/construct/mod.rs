//! Coverage-directed test-set partitioning, training-set diagnostics and
//! labeling-batch selection.

mod gap;
mod partition;
mod selection;

pub use gap::{coverage_gap_report, FactorGap, GapReport, ValueGap};
pub use partition::{
    partition_relaxed, partition_strict, CoverMode, PartitionResult, PartitionRow,
};
pub use selection::{select_labeling_batch, SelectionPlan, SelectionRequest};
