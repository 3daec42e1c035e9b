//! Combinatorial coverage analysis over discrete-factor datasets.
//!
//! The crate is organised around three concerns:
//!
//! * [`coverage`] computes t-way combinatorial coverage and set-difference
//!   combinatorial coverage with exact set semantics.
//! * [`derive`] turns raw per-sample features into discrete factors:
//!   quantile bins, predicates, and grid regions over a 2D principal
//!   component projection.
//! * [`construct`] uses set-difference coverage to partition test sets into
//!   covered and not-covered records, diagnose training sets, and select
//!   labeling batches.

pub mod combination;
pub mod construct;
pub mod coverage;
pub mod derive;
pub mod error;
pub mod ratio;
pub mod schema;

pub use combination::{CombinationSet, ValueCombination};
pub use coverage::{
    build_combination_set, combinatorial_coverage, combos_of_record, sdcc, universe_count,
    CoverageReport, RecordFlag, SdccReport,
};
pub use error::{Error, Result};
pub use ratio::Ratio;
pub use schema::{Dataset, Factor, FactorSchema, Record};

/// Interaction strength used when none is given.
pub const DEFAULT_STRENGTH: usize = 2;
