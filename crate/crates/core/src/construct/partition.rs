use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coverage::{check_pair, collect_combinations, factor_subsets, missing_counts};
use crate::error::{Error, Result};
use crate::schema::Dataset;

/// Which notion of "not covered" to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverMode {
    /// A record is not covered if any of its combinations is missing from the source.
    Strict,
    /// A record is not covered if its region holds a strictly not-covered record.
    Relaxed,
}

impl fmt::Display for CoverMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoverMode::Strict => "strict",
            CoverMode::Relaxed => "relaxed",
        })
    }
}

impl FromStr for CoverMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(CoverMode::Strict),
            "relaxed" => Ok(CoverMode::Relaxed),
            other => Err(Error::Validation(format!(
                "unknown mode {other:?}, expected strict or relaxed"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionRow {
    pub id: String,
    pub not_covered: bool,
    /// Combinations of this record missing from the source (strict count,
    /// reported in both modes).
    pub missing_count: usize,
    /// Region value index, relaxed mode only.
    pub region: Option<u32>,
}

/// A two-way split of the target records, in target order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionResult {
    pub mode: CoverMode,
    pub t: usize,
    pub rows: Vec<PartitionRow>,
    /// Region factor index, relaxed mode only.
    pub region_factor: Option<usize>,
    /// Region values that own at least one strictly not-covered record, ascending.
    pub implicated_regions: Vec<u32>,
}

impl PartitionResult {
    pub fn covered_ids(&self) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| !r.not_covered)
            .map(|r| r.id.as_str())
            .collect()
    }

    pub fn not_covered_ids(&self) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| r.not_covered)
            .map(|r| r.id.as_str())
            .collect()
    }

    pub fn covered_count(&self) -> usize {
        self.rows.iter().filter(|r| !r.not_covered).count()
    }

    pub fn not_covered_count(&self) -> usize {
        self.rows.iter().filter(|r| r.not_covered).count()
    }
}

pub fn partition_strict(target: &Dataset, source: &Dataset, t: usize) -> Result<PartitionResult> {
    check_pair(target, source, t)?;
    let subsets = factor_subsets(target.schema().factor_count(), t);
    let source_set = collect_combinations(source, &subsets, t);
    let rows = target
        .records()
        .iter()
        .zip(missing_counts(target, &source_set, &subsets))
        .map(|(record, missing_count)| PartitionRow {
            id: record.id.clone(),
            not_covered: missing_count > 0,
            missing_count,
            region: None,
        })
        .collect();
    Ok(PartitionResult {
        mode: CoverMode::Strict,
        t,
        rows,
        region_factor: None,
        implicated_regions: Vec::new(),
    })
}

/// Strict partition widened to every record sharing a region with a
/// strictly not-covered record.
pub fn partition_relaxed(
    target: &Dataset,
    source: &Dataset,
    t: usize,
    region_factor: &str,
) -> Result<PartitionResult> {
    let region = target.schema().factor_index(region_factor).ok_or_else(|| {
        Error::Validation(format!("schema has no region factor {region_factor:?}"))
    })?;
    let strict = partition_strict(target, source, t)?;
    let implicated: BTreeSet<u32> = strict
        .rows
        .iter()
        .zip(target.records())
        .filter(|(row, _)| row.not_covered)
        .map(|(_, record)| record.values[region])
        .collect();
    let rows = strict
        .rows
        .into_iter()
        .zip(target.records())
        .map(|(row, record)| {
            let value = record.values[region];
            PartitionRow {
                not_covered: implicated.contains(&value),
                region: Some(value),
                ..row
            }
        })
        .collect();
    Ok(PartitionResult {
        mode: CoverMode::Relaxed,
        t,
        rows,
        region_factor: Some(region),
        implicated_regions: implicated.into_iter().collect(),
    })
}

pub(crate) fn partition(
    target: &Dataset,
    source: &Dataset,
    t: usize,
    mode: CoverMode,
    region_factor: Option<&str>,
) -> Result<PartitionResult> {
    match (mode, region_factor) {
        (CoverMode::Strict, _) => partition_strict(target, source, t),
        (CoverMode::Relaxed, Some(region)) => partition_relaxed(target, source, t, region),
        (CoverMode::Relaxed, None) => Err(Error::Validation(
            "relaxed mode requires a region factor".into(),
        )),
    }
}
