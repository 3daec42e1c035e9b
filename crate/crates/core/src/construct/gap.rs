use serde::Serialize;

use super::partition::partition_strict;
use crate::coverage::sdcc;
use crate::error::Result;
use crate::ratio::Ratio;
use crate::schema::Dataset;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValueGap {
    pub value: String,
    /// Missing target combinations that include this value.
    pub missing_combinations: u64,
    /// Strictly not-covered target records carrying this value.
    pub not_covered_records: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorGap {
    pub factor: String,
    pub values: Vec<ValueGap>,
}

/// Training-set diagnostics: SDCC in both directions plus where the gaps are.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapReport {
    pub t: usize,
    /// `SDCC(target, source)`
    pub sdcc_forward: Ratio,
    /// `SDCC(source, target)`; absent when the source is empty.
    pub sdcc_backward: Option<Ratio>,
    pub covered_count: usize,
    pub not_covered_count: usize,
    pub factors: Vec<FactorGap>,
}

pub fn coverage_gap_report(target: &Dataset, source: &Dataset, t: usize) -> Result<GapReport> {
    let forward = sdcc(target, source, t)?;
    let backward = if source.is_empty() {
        None
    } else {
        Some(sdcc(source, target, t)?.sdcc)
    };
    let partition = partition_strict(target, source, t)?;

    let schema = target.schema();
    let mut factors: Vec<FactorGap> = schema
        .factors()
        .iter()
        .map(|factor| FactorGap {
            factor: factor.name.clone(),
            values: factor
                .values
                .iter()
                .map(|value| ValueGap {
                    value: value.clone(),
                    missing_combinations: 0,
                    not_covered_records: 0,
                })
                .collect(),
        })
        .collect();
    for combo in &forward.missing_combinations {
        for &(f, v) in combo.pairs() {
            factors[f as usize].values[v as usize].missing_combinations += 1;
        }
    }
    for (row, record) in partition.rows.iter().zip(target.records()) {
        if row.not_covered {
            for (f, &v) in record.values.iter().enumerate() {
                factors[f].values[v as usize].not_covered_records += 1;
            }
        }
    }

    Ok(GapReport {
        t,
        sdcc_forward: forward.sdcc,
        sdcc_backward: backward,
        covered_count: partition.covered_count(),
        not_covered_count: partition.not_covered_count(),
        factors,
    })
}
