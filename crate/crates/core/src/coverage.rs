//! t-way combinatorial coverage (CC) and set-difference combinatorial
//! coverage (SDCC).
//!
//! `CC^t(D) = |D^t| / |U^t|` and `SDCC^t(T, S) = |T^t \ S^t| / |T^t|`, where
//! `X^t` is the set of t-way value combinations appearing in `X` and `U^t` is
//! the set of valid t-way combinations of the schema.

use itertools::Itertools;
use serde::Serialize;

use crate::combination::{CombinationSet, ValueCombination};
use crate::error::{Error, Result};
use crate::ratio::Ratio;
use crate::schema::{Dataset, FactorSchema, Record};

/// All size-`t` factor subsets of `0..k` in lexicographic order.
pub(crate) fn factor_subsets(k: usize, t: usize) -> Vec<Vec<usize>> {
    (0..k).combinations(t).collect()
}

pub(crate) fn project(values: &[u32], subset: &[usize]) -> ValueCombination {
    ValueCombination::from_sorted(subset.iter().map(|&f| (f as u32, values[f])).collect())
}

/// The `C(k, t)` combinations carried by one record.
pub fn combos_of_record(
    record: &Record,
    schema: &FactorSchema,
    t: usize,
) -> Result<CombinationSet> {
    schema.check_strength(t)?;
    schema.validate_record(record)?;
    let mut set = CombinationSet::new(t);
    for subset in factor_subsets(schema.factor_count(), t) {
        set.insert_unchecked(project(&record.values, &subset));
    }
    Ok(set)
}

/// `D^t`: the union of every record's t-way combinations.
pub fn build_combination_set(data: &Dataset, t: usize) -> Result<CombinationSet> {
    data.schema().check_strength(t)?;
    Ok(collect_combinations(
        data,
        &factor_subsets(data.schema().factor_count(), t),
        t,
    ))
}

pub(crate) fn collect_combinations(
    data: &Dataset,
    subsets: &[Vec<usize>],
    t: usize,
) -> CombinationSet {
    let mut set = CombinationSet::new(t);
    for record in data.records() {
        for subset in subsets {
            set.insert_unchecked(project(&record.values, subset));
        }
    }
    set
}

/// `|U^t|`: the number of valid t-way combinations of the schema.
///
/// Without constraints this is the sum over factor subsets of the product of
/// their domain sizes. A combination that contains a forbidden combination is
/// not counted.
pub fn universe_count(schema: &FactorSchema, t: usize) -> Result<u64> {
    schema.check_strength(t)?;
    let relevant: Vec<&ValueCombination> = schema
        .constraints()
        .iter()
        .filter(|c| c.strength() <= t)
        .collect();
    let mut total: u64 = 0;
    for subset in factor_subsets(schema.factor_count(), t) {
        let applicable: Vec<&ValueCombination> = relevant
            .iter()
            .copied()
            .filter(|c| c.factors().all(|f| subset.contains(&f)))
            .collect();
        let count = if applicable.is_empty() {
            subset.iter().try_fold(1u64, |acc, &f| {
                acc.checked_mul(schema.domain_size(f) as u64)
                    .ok_or(Error::Overflow)
            })?
        } else {
            count_allowed(schema, &subset, &applicable)
        };
        total = total.checked_add(count).ok_or(Error::Overflow)?;
    }
    Ok(total)
}

fn count_allowed(schema: &FactorSchema, subset: &[usize], forbidden: &[&ValueCombination]) -> u64 {
    let mut values = vec![0u32; subset.len()];
    let mut allowed = 0u64;
    loop {
        let combo = ValueCombination::from_sorted(
            subset
                .iter()
                .zip(&values)
                .map(|(&f, &v)| (f as u32, v))
                .collect(),
        );
        if !forbidden.iter().any(|c| combo.contains(c)) {
            allowed += 1;
        }
        let mut exhausted = true;
        for pos in (0..subset.len()).rev() {
            values[pos] += 1;
            if (values[pos] as usize) < schema.domain_size(subset[pos]) {
                exhausted = false;
                break;
            }
            values[pos] = 0;
        }
        if exhausted {
            return allowed;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub t: usize,
    /// `|D^t|`
    pub covered_count: u64,
    /// `|U^t|`
    pub universe_count: u64,
    pub cc: Ratio,
}

pub fn combinatorial_coverage(data: &Dataset, t: usize) -> Result<CoverageReport> {
    let universe = universe_count(data.schema(), t)?;
    if universe == 0 {
        return Err(Error::DegenerateSchema { t });
    }
    let covered = build_combination_set(data, t)?.len() as u64;
    Ok(CoverageReport {
        t,
        covered_count: covered,
        universe_count: universe,
        cc: Ratio::new(covered, universe),
    })
}

/// Whether a target record has all of its combinations in the source set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordFlag {
    pub id: String,
    pub covered: bool,
    /// How many of the record's `C(k, t)` combinations are missing from the source.
    pub missing_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SdccReport {
    pub t: usize,
    /// `|D_T^t|`
    pub target_count: u64,
    /// `|D_T^t \ D_S^t|`
    pub missing_count: u64,
    pub sdcc: Ratio,
    /// Sorted by factor index, then value index.
    pub missing_combinations: Vec<ValueCombination>,
    /// One flag per target record, in target order.
    pub per_record: Vec<RecordFlag>,
}

impl SdccReport {
    pub fn not_covered_count(&self) -> usize {
        self.per_record.iter().filter(|r| !r.covered).count()
    }
}

/// Per-record missing counts of `target` against an already built source set.
pub(crate) fn missing_counts(
    target: &Dataset,
    source_set: &CombinationSet,
    subsets: &[Vec<usize>],
) -> Vec<usize> {
    target
        .records()
        .iter()
        .map(|record| {
            subsets
                .iter()
                .filter(|subset| !source_set.contains(&project(&record.values, subset)))
                .count()
        })
        .collect()
}

pub(crate) fn check_pair(target: &Dataset, source: &Dataset, t: usize) -> Result<()> {
    target.check_same_schema(source)?;
    target.schema().check_strength(t)?;
    if target.is_empty() {
        return Err(Error::UndefinedRatio(
            "SDCC needs a non-empty target dataset".into(),
        ));
    }
    Ok(())
}

pub fn sdcc(target: &Dataset, source: &Dataset, t: usize) -> Result<SdccReport> {
    check_pair(target, source, t)?;
    let subsets = factor_subsets(target.schema().factor_count(), t);
    let target_set = collect_combinations(target, &subsets, t);
    let source_set = collect_combinations(source, &subsets, t);
    let missing = target_set.difference(&source_set)?;
    let per_record = target
        .records()
        .iter()
        .zip(missing_counts(target, &source_set, &subsets))
        .map(|(record, missing_count)| RecordFlag {
            id: record.id.clone(),
            covered: missing_count == 0,
            missing_count,
        })
        .collect();
    let target_count = target_set.len() as u64;
    let missing_count = missing.len() as u64;
    Ok(SdccReport {
        t,
        target_count,
        missing_count,
        sdcc: Ratio::new(missing_count, target_count),
        missing_combinations: missing.into_iter().collect(),
        per_record,
    })
}
