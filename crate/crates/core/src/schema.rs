//! Factors, records and datasets.
//!
//! A [`FactorSchema`] fixes the ordered factors and their value domains; a
//! [`Record`] assigns one value index per factor; a [`Dataset`] is a list of
//! records sharing one schema.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::combination::ValueCombination;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub name: String,
    pub values: Vec<String>,
}

impl Factor {
    pub fn new<N, I, V>(name: N, values: I) -> Self
    where
        N: Into<String>,
        I: IntoIterator<Item = V>,
        V: Into<String>,
    {
        Factor {
            name: name.into(),
            values: values.into_iter().map(Into::into).collect(),
        }
    }

    pub fn value_index(&self, label: &str) -> Option<usize> {
        self.values.iter().position(|v| v == label)
    }
}

/// Ordered factors with finite domains plus optional forbidden combinations.
///
/// A t-way combination is valid iff it contains no forbidden combination.
/// Records containing a forbidden combination are rejected by [`Dataset::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSchema {
    factors: Vec<Factor>,
    constraints: Vec<ValueCombination>,
}

impl FactorSchema {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        Self::with_constraints(factors, Vec::new())
    }

    pub fn with_constraints(
        factors: Vec<Factor>,
        constraints: Vec<ValueCombination>,
    ) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Schema("schema declares no factors".into()));
        }
        let mut names = HashSet::new();
        for factor in &factors {
            if factor.name.is_empty() {
                return Err(Error::Schema("factor name is empty".into()));
            }
            if !names.insert(factor.name.as_str()) {
                return Err(Error::Schema(format!(
                    "factor name {:?} is declared twice",
                    factor.name
                )));
            }
            if factor.values.len() < 2 {
                return Err(Error::Schema(format!(
                    "factor {:?} needs at least 2 values, has {}",
                    factor.name,
                    factor.values.len()
                )));
            }
            let mut seen = HashSet::new();
            for value in &factor.values {
                if !seen.insert(value.as_str()) {
                    return Err(Error::Schema(format!(
                        "factor {:?} lists value {value:?} twice",
                        factor.name
                    )));
                }
            }
            if factor.values.len() > u32::MAX as usize {
                return Err(Error::Schema(format!(
                    "factor {:?} is too large",
                    factor.name
                )));
            }
        }
        for constraint in &constraints {
            for &(f, v) in constraint.pairs() {
                let Some(factor) = factors.get(f as usize) else {
                    return Err(Error::Schema(format!(
                        "constraint references undeclared factor index {f}"
                    )));
                };
                if v as usize >= factor.values.len() {
                    return Err(Error::Schema(format!(
                        "constraint references value index {v} outside factor {:?}",
                        factor.name
                    )));
                }
            }
        }
        let mut constraints = constraints;
        constraints.sort();
        constraints.dedup();
        Ok(FactorSchema {
            factors,
            constraints,
        })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Number of factors, k.
    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn domain_size(&self, factor: usize) -> usize {
        self.factors[factor].values.len()
    }

    pub fn constraints(&self) -> &[ValueCombination] {
        &self.constraints
    }

    pub fn factor_index(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.name == name)
    }

    pub fn check_strength(&self, t: usize) -> Result<()> {
        let k = self.factor_count();
        if t == 0 || t > k {
            return Err(Error::Strength { t, k });
        }
        Ok(())
    }

    /// True unless the combination contains a forbidden combination.
    pub fn is_allowed(&self, combo: &ValueCombination) -> bool {
        !self
            .constraints
            .iter()
            .any(|forbidden| forbidden.strength() <= combo.strength() && combo.contains(forbidden))
    }

    /// Builds a combination from (factor name, value label) pairs.
    pub fn combination(&self, pairs: &[(&str, &str)]) -> Result<ValueCombination> {
        let resolved = pairs
            .iter()
            .map(|&(name, label)| {
                let f = self
                    .factor_index(name)
                    .ok_or_else(|| Error::Validation(format!("unknown factor {name:?}")))?;
                let v = self.factors[f].value_index(label).ok_or_else(|| {
                    Error::Validation(format!("factor {name:?} has no value {label:?}"))
                })?;
                Ok((f as u32, v as u32))
            })
            .collect::<Result<Vec<_>>>()?;
        ValueCombination::new(resolved)
    }

    /// Labels of a combination as (factor name, value label) pairs.
    pub fn labels<'a>(&'a self, combo: &ValueCombination) -> Vec<(&'a str, &'a str)> {
        combo
            .pairs()
            .iter()
            .map(|&(f, v)| {
                let factor = &self.factors[f as usize];
                (factor.name.as_str(), factor.values[v as usize].as_str())
            })
            .collect()
    }

    /// Human-readable `name=value` rendering joined by commas.
    pub fn describe(&self, combo: &ValueCombination) -> String {
        self.labels(combo)
            .iter()
            .map(|(name, value)| format!("{name}={value}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn validate_record(&self, record: &Record) -> Result<()> {
        if record.values.len() != self.factor_count() {
            return Err(Error::Validation(format!(
                "record {:?} assigns {} values for {} factors",
                record.id,
                record.values.len(),
                self.factor_count()
            )));
        }
        for (f, &v) in record.values.iter().enumerate() {
            if v as usize >= self.domain_size(f) {
                return Err(Error::Validation(format!(
                    "record {:?} has value index {v} outside factor {:?}",
                    record.id, self.factors[f].name
                )));
            }
        }
        if let Some(forbidden) = self.constraints.iter().find(|c| c.matches(&record.values)) {
            return Err(Error::Validation(format!(
                "record {:?} contains forbidden combination {}",
                record.id,
                self.describe(forbidden)
            )));
        }
        Ok(())
    }
}

/// One fully assigned sample: a value index per factor in schema order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Record {
    pub id: String,
    pub values: Vec<u32>,
}

impl Record {
    pub fn new(id: impl Into<String>, values: Vec<u32>) -> Self {
        Record {
            id: id.into(),
            values,
        }
    }

    /// Resolves value labels against the schema by exact string match.
    pub fn from_labels<S: AsRef<str>>(
        schema: &FactorSchema,
        id: impl Into<String>,
        labels: &[S],
    ) -> Result<Self> {
        let id = id.into();
        if labels.len() != schema.factor_count() {
            return Err(Error::Validation(format!(
                "record {id:?} has {} labels for {} factors",
                labels.len(),
                schema.factor_count()
            )));
        }
        let values = schema
            .factors()
            .iter()
            .zip(labels)
            .map(|(factor, label)| {
                let label = label.as_ref();
                factor.value_index(label).map(|v| v as u32).ok_or_else(|| {
                    Error::Validation(format!(
                        "record {id:?}: {label:?} is not a value of factor {:?}",
                        factor.name
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Record { id, values })
    }
}

/// Records validated against one shared schema, with unique ids.
#[derive(Debug, Clone)]
pub struct Dataset {
    schema: Arc<FactorSchema>,
    records: Vec<Record>,
}

impl Dataset {
    pub fn new(schema: Arc<FactorSchema>, records: Vec<Record>) -> Result<Self> {
        let mut ids = HashSet::with_capacity(records.len());
        for record in &records {
            schema.validate_record(record)?;
            if !ids.insert(record.id.as_str()) {
                return Err(Error::Validation(format!(
                    "record id {:?} appears more than once",
                    record.id
                )));
            }
        }
        Ok(Dataset { schema, records })
    }

    pub fn empty(schema: Arc<FactorSchema>) -> Self {
        Dataset {
            schema,
            records: Vec::new(),
        }
    }

    pub fn schema(&self) -> &Arc<FactorSchema> {
        &self.schema
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn into_records(self) -> Vec<Record> {
        self.records
    }

    /// Errors unless both datasets use equal schemas.
    pub fn check_same_schema(&self, other: &Dataset) -> Result<()> {
        if Arc::ptr_eq(&self.schema, &other.schema) || *self.schema == *other.schema {
            Ok(())
        } else {
            Err(Error::Validation(
                "datasets are defined over different schemas".into(),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(k: usize) -> Arc<FactorSchema> {
        let names = ["a", "b", "c", "d", "e", "f"];
        Arc::new(
            FactorSchema::new(
                names[..k]
                    .iter()
                    .map(|n| Factor::new(*n, ["0", "1"]))
                    .collect(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn schema_invariants() {
        assert!(matches!(FactorSchema::new(vec![]), Err(Error::Schema(_))));
        assert!(FactorSchema::new(vec![Factor::new("", ["0", "1"])]).is_err());
        assert!(FactorSchema::new(vec![Factor::new("a", ["0"])]).is_err());
        assert!(FactorSchema::new(vec![Factor::new("a", ["0", "0"])]).is_err());
        assert!(FactorSchema::new(vec![
            Factor::new("a", ["0", "1"]),
            Factor::new("a", ["x", "y"])
        ])
        .is_err());
        let bad_constraint = ValueCombination::new(vec![(0, 5)]).unwrap();
        assert!(FactorSchema::with_constraints(
            vec![Factor::new("a", ["0", "1"])],
            vec![bad_constraint]
        )
        .is_err());
        let bad_factor = ValueCombination::new(vec![(3, 0)]).unwrap();
        assert!(FactorSchema::with_constraints(
            vec![Factor::new("a", ["0", "1"])],
            vec![bad_factor]
        )
        .is_err());
    }

    #[test]
    fn strength_range() {
        let schema = binary(3);
        assert!(schema.check_strength(1).is_ok());
        assert!(schema.check_strength(3).is_ok());
        assert_eq!(
            schema.check_strength(0),
            Err(Error::Strength { t: 0, k: 3 })
        );
        assert_eq!(
            schema.check_strength(4),
            Err(Error::Strength { t: 4, k: 3 })
        );
    }

    #[test]
    fn records_validate_against_schema() {
        let schema = binary(3);
        assert!(Dataset::new(schema.clone(), vec![Record::new("r", vec![0, 1])]).is_err());
        assert!(Dataset::new(schema.clone(), vec![Record::new("r", vec![0, 1, 2])]).is_err());
        let dup = vec![
            Record::new("r", vec![0, 1, 0]),
            Record::new("r", vec![1, 1, 0]),
        ];
        assert!(Dataset::new(schema.clone(), dup).is_err());
        let same_values = vec![
            Record::new("r1", vec![0, 1, 0]),
            Record::new("r2", vec![0, 1, 0]),
        ];
        assert_eq!(Dataset::new(schema, same_values).unwrap().len(), 2);
    }

    #[test]
    fn labels_match_exactly() {
        let schema = binary(2);
        let record = Record::from_labels(&schema, "x", &["1", "0"]).unwrap();
        assert_eq!(record.values, vec![1, 0]);
        assert!(Record::from_labels(&schema, "x", &["1", " 0"]).is_err());
        assert!(Record::from_labels(&schema, "x", &["1", ""]).is_err());
        assert!(Record::from_labels(&schema, "x", &["1"]).is_err());
    }

    #[test]
    fn forbidden_records_are_rejected() {
        let factors = vec![
            Factor::new("digit", ["0", "1"]),
            Factor::new("circle", ["False", "True"]),
        ];
        let plain = FactorSchema::new(factors.clone()).unwrap();
        let forbidden = plain
            .combination(&[("digit", "1"), ("circle", "True")])
            .unwrap();
        let schema = Arc::new(FactorSchema::with_constraints(factors, vec![forbidden]).unwrap());
        let ok = Record::from_labels(&schema, "a", &["1", "False"]).unwrap();
        let bad = Record::from_labels(&schema, "b", &["1", "True"]).unwrap();
        assert!(Dataset::new(schema.clone(), vec![ok]).is_ok());
        assert!(Dataset::new(schema, vec![bad]).is_err());
    }

    #[test]
    fn describe_uses_labels() {
        let schema = binary(3);
        let combo = schema.combination(&[("c", "1"), ("a", "0")]).unwrap();
        assert_eq!(schema.describe(&combo), "a=0,c=1");
    }
}
