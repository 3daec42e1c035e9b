use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Labels of a predicate factor, indexed by the boolean.
pub const PREDICATE_LABELS: [&str; 2] = ["False", "True"];

/// Maps labels of a source feature to `True` when they belong to a fixed set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateFactor {
    pub name: String,
    pub source: String,
    pub domain: Vec<String>,
    pub true_values: BTreeSet<String>,
}

impl PredicateFactor {
    pub fn new(
        name: impl Into<String>,
        source: impl Into<String>,
        domain: Vec<String>,
        true_values: impl IntoIterator<Item = String>,
    ) -> Result<Self> {
        let name = name.into();
        let true_values: BTreeSet<String> = true_values.into_iter().collect();
        if let Some(stray) = true_values.iter().find(|v| !domain.contains(v)) {
            return Err(Error::Validation(format!(
                "predicate {name:?}: true value {stray:?} is not in the source domain"
            )));
        }
        Ok(PredicateFactor {
            name,
            source: source.into(),
            domain,
            true_values,
        })
    }

    pub fn apply<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<bool>> {
        labels
            .iter()
            .map(|label| self.evaluate(label.as_ref()))
            .collect()
    }

    pub fn evaluate(&self, label: &str) -> Result<bool> {
        if !self.domain.iter().any(|v| v == label) {
            return Err(Error::Validation(format!(
                "predicate {:?}: {label:?} is not a value of {:?}",
                self.name, self.source
            )));
        }
        Ok(self.true_values.contains(label))
    }
}
