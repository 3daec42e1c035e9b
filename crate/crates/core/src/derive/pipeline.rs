use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::GridPartition;
use super::predicate::{PredicateFactor, PREDICATE_LABELS};
use super::projection::{fit_projection, Projection2D};
use super::quantile::{fit_quantile_bins, QuantileBinning};
use crate::combination::ValueCombination;
use crate::error::{Error, Result};
use crate::schema::{Dataset, Factor, FactorSchema, Record};

pub const ARTIFACT_FORMAT: &str = "combicov-derivation-artifacts";
pub const ARTIFACT_VERSION: u32 = 1;

/// Raw features keyed by sample id. Cells are kept as text until a factor
/// needs them as numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub columns: Vec<String>,
    pub ids: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RawTable {
    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Validation(format!("raw table has no column {name:?}")))
    }

    fn text_column(&self, name: &str) -> Result<Vec<&str>> {
        let col = self.column_index(name)?;
        Ok(self.rows.iter().map(|row| row[col].as_str()).collect())
    }

    fn numeric_column(&self, name: &str) -> Result<Vec<f64>> {
        let col = self.column_index(name)?;
        self.rows
            .iter()
            .zip(&self.ids)
            .map(|(row, id)| parse_number(&row[col], id, name))
            .collect()
    }

    fn numeric_matrix(&self, columns: &[String]) -> Result<Vec<Vec<f64>>> {
        let idx = columns
            .iter()
            .map(|c| self.column_index(c))
            .collect::<Result<Vec<_>>>()?;
        self.rows
            .iter()
            .zip(&self.ids)
            .map(|(row, id)| {
                idx.iter()
                    .zip(columns)
                    .map(|(&i, name)| parse_number(&row[i], id, name))
                    .collect()
            })
            .collect()
    }
}

fn parse_number(cell: &str, id: &str, column: &str) -> Result<f64> {
    let x: f64 = cell.trim().parse().map_err(|_| {
        Error::Validation(format!(
            "record {id:?}: column {column:?} value {cell:?} is not a number"
        ))
    })?;
    if !x.is_finite() {
        return Err(Error::NonFinite(format!(
            "record {id:?}: column {column:?} value {cell:?}"
        )));
    }
    Ok(x)
}

/// How one output factor is computed from raw columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorSpec {
    Categorical {
        name: String,
        column: String,
        values: Vec<String>,
    },
    Predicate {
        name: String,
        column: String,
        domain: Vec<String>,
        true_values: Vec<String>,
    },
    Quantile {
        name: String,
        column: String,
        levels: Vec<f64>,
    },
    Region {
        name: String,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        columns: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        column_prefix: Option<String>,
        cells_per_axis: u32,
    },
}

impl FactorSpec {
    pub fn name(&self) -> &str {
        match self {
            FactorSpec::Categorical { name, .. }
            | FactorSpec::Predicate { name, .. }
            | FactorSpec::Quantile { name, .. }
            | FactorSpec::Region { name, .. } => name,
        }
    }

    /// Raw columns read by a region factor, resolved against the table header.
    pub fn region_columns(&self, header: &[String]) -> Result<Vec<String>> {
        let FactorSpec::Region {
            name,
            columns,
            column_prefix,
            ..
        } = self
        else {
            return Err(Error::Validation(format!(
                "factor {:?} is not a region factor",
                self.name()
            )));
        };
        let selected: Vec<String> = match (columns.is_empty(), column_prefix) {
            (false, None) => columns.clone(),
            (true, Some(prefix)) => header
                .iter()
                .filter(|c| c.starts_with(prefix.as_str()))
                .cloned()
                .collect(),
            _ => {
                return Err(Error::Validation(format!(
                    "region factor {name:?} needs exactly one of `columns` or `column_prefix`"
                )))
            }
        };
        if selected.len() < 2 {
            return Err(Error::Validation(format!(
                "region factor {name:?} selects {} columns, needs at least 2",
                selected.len()
            )));
        }
        Ok(selected)
    }
}

/// The ordered list of factors to derive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivationSpec {
    pub factors: Vec<FactorSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FittedFactor {
    Quantile {
        binning: QuantileBinning,
    },
    Region {
        columns: Vec<String>,
        projection: Projection2D,
        grid: GridPartition,
    },
}

/// Parameters fitted on a named reference dataset and reused verbatim on
/// every dataset derived afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedArtifacts {
    pub format: String,
    pub version: u32,
    /// Caller-supplied description of the fitting population.
    pub reference: String,
    pub factors: BTreeMap<String, FittedFactor>,
}

impl FittedArtifacts {
    pub fn check_version(&self) -> Result<()> {
        if self.format != ARTIFACT_FORMAT || self.version != ARTIFACT_VERSION {
            return Err(Error::Validation(format!(
                "unsupported artifact document {:?} version {} (expected {ARTIFACT_FORMAT:?} version {ARTIFACT_VERSION})",
                self.format, self.version
            )));
        }
        Ok(())
    }
}

fn check_spec(spec: &DerivationSpec) -> Result<()> {
    if spec.factors.is_empty() {
        return Err(Error::Validation("derivation spec lists no factors".into()));
    }
    let mut names: Vec<&str> = spec.factors.iter().map(FactorSpec::name).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Validation(format!(
            "factor {:?} is derived twice",
            w[0]
        )));
    }
    Ok(())
}

/// Fits quantile edges and region projections on `table`.
pub fn fit_artifacts(
    table: &RawTable,
    spec: &DerivationSpec,
    reference: impl Into<String>,
) -> Result<FittedArtifacts> {
    check_spec(spec)?;
    let mut factors = BTreeMap::new();
    for factor in &spec.factors {
        match factor {
            FactorSpec::Quantile {
                name,
                column,
                levels,
            } => {
                let binning = fit_quantile_bins(&table.numeric_column(column)?, levels)?;
                factors.insert(name.clone(), FittedFactor::Quantile { binning });
            }
            FactorSpec::Region {
                name,
                cells_per_axis,
                ..
            } => {
                let columns = factor.region_columns(&table.columns)?;
                let projection = fit_projection(&table.numeric_matrix(&columns)?)?;
                let grid = GridPartition::new(*cells_per_axis)?;
                factors.insert(
                    name.clone(),
                    FittedFactor::Region {
                        columns,
                        projection,
                        grid,
                    },
                );
            }
            FactorSpec::Categorical { .. } | FactorSpec::Predicate { .. } => {}
        }
    }
    Ok(FittedArtifacts {
        format: ARTIFACT_FORMAT.into(),
        version: ARTIFACT_VERSION,
        reference: reference.into(),
        factors,
    })
}

fn numbered(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Per-factor value labels, per-record value indices, and the predicate
/// objects (needed for constraints).
struct DerivedColumn {
    factor: Factor,
    values: Vec<u32>,
    predicate: Option<PredicateFactor>,
    source_column: Option<String>,
}

fn derive_column(
    table: &RawTable,
    spec: &FactorSpec,
    artifacts: &FittedArtifacts,
) -> Result<DerivedColumn> {
    let fitted = |name: &str| {
        artifacts.factors.get(name).ok_or_else(|| {
            Error::Validation(format!(
                "fitted artifacts have no entry for factor {name:?}"
            ))
        })
    };
    match spec {
        FactorSpec::Categorical {
            name,
            column,
            values,
        } => {
            let factor = Factor::new(name.clone(), values.iter().cloned());
            let indices = table
                .text_column(column)?
                .iter()
                .zip(&table.ids)
                .map(|(&cell, id)| {
                    factor.value_index(cell).map(|v| v as u32).ok_or_else(|| {
                        Error::Validation(format!(
                            "record {id:?}: {cell:?} is not a declared value of {name:?}"
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(DerivedColumn {
                factor,
                values: indices,
                predicate: None,
                source_column: Some(column.clone()),
            })
        }
        FactorSpec::Predicate {
            name,
            column,
            domain,
            true_values,
        } => {
            let predicate = PredicateFactor::new(
                name.clone(),
                column.clone(),
                domain.clone(),
                true_values.iter().cloned(),
            )?;
            let flags = predicate.apply(&table.text_column(column)?)?;
            Ok(DerivedColumn {
                factor: Factor::new(name.clone(), PREDICATE_LABELS),
                values: flags.into_iter().map(u32::from).collect(),
                predicate: Some(predicate),
                source_column: Some(column.clone()),
            })
        }
        FactorSpec::Quantile { name, column, .. } => {
            let FittedFactor::Quantile { binning } = fitted(name)? else {
                return Err(Error::Validation(format!(
                    "fitted artifact for {name:?} is not a quantile binning"
                )));
            };
            let values = table
                .numeric_column(column)?
                .into_iter()
                .map(|x| binning.assign_bin(x).map(|b| b as u32))
                .collect::<Result<Vec<_>>>()?;
            Ok(DerivedColumn {
                factor: Factor::new(name.clone(), numbered(binning.bin_count())),
                values,
                predicate: None,
                source_column: Some(column.clone()),
            })
        }
        FactorSpec::Region { name, .. } => {
            let FittedFactor::Region {
                columns,
                projection,
                grid,
            } = fitted(name)?
            else {
                return Err(Error::Validation(format!(
                    "fitted artifact for {name:?} is not a region projection"
                )));
            };
            let points = projection.project_and_scale(&table.numeric_matrix(columns)?)?;
            let values = points
                .into_iter()
                .map(|(x, y)| grid.region_of(x, y))
                .collect::<Result<Vec<_>>>()?;
            Ok(DerivedColumn {
                factor: Factor::new(name.clone(), numbered(grid.region_count() as usize)),
                values,
                predicate: None,
                source_column: None,
            })
        }
    }
}

/// Derives the factor dataset for `table` using previously fitted artifacts.
///
/// When a predicate reads the same column as a categorical factor, the pairs
/// the predicate makes impossible are added to the schema as constraints.
pub fn derive_dataset(
    table: &RawTable,
    spec: &DerivationSpec,
    artifacts: &FittedArtifacts,
) -> Result<Dataset> {
    check_spec(spec)?;
    artifacts.check_version()?;
    let columns = spec
        .factors
        .iter()
        .map(|factor| derive_column(table, factor, artifacts))
        .collect::<Result<Vec<_>>>()?;

    let mut constraints = Vec::new();
    for (p_idx, pred_col) in columns.iter().enumerate() {
        let Some(predicate) = &pred_col.predicate else {
            continue;
        };
        for (c_idx, cat_col) in columns.iter().enumerate() {
            let is_categorical = matches!(spec.factors[c_idx], FactorSpec::Categorical { .. });
            if !is_categorical || cat_col.source_column != pred_col.source_column {
                continue;
            }
            for (v_idx, label) in cat_col.factor.values.iter().enumerate() {
                let Ok(holds) = predicate.evaluate(label) else {
                    continue;
                };
                let impossible = u32::from(!holds);
                constraints.push(ValueCombination::new(vec![
                    (c_idx as u32, v_idx as u32),
                    (p_idx as u32, impossible),
                ])?);
            }
        }
    }

    let factors = columns.iter().map(|c| c.factor.clone()).collect();
    let schema = Arc::new(FactorSchema::with_constraints(factors, constraints)?);
    let records = table
        .ids
        .iter()
        .enumerate()
        .map(|(i, id)| Record::new(id.clone(), columns.iter().map(|c| c.values[i]).collect()))
        .collect();
    Dataset::new(schema, records)
}
