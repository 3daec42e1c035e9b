//! On-disk formats.
//!
//! * Schema: JSON with `factors` (name + ordered values) and optional
//!   `constraints`, each a list of `{"factor", "value"}` pairs.
//! * Factor tables and raw feature tables: comma-separated with a header row
//!   and a required `id` column. Factor values match schema labels exactly.
//! * Fitted artifacts and derivation specs: JSON.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use combicov_core::derive::RawTable;
use combicov_core::{Dataset, Factor, FactorSchema, Record, ValueCombination};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const ID_COLUMN: &str = "id";

/// An input file's bytes together with its digest.
pub struct Input {
    pub bytes: Vec<u8>,
    pub sha256: String,
}

pub fn read_input(path: &Path) -> Result<Input> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    Ok(Input { bytes, sha256 })
}

pub fn write_output(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn write_stdout(bytes: &[u8]) -> Result<()> {
    std::io::stdout()
        .write_all(bytes)
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

pub fn parse_json<T: DeserializeOwned>(path: &Path, input: &Input) -> Result<T> {
    serde_json::from_slice(&input.bytes).map_err(|e| CliError::format(path, e.to_string()))
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("documents serialize");
    bytes.push(b'\n');
    bytes
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintPair {
    pub factor: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaDocument {
    pub factors: Vec<Factor>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<Vec<ConstraintPair>>,
}

impl SchemaDocument {
    pub fn from_schema(schema: &FactorSchema) -> Self {
        SchemaDocument {
            factors: schema.factors().to_vec(),
            constraints: schema
                .constraints()
                .iter()
                .map(|c| {
                    schema
                        .labels(c)
                        .into_iter()
                        .map(|(factor, value)| ConstraintPair {
                            factor: factor.into(),
                            value: value.into(),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn into_schema(self) -> combicov_core::Result<FactorSchema> {
        let plain = FactorSchema::new(self.factors.clone())?;
        let constraints = self
            .constraints
            .iter()
            .map(|pairs| {
                let pairs: Vec<(&str, &str)> = pairs
                    .iter()
                    .map(|p| (p.factor.as_str(), p.value.as_str()))
                    .collect();
                plain.combination(&pairs)
            })
            .collect::<combicov_core::Result<Vec<ValueCombination>>>()?;
        FactorSchema::with_constraints(self.factors, constraints)
    }
}

pub fn load_schema(path: &Path, input: &Input) -> Result<Arc<FactorSchema>> {
    let doc: SchemaDocument = parse_json(path, input)?;
    doc.into_schema()
        .map(Arc::new)
        .map_err(|e| CliError::format(path, e.to_string()))
}

fn csv_reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(bytes)
}

fn csv_error(path: &Path, err: csv::Error) -> CliError {
    match err.position() {
        Some(pos) => CliError::row(path, pos.line(), err.to_string()),
        None => CliError::format(path, err.to_string()),
    }
}

fn header(path: &Path, reader: &mut csv::Reader<&[u8]>) -> Result<Vec<String>> {
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(String::from)
        .collect();
    let mut sorted = header.clone();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(CliError::row(
            path,
            1,
            format!("column {:?} appears twice", w[0]),
        ));
    }
    if !header.iter().any(|c| c == ID_COLUMN) {
        return Err(CliError::row(
            path,
            1,
            format!("missing required column {ID_COLUMN:?}"),
        ));
    }
    Ok(header)
}

/// Reads a factor table against `schema`. Extra columns are ignored.
pub fn load_dataset(path: &Path, input: &Input, schema: &Arc<FactorSchema>) -> Result<Dataset> {
    let mut reader = csv_reader(&input.bytes);
    let header = header(path, &mut reader)?;
    let id_col = header.iter().position(|c| c == ID_COLUMN).unwrap();
    let columns = schema
        .factors()
        .iter()
        .map(|f| {
            header.iter().position(|c| *c == f.name).ok_or_else(|| {
                CliError::row(path, 1, format!("missing factor column {:?}", f.name))
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::new();
    let mut seen = std::collections::HashMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let id = &row[id_col];
        if id.is_empty() {
            return Err(CliError::row(path, line, "empty id"));
        }
        if let Some(first) = seen.insert(id.to_string(), line) {
            return Err(CliError::row(
                path,
                line,
                format!("id {id:?} already used on line {first}"),
            ));
        }
        let mut values = Vec::with_capacity(columns.len());
        for (factor, &col) in schema.factors().iter().zip(&columns) {
            let label = &row[col];
            if label.is_empty() {
                return Err(CliError::row(
                    path,
                    line,
                    format!("missing value for factor {:?}", factor.name),
                ));
            }
            let v = factor.value_index(label).ok_or_else(|| {
                CliError::row(
                    path,
                    line,
                    format!("{label:?} is not a value of factor {:?}", factor.name),
                )
            })?;
            values.push(v as u32);
        }
        let record = Record::new(id, values);
        schema
            .validate_record(&record)
            .map_err(|e| CliError::row(path, line, e.to_string()))?;
        records.push(record);
    }
    Ok(Dataset::new(schema.clone(), records)?)
}

/// Reads a raw feature table and the file line of each row.
pub fn load_raw_table(path: &Path, input: &Input) -> Result<(RawTable, Vec<u64>)> {
    let mut reader = csv_reader(&input.bytes);
    let columns = header(path, &mut reader)?;
    let id_col = columns.iter().position(|c| c == ID_COLUMN).unwrap();
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let id = row[id_col].to_string();
        if id.is_empty() {
            return Err(CliError::row(path, line, "empty id"));
        }
        if !seen.insert(id.clone()) {
            return Err(CliError::row(
                path,
                line,
                format!("id {id:?} appears twice"),
            ));
        }
        ids.push(id);
        rows.push(row.iter().map(String::from).collect());
        lines.push(line);
    }
    Ok((RawTable { columns, ids, rows }, lines))
}

/// Comma-separated output with a header row.
pub fn csv_bytes<I, R>(header: &[&str], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(header).expect("write to memory");
    for row in rows {
        writer.write_record(row).expect("write to memory");
    }
    writer.into_inner().expect("flush to memory")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(text: &str) -> Input {
        Input {
            bytes: text.as_bytes().to_vec(),
            sha256: String::new(),
        }
    }

    fn schema() -> Arc<FactorSchema> {
        let doc: SchemaDocument = serde_json::from_str(
            r#"{"factors":[{"name":"a","values":["0","1"]},{"name":"b","values":["x","y"]}]}"#,
        )
        .unwrap();
        Arc::new(doc.into_schema().unwrap())
    }

    #[test]
    fn reads_a_factor_table() {
        let data = load_dataset(
            Path::new("d.csv"),
            &input("id,b,extra,a\nr1,y,zz,0\nr2,x,,1\n"),
            &schema(),
        )
        .unwrap();
        assert_eq!(data.records()[0].values, vec![0, 1]);
        assert_eq!(data.records()[1].values, vec![1, 0]);
    }

    #[test]
    fn reports_line_numbers() {
        let path = Path::new("d.csv");
        let err = load_dataset(path, &input("id,a,b\nr1,0,x\nr2,1,z\n"), &schema()).unwrap_err();
        assert_eq!(
            err.to_string(),
            "d.csv:3: \"z\" is not a value of factor \"b\""
        );
        let err = load_dataset(path, &input("id,a,b\nr1,0,x\nr2,,x\n"), &schema()).unwrap_err();
        assert!(matches!(err, CliError::Row { line: 3, .. }), "{err}");
        let err = load_dataset(path, &input("id,a,b\nr1,0,x\nr1,1,x\n"), &schema()).unwrap_err();
        assert!(matches!(err, CliError::Row { line: 3, .. }), "{err}");
        let err = load_dataset(path, &input("id,a,b\nr1,0\n"), &schema()).unwrap_err();
        assert!(matches!(err, CliError::Row { line: 2, .. }), "{err}");
        let err = load_dataset(path, &input("id,a\nr1,0\n"), &schema()).unwrap_err();
        assert!(matches!(err, CliError::Row { line: 1, .. }), "{err}");
        let err = load_dataset(path, &input("a,b\n0,x\n"), &schema()).unwrap_err();
        assert!(matches!(err, CliError::Row { line: 1, .. }), "{err}");
        // labels are not trimmed or coerced
        assert!(load_dataset(path, &input("id,a,b\nr1, 0,x\n"), &schema()).is_err());
    }

    #[test]
    fn schema_document_round_trip_keeps_constraints() {
        let doc: SchemaDocument = serde_json::from_str(
            r#"{"factors":[{"name":"a","values":["0","1"]},{"name":"b","values":["x","y"]}],
                "constraints":[[{"factor":"b","value":"y"},{"factor":"a","value":"1"}]]}"#,
        )
        .unwrap();
        let schema = doc.into_schema().unwrap();
        assert_eq!(schema.constraints().len(), 1);
        let again = SchemaDocument::from_schema(&schema).into_schema().unwrap();
        assert_eq!(again, schema);
        let bad: SchemaDocument = serde_json::from_str(
            r#"{"factors":[{"name":"a","values":["0","1"]}],"constraints":[[{"factor":"q","value":"0"}]]}"#,
        )
        .unwrap();
        assert!(bad.into_schema().is_err());
    }

    #[test]
    fn csv_output_quotes_when_needed() {
        let bytes = csv_bytes(&["id", "flag"], [["a,b", "covered"], ["c", "not_covered"]]);
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            "id,flag\n\"a,b\",covered\nc,not_covered\n"
        );
    }
}
