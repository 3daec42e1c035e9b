use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;
use combicov_core::construct::{
    coverage_gap_report, partition_relaxed, partition_strict, select_labeling_batch, CoverMode,
    PartitionResult, SelectionRequest,
};
use combicov_core::derive::{
    derive_dataset, fit_artifacts, DerivationSpec, FactorSpec, FittedArtifacts,
};
use combicov_core::{
    combinatorial_coverage, sdcc, Dataset, FactorSchema, Ratio, ValueCombination, DEFAULT_STRENGTH,
};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::formats::{
    csv_bytes, load_dataset, load_raw_table, load_schema, parse_json, read_input, to_json_bytes,
    write_output, write_stdout, SchemaDocument, ID_COLUMN,
};

pub const TOOL_NAME: &str = "combicov";

#[derive(Debug, Serialize)]
struct Tool {
    name: &'static str,
    version: &'static str,
}

#[derive(Debug, Serialize)]
struct InputDigest {
    role: &'static str,
    path: String,
    sha256: String,
}

/// Every report carries the tool version, its flags and digests of its inputs.
#[derive(Debug, Serialize)]
struct Document<'a, F: Serialize, R: Serialize> {
    tool: Tool,
    command: &'static str,
    flags: &'a F,
    inputs: Vec<InputDigest>,
    result: R,
}

struct Provenance {
    inputs: Vec<InputDigest>,
}

impl Provenance {
    fn new() -> Self {
        Provenance { inputs: Vec::new() }
    }

    fn read(&mut self, role: &'static str, path: &Path) -> Result<crate::formats::Input> {
        let input = read_input(path)?;
        self.inputs.push(InputDigest {
            role,
            path: path.display().to_string(),
            sha256: input.sha256.clone(),
        });
        Ok(input)
    }

    fn document<F: Serialize, R: Serialize>(
        self,
        command: &'static str,
        flags: &F,
        result: R,
    ) -> Vec<u8> {
        to_json_bytes(&Document {
            tool: Tool {
                name: TOOL_NAME,
                version: env!("CARGO_PKG_VERSION"),
            },
            command,
            flags,
            inputs: self.inputs,
            result,
        })
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => write_output(path, bytes),
        None => write_stdout(bytes),
    }
}

#[derive(Debug, Serialize)]
struct RatioDoc {
    numerator: u64,
    denominator: u64,
    value: f64,
}

impl From<Ratio> for RatioDoc {
    fn from(r: Ratio) -> Self {
        RatioDoc {
            numerator: r.numerator,
            denominator: r.denominator,
            value: r.value(),
        }
    }
}

fn combination_labels(schema: &FactorSchema, combo: &ValueCombination) -> Vec<[String; 2]> {
    schema
        .labels(combo)
        .into_iter()
        .map(|(f, v)| [f.to_string(), v.to_string()])
        .collect()
}

fn load_pair(
    prov: &mut Provenance,
    schema_path: &Path,
    first: (&'static str, &Path),
    second: (&'static str, &Path),
) -> Result<(Arc<FactorSchema>, Dataset, Dataset)> {
    let schema = load_schema(schema_path, &prov.read("schema", schema_path)?)?;
    let a = load_dataset(first.1, &prov.read(first.0, first.1)?, &schema)?;
    let b = load_dataset(second.1, &prov.read(second.0, second.1)?, &schema)?;
    Ok((schema, a, b))
}

// ---------------------------------------------------------------- derive

#[derive(Debug, Args, Serialize)]
pub struct DeriveArgs {
    /// Raw feature table (CSV with an `id` column)
    #[arg(long)]
    pub data: PathBuf,
    /// Derivation spec (JSON)
    #[arg(long)]
    pub spec: PathBuf,
    /// Fitted-artifact document: written with --fit, read otherwise
    #[arg(long)]
    pub artifacts: PathBuf,
    /// Fit quantile edges and projections on --data (the reference set)
    #[arg(long)]
    pub fit: bool,
    /// Name recorded for the reference set when fitting (defaults to the --data path)
    #[arg(long)]
    pub reference: Option<String>,
    /// Factor table to write
    #[arg(long)]
    pub out: PathBuf,
    /// Schema document to write for the factor table
    #[arg(long)]
    pub schema_out: Option<PathBuf>,
}

/// Checks numeric cells up front so that bad rows are reported by line.
fn check_numeric_cells(
    path: &Path,
    table: &combicov_core::derive::RawTable,
    lines: &[u64],
    spec: &DerivationSpec,
) -> Result<()> {
    for factor in &spec.factors {
        let columns = match factor {
            FactorSpec::Quantile { column, .. } => vec![column.clone()],
            FactorSpec::Region { .. } => factor.region_columns(&table.columns)?,
            _ => continue,
        };
        for column in &columns {
            let Ok(col) = table.column_index(column) else {
                return Err(CliError::row(path, 1, format!("missing column {column:?}")));
            };
            for (row, &line) in table.rows.iter().zip(lines) {
                let cell = &row[col];
                match cell.trim().parse::<f64>() {
                    Ok(x) if x.is_finite() => {}
                    _ => {
                        return Err(CliError::row(
                            path,
                            line,
                            format!("column {column:?}: {cell:?} is not a finite number"),
                        ))
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn derive(args: &DeriveArgs) -> Result<()> {
    let data = read_input(&args.data)?;
    let spec: DerivationSpec = parse_json(&args.spec, &read_input(&args.spec)?)?;
    let (table, lines) = load_raw_table(&args.data, &data)?;
    check_numeric_cells(&args.data, &table, &lines, &spec)?;

    let artifacts = if args.fit {
        let reference = args
            .reference
            .clone()
            .unwrap_or_else(|| args.data.display().to_string());
        let fitted = fit_artifacts(&table, &spec, reference)?;
        write_output(&args.artifacts, &to_json_bytes(&fitted))?;
        fitted
    } else {
        if args.reference.is_some() {
            return Err(CliError::Usage(
                "--reference only applies with --fit".into(),
            ));
        }
        parse_json::<FittedArtifacts>(&args.artifacts, &read_input(&args.artifacts)?)?
    };

    let dataset = derive_dataset(&table, &spec, &artifacts)?;
    let schema = dataset.schema();
    let mut header = vec![ID_COLUMN];
    header.extend(schema.factors().iter().map(|f| f.name.as_str()));
    let rows = dataset.records().iter().map(|record| {
        std::iter::once(record.id.as_str()).chain(
            record
                .values
                .iter()
                .enumerate()
                .map(|(f, &v)| schema.factors()[f].values[v as usize].as_str()),
        )
    });
    write_output(&args.out, &csv_bytes(&header, rows))?;
    if let Some(path) = &args.schema_out {
        write_output(path, &to_json_bytes(&SchemaDocument::from_schema(schema)))?;
    }
    Ok(())
}

// ---------------------------------------------------------------- coverage

#[derive(Debug, Args, Serialize)]
pub struct CoverageArgs {
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Interaction strength
    #[arg(short = 't', long = "strength", default_value_t = DEFAULT_STRENGTH)]
    pub t: usize,
    /// Report path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct CoverageResult {
    t: usize,
    records: usize,
    covered_count: u64,
    universe_count: u64,
    cc: RatioDoc,
}

pub fn coverage(args: &CoverageArgs) -> Result<()> {
    let mut prov = Provenance::new();
    let schema = load_schema(&args.schema, &prov.read("schema", &args.schema)?)?;
    let data = load_dataset(&args.data, &prov.read("data", &args.data)?, &schema)?;
    let report = combinatorial_coverage(&data, args.t)?;
    let result = CoverageResult {
        t: report.t,
        records: data.len(),
        covered_count: report.covered_count,
        universe_count: report.universe_count,
        cc: report.cc.into(),
    };
    emit(
        args.out.as_deref(),
        &prov.document("coverage", args, result),
    )
}

// ---------------------------------------------------------------- sdcc

#[derive(Debug, Args, Serialize)]
pub struct SdccArgs {
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long)]
    pub source: PathBuf,
    #[arg(short = 't', long = "strength", default_value_t = DEFAULT_STRENGTH)]
    pub t: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct SdccResult {
    t: usize,
    target_records: usize,
    source_records: usize,
    target_count: u64,
    missing_count: u64,
    sdcc: RatioDoc,
    not_covered_records: usize,
    missing_combinations: Vec<Vec<[String; 2]>>,
}

pub fn sdcc_cmd(args: &SdccArgs) -> Result<()> {
    let mut prov = Provenance::new();
    let (schema, target, source) = load_pair(
        &mut prov,
        &args.schema,
        ("target", &args.target),
        ("source", &args.source),
    )?;
    let report = sdcc(&target, &source, args.t)?;
    let result = SdccResult {
        t: report.t,
        target_records: target.len(),
        source_records: source.len(),
        target_count: report.target_count,
        missing_count: report.missing_count,
        sdcc: report.sdcc.into(),
        not_covered_records: report.not_covered_count(),
        missing_combinations: report
            .missing_combinations
            .iter()
            .map(|c| combination_labels(&schema, c))
            .collect(),
    };
    emit(args.out.as_deref(), &prov.document("sdcc", args, result))
}

// ---------------------------------------------------------------- partition

#[derive(Debug, Args, Serialize)]
pub struct PartitionArgs {
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long)]
    pub source: PathBuf,
    #[arg(short = 't', long = "strength", default_value_t = DEFAULT_STRENGTH)]
    pub t: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
    pub mode: ModeArg,
    /// Factor holding embedding-grid regions (required for relaxed mode)
    #[arg(long)]
    pub region_factor: Option<String>,
    /// Per-record partition table (CSV)
    #[arg(long)]
    pub out: PathBuf,
    /// Summary document (stdout when omitted)
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Strict,
    Relaxed,
}

impl From<ModeArg> for CoverMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Strict => CoverMode::Strict,
            ModeArg::Relaxed => CoverMode::Relaxed,
        }
    }
}

fn require_region(mode: ModeArg, region: &Option<String>) -> Result<()> {
    if mode == ModeArg::Relaxed && region.is_none() {
        return Err(CliError::Usage(
            "--mode relaxed requires --region-factor".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct PartitionSummary {
    mode: CoverMode,
    t: usize,
    target_records: usize,
    covered_count: usize,
    not_covered_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    region_factor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    implicated_regions: Option<Vec<String>>,
    table: String,
}

fn partition_table(schema: &FactorSchema, result: &PartitionResult) -> Vec<u8> {
    let relaxed = result.mode == CoverMode::Relaxed;
    let mut header = vec!["id", "flag", "missing_count"];
    if relaxed {
        header.push("region");
    }
    let rows = result.rows.iter().map(|row| {
        let mut cells = vec![
            row.id.clone(),
            if row.not_covered {
                "not_covered"
            } else {
                "covered"
            }
            .to_string(),
            row.missing_count.to_string(),
        ];
        if let (Some(f), Some(v)) = (result.region_factor, row.region) {
            cells.push(schema.factors()[f].values[v as usize].clone());
        }
        cells
    });
    csv_bytes(&header, rows)
}

pub fn partition(args: &PartitionArgs) -> Result<()> {
    require_region(args.mode, &args.region_factor)?;
    let mut prov = Provenance::new();
    let (schema, target, source) = load_pair(
        &mut prov,
        &args.schema,
        ("target", &args.target),
        ("source", &args.source),
    )?;
    let result = match args.mode {
        ModeArg::Strict => partition_strict(&target, &source, args.t)?,
        ModeArg::Relaxed => partition_relaxed(
            &target,
            &source,
            args.t,
            args.region_factor.as_deref().unwrap(),
        )?,
    };
    write_output(&args.out, &partition_table(&schema, &result))?;
    let summary = PartitionSummary {
        mode: result.mode,
        t: result.t,
        target_records: target.len(),
        covered_count: result.covered_count(),
        not_covered_count: result.not_covered_count(),
        region_factor: args
            .region_factor
            .clone()
            .filter(|_| args.mode == ModeArg::Relaxed),
        implicated_regions: result.region_factor.map(|f| {
            result
                .implicated_regions
                .iter()
                .map(|&v| schema.factors()[f].values[v as usize].clone())
                .collect()
        }),
        table: args.out.display().to_string(),
    };
    emit(
        args.summary.as_deref(),
        &prov.document("partition", args, summary),
    )
}

// ---------------------------------------------------------------- select

#[derive(Debug, Args, Serialize)]
pub struct SelectArgs {
    #[arg(long)]
    pub schema: PathBuf,
    /// Unlabeled candidates
    #[arg(long)]
    pub pool: PathBuf,
    /// Data the model has already seen
    #[arg(long)]
    pub source: PathBuf,
    #[arg(short = 't', long = "strength", default_value_t = DEFAULT_STRENGTH)]
    pub t: usize,
    #[arg(long)]
    pub n_random: usize,
    #[arg(long, default_value_t = 0)]
    pub n_not_covered: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
    pub mode: ModeArg,
    #[arg(long)]
    pub region_factor: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Selection table (CSV)
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct SelectSummary {
    seed: u64,
    mode: CoverMode,
    pool_records: usize,
    requested_random: usize,
    requested_not_covered: usize,
    stratum_size: usize,
    selected_random: usize,
    selected_not_covered: usize,
    shortfall: usize,
    table: String,
}

pub fn select(args: &SelectArgs) -> Result<()> {
    require_region(args.mode, &args.region_factor)?;
    let mut prov = Provenance::new();
    let (_, pool, source) = load_pair(
        &mut prov,
        &args.schema,
        ("pool", &args.pool),
        ("source", &args.source),
    )?;
    let request = SelectionRequest {
        t: args.t,
        n_random: args.n_random,
        n_not_covered: args.n_not_covered,
        mode: args.mode.into(),
        region_factor: args.region_factor.clone(),
        seed: args.seed,
    };
    let plan = select_labeling_batch(&pool, &source, &request)?;
    let rows = plan
        .not_covered_ids
        .iter()
        .map(|id| [id.as_str(), "not_covered"])
        .chain(plan.random_ids.iter().map(|id| [id.as_str(), "random"]));
    write_output(&args.out, &csv_bytes(&["id", "stratum"], rows))?;
    let summary = SelectSummary {
        seed: plan.seed,
        mode: plan.mode,
        pool_records: pool.len(),
        requested_random: args.n_random,
        requested_not_covered: args.n_not_covered,
        stratum_size: plan.stratum_size,
        selected_random: plan.random_ids.len(),
        selected_not_covered: plan.not_covered_ids.len(),
        shortfall: plan.shortfall,
        table: args.out.display().to_string(),
    };
    emit(
        args.summary.as_deref(),
        &prov.document("select", args, summary),
    )
}

// ---------------------------------------------------------------- report

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    #[arg(long)]
    pub schema: PathBuf,
    /// Data to diagnose (e.g. test data)
    #[arg(long)]
    pub target: PathBuf,
    /// Reference data (e.g. training data)
    #[arg(long)]
    pub source: PathBuf,
    #[arg(short = 't', long = "strength", default_value_t = DEFAULT_STRENGTH)]
    pub t: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct ReportResult {
    t: usize,
    target_records: usize,
    source_records: usize,
    sdcc_forward: RatioDoc,
    sdcc_backward: Option<RatioDoc>,
    covered_count: usize,
    not_covered_count: usize,
    factors: Vec<combicov_core::construct::FactorGap>,
}

pub fn report(args: &ReportArgs) -> Result<()> {
    let mut prov = Provenance::new();
    let (_, target, source) = load_pair(
        &mut prov,
        &args.schema,
        ("target", &args.target),
        ("source", &args.source),
    )?;
    let gap = coverage_gap_report(&target, &source, args.t)?;
    let result = ReportResult {
        t: gap.t,
        target_records: target.len(),
        source_records: source.len(),
        sdcc_forward: gap.sdcc_forward.into(),
        sdcc_backward: gap.sdcc_backward.map(Into::into),
        covered_count: gap.covered_count,
        not_covered_count: gap.not_covered_count,
        factors: gap.factors,
    };
    emit(args.out.as_deref(), &prov.document("report", args, result))
}
