//! Cohort ingest: delimited-text loading with missing-value tracking,
//! completeness filtering, and rule-based assignment of the four diagnostic
//! classes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cell contents treated as missing.
pub const DEFAULT_MISSING_SENTINELS: [&str; 3] = ["", "NA", "NaN"];

/// How a raw column is typed at ingest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnType {
    /// Parsed as f64.
    Real,
    /// Integer-coded categorical; the map translates raw cell text to codes.
    Categorical(BTreeMap<String, i64>),
    /// Carried as-is, never part of the feature matrix.
    Text,
}

/// A typed column with one entry per row. Missing cells hold a placeholder
/// and are flagged in the table's missing mask.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Real(Vec<f64>),
    Integer(Vec<i64>),
    Text(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Real(v) => v.len(),
            Column::Integer(v) => v.len(),
            Column::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Numeric view of a cell, if the column is numeric.
    pub fn numeric(&self, row: usize) -> Option<f64> {
        match self {
            Column::Real(v) => Some(v[row]),
            Column::Integer(v) => Some(v[row] as f64),
            Column::Text(_) => None,
        }
    }

    pub fn text(&self, row: usize) -> String {
        match self {
            Column::Real(v) => format!("{}", v[row]),
            Column::Integer(v) => format!("{}", v[row]),
            Column::Text(v) => v[row].clone(),
        }
    }

    fn keep_rows(&self, keep: &[usize]) -> Column {
        match self {
            Column::Real(v) => Column::Real(keep.iter().map(|&i| v[i]).collect()),
            Column::Integer(v) => Column::Integer(keep.iter().map(|&i| v[i]).collect()),
            Column::Text(v) => Column::Text(keep.iter().map(|&i| v[i].clone()).collect()),
        }
    }
}

/// Schema handed to [`load_table`]: per-column types plus the missing-value
/// sentinels. Columns absent from the map load as text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSchema {
    pub columns: BTreeMap<String, ColumnType>,
    #[serde(default = "default_sentinels")]
    pub missing_sentinels: Vec<String>,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
}

fn default_sentinels() -> Vec<String> {
    DEFAULT_MISSING_SENTINELS.iter().map(|s| s.to_string()).collect()
}

fn default_delimiter() -> char {
    ','
}

impl Default for TableSchema {
    fn default() -> Self {
        TableSchema {
            columns: BTreeMap::new(),
            missing_sentinels: default_sentinels(),
            delimiter: ',',
        }
    }
}

/// Rectangular raw table with a per-cell missing mask.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub column_names: Vec<String>,
    pub columns: Vec<Column>,
    pub n_rows: usize,
    /// missing_mask[col][row]
    pub missing_mask: Vec<Vec<bool>>,
}

impl RawTable {
    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.column_names
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Schema(format!("unknown column '{name}'")))
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        Ok(&self.columns[self.column_index(name)?])
    }

    pub fn is_missing(&self, col: usize, row: usize) -> bool {
        self.missing_mask[col][row]
    }
}

/// Load a delimited text file with a header row.
///
/// Empty cells and configured sentinels are flagged missing. Unparseable
/// numeric cells and rows with the wrong field count are parse errors citing
/// the 1-based data row.
pub fn load_table(path: &Path, schema: &TableSchema) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter as u8)
        .has_headers(true)
        .flexible(true)
        .from_path(path)?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse {
            row: 0,
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.is_empty() {
        return Err(Error::Schema("empty header row".into()));
    }
    {
        let mut seen = std::collections::BTreeSet::new();
        for h in &headers {
            if h.is_empty() {
                return Err(Error::Schema("empty column name in header".into()));
            }
            if !seen.insert(h) {
                return Err(Error::Schema(format!("duplicate column name '{h}'")));
            }
        }
    }
    for name in schema.columns.keys() {
        if !headers.contains(name) {
            return Err(Error::Schema(format!(
                "schema references column '{name}' absent from the file header"
            )));
        }
    }

    let n_cols = headers.len();
    let mut columns: Vec<Column> = headers
        .iter()
        .map(|h| match schema.columns.get(h) {
            Some(ColumnType::Real) => Column::Real(Vec::new()),
            Some(ColumnType::Categorical(_)) => Column::Integer(Vec::new()),
            _ => Column::Text(Vec::new()),
        })
        .collect();
    let mut missing_mask: Vec<Vec<bool>> = vec![Vec::new(); n_cols];

    for (idx, record) in reader.records().enumerate() {
        let row_no = idx + 1;
        let record = record.map_err(|e| Error::Parse {
            row: row_no,
            message: e.to_string(),
        })?;
        if record.len() != n_cols {
            return Err(Error::Parse {
                row: row_no,
                message: format!("expected {n_cols} fields, found {}", record.len()),
            });
        }
        for (c, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            let missing = schema.missing_sentinels.iter().any(|s| s == cell);
            missing_mask[c].push(missing);
            match &mut columns[c] {
                Column::Real(v) => {
                    if missing {
                        v.push(f64::NAN);
                    } else {
                        v.push(cell.parse::<f64>().map_err(|_| Error::Parse {
                            row: row_no,
                            message: format!(
                                "column '{}' expects a real value, got '{cell}'",
                                headers[c]
                            ),
                        })?);
                    }
                }
                Column::Integer(v) => {
                    if missing {
                        v.push(i64::MIN);
                    } else {
                        let codes = match schema.columns.get(&headers[c]) {
                            Some(ColumnType::Categorical(codes)) => codes,
                            _ => unreachable!(),
                        };
                        let code = codes.get(cell).copied().or_else(|| cell.parse().ok());
                        match code {
                            Some(code) => v.push(code),
                            None => {
                                return Err(Error::Parse {
                                    row: row_no,
                                    message: format!(
                                        "column '{}' has no categorical code for '{cell}'",
                                        headers[c]
                                    ),
                                })
                            }
                        }
                    }
                }
                Column::Text(v) => v.push(cell.to_string()),
            }
        }
    }
    let n_rows = missing_mask.first().map_or(0, |m| m.len());
    Ok(RawTable {
        column_names: headers,
        columns,
        n_rows,
        missing_mask,
    })
}

/// Keep exactly the rows with no missing value in any scoped column,
/// preserving row order. Idempotent.
pub fn drop_incomplete(table: &RawTable, scope: &[String]) -> Result<RawTable> {
    let scope_idx: Vec<usize> = scope
        .iter()
        .map(|name| table.column_index(name))
        .collect::<Result<_>>()?;
    let keep: Vec<usize> = (0..table.n_rows)
        .filter(|&row| scope_idx.iter().all(|&c| !table.missing_mask[c][row]))
        .collect();
    Ok(RawTable {
        column_names: table.column_names.clone(),
        columns: table.columns.iter().map(|c| c.keep_rows(&keep)).collect(),
        n_rows: keep.len(),
        missing_mask: table
            .missing_mask
            .iter()
            .map(|m| keep.iter().map(|&i| m[i]).collect())
            .collect(),
    })
}

/// Comparison operator in a label predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
}

impl CmpOp {
    fn apply(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
        }
    }
}

/// One threshold clause over a named numeric column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub column: String,
    pub op: CmpOp,
    pub value: f64,
}

/// How a predicate combines its clauses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Combine {
    #[default]
    All,
    Any,
}

/// Conjunction/disjunction of threshold clauses over diagnostic columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    #[serde(default)]
    pub combine: Combine,
    pub clauses: Vec<Comparison>,
}

impl Predicate {
    pub fn columns(&self) -> impl Iterator<Item = &str> {
        self.clauses.iter().map(|c| c.column.as_str())
    }

    fn evaluate(&self, table: &RawTable, row: usize) -> Result<bool> {
        let mut results = Vec::with_capacity(self.clauses.len());
        for clause in &self.clauses {
            let idx = table.column_index(&clause.column)?;
            if table.missing_mask[idx][row] {
                return Err(Error::Schema(format!(
                    "diagnostic column '{}' has a missing value at data row {}; run drop_incomplete first",
                    clause.column,
                    row + 1
                )));
            }
            let value = table.columns[idx].numeric(row).ok_or_else(|| {
                Error::Schema(format!(
                    "diagnostic column '{}' is not numeric",
                    clause.column
                ))
            })?;
            results.push(clause.op.apply(value, clause.value));
        }
        Ok(match self.combine {
            Combine::All => results.iter().all(|&b| b),
            Combine::Any => results.iter().any(|&b| b),
        })
    }
}

/// Diagnostic rule mapping threshold predicates to the four classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRule {
    pub ad: Predicate,
    pub late: Predicate,
}

impl LabelRule {
    /// Placeholder thresholds for documentation and synthetic fixtures:
    /// AD when Braak >= 4 and CERAD >= 2, LATE when TDP-43 stage >= 1.
    /// Real analyses should supply cohort-specific criteria.
    pub fn default_demo() -> Self {
        LabelRule {
            ad: Predicate {
                combine: Combine::All,
                clauses: vec![
                    Comparison {
                        column: "braak".into(),
                        op: CmpOp::Ge,
                        value: 4.0,
                    },
                    Comparison {
                        column: "cerad".into(),
                        op: CmpOp::Ge,
                        value: 2.0,
                    },
                ],
            },
            late: Predicate {
                combine: Combine::All,
                clauses: vec![Comparison {
                    column: "tdp43".into(),
                    op: CmpOp::Ge,
                    value: 1.0,
                }],
            },
        }
    }
}

/// The four diagnostic classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClassLabel {
    LateAd,
    Late,
    Ad,
    Control,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 4] = [
        ClassLabel::LateAd,
        ClassLabel::Late,
        ClassLabel::Ad,
        ClassLabel::Control,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::LateAd => "LATE_AD",
            ClassLabel::Late => "LATE",
            ClassLabel::Ad => "AD",
            ClassLabel::Control => "CONTROL",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "LATE_AD" | "LATE+AD" | "LATEAD" => Ok(ClassLabel::LateAd),
            "LATE" => Ok(ClassLabel::Late),
            "AD" => Ok(ClassLabel::Ad),
            "CONTROL" => Ok(ClassLabel::Control),
            other => Err(Error::Config(format!("unknown class label '{other}'"))),
        }
    }
}

/// Per-row stratification attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct RowAttrs {
    pub sex: String,
    pub race: String,
    pub age: f64,
}

/// Which table columns feed labels, strata, and identifiers. Everything
/// numeric that is not claimed here (and not referenced by the label rule)
/// becomes a feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortColumns {
    #[serde(default)]
    pub id: Option<String>,
    pub sex: String,
    pub race: String,
    pub age: String,
    /// Extra columns to keep out of the feature matrix.
    #[serde(default)]
    pub exclude: Vec<String>,
}

/// Fully labeled analysis-ready cohort: a complete numeric feature matrix,
/// one class per row, and stratification attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCohort {
    pub features: DMatrix<f64>,
    pub feature_names: Vec<String>,
    pub labels: Vec<ClassLabel>,
    pub strata_attrs: Vec<RowAttrs>,
}

impl LabeledCohort {
    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn class_counts(&self) -> BTreeMap<ClassLabel, usize> {
        let mut counts = BTreeMap::new();
        for label in ClassLabel::ALL {
            counts.insert(label, 0);
        }
        for &l in &self.labels {
            *counts.get_mut(&l).unwrap() += 1;
        }
        counts
    }
}

/// Assign one of the four classes to every row and assemble the feature
/// matrix.
///
/// Label logic: both predicates true gives LATE_AD, only the LATE predicate
/// LATE, only the AD predicate AD, neither CONTROL. Diagnostic columns, the
/// ID column, strata columns, and explicit exclusions stay out of the
/// feature matrix; all remaining numeric columns must be complete.
pub fn assign_labels(
    table: &RawTable,
    rule: &LabelRule,
    columns: &CohortColumns,
) -> Result<LabeledCohort> {
    // Validate referenced columns up front.
    for pred in [&rule.ad, &rule.late] {
        for col in pred.columns() {
            table.column_index(col)?;
        }
    }
    let sex_idx = table.column_index(&columns.sex)?;
    let race_idx = table.column_index(&columns.race)?;
    let age_idx = table.column_index(&columns.age)?;

    let mut excluded: Vec<&str> = rule.ad.columns().chain(rule.late.columns()).collect();
    excluded.push(&columns.sex);
    excluded.push(&columns.race);
    excluded.push(&columns.age);
    if let Some(id) = &columns.id {
        excluded.push(id);
    }
    for name in &columns.exclude {
        table.column_index(name)?;
        excluded.push(name);
    }

    let feature_idx: Vec<usize> = (0..table.column_names.len())
        .filter(|&i| {
            !excluded.contains(&table.column_names[i].as_str())
                && !matches!(table.columns[i], Column::Text(_))
        })
        .collect();
    let feature_names: Vec<String> = feature_idx
        .iter()
        .map(|&i| table.column_names[i].clone())
        .collect();

    for &i in &feature_idx {
        if table.missing_mask[i].iter().any(|&m| m) {
            return Err(Error::Schema(format!(
                "feature column '{}' has missing values; run drop_incomplete over the feature scope first",
                table.column_names[i]
            )));
        }
    }

    let n = table.n_rows;
    let m = feature_idx.len();
    let mut features = DMatrix::zeros(n, m);
    let mut labels = Vec::with_capacity(n);
    let mut strata_attrs = Vec::with_capacity(n);
    for row in 0..n {
        let is_ad = rule.ad.evaluate(table, row)?;
        let is_late = rule.late.evaluate(table, row)?;
        labels.push(match (is_late, is_ad) {
            (true, true) => ClassLabel::LateAd,
            (true, false) => ClassLabel::Late,
            (false, true) => ClassLabel::Ad,
            (false, false) => ClassLabel::Control,
        });
        for (j, &col) in feature_idx.iter().enumerate() {
            features[(row, j)] = table.columns[col].numeric(row).unwrap();
        }
        if table.missing_mask[age_idx][row]
            || table.missing_mask[sex_idx][row]
            || table.missing_mask[race_idx][row]
        {
            return Err(Error::Schema(format!(
                "strata column missing at data row {}; run drop_incomplete first",
                row + 1
            )));
        }
        let age = table.columns[age_idx].numeric(row).ok_or_else(|| {
            Error::Schema(format!("age column '{}' is not numeric", columns.age))
        })?;
        strata_attrs.push(RowAttrs {
            sex: table.columns[sex_idx].text(row),
            race: table.columns[race_idx].text(row),
            age,
        });
    }

    Ok(LabeledCohort {
        features,
        feature_names,
        labels,
        strata_attrs,
    })
}
