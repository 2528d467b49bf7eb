//! Schema metadata parsing and streaming row access.
//!
//! Text formats are UTF-8 CSV (comma separated, `"` quoting, `|` joining
//! in-cell lists) or JSON arrays with one object per record.

mod catalog;
mod classes;
mod relationships;
mod rows;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalog::{parse_table_catalog, write_table_catalog};
pub use classes::{parse_document_classes, ClassRegistry, DocumentClassRecord, CHANGE_DOCUMENTS_CLASS};
pub use relationships::{
    infer_relationships, merge_relationships, parse_relationships, Origin, RelationshipRecord,
};
pub use rows::{load_row_data, Row, RowDataset, RowIter, RowOptions, RowSource};

/// Default per-table row cap.
pub const DEFAULT_ROW_CAP: usize = 1_000_000;
/// Default number of rows buffered per batch while streaming.
pub const DEFAULT_BATCH_SIZE: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IngestError {
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: u64, message: String },
    #[error("duplicate table `{0}`")]
    DuplicateTable(String),
    #[error("table `{0}` has missing or unresolved key columns")]
    MissingKeyColumns(String),
    #[error("table `{table}` declares column `{column}` twice")]
    DuplicateColumn { table: String, column: String },
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("relationship record {0} has mismatched or empty column lists")]
    ArityMismatch(usize),
    #[error("unknown column `{column}` in table `{table}`")]
    UnknownColumn { table: String, column: String },
    #[error("duplicate document class `{0}`")]
    DuplicateClass(String),
    #[error("document class `{0}` has no member tables")]
    EmptyClass(String),
    #[error("table `{table}` row {row} lacks a value for a key column")]
    MissingKeyValue { table: String, row: usize },
    #[error("table `{table}` exceeds the row cap of {cap}")]
    RowCapExceeded { table: String, cap: usize },
    #[error("i/o error: {0}")]
    Io(String),
}

impl IngestError {
    pub(crate) fn syntax(line: u64, message: impl Into<String>) -> Self {
        IngestError::Syntax {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn from_csv(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line()).unwrap_or(0);
        match err.kind() {
            csv::ErrorKind::Io(e) => IngestError::Io(e.to_string()),
            _ => IngestError::syntax(line, err.to_string()),
        }
    }

    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        if err.is_io() {
            IngestError::Io(err.to_string())
        } else {
            IngestError::syntax(err.line() as u64, err.to_string())
        }
    }
}

/// Input encoding of a metadata file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn from_extension(ext: &str) -> Option<Format> {
        match ext.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

/// Semantic domain of a column. Closed set; `client` marks the tenant
/// discriminator that inference must ignore.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    Client,
    DocumentNumber,
    ItemNumber,
    FiscalYear,
    Date,
    Time,
    Amount,
    Quantity,
    Currency,
    Unit,
    PartnerNumber,
    MaterialNumber,
    OrgUnit,
    Code,
    Indicator,
    Text,
}

impl Domain {
    pub const ALL: [Domain; 16] = [
        Domain::Client,
        Domain::DocumentNumber,
        Domain::ItemNumber,
        Domain::FiscalYear,
        Domain::Date,
        Domain::Time,
        Domain::Amount,
        Domain::Quantity,
        Domain::Currency,
        Domain::Unit,
        Domain::PartnerNumber,
        Domain::MaterialNumber,
        Domain::OrgUnit,
        Domain::Code,
        Domain::Indicator,
        Domain::Text,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Client => "client",
            Domain::DocumentNumber => "document-number",
            Domain::ItemNumber => "item-number",
            Domain::FiscalYear => "fiscal-year",
            Domain::Date => "date",
            Domain::Time => "time",
            Domain::Amount => "amount",
            Domain::Quantity => "quantity",
            Domain::Currency => "currency",
            Domain::Unit => "unit",
            Domain::PartnerNumber => "partner-number",
            Domain::MaterialNumber => "material-number",
            Domain::OrgUnit => "org-unit",
            Domain::Code => "code",
            Domain::Indicator => "indicator",
            Domain::Text => "text",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Domain::ALL
            .iter()
            .copied()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| format!("unknown domain `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnDefinition {
    pub name: String,
    pub domain: Domain,
    #[serde(default)]
    pub nullable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDefinition {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub columns: Vec<ColumnDefinition>,
    pub key_columns: Vec<String>,
}

impl TableDefinition {
    pub fn column(&self, name: &str) -> Option<&ColumnDefinition> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.column(name).is_some()
    }

    pub fn is_key(&self, name: &str) -> bool {
        self.key_columns.iter().any(|k| k == name)
    }

    /// Checks name syntax, column uniqueness and key resolution.
    pub fn validate(&self) -> Result<(), IngestError> {
        if !is_table_ident(&self.name) {
            return Err(IngestError::syntax(0, format!("invalid table name `{}`", self.name)));
        }
        let mut seen = std::collections::HashSet::new();
        for col in &self.columns {
            if !is_table_ident(&col.name) {
                return Err(IngestError::syntax(
                    0,
                    format!("invalid column name `{}` in `{}`", col.name, self.name),
                ));
            }
            if !seen.insert(col.name.as_str()) {
                return Err(IngestError::DuplicateColumn {
                    table: self.name.clone(),
                    column: col.name.clone(),
                });
            }
        }
        if self.key_columns.is_empty() || self.key_columns.iter().any(|k| !seen.contains(k.as_str())) {
            return Err(IngestError::MissingKeyColumns(self.name.clone()));
        }
        Ok(())
    }
}

/// Validated table catalog with name lookup.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    tables: Vec<TableDefinition>,
    index: HashMap<String, usize>,
}

impl Catalog {
    pub fn new(tables: Vec<TableDefinition>) -> Result<Self, IngestError> {
        let mut index = HashMap::with_capacity(tables.len());
        for (i, t) in tables.iter().enumerate() {
            t.validate()?;
            if index.insert(t.name.clone(), i).is_some() {
                return Err(IngestError::DuplicateTable(t.name.clone()));
            }
        }
        Ok(Catalog { tables, index })
    }

    pub fn get(&self, name: &str) -> Option<&TableDefinition> {
        self.index.get(name).map(|&i| &self.tables[i])
    }

    pub fn require(&self, name: &str) -> Result<&TableDefinition, IngestError> {
        self.get(name).ok_or_else(|| IngestError::UnknownTable(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn tables(&self) -> &[TableDefinition] {
        &self.tables
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }
}

/// Uppercase identifier: `[A-Z_][A-Z0-9_]*`.
pub(crate) fn is_table_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_uppercase() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

/// Lowercase identifier used for document classes: `[a-z_][a-z0-9_]*`.
pub(crate) fn is_class_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

pub(crate) fn split_list(cell: &str) -> Vec<String> {
    if cell.trim().is_empty() {
        return Vec::new();
    }
    cell.split('|').map(|s| s.trim().to_string()).collect()
}
