use std::collections::HashSet;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{split_list, Catalog, Domain, Format, IngestError, TableDefinition};

const RELATIONSHIP_HEADER: [&str; 4] = ["from_table", "from_columns", "to_table", "to_columns"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    #[default]
    Declared,
    Inferred,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Declared => "declared",
            Origin::Inferred => "inferred",
        }
    }
}

/// A column-level link between two catalog tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationshipRecord {
    pub from_table: String,
    pub from_columns: Vec<String>,
    pub to_table: String,
    pub to_columns: Vec<String>,
    #[serde(default)]
    pub origin: Origin,
}

impl RelationshipRecord {
    /// Unordered endpoint pair, used for declared/inferred conflict detection.
    pub fn endpoints(&self) -> (&str, &str) {
        if self.from_table <= self.to_table {
            (&self.from_table, &self.to_table)
        } else {
            (&self.to_table, &self.from_table)
        }
    }

    fn resolve(&self, index: usize, catalog: &Catalog) -> Result<(), IngestError> {
        if self.from_columns.is_empty() || self.from_columns.len() != self.to_columns.len() {
            return Err(IngestError::ArityMismatch(index));
        }
        for (table, columns) in [(&self.from_table, &self.from_columns), (&self.to_table, &self.to_columns)] {
            let def = catalog.require(table)?;
            if let Some(missing) = columns.iter().find(|c| !def.has_column(c)) {
                return Err(IngestError::UnknownColumn {
                    table: table.clone(),
                    column: missing.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Parses declared relationships and resolves them against `catalog`.
/// `ArityMismatch` carries the zero-based record index.
pub fn parse_relationships<R: Read>(
    source: R,
    format: Format,
    catalog: &Catalog,
) -> Result<Vec<RelationshipRecord>, IngestError> {
    let records: Vec<RelationshipRecord> = match format {
        Format::Json => serde_json::from_reader(source).map_err(IngestError::from_json)?,
        Format::Csv => {
            let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
            let header = reader.headers().map_err(IngestError::from_csv)?;
            if header.iter().ne(RELATIONSHIP_HEADER.iter().copied()) {
                return Err(IngestError::syntax(
                    1,
                    format!("expected header `{}`", RELATIONSHIP_HEADER.join(",")),
                ));
            }
            let mut out = Vec::new();
            for record in reader.records() {
                let record = record.map_err(IngestError::from_csv)?;
                out.push(RelationshipRecord {
                    from_table: record[0].trim().to_string(),
                    from_columns: split_list(&record[1]),
                    to_table: record[2].trim().to_string(),
                    to_columns: split_list(&record[3]),
                    origin: Origin::Declared,
                });
            }
            out
        }
    };
    records
        .into_iter()
        .enumerate()
        .map(|(i, mut r)| {
            r.origin = Origin::Declared;
            r.resolve(i, catalog).map(|_| r)
        })
        .collect()
}

/// Derives links between tables that share at least `min_shared_keys` key
/// columns with equal name and domain. Client-discriminator columns never
/// count. Each unordered pair yields at most one record, with `from_table`
/// the lexicographically smaller name; output is sorted by (from, to).
/// A `min_shared_keys` of zero is treated as one.
pub fn infer_relationships(catalog: &[TableDefinition], min_shared_keys: usize) -> Vec<RelationshipRecord> {
    let min_shared = min_shared_keys.max(1);
    let mut tables: Vec<&TableDefinition> = catalog.iter().collect();
    tables.sort_by(|a, b| a.name.cmp(&b.name));

    let mut out = Vec::new();
    for (i, a) in tables.iter().enumerate() {
        for b in &tables[i + 1..] {
            let shared: Vec<String> = a
                .key_columns
                .iter()
                .filter(|k| {
                    let Some(col_a) = a.column(k) else { return false };
                    col_a.domain != Domain::Client
                        && b.is_key(k)
                        && b.column(k).is_some_and(|col_b| col_b.domain == col_a.domain)
                })
                .cloned()
                .collect();
            if shared.len() >= min_shared {
                out.push(RelationshipRecord {
                    from_table: a.name.clone(),
                    from_columns: shared.clone(),
                    to_table: b.name.clone(),
                    to_columns: shared,
                    origin: Origin::Inferred,
                });
            }
        }
    }
    out
}

/// Concatenates declared and inferred links, dropping inferred records whose
/// endpoints already carry a declared link.
pub fn merge_relationships(
    declared: Vec<RelationshipRecord>,
    inferred: Vec<RelationshipRecord>,
) -> Vec<RelationshipRecord> {
    let taken: HashSet<(String, String)> = declared
        .iter()
        .map(|r| {
            let (a, b) = r.endpoints();
            (a.to_string(), b.to_string())
        })
        .collect();
    let mut out = declared;
    out.extend(inferred.into_iter().filter(|r| {
        let (a, b) = r.endpoints();
        !taken.contains(&(a.to_string(), b.to_string()))
    }));
    out
}
