use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{is_class_ident, split_list, Catalog, Format, IngestError};

/// Reserved class naming the change-document header and item tables.
pub const CHANGE_DOCUMENTS_CLASS: &str = "__change_documents__";

/// A business document concept and the tables that store it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentClassRecord {
    pub class_id: String,
    pub label: String,
    pub member_tables: Vec<String>,
    /// Field-level changes of this class are recorded in the change-document tables.
    #[serde(default)]
    pub change_tracked: bool,
}

/// Parses document classes. The CSV header is `class_id,label,member_tables`
/// with an optional fourth `change_tracked` column (`true`/`false`).
pub fn parse_document_classes<R: Read>(
    source: R,
    format: Format,
    catalog: &Catalog,
) -> Result<Vec<DocumentClassRecord>, IngestError> {
    let records: Vec<DocumentClassRecord> = match format {
        Format::Json => serde_json::from_reader(source).map_err(IngestError::from_json)?,
        Format::Csv => parse_csv(source)?,
    };
    ClassRegistry::new(records.clone(), catalog)?;
    Ok(records)
}

fn parse_csv<R: Read>(source: R) -> Result<Vec<DocumentClassRecord>, IngestError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header: Vec<String> = reader
        .headers()
        .map_err(IngestError::from_csv)?
        .iter()
        .map(str::to_string)
        .collect();
    let tracked_column = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["class_id", "label", "member_tables"] => false,
        ["class_id", "label", "member_tables", "change_tracked"] => true,
        _ => {
            return Err(IngestError::syntax(
                1,
                "expected header `class_id,label,member_tables[,change_tracked]`",
            ))
        }
    };
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(IngestError::from_csv)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let change_tracked = if tracked_column {
            match record[3].trim() {
                "" | "false" => false,
                "true" => true,
                other => return Err(IngestError::syntax(line, format!("invalid change_tracked `{other}`"))),
            }
        } else {
            false
        };
        out.push(DocumentClassRecord {
            class_id: record[0].trim().to_string(),
            label: record[1].to_string(),
            member_tables: split_list(&record[2]),
            change_tracked,
        });
    }
    Ok(out)
}

/// Validated document classes with id lookup.
#[derive(Debug, Clone, Default)]
pub struct ClassRegistry {
    classes: Vec<DocumentClassRecord>,
    index: HashMap<String, usize>,
}

impl ClassRegistry {
    pub fn new(classes: Vec<DocumentClassRecord>, catalog: &Catalog) -> Result<Self, IngestError> {
        let mut index = HashMap::new();
        for (i, class) in classes.iter().enumerate() {
            if !is_class_ident(&class.class_id) {
                return Err(IngestError::syntax(0, format!("invalid class id `{}`", class.class_id)));
            }
            if class.member_tables.is_empty() {
                return Err(IngestError::EmptyClass(class.class_id.clone()));
            }
            if let Some(unknown) = class.member_tables.iter().find(|t| !catalog.contains(t)) {
                return Err(IngestError::UnknownTable(unknown.clone()));
            }
            if index.insert(class.class_id.clone(), i).is_some() {
                return Err(IngestError::DuplicateClass(class.class_id.clone()));
            }
        }
        Ok(ClassRegistry { classes, index })
    }

    pub fn get(&self, class_id: &str) -> Option<&DocumentClassRecord> {
        self.index.get(class_id).map(|&i| &self.classes[i])
    }

    pub fn classes(&self) -> &[DocumentClassRecord] {
        &self.classes
    }

    /// Header and item tables of the reserved change-document class.
    pub fn change_document_tables(&self) -> &[String] {
        self.get(CHANGE_DOCUMENTS_CLASS)
            .map(|c| c.member_tables.as_slice())
            .unwrap_or(&[])
    }

    /// Member tables of every change-tracked class, in registry order.
    pub fn tracked_tables(&self) -> impl Iterator<Item = &str> {
        self.classes
            .iter()
            .filter(|c| c.change_tracked && c.class_id != CHANGE_DOCUMENTS_CLASS)
            .flat_map(|c| c.member_tables.iter().map(String::as_str))
    }
}
