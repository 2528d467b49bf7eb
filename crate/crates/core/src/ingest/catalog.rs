use std::collections::HashSet;
use std::io::{Read, Write};

use super::{split_list, ColumnDefinition, Domain, Format, IngestError, TableDefinition};

const CATALOG_HEADER: [&str; 4] = ["name", "description", "columns", "key_columns"];

/// Parses a table catalog, returning definitions in file order.
pub fn parse_table_catalog<R: Read>(source: R, format: Format) -> Result<Vec<TableDefinition>, IngestError> {
    let tables = match format {
        Format::Csv => parse_csv(source)?,
        Format::Json => serde_json::from_reader(source).map_err(IngestError::from_json)?,
    };
    let mut seen = HashSet::new();
    for t in &tables {
        t.validate()?;
        if !seen.insert(t.name.clone()) {
            return Err(IngestError::DuplicateTable(t.name.clone()));
        }
    }
    Ok(tables)
}

fn parse_csv<R: Read>(source: R) -> Result<Vec<TableDefinition>, IngestError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = reader.headers().map_err(IngestError::from_csv)?;
    if header.iter().ne(CATALOG_HEADER.iter().copied()) {
        return Err(IngestError::syntax(
            1,
            format!("expected header `{}`", CATALOG_HEADER.join(",")),
        ));
    }
    let mut tables = Vec::new();
    for record in reader.records() {
        let record = record.map_err(IngestError::from_csv)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let columns = split_list(&record[2])
            .iter()
            .map(|entry| parse_column(entry).map_err(|m| IngestError::syntax(line, m)))
            .collect::<Result<Vec<_>, _>>()?;
        tables.push(TableDefinition {
            name: record[0].trim().to_string(),
            description: record[1].to_string(),
            columns,
            key_columns: split_list(&record[3]),
        });
    }
    Ok(tables)
}

/// `NAME[:DOMAIN[:nullable]]`; an omitted domain means `text`.
fn parse_column(entry: &str) -> Result<ColumnDefinition, String> {
    let mut parts = entry.split(':');
    let name = parts.next().unwrap_or_default().trim().to_string();
    if name.is_empty() {
        return Err("empty column name".to_string());
    }
    let domain = match parts.next() {
        Some(tag) => tag.trim().parse::<Domain>()?,
        None => Domain::Text,
    };
    let nullable = match parts.next() {
        None => false,
        Some("nullable") => true,
        Some(other) => return Err(format!("unexpected column flag `{other}`")),
    };
    if parts.next().is_some() {
        return Err(format!("malformed column entry `{entry}`"));
    }
    Ok(ColumnDefinition { name, domain, nullable })
}

/// Writes a catalog in the canonical form of `format`.
pub fn write_table_catalog<W: Write>(
    tables: &[TableDefinition],
    format: Format,
    out: W,
) -> Result<(), IngestError> {
    match format {
        Format::Json => serde_json::to_writer_pretty(out, tables).map_err(IngestError::from_json),
        Format::Csv => {
            let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
            writer.write_record(CATALOG_HEADER).map_err(IngestError::from_csv)?;
            for t in tables {
                let columns = t
                    .columns
                    .iter()
                    .map(|c| {
                        if c.nullable {
                            format!("{}:{}:nullable", c.name, c.domain)
                        } else {
                            format!("{}:{}", c.name, c.domain)
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("|");
                writer
                    .write_record([t.name.as_str(), &t.description, &columns, &t.key_columns.join("|")])
                    .map_err(IngestError::from_csv)?;
            }
            writer.flush().map_err(|e| IngestError::Io(e.to_string()))
        }
    }
}
