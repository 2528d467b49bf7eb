use std::collections::{BTreeMap, HashSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::OcelError;
use crate::identify::TableSelection;
use crate::ingest::{Catalog, ClassRegistry, Domain, TableDefinition};
use crate::timefmt;

/// Declarative extraction rules for the tables of one selection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractionConfig {
    /// Only `UTC` is supported.
    #[serde(default = "utc")]
    pub time_zone: String,
    #[serde(default)]
    pub missing_time: MissingTime,
    pub tables: BTreeMap<String, TableRules>,
}

fn utc() -> String {
    "UTC".to_string()
}

/// What an empty time cell means when the timestamp rule names a time column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingTime {
    #[default]
    Midnight,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRules {
    /// The table contributes objects but no events.
    #[serde(default, skip_serializing_if = "is_false")]
    pub objects_only: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub activity: Option<ActivityRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<TimestampRule>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objects: Vec<ObjectRule>,
    /// Columns copied into each event's attribute map.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attributes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub filters: Vec<Filter>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ActivityRule {
    Static(String),
    Template(TemplateRule),
    ChangeDocuments(ChangeDocumentRule),
}

/// `{COLUMN}` placeholders in `pattern` are replaced by the cell value, or by
/// `lookup[COLUMN][value]` when present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateRule {
    pub pattern: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lookup: BTreeMap<String, BTreeMap<String, String>>,
}

impl TemplateRule {
    pub(crate) fn placeholders(&self) -> Result<Vec<&str>, String> {
        let mut out = Vec::new();
        let mut rest = self.pattern.as_str();
        while let Some(start) = rest.find('{') {
            let Some(len) = rest[start..].find('}') else {
                return Err(format!("unclosed placeholder in `{}`", self.pattern));
            };
            out.push(&rest[start + 1..start + len]);
            rest = &rest[start + len + 1..];
        }
        Ok(out)
    }

    pub(crate) fn render(&self, value: impl Fn(&str) -> Option<String>) -> String {
        let mut out = String::new();
        let mut rest = self.pattern.as_str();
        while let Some(start) = rest.find('{') {
            let len = rest[start..].find('}').expect("validated pattern");
            out.push_str(&rest[..start]);
            let column = &rest[start + 1..start + len];
            let raw = value(column).unwrap_or_default();
            match self.lookup.get(column).and_then(|m| m.get(&raw)) {
                Some(label) => out.push_str(label),
                None => out.push_str(&raw),
            }
            rest = &rest[start + len + 1..];
        }
        out.push_str(rest);
        out
    }
}

/// Item rows of a change-document table joined to their header rows.
/// The activity is `"Change " + <field_column>`, the timestamp rule reads the
/// header, and the changed object is `<object_types[class]>:<object id>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChangeDocumentRule {
    pub header_table: String,
    pub pairing_keys: Vec<String>,
    pub field_column: String,
    pub object_class_column: String,
    pub object_id_column: String,
    /// Document class id to object type.
    pub object_types: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimestampRule {
    pub date: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<String>,
}

/// Builds `<type>:<key values joined by '/'>` from a row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectRule {
    #[serde(rename = "type")]
    pub object_type: String,
    pub key: Vec<String>,
    /// Columns copied into the object's attribute map.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attributes: Vec<String>,
    /// Rows with an empty key cell reference no object instead of failing.
    #[serde(default, skip_serializing_if = "is_false")]
    pub optional: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Filter {
    Eq { column: String, value: String },
    Ne { column: String, value: String },
    In { column: String, values: Vec<String> },
    /// Inclusive on both ends; bounds are `YYYY-MM-DD` or `YYYYMMDD`.
    DateRange { column: String, from: String, to: String },
}

impl Filter {
    pub fn column(&self) -> &str {
        match self {
            Filter::Eq { column, .. }
            | Filter::Ne { column, .. }
            | Filter::In { column, .. }
            | Filter::DateRange { column, .. } => column,
        }
    }
}

impl ExtractionConfig {
    pub fn from_reader<R: Read>(source: R) -> Result<Self, OcelError> {
        serde_json::from_reader(source).map_err(|e| OcelError::InvalidConfig(e.to_string()))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs always serialize")
    }

    /// Checks the config against the included tables of `selection`.
    pub fn validate(&self, selection: &TableSelection, catalog: &Catalog, classes: &ClassRegistry) -> Result<(), OcelError> {
        if self.time_zone != "UTC" {
            return Err(OcelError::InvalidConfig(format!("unsupported time zone `{}`", self.time_zone)));
        }
        let included: HashSet<&str> = selection.included_tables().collect();
        if included.is_empty() {
            return Err(OcelError::NoIncludedTables);
        }
        if let Some(missing) = selection.included_tables().find(|t| !self.tables.contains_key(*t)) {
            return Err(OcelError::MissingRules(missing.to_string()));
        }
        for (name, rules) in &self.tables {
            if !included.contains(name.as_str()) {
                return Err(OcelError::TableNotSelected(name.clone()));
            }
            let table = catalog.get(name).ok_or_else(|| OcelError::UnknownTable(name.clone()))?;
            self.validate_table(table, rules, catalog, classes)?;
        }
        Ok(())
    }

    fn validate_table(
        &self,
        table: &TableDefinition,
        rules: &TableRules,
        catalog: &Catalog,
        classes: &ClassRegistry,
    ) -> Result<(), OcelError> {
        let name = &table.name;
        for f in &rules.filters {
            let column = table.column(f.column()).ok_or_else(|| OcelError::UnknownFilterColumn {
                table: name.clone(),
                column: f.column().to_string(),
            })?;
            if let Filter::DateRange { from, to, .. } = f {
                let mismatch = |message: String| OcelError::TypeMismatch {
                    table: name.clone(),
                    column: column.name.clone(),
                    message,
                };
                if column.domain != Domain::Date {
                    return Err(mismatch(format!("date_range on a `{}` column", column.domain)));
                }
                let (Some(a), Some(b)) = (timefmt::parse_date(from), timefmt::parse_date(to)) else {
                    return Err(mismatch(format!("unparsable date bounds `{from}`..`{to}`")));
                };
                if a > b {
                    return Err(mismatch(format!("empty date range `{from}`..`{to}`")));
                }
            }
        }
        let require = |t: &TableDefinition, column: &str| {
            if t.has_column(column) {
                Ok(())
            } else {
                Err(OcelError::UnknownColumn {
                    table: t.name.clone(),
                    column: column.to_string(),
                })
            }
        };
        for column in &rules.attributes {
            require(table, column)?;
        }
        for object in &rules.objects {
            if object.object_type.is_empty() || object.key.is_empty() {
                return Err(OcelError::InvalidConfig(format!("{name}: object rules need a type and key columns")));
            }
            for column in object.key.iter().chain(&object.attributes) {
                require(table, column)?;
            }
        }
        if rules.objects_only {
            if rules.activity.is_some() || rules.timestamp.is_some() {
                return Err(OcelError::InvalidConfig(format!(
                    "{name}: objects-only tables take no activity or timestamp rule"
                )));
            }
            return Ok(());
        }
        let (Some(activity), Some(timestamp)) = (&rules.activity, &rules.timestamp) else {
            return Err(OcelError::MissingRules(name.clone()));
        };
        let changes = matches!(activity, ActivityRule::ChangeDocuments(_));
        if !changes && rules.objects.is_empty() {
            return Err(OcelError::InvalidConfig(format!("{name}: events need at least one object rule")));
        }
        let timestamp_table = match activity {
            ActivityRule::Static(label) => {
                if label.is_empty() {
                    return Err(OcelError::InvalidConfig(format!("{name}: empty activity label")));
                }
                table
            }
            ActivityRule::Template(template) => {
                let placeholders = template
                    .placeholders()
                    .map_err(|m| OcelError::InvalidConfig(format!("{name}: {m}")))?;
                for column in placeholders {
                    require(table, column)?;
                }
                table
            }
            ActivityRule::ChangeDocuments(rule) => {
                let header = catalog
                    .get(&rule.header_table)
                    .ok_or_else(|| OcelError::UnknownTable(rule.header_table.clone()))?;
                match self.tables.get(&rule.header_table) {
                    None => return Err(OcelError::TableNotSelected(rule.header_table.clone())),
                    Some(h) if !h.objects_only => {
                        return Err(OcelError::InvalidConfig(format!(
                            "{name}: change-document header `{}` must be objects-only",
                            rule.header_table
                        )))
                    }
                    Some(_) => {}
                }
                if rule.pairing_keys.is_empty() {
                    return Err(OcelError::InvalidConfig(format!("{name}: no pairing keys")));
                }
                for key in &rule.pairing_keys {
                    require(table, key)?;
                    require(header, key)?;
                }
                require(table, &rule.field_column)?;
                require(header, &rule.object_class_column)?;
                require(header, &rule.object_id_column)?;
                for (class, object_type) in &rule.object_types {
                    if classes.get(class).is_none() {
                        return Err(OcelError::UnknownObjectClass(class.clone()));
                    }
                    if object_type.is_empty() {
                        return Err(OcelError::InvalidConfig(format!("{name}: empty object type for `{class}`")));
                    }
                }
                header
            }
        };
        let typed = |column: &str, domain: Domain| {
            require(timestamp_table, column)?;
            let actual = timestamp_table.column(column).expect("checked").domain;
            if actual == domain {
                Ok(())
            } else {
                Err(OcelError::TypeMismatch {
                    table: timestamp_table.name.clone(),
                    column: column.to_string(),
                    message: format!("expected a {domain} column, found {actual}"),
                })
            }
        };
        typed(&timestamp.date, Domain::Date)?;
        if let Some(time) = &timestamp.time {
            typed(time, Domain::Time)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_json_shape() {
        let json = r#"{
            "tables": {
                "EKKO": {
                    "activity": {"static": "Create Purchase Order"},
                    "timestamp": {"date": "AEDAT", "time": "UZEIT"},
                    "objects": [{"type": "purchase_order", "key": ["EBELN"]}],
                    "filters": [
                        {"op": "date_range", "column": "AEDAT", "from": "2021-01-01", "to": "2021-12-31"},
                        {"op": "in", "column": "BSART", "values": ["NB"]}
                    ]
                },
                "EKBE": {
                    "activity": {"template": {"pattern": "{BEWTP}", "lookup": {"BEWTP": {"E": "Record Goods Receipt"}}}},
                    "timestamp": {"date": "CPUDT"}
                },
                "EKPA": {"objects_only": true}
            }
        }"#;
        let config = ExtractionConfig::from_reader(json.as_bytes()).unwrap();
        assert_eq!(config.time_zone, "UTC");
        assert_eq!(config.missing_time, MissingTime::Midnight);
        assert!(config.tables["EKPA"].objects_only);
        assert_eq!(config.tables["EKKO"].filters[0].column(), "AEDAT");
        let again = ExtractionConfig::from_reader(config.to_json_pretty().as_bytes()).unwrap();
        assert_eq!(again, config);
        assert!(ExtractionConfig::from_reader(r#"{"tables":{},"sql":"select"}"#.as_bytes()).is_err());
    }

    #[test]
    fn templates() {
        let t = TemplateRule {
            pattern: "Post {BWART} in {WERKS}".into(),
            lookup: BTreeMap::from([("BWART".into(), BTreeMap::from([("101".into(), "GR".into())]))]),
        };
        assert_eq!(t.placeholders().unwrap(), ["BWART", "WERKS"]);
        let cell = |c: &str| Some(if c == "BWART" { "101" } else { "1000" }.to_string());
        assert_eq!(t.render(cell), "Post GR in 1000");
        let bad = TemplateRule {
            pattern: "{OPEN".into(),
            lookup: BTreeMap::new(),
        };
        assert!(bad.placeholders().is_err());
    }
}
