//! Object-centric event log extraction.
//!
//! Rows of the selected tables become events under declarative per-table
//! rules ([`ExtractionConfig`]); events reference every object their row
//! identifies, so one event touching several business objects is stored once.
//! The log serializes to OCEL 1.0 JSON in a canonical form.

mod config;
mod extract;
mod json;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use chrono::{DateTime, Utc};
use thiserror::Error;

use crate::ingest::IngestError;

pub use config::{
    ActivityRule, ChangeDocumentRule, ExtractionConfig, Filter, MissingTime, ObjectRule, TableRules, TemplateRule,
    TimestampRule,
};
pub use extract::{extract_change_events, extract_log, extract_table_events, preprocess, FilteredView, TableOutput};
pub use json::{parse_ocel, serialize_ocel, validate_ocel, Finding, ValidationReport};

pub const OCEL_VERSION: &str = "1.0";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OcelError {
    #[error("invalid extraction config: {0}")]
    InvalidConfig(String),
    #[error("selection has no included tables")]
    NoIncludedTables,
    #[error("no extraction rules for included table `{0}`")]
    MissingRules(String),
    #[error("config references table `{0}`, which is not included in the selection")]
    TableNotSelected(String),
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("no row data for table `{0}`")]
    MissingDataset(String),
    #[error("filter on unknown column `{column}` of `{table}`")]
    UnknownFilterColumn { table: String, column: String },
    #[error("unknown column `{column}` in table `{table}`")]
    UnknownColumn { table: String, column: String },
    #[error("type mismatch on `{table}.{column}`: {message}")]
    TypeMismatch {
        table: String,
        column: String,
        message: String,
    },
    #[error("unparsable timestamp in `{table}` row {row}")]
    UnparsableTimestamp { table: String, row: usize },
    #[error("`{table}` row {row} lacks a key value for object type `{object_type}`")]
    MissingObjectKey {
        table: String,
        row: usize,
        object_type: String,
    },
    #[error("change item `{0}` has no header")]
    OrphanItem(String),
    #[error("unknown object class `{0}`")]
    UnknownObjectClass(String),
    #[error("duplicate event id `{0}`")]
    DuplicateEventId(String),
    #[error("event `{0}` references no object")]
    EmptyOmap(String),
    #[error("event `{event}` references unknown object `{object}`")]
    UnresolvedObject { event: String, object: String },
    #[error("malformed OCEL document: {0}")]
    Parse(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

pub type AttributeMap = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub id: String,
    pub activity: String,
    pub timestamp: DateTime<Utc>,
    /// Distinct object ids, sorted.
    pub omap: Vec<String>,
    pub vmap: AttributeMap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectInstance {
    pub id: String,
    pub object_type: String,
    pub ovmap: AttributeMap,
}

impl ObjectInstance {
    pub fn new(object_type: &str, key_values: &[&str]) -> Self {
        ObjectInstance {
            id: object_id(object_type, key_values),
            object_type: object_type.to_string(),
            ovmap: AttributeMap::new(),
        }
    }
}

/// `<type>:<key values joined by '/'>`.
pub fn object_id(object_type: &str, key_values: &[&str]) -> String {
    format!("{object_type}:{}", key_values.join("/"))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ObjectCentricLog {
    /// Sorted by `(timestamp, id)`.
    pub events: Vec<Event>,
    /// Sorted by id.
    pub objects: Vec<ObjectInstance>,
    pub attribute_names: BTreeSet<String>,
    pub object_types: BTreeSet<String>,
}

impl ObjectCentricLog {
    pub fn version(&self) -> &'static str {
        OCEL_VERSION
    }

    pub fn object(&self, id: &str) -> Option<&ObjectInstance> {
        self.objects
            .binary_search_by(|o| o.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.objects[i])
    }
}

/// Merges event lists and object sets into one log.
///
/// Objects sharing an id collapse to one entry; attribute maps merge with the
/// first writer winning per key. Events are sorted by `(timestamp, id)`.
pub fn assemble_log<E, O>(event_lists: E, object_sets: O) -> Result<ObjectCentricLog, OcelError>
where
    E: IntoIterator<Item = Vec<Event>>,
    O: IntoIterator<Item = Vec<ObjectInstance>>,
{
    let mut objects: BTreeMap<String, ObjectInstance> = BTreeMap::new();
    for set in object_sets {
        for object in set {
            match objects.get_mut(&object.id) {
                None => {
                    objects.insert(object.id.clone(), object);
                }
                Some(existing) => {
                    for (k, v) in object.ovmap {
                        existing.ovmap.entry(k).or_insert(v);
                    }
                }
            }
        }
    }
    let mut events = Vec::new();
    let mut ids = HashSet::new();
    for list in event_lists {
        for mut event in list {
            if !ids.insert(event.id.clone()) {
                return Err(OcelError::DuplicateEventId(event.id));
            }
            event.omap.sort();
            event.omap.dedup();
            if event.omap.is_empty() {
                return Err(OcelError::EmptyOmap(event.id));
            }
            if let Some(missing) = event.omap.iter().find(|o| !objects.contains_key(*o)) {
                return Err(OcelError::UnresolvedObject {
                    event: event.id.clone(),
                    object: missing.clone(),
                });
            }
            events.push(event);
        }
    }
    events.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.id.cmp(&b.id)));
    let mut attribute_names = BTreeSet::new();
    let mut object_types = BTreeSet::new();
    for e in &events {
        attribute_names.extend(e.vmap.keys().cloned());
    }
    for o in objects.values() {
        attribute_names.extend(o.ovmap.keys().cloned());
        object_types.insert(o.object_type.clone());
    }
    Ok(ObjectCentricLog {
        events,
        objects: objects.into_values().collect(),
        attribute_names,
        object_types,
    })
}

/// Counts events per object type, for summaries.
pub fn events_per_object_type(log: &ObjectCentricLog) -> BTreeMap<String, usize> {
    let types: HashMap<&str, &str> = log
        .objects
        .iter()
        .map(|o| (o.id.as_str(), o.object_type.as_str()))
        .collect();
    let mut out = BTreeMap::new();
    for e in &log.events {
        let touched: BTreeSet<&str> = e.omap.iter().filter_map(|o| types.get(o.as_str()).copied()).collect();
        for t in touched {
            *out.entry(t.to_string()).or_insert(0) += 1;
        }
    }
    out
}
