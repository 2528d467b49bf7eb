//! OCEL 1.0 JSON codec and validator.
//!
//! The canonical document orders every object's keys lexicographically, the
//! `ocel:objects` map by id and the `ocel:events` map by `(timestamp, id)`.
//! It is pretty-printed with a trailing newline.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{AttributeMap, Event, ObjectCentricLog, ObjectInstance, OcelError, OCEL_VERSION};
use crate::timefmt;

const ATTRIBUTE_NAMES: &str = "ocel:attribute-names";
const EVENTS: &str = "ocel:events";
const GLOBAL_LOG: &str = "ocel:global-log";
const OBJECT_TYPES: &str = "ocel:object-types";
const OBJECTS: &str = "ocel:objects";
const VERSION: &str = "ocel:version";
const TOP_LEVEL: [&str; 6] = [ATTRIBUTE_NAMES, EVENTS, GLOBAL_LOG, OBJECT_TYPES, OBJECTS, VERSION];

fn attribute_map(map: &AttributeMap) -> Value {
    Value::Object(map.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect())
}

fn string_array<'a>(items: impl IntoIterator<Item = &'a String>) -> Value {
    Value::Array(items.into_iter().map(|s| Value::String(s.clone())).collect())
}

pub fn serialize_ocel(log: &ObjectCentricLog) -> Vec<u8> {
    let mut events = Map::new();
    for e in &log.events {
        events.insert(
            e.id.clone(),
            json!({
                "ocel:activity": e.activity,
                "ocel:omap": string_array(&e.omap),
                "ocel:timestamp": timefmt::format_instant(&e.timestamp),
                "ocel:vmap": attribute_map(&e.vmap),
            }),
        );
    }
    let mut objects = Map::new();
    for o in &log.objects {
        objects.insert(
            o.id.clone(),
            json!({
                "ocel:ovmap": attribute_map(&o.ovmap),
                "ocel:type": o.object_type,
            }),
        );
    }
    let mut root = Map::new();
    root.insert(ATTRIBUTE_NAMES.into(), string_array(&log.attribute_names));
    root.insert(EVENTS.into(), Value::Object(events));
    root.insert(
        GLOBAL_LOG.into(),
        json!({
            "ocel:attribute-names": string_array(&log.attribute_names),
            "ocel:object-types": string_array(&log.object_types),
            "ocel:ordering": "timestamp",
            "ocel:version": OCEL_VERSION,
        }),
    );
    root.insert(OBJECT_TYPES.into(), string_array(&log.object_types));
    root.insert(OBJECTS.into(), Value::Object(objects));
    root.insert(VERSION.into(), Value::String(OCEL_VERSION.into()));
    let mut out = serde_json::to_vec_pretty(&Value::Object(root)).expect("values always serialize");
    out.push(b'\n');
    out
}

fn parse_error(path: &str, message: &str) -> OcelError {
    OcelError::Parse(format!("{path}: {message}"))
}

fn strings(value: Option<&Value>, path: &str) -> Result<Vec<String>, OcelError> {
    value
        .and_then(Value::as_array)
        .ok_or_else(|| parse_error(path, "expected an array"))?
        .iter()
        .map(|v| v.as_str().map(str::to_string).ok_or_else(|| parse_error(path, "expected strings")))
        .collect()
}

fn attributes(value: Option<&Value>, path: &str) -> Result<AttributeMap, OcelError> {
    value
        .and_then(Value::as_object)
        .ok_or_else(|| parse_error(path, "expected an object"))?
        .iter()
        .map(|(k, v)| {
            let v = match v {
                Value::String(s) => s.clone(),
                Value::Number(_) | Value::Bool(_) => v.to_string(),
                _ => return Err(parse_error(path, "attribute values must be scalars")),
            };
            Ok((k.clone(), v))
        })
        .collect()
}

/// Parses an OCEL JSON document. Non-string scalar attribute values are kept
/// in their JSON text form. Events are re-sorted by `(timestamp, id)`.
pub fn parse_ocel(bytes: &[u8]) -> Result<ObjectCentricLog, OcelError> {
    let root: Value = serde_json::from_slice(bytes).map_err(|e| OcelError::Parse(e.to_string()))?;
    let root = root.as_object().ok_or_else(|| parse_error("$", "expected an object"))?;
    let mut events = Vec::new();
    for (id, e) in root.get(EVENTS).and_then(Value::as_object).ok_or_else(|| parse_error(EVENTS, "expected an object"))? {
        let path = format!("{EVENTS}/{id}");
        let activity = e
            .get("ocel:activity")
            .and_then(Value::as_str)
            .ok_or_else(|| parse_error(&path, "missing ocel:activity"))?;
        let timestamp = e
            .get("ocel:timestamp")
            .and_then(Value::as_str)
            .and_then(timefmt::parse_instant)
            .ok_or_else(|| parse_error(&path, "missing or invalid ocel:timestamp"))?;
        events.push(Event {
            id: id.clone(),
            activity: activity.to_string(),
            timestamp,
            omap: strings(e.get("ocel:omap"), &format!("{path}/ocel:omap"))?,
            vmap: attributes(e.get("ocel:vmap"), &format!("{path}/ocel:vmap"))?,
        });
    }
    events.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.id.cmp(&b.id)));
    let mut objects = Vec::new();
    for (id, o) in root.get(OBJECTS).and_then(Value::as_object).ok_or_else(|| parse_error(OBJECTS, "expected an object"))? {
        let path = format!("{OBJECTS}/{id}");
        objects.push(ObjectInstance {
            id: id.clone(),
            object_type: o
                .get("ocel:type")
                .and_then(Value::as_str)
                .ok_or_else(|| parse_error(&path, "missing ocel:type"))?
                .to_string(),
            ovmap: attributes(o.get("ocel:ovmap"), &format!("{path}/ocel:ovmap"))?,
        });
    }
    objects.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(ObjectCentricLog {
        events,
        objects,
        attribute_names: strings(root.get(ATTRIBUTE_NAMES), ATTRIBUTE_NAMES)?.into_iter().collect(),
        object_types: strings(root.get(OBJECT_TYPES), OBJECT_TYPES)?.into_iter().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.findings.is_empty()
    }

    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.findings.push(Finding {
            path: path.into(),
            message: message.into(),
        });
    }
}

/// Checks a document against the OCEL invariants, collecting every finding.
pub fn validate_ocel(bytes: &[u8]) -> ValidationReport {
    let mut report = ValidationReport::default();
    let root: Value = match serde_json::from_slice(bytes) {
        Ok(v) => v,
        Err(e) => {
            report.push("$", format!("not JSON: {e}"));
            return report;
        }
    };
    let Some(root) = root.as_object() else {
        report.push("$", "document is not an object");
        return report;
    };
    for key in TOP_LEVEL {
        if !root.contains_key(key) {
            report.push("$", format!("missing key `{key}`"));
        }
    }
    if let Some(v) = root.get(VERSION) {
        if v.as_str() != Some(OCEL_VERSION) {
            report.push(VERSION, format!("expected \"{OCEL_VERSION}\""));
        }
    }
    let names = string_set(root.get(ATTRIBUTE_NAMES), ATTRIBUTE_NAMES, &mut report);
    let types = string_set(root.get(OBJECT_TYPES), OBJECT_TYPES, &mut report);
    if let Some(global) = root.get(GLOBAL_LOG) {
        if !global.is_object() {
            report.push(GLOBAL_LOG, "expected an object");
        }
    }

    let mut object_ids = HashSet::new();
    match root.get(OBJECTS) {
        None => {}
        Some(Value::Object(objects)) => {
            for (id, o) in objects {
                object_ids.insert(id.as_str());
                let path = format!("{OBJECTS}/{id}");
                match o.get("ocel:type").and_then(Value::as_str) {
                    None | Some("") => report.push(format!("{path}/ocel:type"), "missing object type"),
                    Some(t) => {
                        if types.as_ref().is_some_and(|ts| !ts.contains(t)) {
                            report.push(format!("{path}/ocel:type"), format!("type `{t}` not in {OBJECT_TYPES}"));
                        }
                    }
                }
                check_attributes(o.get("ocel:ovmap"), &format!("{path}/ocel:ovmap"), names.as_ref(), &mut report);
            }
        }
        Some(_) => report.push(OBJECTS, "expected an object"),
    }

    match root.get(EVENTS) {
        None => {}
        Some(Value::Object(events)) => {
            let mut previous: Option<(chrono::DateTime<chrono::Utc>, &str)> = None;
            for (id, e) in events {
                let path = format!("{EVENTS}/{id}");
                if !e.is_object() {
                    report.push(&path, "expected an object");
                    continue;
                }
                match e.get("ocel:activity").and_then(Value::as_str) {
                    None | Some("") => report.push(format!("{path}/ocel:activity"), "missing activity"),
                    Some(_) => {}
                }
                match e.get("ocel:timestamp").and_then(Value::as_str).and_then(timefmt::parse_instant) {
                    None => report.push(format!("{path}/ocel:timestamp"), "missing or invalid ISO-8601 timestamp"),
                    Some(ts) => {
                        if previous.is_some_and(|p| p > (ts, id.as_str())) {
                            report.push(format!("{path}/ocel:timestamp"), "events out of (timestamp, id) order");
                        }
                        previous = Some((ts, id.as_str()));
                    }
                }
                let omap_path = format!("{path}/ocel:omap");
                match e.get("ocel:omap").and_then(Value::as_array) {
                    None => report.push(&omap_path, "missing object map"),
                    Some(omap) if omap.is_empty() => report.push(&omap_path, "event references no object"),
                    Some(omap) => {
                        for o in omap {
                            match o.as_str() {
                                None => report.push(&omap_path, "object ids must be strings"),
                                Some(o) if !object_ids.contains(o) => {
                                    report.push(&omap_path, format!("unknown object `{o}`"))
                                }
                                Some(_) => {}
                            }
                        }
                    }
                }
                check_attributes(e.get("ocel:vmap"), &format!("{path}/ocel:vmap"), names.as_ref(), &mut report);
            }
        }
        Some(_) => report.push(EVENTS, "expected an object"),
    }
    report
}

fn string_set<'v>(value: Option<&'v Value>, path: &str, report: &mut ValidationReport) -> Option<BTreeSet<&'v str>> {
    let items = match value {
        None => return None,
        Some(Value::Array(items)) => items,
        Some(_) => {
            report.push(path, "expected an array of strings");
            return None;
        }
    };
    let mut out = BTreeSet::new();
    for item in items {
        match item.as_str() {
            Some(s) => {
                out.insert(s);
            }
            None => report.push(path, "expected an array of strings"),
        }
    }
    Some(out)
}

fn check_attributes(value: Option<&Value>, path: &str, names: Option<&BTreeSet<&str>>, report: &mut ValidationReport) {
    match value {
        None => report.push(path, "missing attribute map"),
        Some(Value::Object(map)) => {
            for (k, v) in map {
                if v.is_object() || v.is_array() || v.is_null() {
                    report.push(path, format!("attribute `{k}` is not a scalar"));
                }
                if names.is_some_and(|n| !n.contains(k.as_str())) {
                    report.push(path, format!("attribute `{k}` not in {ATTRIBUTE_NAMES}"));
                }
            }
        }
        Some(_) => report.push(path, "expected an object"),
    }
}
