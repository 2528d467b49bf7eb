//! From a document class to a curated table selection.
//!
//! A selection starts from the member tables of one class, grows by
//! breadth-first expansion over the schema graph and is then curated by hand.
//! Entries are never removed; exclusion only clears the `included` flag.

mod store;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeKind, GraphError, NodeKind, SchemaGraph};
use crate::ingest::ClassRegistry;
use crate::timefmt::{self, serde_instant};

pub use store::SelectionStore;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentifyError {
    #[error("unknown document class `{0}`")]
    UnknownClass(String),
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("unknown selection `{0}`")]
    UnknownSelection(String),
    #[error("selection has no included tables")]
    NoIncludedTables,
    #[error("invalid selection: {0}")]
    InvalidSelection(String),
    #[error("selection storage failure: {0}")]
    StorageFailure(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// How an entry entered the selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Seed,
    /// Added by expansion; `depth` is the hop distance from the seed tables.
    Expansion { depth: usize },
    Manual,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::Seed => "seed",
            Provenance::Expansion { .. } => "expansion",
            Provenance::Manual => "manual",
        }
    }

    pub fn depth(self) -> Option<usize> {
        match self {
            Provenance::Expansion { depth } => Some(depth),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "EntryDocument", into = "EntryDocument")]
pub struct SelectionEntry {
    pub table: String,
    pub provenance: Provenance,
    pub included: bool,
}

#[derive(Serialize, Deserialize)]
struct EntryDocument {
    table: String,
    provenance: String,
    depth: Option<usize>,
    included: bool,
}

impl From<SelectionEntry> for EntryDocument {
    fn from(e: SelectionEntry) -> Self {
        EntryDocument {
            table: e.table,
            provenance: e.provenance.label().to_string(),
            depth: e.provenance.depth(),
            included: e.included,
        }
    }
}

impl TryFrom<EntryDocument> for SelectionEntry {
    type Error = String;

    fn try_from(d: EntryDocument) -> Result<Self, String> {
        let provenance = match (d.provenance.as_str(), d.depth) {
            ("seed", None) => Provenance::Seed,
            ("manual", None) => Provenance::Manual,
            ("expansion", Some(depth)) => Provenance::Expansion { depth },
            (p, depth) => return Err(format!("invalid provenance `{p}` with depth {depth:?}")),
        };
        Ok(SelectionEntry {
            table: d.table,
            provenance,
            included: d.included,
        })
    }
}

/// An evolving table set with per-entry provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSelection {
    pub class_id: String,
    pub entries: Vec<SelectionEntry>,
    #[serde(with = "serde_instant")]
    pub created: DateTime<Utc>,
    #[serde(with = "serde_instant")]
    pub modified: DateTime<Utc>,
}

impl TableSelection {
    pub fn entry(&self, table: &str) -> Option<&SelectionEntry> {
        self.entries.iter().find(|e| e.table == table)
    }

    pub fn contains(&self, table: &str) -> bool {
        self.entry(table).is_some()
    }

    /// Included tables in entry order.
    pub fn included_tables(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().filter(|e| e.included).map(|e| e.table.as_str())
    }

    pub fn included_set(&self) -> BTreeSet<String> {
        self.included_tables().map(str::to_string).collect()
    }

    /// Sets the inclusion flag of `table`, adding it as a manual entry when
    /// absent. Returns whether anything changed.
    pub fn toggle(&mut self, table: &str, included: bool) -> bool {
        let changed = match self.entries.iter_mut().find(|e| e.table == table) {
            Some(e) if e.included == included => false,
            Some(e) => {
                e.included = included;
                true
            }
            None => {
                self.entries.push(SelectionEntry {
                    table: table.to_string(),
                    provenance: Provenance::Manual,
                    included,
                });
                true
            }
        };
        if changed {
            self.touch();
        }
        changed
    }

    fn touch(&mut self) {
        self.modified = timefmt::now().max(self.modified);
    }

    /// Checks entry uniqueness and that seed entries belong to the class.
    pub fn validate(&self, classes: &ClassRegistry) -> Result<(), IdentifyError> {
        let class = classes
            .get(&self.class_id)
            .ok_or_else(|| IdentifyError::UnknownClass(self.class_id.clone()))?;
        let mut seen = HashSet::new();
        for e in &self.entries {
            if !seen.insert(e.table.as_str()) {
                return Err(IdentifyError::InvalidSelection(format!("table `{}` listed twice", e.table)));
            }
            if e.provenance == Provenance::Seed && !class.member_tables.contains(&e.table) {
                return Err(IdentifyError::InvalidSelection(format!(
                    "seed table `{}` is not a member of `{}`",
                    e.table, self.class_id
                )));
            }
        }
        Ok(())
    }
}

/// A selection document as persisted and exchanged: the selection plus its id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionDocument {
    pub id: String,
    #[serde(flatten)]
    pub selection: TableSelection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeedSelection {
    pub class_id: String,
    pub initial_tables: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub table: String,
    /// `fk_link` edges to included tables.
    pub score: usize,
    /// `fk_link` and `change_log_link` edges to included tables.
    pub connecting_edges: usize,
}

/// Identification operations over one graph and class registry.
#[derive(Debug, Clone, Copy)]
pub struct Identifier<'a> {
    pub graph: &'a SchemaGraph,
    pub classes: &'a ClassRegistry,
}

impl<'a> Identifier<'a> {
    pub fn new(graph: &'a SchemaGraph, classes: &'a ClassRegistry) -> Self {
        Identifier { graph, classes }
    }

    pub fn resolve_seed(&self, class_id: &str) -> Result<SeedSelection, IdentifyError> {
        let class = self
            .classes
            .get(class_id)
            .ok_or_else(|| IdentifyError::UnknownClass(class_id.to_string()))?;
        Ok(SeedSelection {
            class_id: class.class_id.clone(),
            initial_tables: class.member_tables.iter().cloned().collect(),
        })
    }

    /// A fresh selection holding the class's member tables as seed entries,
    /// in registry order.
    pub fn start_selection(&self, class_id: &str) -> Result<TableSelection, IdentifyError> {
        let class = self
            .classes
            .get(class_id)
            .ok_or_else(|| IdentifyError::UnknownClass(class_id.to_string()))?;
        let now = timefmt::now();
        Ok(TableSelection {
            class_id: class.class_id.clone(),
            entries: class
                .member_tables
                .iter()
                .map(|t| SelectionEntry {
                    table: t.clone(),
                    provenance: Provenance::Seed,
                    included: true,
                })
                .collect(),
            created: now,
            modified: now,
        })
    }

    /// Adds every table reached from the included entries within `depth` hops
    /// that is not yet listed. New entries are ordered by hop distance, then
    /// name; existing entries are untouched.
    ///
    /// The recorded depth is the hop distance from the seed entries when they
    /// reach the table, otherwise the distance covered by this step.
    pub fn expand_selection(
        &self,
        sel: &TableSelection,
        depth: usize,
        hub_limit: Option<usize>,
    ) -> Result<TableSelection, IdentifyError> {
        let included: Vec<&str> = sel.included_tables().collect();
        if included.is_empty() {
            return Err(IdentifyError::NoIncludedTables);
        }
        let reached = self.graph.expansion(included.iter().copied(), depth, hub_limit)?;
        let listed: HashSet<&str> = sel.entries.iter().map(|e| e.table.as_str()).collect();
        let mut added: Vec<(usize, &String)> = reached
            .distances
            .iter()
            .filter(|(t, _)| !listed.contains(t.as_str()))
            .map(|(t, &d)| (d, t))
            .collect();
        let mut out = sel.clone();
        if added.is_empty() {
            return Ok(out);
        }
        added.sort();
        let seeds = sel
            .entries
            .iter()
            .filter(|e| e.provenance == Provenance::Seed)
            .map(|e| e.table.as_str());
        let from_seed: BTreeMap<String, usize> = self.graph.expansion(seeds, usize::MAX, None)?.distances;
        for (step, table) in added {
            let depth = from_seed.get(table).copied().unwrap_or(step);
            out.entries.push(SelectionEntry {
                table: table.clone(),
                provenance: Provenance::Expansion { depth },
                included: true,
            });
        }
        out.touch();
        Ok(out)
    }

    /// `fk_link` neighbors of included tables that the selection does not
    /// list, by score descending then name.
    pub fn rank_candidates(&self, sel: &TableSelection) -> Result<Vec<Candidate>, IdentifyError> {
        let included = sel.included_set();
        let mut scores: BTreeMap<String, Candidate> = BTreeMap::new();
        for table in &included {
            for edge in self.graph.incident_edges(table)? {
                if !edge.kind.is_traversable() {
                    continue;
                }
                let other = if &edge.a == table { &edge.b } else { &edge.a };
                if sel.contains(other) {
                    continue;
                }
                let c = scores.entry(other.clone()).or_insert_with(|| Candidate {
                    table: other.clone(),
                    score: 0,
                    connecting_edges: 0,
                });
                c.connecting_edges += 1;
                if edge.kind == EdgeKind::FkLink {
                    c.score += 1;
                }
            }
        }
        let mut ranking: Vec<Candidate> = scores.into_values().filter(|c| c.score > 0).collect();
        ranking.sort_by(|a, b| b.score.cmp(&a.score).then_with(|| a.table.cmp(&b.table)));
        Ok(ranking)
    }

    /// [`TableSelection::toggle`] restricted to catalog tables.
    pub fn toggle_table(&self, sel: &TableSelection, table: &str, included: bool) -> Result<TableSelection, IdentifyError> {
        match self.graph.node(table) {
            Some(n) if n.kind == NodeKind::Table => {}
            _ => return Err(IdentifyError::UnknownTable(table.to_string())),
        }
        let mut out = sel.clone();
        out.toggle(table, included);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_document_classes, parse_table_catalog, Catalog, Format};

    struct Fixture {
        graph: SchemaGraph,
        classes: ClassRegistry,
    }

    // A - B - C - D chain; E hangs off A; seed class {A}.
    fn fixture() -> Fixture {
        let catalog = "name,description,columns,key_columns\n\
            A,,K,K\nB,,K,K\nC,,K,K\nD,,K,K\nE,,K,K\n";
        let tables = parse_table_catalog(catalog.as_bytes(), Format::Csv).unwrap();
        let cat = Catalog::new(tables.clone()).unwrap();
        let classes = parse_document_classes(
            "class_id,label,member_tables\nfirst,First,A\nsecond,Second,C|D\n".as_bytes(),
            Format::Csv,
            &cat,
        )
        .unwrap();
        let rels: Vec<_> = [("A", "B"), ("B", "C"), ("C", "D"), ("A", "E"), ("B", "E")]
            .iter()
            .map(|(a, b)| crate::ingest::RelationshipRecord {
                from_table: a.to_string(),
                from_columns: vec!["K".into()],
                to_table: b.to_string(),
                to_columns: vec!["K".into()],
                origin: Default::default(),
            })
            .collect();
        Fixture {
            graph: SchemaGraph::build(&tables, &rels, &classes),
            classes: ClassRegistry::new(classes, &cat).unwrap(),
        }
    }

    #[test]
    fn seeds() {
        let f = fixture();
        let id = Identifier::new(&f.graph, &f.classes);
        assert_eq!(id.resolve_seed("first").unwrap().initial_tables, BTreeSet::from(["A".to_string()]));
        assert_eq!(id.resolve_seed("nope"), Err(IdentifyError::UnknownClass("nope".into())));
        let sel = id.start_selection("second").unwrap();
        assert_eq!(sel.included_tables().collect::<Vec<_>>(), ["C", "D"]);
        sel.validate(&f.classes).unwrap();
    }

    #[test]
    fn expansion_appends_with_depth() {
        let f = fixture();
        let id = Identifier::new(&f.graph, &f.classes);
        let sel = id.start_selection("first").unwrap();
        assert_eq!(id.expand_selection(&sel, 0, None).unwrap(), sel);
        let one = id.expand_selection(&sel, 1, None).unwrap();
        let tables: Vec<_> = one.entries.iter().map(|e| (e.table.as_str(), e.provenance)).collect();
        assert_eq!(
            tables,
            [
                ("A", Provenance::Seed),
                ("B", Provenance::Expansion { depth: 1 }),
                ("E", Provenance::Expansion { depth: 1 })
            ]
        );
        let two = id.expand_selection(&one, 1, None).unwrap();
        assert_eq!(two.entry("C").unwrap().provenance, Provenance::Expansion { depth: 2 });
        let full = id.expand_selection(&two, 5, None).unwrap();
        assert_eq!(id.expand_selection(&full, 5, None).unwrap(), full);
        assert!(id.rank_candidates(&full).unwrap().is_empty());
    }

    #[test]
    fn excluded_entries_are_not_expanded_from() {
        let f = fixture();
        let id = Identifier::new(&f.graph, &f.classes);
        let sel = id.start_selection("first").unwrap();
        let off = id.toggle_table(&sel, "A", false).unwrap();
        assert_eq!(id.expand_selection(&off, 1, None), Err(IdentifyError::NoIncludedTables));
    }

    #[test]
    fn ranking_orders_by_score_then_name() {
        let f = fixture();
        let id = Identifier::new(&f.graph, &f.classes);
        let sel = id.start_selection("first").unwrap();
        // B links to A only via one fk edge, E likewise.
        let r = id.rank_candidates(&sel).unwrap();
        assert_eq!(r.iter().map(|c| (c.table.as_str(), c.score)).collect::<Vec<_>>(), [("B", 1), ("E", 1)]);
        // with B included, E touches both A and B
        let sel = id.toggle_table(&sel, "B", true).unwrap();
        let r = id.rank_candidates(&sel).unwrap();
        assert_eq!(r.iter().map(|c| (c.table.as_str(), c.score)).collect::<Vec<_>>(), [("E", 2), ("C", 1)]);
    }

    #[test]
    fn toggling() {
        let f = fixture();
        let id = Identifier::new(&f.graph, &f.classes);
        let sel = id.start_selection("first").unwrap();
        let once = id.toggle_table(&sel, "D", true).unwrap();
        assert_eq!(once.entry("D").unwrap().provenance, Provenance::Manual);
        let twice = id.toggle_table(&once, "D", true).unwrap();
        assert_eq!(once, twice);
        let off = id.toggle_table(&once, "A", false).unwrap();
        assert!(!off.entry("A").unwrap().included);
        assert_eq!(off.entries.len(), once.entries.len());
        assert_eq!(id.toggle_table(&sel, "ZZ", true), Err(IdentifyError::UnknownTable("ZZ".into())));
        assert_eq!(id.toggle_table(&sel, "first", true), Err(IdentifyError::UnknownTable("first".into())));
    }

    #[test]
    fn entry_json_shape() {
        let e = SelectionEntry {
            table: "EBAN".into(),
            provenance: Provenance::Expansion { depth: 1 },
            included: true,
        };
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, r#"{"table":"EBAN","provenance":"expansion","depth":1,"included":true}"#);
        assert_eq!(serde_json::from_str::<SelectionEntry>(&json).unwrap(), e);
        let seed = r#"{"table":"EKKO","provenance":"seed","depth":null,"included":true}"#;
        assert_eq!(serde_json::from_str::<SelectionEntry>(seed).unwrap().provenance, Provenance::Seed);
        assert!(serde_json::from_str::<SelectionEntry>(r#"{"table":"X","provenance":"seed","depth":2,"included":true}"#).is_err());
    }
}
