//! Labeled property graph over tables and document classes.
//!
//! Nodes keep an index of their incident edges, so neighborhood queries and
//! breadth-first expansion never scan the full edge list. The graph is built
//! once and immutable afterwards.

mod export;
mod layout;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{DocumentClassRecord, RelationshipRecord, TableDefinition, CHANGE_DOCUMENTS_CLASS};

pub use export::{subgraph_export, EdgeDocument, GraphDocument, NodeDocument};
pub use layout::{layout, layout_energy, layout_traced, LayoutResult, Point, DEFAULT_ITERATIONS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node `{0}` is not a table")]
    NotATable(String),
    #[error("node `{0}` already exists")]
    DuplicateNode(String),
    #[error("invalid {kind} edge between `{a}` and `{b}`")]
    InvalidEdge { a: String, b: String, kind: EdgeKind },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Table,
    DocumentClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    FkLink,
    ClassMember,
    ChangeLogLink,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 3] = [EdgeKind::FkLink, EdgeKind::ClassMember, EdgeKind::ChangeLogLink];

    /// Edge kinds followed by expansion.
    pub const TRAVERSABLE: [EdgeKind; 2] = [EdgeKind::FkLink, EdgeKind::ChangeLogLink];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::FkLink => "fk_link",
            EdgeKind::ClassMember => "class_member",
            EdgeKind::ChangeLogLink => "change_log_link",
        }
    }

    pub fn is_traversable(self) -> bool {
        matches!(self, EdgeKind::FkLink | EdgeKind::ChangeLogLink)
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
    pub properties: BTreeMap<String, String>,
}

/// Undirected edge; `a` is the lexicographically smaller endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub a: String,
    pub b: String,
    pub kind: EdgeKind,
    pub properties: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default)]
pub struct SchemaGraph {
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    ends: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    edge_keys: HashSet<(usize, usize, EdgeKind)>,
}

impl SchemaGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds the graph from validated metadata.
    ///
    /// Relationship records collapse to one `fk_link` per table pair (the
    /// first record wins, so declared links should precede inferred ones).
    /// The tables of the reserved change-document class are linked to every
    /// member table of a change-tracked class.
    pub fn build(
        catalog: &[TableDefinition],
        relationships: &[RelationshipRecord],
        classes: &[DocumentClassRecord],
    ) -> SchemaGraph {
        let mut g = SchemaGraph::new();
        for t in catalog {
            let mut properties = BTreeMap::new();
            properties.insert("description".to_string(), t.description.clone());
            g.add_node(&t.name, NodeKind::Table, &t.name, properties)
                .expect("catalog names are unique");
        }
        for class in classes {
            let mut properties = BTreeMap::new();
            properties.insert("member_count".to_string(), class.member_tables.len().to_string());
            properties.insert("change_tracked".to_string(), class.change_tracked.to_string());
            g.add_node(&class.class_id, NodeKind::DocumentClass, &class.label, properties)
                .expect("class ids are unique and disjoint from table names");
        }
        for r in relationships {
            if r.from_table == r.to_table {
                continue;
            }
            let mut properties = BTreeMap::new();
            properties.insert("from_table".to_string(), r.from_table.clone());
            properties.insert("from_columns".to_string(), r.from_columns.join("|"));
            properties.insert("to_table".to_string(), r.to_table.clone());
            properties.insert("to_columns".to_string(), r.to_columns.join("|"));
            properties.insert("origin".to_string(), r.origin.as_str().to_string());
            g.add_edge(&r.from_table, &r.to_table, EdgeKind::FkLink, properties)
                .expect("relationships resolve to catalog tables");
        }
        for class in classes {
            for table in &class.member_tables {
                g.add_edge(&class.class_id, table, EdgeKind::ClassMember, BTreeMap::new())
                    .expect("members resolve to catalog tables");
            }
        }
        let change_tables: Vec<&String> = classes
            .iter()
            .filter(|c| c.class_id == CHANGE_DOCUMENTS_CLASS)
            .flat_map(|c| &c.member_tables)
            .collect();
        let tracked = classes
            .iter()
            .filter(|c| c.change_tracked && c.class_id != CHANGE_DOCUMENTS_CLASS)
            .flat_map(|c| &c.member_tables);
        for table in tracked {
            for change_table in &change_tables {
                if table == *change_table {
                    continue;
                }
                let mut properties = BTreeMap::new();
                properties.insert("change_table".to_string(), (*change_table).clone());
                g.add_edge(change_table, table, EdgeKind::ChangeLogLink, properties)
                    .expect("members resolve to catalog tables");
            }
        }
        g.refresh_degrees();
        g
    }

    pub fn add_node(
        &mut self,
        id: &str,
        kind: NodeKind,
        label: &str,
        properties: BTreeMap<String, String>,
    ) -> Result<(), GraphError> {
        if self.index.contains_key(id) {
            return Err(GraphError::DuplicateNode(id.to_string()));
        }
        self.index.insert(id.to_string(), self.nodes.len());
        self.nodes.push(Node {
            id: id.to_string(),
            kind,
            label: label.to_string(),
            properties,
        });
        self.adjacency.push(Vec::new());
        Ok(())
    }

    /// Adds an undirected edge. Returns `Ok(false)` when an edge of the same
    /// kind already joins the pair.
    pub fn add_edge(
        &mut self,
        a: &str,
        b: &str,
        kind: EdgeKind,
        properties: BTreeMap<String, String>,
    ) -> Result<bool, GraphError> {
        let ia = self.require(a)?;
        let ib = self.require(b)?;
        let invalid = || GraphError::InvalidEdge {
            a: a.to_string(),
            b: b.to_string(),
            kind,
        };
        let kinds = (self.nodes[ia].kind, self.nodes[ib].kind);
        match kind {
            _ if ia == ib => return Err(invalid()),
            EdgeKind::ClassMember => {
                if !matches!(kinds, (NodeKind::DocumentClass, NodeKind::Table) | (NodeKind::Table, NodeKind::DocumentClass)) {
                    return Err(invalid());
                }
            }
            EdgeKind::FkLink | EdgeKind::ChangeLogLink => {
                if kinds != (NodeKind::Table, NodeKind::Table) {
                    return Err(invalid());
                }
            }
        }
        let (lo, hi) = if self.nodes[ia].id <= self.nodes[ib].id { (ia, ib) } else { (ib, ia) };
        if !self.edge_keys.insert((lo, hi, kind)) {
            return Ok(false);
        }
        let e = self.edges.len();
        self.edges.push(Edge {
            a: self.nodes[lo].id.clone(),
            b: self.nodes[hi].id.clone(),
            kind,
            properties,
        });
        self.ends.push((lo, hi));
        self.adjacency[lo].push(e);
        self.adjacency[hi].push(e);
        Ok(true)
    }

    /// Recomputes the cached `link_degree` property of every table node.
    pub fn refresh_degrees(&mut self) {
        for i in 0..self.nodes.len() {
            if self.nodes[i].kind == NodeKind::Table {
                let degree = self.link_degree_at(i);
                self.nodes[i].properties.insert("link_degree".to_string(), degree.to_string());
            }
        }
    }

    fn require(&self, id: &str) -> Result<usize, GraphError> {
        self.index.get(id).copied().ok_or_else(|| GraphError::UnknownNode(id.to_string()))
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub(crate) fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub(crate) fn edge_ends(&self) -> &[(usize, usize)] {
        &self.ends
    }

    fn other_end(&self, edge: usize, from: usize) -> usize {
        let (a, b) = self.ends[edge];
        if a == from {
            b
        } else {
            a
        }
    }

    /// Edges incident to `id`, via the adjacency index.
    pub fn incident_edges(&self, id: &str) -> Result<impl Iterator<Item = &Edge>, GraphError> {
        let i = self.require(id)?;
        Ok(self.adjacency[i].iter().map(move |&e| &self.edges[e]))
    }

    /// Nodes sharing an edge of one of `kinds` with `id`.
    pub fn neighbors(&self, id: &str, kinds: &[EdgeKind]) -> Result<BTreeSet<String>, GraphError> {
        let i = self.require(id)?;
        Ok(self.adjacency[i]
            .iter()
            .filter(|&&e| kinds.contains(&self.edges[e].kind))
            .map(|&e| self.nodes[self.other_end(e, i)].id.clone())
            .collect())
    }

    fn link_degree_at(&self, i: usize) -> usize {
        self.adjacency[i].iter().filter(|&&e| self.edges[e].kind.is_traversable()).count()
    }

    /// Number of `fk_link` and `change_log_link` edges at `id`; the degree the
    /// hub rule compares against its limit.
    pub fn link_degree(&self, id: &str) -> Result<usize, GraphError> {
        self.require(id).map(|i| self.link_degree_at(i))
    }

    /// 95th percentile (nearest rank) of table link degrees, or `None` for a
    /// graph without tables.
    pub fn default_hub_limit(&self) -> Option<usize> {
        let mut degrees: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| self.nodes[i].kind == NodeKind::Table)
            .map(|i| self.link_degree_at(i))
            .collect();
        if degrees.is_empty() {
            return None;
        }
        degrees.sort_unstable();
        let rank = (degrees.len() * 95).div_ceil(100).max(1);
        Some(degrees[rank - 1])
    }

    /// Breadth-first closure of `seed` over traversable edges, at most
    /// `depth` hops. Nodes whose link degree exceeds `hub_limit` are never
    /// traversed through, but are still included when reached. Seed nodes are
    /// always expanded from.
    pub fn expand<'s, I>(&self, seed: I, depth: usize, hub_limit: Option<usize>) -> Result<BTreeSet<String>, GraphError>
    where
        I: IntoIterator<Item = &'s str>,
    {
        self.expansion(seed, depth, hub_limit)
            .map(|x| x.distances.into_keys().collect())
    }

    /// Like [`SchemaGraph::expand`], but reports hop distances and the nodes
    /// traversed through.
    pub fn expansion<'s, I>(&self, seed: I, depth: usize, hub_limit: Option<usize>) -> Result<Expansion, GraphError>
    where
        I: IntoIterator<Item = &'s str>,
    {
        let mut dist: Vec<Option<usize>> = vec![None; self.nodes.len()];
        let mut is_seed = vec![false; self.nodes.len()];
        let mut queue = VecDeque::new();
        for id in seed {
            let i = self.require(id)?;
            if self.nodes[i].kind != NodeKind::Table {
                return Err(GraphError::NotATable(id.to_string()));
            }
            if dist[i].is_none() {
                dist[i] = Some(0);
                is_seed[i] = true;
                queue.push_back(i);
            }
        }
        let mut traversed = Vec::new();
        while let Some(u) = queue.pop_front() {
            let d = dist[u].expect("queued nodes have a distance");
            if d >= depth {
                continue;
            }
            if !is_seed[u] && hub_limit.is_some_and(|limit| self.link_degree_at(u) > limit) {
                continue;
            }
            traversed.push(self.nodes[u].id.clone());
            for &e in &self.adjacency[u] {
                if !self.edges[e].kind.is_traversable() {
                    continue;
                }
                let v = self.other_end(e, u);
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        Ok(Expansion {
            distances: dist
                .iter()
                .enumerate()
                .filter_map(|(i, d)| d.map(|d| (self.nodes[i].id.clone(), d)))
                .collect(),
            traversed,
        })
    }

    /// Rebuilds the adjacency index from the edge list and compares.
    pub fn adjacency_consistent(&self) -> bool {
        let mut rebuilt = vec![Vec::new(); self.nodes.len()];
        for (e, &(a, b)) in self.ends.iter().enumerate() {
            rebuilt[a].push(e);
            rebuilt[b].push(e);
        }
        rebuilt == self.adjacency
            && self
                .edges
                .iter()
                .zip(&self.ends)
                .all(|(edge, &(a, b))| edge.a == self.nodes[a].id && edge.b == self.nodes[b].id)
    }
}

/// Result of a traced expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    /// Every reached table with its hop distance from the seed set.
    pub distances: BTreeMap<String, usize>,
    /// Nodes whose neighbors were explored, in BFS order.
    pub traversed: Vec<String>,
}
