use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{EdgeKind, GraphError, LayoutResult, NodeKind, SchemaGraph};

/// Canonical graph document: nodes sorted by id, edges by `(a, b, kind)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub nodes: Vec<NodeDocument>,
    pub edges: Vec<EdgeDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDocument {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeDocument {
    pub a: String,
    pub b: String,
    pub kind: EdgeKind,
}

impl GraphDocument {
    /// Compact canonical JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph documents always serialize")
    }
}

/// Exports the subgraph induced by `ids`, with coordinates taken from
/// `layout` where it has them.
pub fn subgraph_export<'s, I>(g: &SchemaGraph, ids: I, layout: Option<&LayoutResult>) -> Result<GraphDocument, GraphError>
where
    I: IntoIterator<Item = &'s str>,
{
    let mut members = BTreeSet::new();
    for id in ids {
        members.insert(g.index_of(id).ok_or_else(|| GraphError::UnknownNode(id.to_string()))?);
    }
    let mut nodes: Vec<NodeDocument> = members
        .iter()
        .map(|&i| {
            let node = &g.nodes()[i];
            let point = layout.and_then(|l| l.positions.get(&node.id));
            NodeDocument {
                id: node.id.clone(),
                kind: node.kind,
                label: node.label.clone(),
                x: point.map(|p| p.x),
                y: point.map(|p| p.y),
            }
        })
        .collect();
    nodes.sort_by(|a, b| a.id.cmp(&b.id));
    let mut edges: Vec<EdgeDocument> = g
        .edge_ends()
        .iter()
        .zip(g.edges())
        .filter(|((a, b), _)| members.contains(a) && members.contains(b))
        .map(|(_, e)| EdgeDocument {
            a: e.a.clone(),
            b: e.b.clone(),
            kind: e.kind,
        })
        .collect();
    edges.sort();
    Ok(GraphDocument { nodes, edges })
}

impl SchemaGraph {
    /// The subgraph induced by `ids`, keeping node and edge properties.
    pub fn induced<'s, I>(&self, ids: I) -> Result<SchemaGraph, GraphError>
    where
        I: IntoIterator<Item = &'s str>,
    {
        let mut members = BTreeSet::new();
        for id in ids {
            members.insert(self.index_of(id).ok_or_else(|| GraphError::UnknownNode(id.to_string()))?);
        }
        let mut sub = SchemaGraph::new();
        for &i in &members {
            let n = &self.nodes()[i];
            sub.add_node(&n.id, n.kind, &n.label, n.properties.clone())?;
        }
        for (&(a, b), e) in self.edge_ends().iter().zip(self.edges()) {
            if members.contains(&a) && members.contains(&b) {
                sub.add_edge(&e.a, &e.b, e.kind, e.properties.clone())?;
            }
        }
        Ok(sub)
    }

    /// Canonical export of the whole graph without coordinates.
    pub fn export(&self) -> GraphDocument {
        let ids: Vec<&str> = self.nodes().iter().map(|n| n.id.as_str()).collect();
        subgraph_export(self, ids, None).expect("own ids resolve")
    }

    /// Node properties keyed by id, for property-level comparisons.
    pub fn property_map(&self) -> BTreeMap<&str, &BTreeMap<String, String>> {
        self.nodes().iter().map(|n| (n.id.as_str(), &n.properties)).collect()
    }
}
