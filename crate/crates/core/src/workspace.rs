//! A loaded dataset: metadata, schema graph and row streams, plus the
//! pipeline operations every front end calls.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::graph::{layout, subgraph_export, GraphDocument, LayoutResult, NodeKind, SchemaGraph, DEFAULT_ITERATIONS};
use crate::identify::{Identifier, TableSelection};
use crate::ingest::{
    infer_relationships, load_row_data, merge_relationships, parse_document_classes, parse_relationships,
    parse_table_catalog, Catalog, ClassRegistry, Format, IngestError, RelationshipRecord, RowDataset, RowOptions,
    RowSource, DEFAULT_BATCH_SIZE, DEFAULT_ROW_CAP,
};
use crate::ocel::{extract_log, ExtractionConfig, ObjectCentricLog};
use crate::{Error, Result};

/// How expansion treats high-degree tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HubLimit {
    /// 95th percentile of table link degrees.
    #[default]
    Auto,
    /// Traverse through every table.
    Unlimited,
    Fixed(usize),
}

impl FromStr for HubLimit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(HubLimit::Auto),
            "none" => Ok(HubLimit::Unlimited),
            n => n
                .parse()
                .map(HubLimit::Fixed)
                .map_err(|_| format!("hub limit must be `auto`, `none` or a non-negative integer, got `{n}`")),
        }
    }
}

impl fmt::Display for HubLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HubLimit::Auto => f.write_str("auto"),
            HubLimit::Unlimited => f.write_str("none"),
            HubLimit::Fixed(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Settings {
    pub row_cap: usize,
    pub batch_size: usize,
    /// Adds inferred relationships sharing at least this many key columns.
    pub infer_min_shared_keys: Option<usize>,
    pub hub_limit: HubLimit,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            row_cap: DEFAULT_ROW_CAP,
            batch_size: DEFAULT_BATCH_SIZE,
            infer_min_shared_keys: None,
            hub_limit: HubLimit::Auto,
        }
    }
}

/// Raw inputs of a dataset.
#[derive(Debug, Clone)]
pub struct Sources {
    pub catalog: (Vec<u8>, Format),
    pub relationships: Option<(Vec<u8>, Format)>,
    pub classes: (Vec<u8>, Format),
    /// Row files keyed by table name.
    pub rows: BTreeMap<String, RowSource>,
}

impl Sources {
    /// Reads `catalog`, `relationships` (optional) and `classes` as `.csv` or
    /// `.json` from `dir`, and row files `<TABLE>.csv` from `dir/rows` or,
    /// failing that, `dir` itself.
    pub fn from_dir(dir: &Path) -> Result<Sources> {
        if !dir.is_dir() {
            return Err(Error::Usage(format!("dataset directory `{}` not found", dir.display())));
        }
        let find = |stem: &str| -> Result<Option<(Vec<u8>, Format)>> {
            for (ext, format) in [("csv", Format::Csv), ("json", Format::Json)] {
                let path = dir.join(format!("{stem}.{ext}"));
                if path.is_file() {
                    return Ok(Some((fs::read(&path)?, format)));
                }
            }
            Ok(None)
        };
        let missing = |stem: &str| Error::Usage(format!("`{}` has no {stem}.csv or {stem}.json", dir.display()));
        let catalog = find("catalog")?.ok_or_else(|| missing("catalog"))?;
        let classes = find("classes")?.ok_or_else(|| missing("classes"))?;
        let relationships = find("relationships")?;
        let rows_dir = if dir.join("rows").is_dir() { dir.join("rows") } else { dir.to_path_buf() };
        let mut rows = BTreeMap::new();
        for entry in fs::read_dir(&rows_dir)? {
            let path = entry?.path();
            let (Some(stem), Some("csv")) = (path.file_stem().and_then(|s| s.to_str()), path.extension().and_then(|s| s.to_str()))
            else {
                continue;
            };
            if stem.chars().next().is_some_and(|c| c.is_ascii_uppercase() || c == '_') {
                rows.insert(stem.to_string(), RowSource::File(path.clone()));
            }
        }
        Ok(Sources {
            catalog,
            relationships,
            classes,
            rows,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub tables: usize,
    pub relationships: usize,
    pub classes: usize,
    pub row_files: usize,
    pub rows: usize,
    pub nodes: usize,
    pub edges: usize,
    pub default_hub_limit: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Workspace {
    root: Option<PathBuf>,
    catalog: Catalog,
    relationships: Vec<RelationshipRecord>,
    classes: ClassRegistry,
    graph: SchemaGraph,
    datasets: BTreeMap<String, RowDataset>,
    settings: Settings,
}

impl Workspace {
    pub fn open(dir: impl AsRef<Path>, settings: Settings) -> Result<Workspace> {
        let dir = dir.as_ref();
        let mut ws = Workspace::from_sources(Sources::from_dir(dir)?, settings)?;
        ws.root = Some(dir.to_path_buf());
        Ok(ws)
    }

    pub fn from_sources(sources: Sources, settings: Settings) -> Result<Workspace> {
        let tables = parse_table_catalog(sources.catalog.0.as_slice(), sources.catalog.1)?;
        let catalog = Catalog::new(tables)?;
        let declared = match &sources.relationships {
            Some((bytes, format)) => parse_relationships(bytes.as_slice(), *format, &catalog)?,
            None => Vec::new(),
        };
        let relationships = match settings.infer_min_shared_keys {
            Some(min) => merge_relationships(declared, infer_relationships(catalog.tables(), min)),
            None => declared,
        };
        let class_records = parse_document_classes(sources.classes.0.as_slice(), sources.classes.1, &catalog)?;
        let graph = SchemaGraph::build(catalog.tables(), &relationships, &class_records);
        let classes = ClassRegistry::new(class_records, &catalog)?;
        let options = RowOptions {
            batch_size: settings.batch_size,
            row_cap: settings.row_cap,
        };
        let mut datasets = BTreeMap::new();
        for (table, source) in sources.rows {
            let def = catalog.get(&table).ok_or_else(|| IngestError::UnknownTable(table.clone()))?;
            datasets.insert(table, load_row_data(def, source, options)?);
        }
        Ok(Workspace {
            root: None,
            catalog,
            relationships,
            classes,
            graph,
            datasets,
            settings,
        })
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn relationships(&self) -> &[RelationshipRecord] {
        &self.relationships
    }

    pub fn classes(&self) -> &ClassRegistry {
        &self.classes
    }

    pub fn graph(&self) -> &SchemaGraph {
        &self.graph
    }

    pub fn datasets(&self) -> &BTreeMap<String, RowDataset> {
        &self.datasets
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    pub fn identifier(&self) -> Identifier<'_> {
        Identifier::new(&self.graph, &self.classes)
    }

    pub fn summary(&self) -> Summary {
        Summary {
            tables: self.catalog.len(),
            relationships: self.relationships.len(),
            classes: self.classes.classes().len(),
            row_files: self.datasets.len(),
            rows: self.datasets.values().map(RowDataset::row_count).sum(),
            nodes: self.graph.node_count(),
            edges: self.graph.edge_count(),
            default_hub_limit: self.graph.default_hub_limit(),
        }
    }

    /// Resolves a hub-limit request, falling back to the configured setting.
    pub fn hub_limit(&self, requested: Option<HubLimit>) -> Option<usize> {
        match requested.unwrap_or(self.settings.hub_limit) {
            HubLimit::Auto => self.graph.default_hub_limit(),
            HubLimit::Unlimited => None,
            HubLimit::Fixed(n) => Some(n),
        }
    }

    /// Seeds a selection on `class_id` and expands it `depth` hops.
    pub fn identify(&self, class_id: &str, depth: usize, hub_limit: Option<HubLimit>) -> Result<TableSelection> {
        let id = self.identifier();
        let seed = id.start_selection(class_id)?;
        Ok(id.expand_selection(&seed, depth, self.hub_limit(hub_limit))?)
    }

    pub fn extract(
        &self,
        selection: &TableSelection,
        config: &ExtractionConfig,
        progress: impl FnMut(usize, usize),
    ) -> Result<ObjectCentricLog> {
        selection.validate(&self.classes)?;
        Ok(extract_log(selection, config, &self.catalog, &self.classes, &self.datasets, progress)?)
    }

    /// Layout of the whole graph.
    pub fn layout(&self, seed: u64, iterations: usize) -> LayoutResult {
        layout(&self.graph, seed, iterations)
    }

    /// The tables within `depth` hops of `node` (a table or a class, whose
    /// members are the start set), laid out on their own.
    pub fn neighborhood(&self, node: &str, depth: usize, hub_limit: Option<HubLimit>) -> Result<GraphDocument> {
        let start = self
            .graph
            .node(node)
            .ok_or_else(|| crate::graph::GraphError::UnknownNode(node.to_string()))?;
        let seeds: Vec<&str> = match start.kind {
            NodeKind::Table => vec![node],
            NodeKind::DocumentClass => self
                .classes
                .get(node)
                .map(|c| c.member_tables.iter().map(String::as_str).collect())
                .unwrap_or_default(),
        };
        let mut ids: BTreeSet<String> = self.graph.expand(seeds, depth, self.hub_limit(hub_limit))?;
        if start.kind == NodeKind::DocumentClass {
            ids.insert(node.to_string());
        }
        let sub = self.graph.induced(ids.iter().map(String::as_str))?;
        let placed = layout(&sub, 0, DEFAULT_ITERATIONS);
        Ok(subgraph_export(&sub, ids.iter().map(String::as_str), Some(&placed))?)
    }
}

/// Directory of the dataset bundled with this crate.
pub fn sample_dataset_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("sample")
}
