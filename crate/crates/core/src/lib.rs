//! Process identification and object-centric event log extraction for
//! ERP-style relational data.
//!
//! The pipeline mirrors how an analyst works through an unfamiliar ERP schema:
//!
//! 1. [`ingest`] parses schema metadata (tables, relationships, document
//!    classes) and streams row data from CSV files.
//! 2. [`graph`] encodes the metadata as a labeled property graph with
//!    per-node adjacency, breadth-first expansion and a deterministic
//!    force-directed layout.
//! 3. [`identify`] turns a document class into a curated, persistent table
//!    selection.
//! 4. [`ocel`] extracts an OCEL 1.0 JSON log from the selected tables under
//!    declarative rules.
//!
//! [`workspace::Workspace`] ties the stages together and is shared by the
//! `erpgraph` CLI, the HTTP [`service`], and the C bindings.

pub mod cli;
mod error;
pub mod graph;
pub mod identify;
pub mod ingest;
pub mod ocel;
pub mod service;
pub mod timefmt;
pub mod workspace;

pub use error::{Error, ErrorKind, Result};
pub use workspace::{Settings, Workspace};
