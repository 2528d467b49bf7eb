use thiserror::Error;

use crate::graph::GraphError;
use crate::identify::IdentifyError;
use crate::ingest::IngestError;
use crate::ocel::OcelError;

/// Coarse classification shared by CLI exit codes, HTTP statuses and FFI
/// status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    /// The request or invocation breaks an operation's contract.
    Usage,
    /// Input metadata or documents are malformed.
    Parse,
    /// A named class, table, node, selection or job does not exist.
    UnknownEntity,
    /// Row data could not be turned into a log.
    Extraction,
    /// A produced or supplied log has validation findings.
    Validation,
    Io,
}

impl ErrorKind {
    /// Process exit code for the CLI.
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Io => 1,
            ErrorKind::Usage => 2,
            ErrorKind::Parse => 3,
            ErrorKind::UnknownEntity => 4,
            ErrorKind::Extraction => 5,
            ErrorKind::Validation => 6,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Usage => "usage",
            ErrorKind::Parse => "parse",
            ErrorKind::UnknownEntity => "unknown_entity",
            ErrorKind::Extraction => "extraction",
            ErrorKind::Validation => "validation",
            ErrorKind::Io => "io",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Identify(#[from] IdentifyError),
    #[error(transparent)]
    Ocel(#[from] OcelError),
    #[error("{0}")]
    Usage(String),
    #[error("{0} validation finding(s)")]
    Validation(usize),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

fn ingest_kind(e: &IngestError) -> ErrorKind {
    match e {
        IngestError::Io(_) => ErrorKind::Io,
        _ => ErrorKind::Parse,
    }
}

fn graph_kind(e: &GraphError) -> ErrorKind {
    match e {
        GraphError::UnknownNode(_) | GraphError::NotATable(_) => ErrorKind::UnknownEntity,
        GraphError::DuplicateNode(_) | GraphError::InvalidEdge { .. } => ErrorKind::Usage,
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Ingest(e) => ingest_kind(e),
            Error::Graph(e) => graph_kind(e),
            Error::Identify(e) => match e {
                IdentifyError::UnknownClass(_) | IdentifyError::UnknownTable(_) | IdentifyError::UnknownSelection(_) => {
                    ErrorKind::UnknownEntity
                }
                IdentifyError::NoIncludedTables | IdentifyError::InvalidSelection(_) => ErrorKind::Usage,
                IdentifyError::StorageFailure(_) => ErrorKind::Io,
                IdentifyError::Graph(g) => graph_kind(g),
            },
            Error::Ocel(e) => match e {
                OcelError::InvalidConfig(_)
                | OcelError::NoIncludedTables
                | OcelError::MissingRules(_)
                | OcelError::TableNotSelected(_)
                | OcelError::UnknownTable(_)
                | OcelError::UnknownFilterColumn { .. }
                | OcelError::UnknownColumn { .. }
                | OcelError::TypeMismatch { .. } => ErrorKind::Usage,
                OcelError::Parse(_) => ErrorKind::Parse,
                OcelError::Ingest(i) => ingest_kind(i),
                OcelError::MissingDataset(_)
                | OcelError::UnparsableTimestamp { .. }
                | OcelError::MissingObjectKey { .. }
                | OcelError::OrphanItem(_)
                | OcelError::UnknownObjectClass(_)
                | OcelError::DuplicateEventId(_)
                | OcelError::EmptyOmap(_)
                | OcelError::UnresolvedObject { .. } => ErrorKind::Extraction,
            },
            Error::Usage(_) => ErrorKind::Usage,
            Error::Validation(_) => ErrorKind::Validation,
            Error::Io(_) => ErrorKind::Io,
        }
    }

    /// Stable snake_case name of the error variant, for machine consumers.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Ingest(e) => match e {
                IngestError::Syntax { .. } => "syntax_error",
                IngestError::DuplicateTable(_) => "duplicate_table",
                IngestError::MissingKeyColumns(_) => "missing_key_columns",
                IngestError::DuplicateColumn { .. } => "duplicate_column",
                IngestError::UnknownTable(_) => "unknown_table",
                IngestError::ArityMismatch(_) => "arity_mismatch",
                IngestError::UnknownColumn { .. } => "unknown_column",
                IngestError::DuplicateClass(_) => "duplicate_class",
                IngestError::EmptyClass(_) => "empty_class",
                IngestError::MissingKeyValue { .. } => "missing_key_value",
                IngestError::RowCapExceeded { .. } => "row_cap_exceeded",
                IngestError::Io(_) => "io_error",
            },
            Error::Graph(GraphError::UnknownNode(_)) | Error::Identify(IdentifyError::Graph(GraphError::UnknownNode(_))) => {
                "unknown_node"
            }
            Error::Graph(GraphError::NotATable(_)) | Error::Identify(IdentifyError::Graph(GraphError::NotATable(_))) => {
                "not_a_table"
            }
            Error::Graph(_) | Error::Identify(IdentifyError::Graph(_)) => "invalid_graph",
            Error::Identify(e) => match e {
                IdentifyError::UnknownClass(_) => "unknown_class",
                IdentifyError::UnknownTable(_) => "unknown_table",
                IdentifyError::UnknownSelection(_) => "unknown_selection",
                IdentifyError::NoIncludedTables => "no_included_tables",
                IdentifyError::InvalidSelection(_) => "invalid_selection",
                IdentifyError::StorageFailure(_) => "storage_failure",
                IdentifyError::Graph(_) => unreachable!("matched above"),
            },
            Error::Ocel(e) => match e {
                OcelError::InvalidConfig(_) => "invalid_config",
                OcelError::NoIncludedTables => "no_included_tables",
                OcelError::MissingRules(_) => "missing_rules",
                OcelError::TableNotSelected(_) => "table_not_selected",
                OcelError::UnknownTable(_) => "unknown_table",
                OcelError::MissingDataset(_) => "missing_dataset",
                OcelError::UnknownFilterColumn { .. } => "unknown_filter_column",
                OcelError::UnknownColumn { .. } => "unknown_column",
                OcelError::TypeMismatch { .. } => "type_mismatch",
                OcelError::UnparsableTimestamp { .. } => "unparsable_timestamp",
                OcelError::MissingObjectKey { .. } => "missing_object_key",
                OcelError::OrphanItem(_) => "orphan_item",
                OcelError::UnknownObjectClass(_) => "unknown_object_class",
                OcelError::DuplicateEventId(_) => "duplicate_event_id",
                OcelError::EmptyOmap(_) => "empty_omap",
                OcelError::UnresolvedObject { .. } => "unresolved_object",
                OcelError::Parse(_) => "malformed_ocel",
                OcelError::Ingest(i) => Error::Ingest(i.clone()).code(),
            },
            Error::Usage(_) => "usage",
            Error::Validation(_) => "validation_failure",
            Error::Io(_) => "io_error",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_and_codes() {
        let e: Error = IdentifyError::UnknownClass("x".into()).into();
        assert_eq!((e.kind(), e.code()), (ErrorKind::UnknownEntity, "unknown_class"));
        let e: Error = OcelError::TableNotSelected("EKET".into()).into();
        assert_eq!(e.kind().exit_code(), 2);
        let e: Error = IngestError::DuplicateTable("EKKO".into()).into();
        assert_eq!(e.kind().exit_code(), 3);
        let e: Error = OcelError::OrphanItem("CDPOS:1".into()).into();
        assert_eq!(e.kind().exit_code(), 5);
        assert_eq!(Error::Validation(2).kind().exit_code(), 6);
        let e: Error = IdentifyError::Graph(GraphError::UnknownNode("Q".into())).into();
        assert_eq!((e.kind(), e.code()), (ErrorKind::UnknownEntity, "unknown_node"));
    }
}
