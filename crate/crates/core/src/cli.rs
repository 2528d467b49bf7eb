//! The `erpgraph` command line.
//!
//! stdout carries data only. Diagnostics go to stderr, and the exit code is
//! [`ErrorKind::exit_code`] of the failure.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::graph::{subgraph_export, DEFAULT_ITERATIONS};
use crate::identify::{SelectionEntry, TableSelection};
use crate::ocel::{serialize_ocel, validate_ocel, ExtractionConfig};
use crate::service::{self, ServiceConfig};
use crate::workspace::{sample_dataset_dir, HubLimit};
use crate::{Error, ErrorKind, Result, Settings, Workspace};

#[derive(Debug, Parser)]
#[command(name = "erpgraph", version, about = "Explore ERP schemas and extract object-centric event logs")]
pub struct Cli {
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,

    /// Dataset directory. Defaults to the bundled sample.
    #[arg(long, global = true, env = "ERPGRAPH_DATASET")]
    pub dataset: Option<PathBuf>,

    /// Maximum rows loaded per table.
    #[arg(long, global = true, env = "ERPGRAPH_ROW_CAP")]
    pub row_cap: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a dataset and report what it contains.
    Ingest { dir: PathBuf },
    /// Seed a selection on a document class and expand it.
    Identify {
        #[arg(long = "class")]
        class_id: String,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        /// `auto`, `none` or a link-degree bound.
        #[arg(long)]
        hub_limit: Option<HubLimit>,
        /// Also write the selection document to this file.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Extract an OCEL log from a saved selection.
    Extract {
        #[arg(long)]
        selection: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Output file, or `-` for stdout.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check an OCEL file.
    Validate {
        #[arg(long)]
        ocel: PathBuf,
    },
    /// Lay out the whole schema graph.
    Layout {
        /// Output file, or `-` for stdout.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
        iterations: usize,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "ERPGRAPH_LISTEN", default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
        /// Where selections and finished logs are kept.
        #[arg(long, env = "ERPGRAPH_DATA_DIR", default_value = "erpgraph-data")]
        data_dir: PathBuf,
        /// Default hub limit for expansion.
        #[arg(long, env = "ERPGRAPH_HUB_LIMIT")]
        hub_limit: Option<HubLimit>,
    },
}

/// The `identify --json` report.
#[derive(Debug, Serialize)]
pub struct IdentifyReport<'a> {
    pub class_id: &'a str,
    pub depth: usize,
    pub hub_limit: Option<usize>,
    pub tables: Vec<&'a str>,
    pub entries: &'a [SelectionEntry],
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ErrorKind::Usage.exit_code() } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let json = cli.json;
    match execute(cli, &mut io::stdout().lock()) {
        Ok(()) => 0,
        Err(e) => {
            if json {
                eprintln!("{}", json!({ "error": e.code(), "detail": e.to_string() }));
            } else {
                eprintln!("error: {e}");
            }
            e.kind().exit_code()
        }
    }
}

/// Runs a parsed command, writing its data to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let mut settings = Settings::default();
    if let Some(cap) = cli.row_cap {
        settings.row_cap = cap;
    }
    let dataset = cli.dataset.clone().unwrap_or_else(sample_dataset_dir);
    match cli.command {
        Command::Ingest { dir } => {
            let ws = Workspace::open(&dir, settings)?;
            let s = ws.summary();
            if cli.json {
                emit_json(out, &s)?;
            } else {
                writeln!(
                    out,
                    "{} tables, {} relationships, {} classes, {} rows in {} files; graph {} nodes, {} edges",
                    s.tables, s.relationships, s.classes, s.rows, s.row_files, s.nodes, s.edges
                )?;
            }
        }
        Command::Identify {
            class_id,
            depth,
            hub_limit,
            save,
        } => {
            let ws = Workspace::open(&dataset, settings)?;
            let sel = ws.identify(&class_id, depth, hub_limit)?;
            if let Some(path) = save {
                write_output(&path, &pretty(&sel)?, out)?;
            }
            if cli.json {
                let report = IdentifyReport {
                    class_id: &sel.class_id,
                    depth,
                    hub_limit: ws.hub_limit(hub_limit),
                    tables: sel.included_tables().collect(),
                    entries: &sel.entries,
                };
                emit_json(out, &report)?;
            } else {
                for e in &sel.entries {
                    let mark = if e.included { "" } else { " (excluded)" };
                    writeln!(out, "{}\t{}{mark}", e.table, describe(e))?;
                }
            }
        }
        Command::Extract { selection, config, out: path } => {
            let selection: TableSelection = serde_json::from_slice(&read_input(&selection, "selection")?)
                .map_err(|e| Error::Usage(format!("selection file is not a selection document: {e}")))?;
            let config = ExtractionConfig::from_reader(read_input(&config, "config")?.as_slice())?;
            let ws = Workspace::open(&dataset, settings)?;
            let log = ws.extract(&selection, &config, |done, total| {
                tracing::debug!(done, total, "extraction progress");
            })?;
            let bytes = serialize_ocel(&log);
            let report = validate_ocel(&bytes);
            if !report.is_valid() {
                for f in &report.findings {
                    eprintln!("{}: {}", f.path, f.message);
                }
                return Err(Error::Validation(report.findings.len()));
            }
            let to_stdout = path.as_os_str() == "-";
            write_output(&path, &bytes, out)?;
            if cli.json && !to_stdout {
                emit_json(
                    out,
                    &json!({ "events": log.events.len(), "objects": log.objects.len(), "out": path }),
                )?;
            } else {
                eprintln!("{} events, {} objects", log.events.len(), log.objects.len());
            }
        }
        Command::Validate { ocel } => {
            let report = validate_ocel(&read_input(&ocel, "OCEL file")?);
            if cli.json {
                emit_json(out, &report)?;
            } else {
                for f in &report.findings {
                    writeln!(out, "{}: {}", f.path, f.message)?;
                }
            }
            if !report.is_valid() {
                return Err(Error::Validation(report.findings.len()));
            }
        }
        Command::Layout { out: path, seed, iterations } => {
            let ws = Workspace::open(&dataset, settings)?;
            let placed = ws.layout(seed, iterations);
            let g = ws.graph();
            let doc = subgraph_export(g, g.nodes().iter().map(|n| n.id.as_str()), Some(&placed))?;
            write_output(&path, doc.to_json().as_bytes(), out)?;
        }
        Command::Serve {
            listen,
            data_dir,
            hub_limit,
        } => {
            if let Some(h) = hub_limit {
                settings.hub_limit = h;
            }
            let config = ServiceConfig {
                listen,
                data_dir,
                settings,
                dataset: Some(dataset),
            };
            tokio::runtime::Runtime::new()?.block_on(service::serve(config))?;
        }
    }
    Ok(())
}

fn describe(e: &SelectionEntry) -> String {
    match e.provenance.depth() {
        Some(d) => format!("{} {d}", e.provenance.label()),
        None => e.provenance.label().to_string(),
    }
}

/// A missing input is a usage error, not an i/o failure.
fn read_input(path: &Path, what: &str) -> Result<Vec<u8>> {
    if !path.is_file() {
        return Err(Error::Usage(format!("{what} `{}` not found", path.display())));
    }
    Ok(fs::read(path)?)
}

fn write_output(path: &Path, bytes: &[u8], out: &mut dyn Write) -> Result<()> {
    if path.as_os_str() == "-" {
        out.write_all(bytes)?;
    } else {
        fs::write(path, bytes)?;
    }
    Ok(())
}

fn pretty<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    out.write_all(&pretty(value)?)?;
    Ok(())
}
