use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, Read};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use super::{IngestError, TableDefinition, DEFAULT_BATCH_SIZE, DEFAULT_ROW_CAP};

/// Where row bytes come from. Every pass re-opens the source.
#[derive(Debug, Clone)]
pub enum RowSource {
    File(PathBuf),
    Bytes(Arc<[u8]>),
}

impl RowSource {
    fn open(&self) -> io::Result<Box<dyn Read + Send>> {
        Ok(match self {
            RowSource::File(path) => Box::new(BufReader::new(File::open(path)?)),
            RowSource::Bytes(bytes) => Box::new(io::Cursor::new(Arc::clone(bytes))),
        })
    }
}

impl From<Vec<u8>> for RowSource {
    fn from(bytes: Vec<u8>) -> Self {
        RowSource::Bytes(bytes.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowOptions {
    pub batch_size: usize,
    pub row_cap: usize,
}

impl Default for RowOptions {
    fn default() -> Self {
        RowOptions {
            batch_size: DEFAULT_BATCH_SIZE,
            row_cap: DEFAULT_ROW_CAP,
        }
    }
}

#[derive(Debug)]
struct Header {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

/// One record of a row file. Empty cells read as null.
#[derive(Clone)]
pub struct Row {
    header: Arc<Header>,
    values: Vec<String>,
    number: usize,
}

impl Row {
    /// Value of `column`, or `None` when the column is absent or the cell is empty.
    pub fn get(&self, column: &str) -> Option<&str> {
        let &i = self.header.index.get(column)?;
        self.values.get(i).map(String::as_str).filter(|v| !v.is_empty())
    }

    /// One-based data row number (the header is not counted).
    pub fn number(&self) -> usize {
        self.number
    }
}

impl fmt::Debug for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (name, value) in self.header.names.iter().zip(&self.values) {
            map.entry(name, value);
        }
        map.finish()
    }
}

/// A validated, re-iterable row stream for one table.
///
/// At most `batch_size` rows are resident at a time per iterator; the largest
/// batch ever buffered is observable through [`RowDataset::peak_batch`].
/// A single iterator is single-consumer; call [`RowDataset::rows`] again for
/// another pass.
#[derive(Debug, Clone)]
pub struct RowDataset {
    table: String,
    source: RowSource,
    columns: Vec<String>,
    row_count: usize,
    batch_size: usize,
    peak: Arc<AtomicUsize>,
}

impl RowDataset {
    pub fn table(&self) -> &str {
        &self.table
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    /// Column names in file order.
    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> RowIter {
        RowIter::open(&self.table, &self.source, self.batch_size.max(1), Arc::clone(&self.peak))
    }

    /// Largest number of rows buffered at once by any pass so far.
    pub fn peak_batch(&self) -> usize {
        self.peak.load(Ordering::Relaxed)
    }
}

/// Validates a row file for `table` and returns a streaming dataset over it.
///
/// Header columns must belong to the table, every row must carry all key
/// columns, and the row count may not exceed `options.row_cap`.
pub fn load_row_data(
    table: &TableDefinition,
    source: RowSource,
    options: RowOptions,
) -> Result<RowDataset, IngestError> {
    let peak = Arc::new(AtomicUsize::new(0));
    let mut iter = RowIter::open(&table.name, &source, options.batch_size.max(1), Arc::clone(&peak));
    let columns = iter.header_names()?;
    if let Some(unknown) = columns.iter().find(|c| !table.has_column(c)) {
        return Err(IngestError::UnknownColumn {
            table: table.name.clone(),
            column: unknown.clone(),
        });
    }
    let mut row_count = 0usize;
    for row in iter {
        let row = row?;
        if table.key_columns.iter().any(|k| row.get(k).is_none()) {
            return Err(IngestError::MissingKeyValue {
                table: table.name.clone(),
                row: row.number(),
            });
        }
        row_count += 1;
        if row_count > options.row_cap {
            return Err(IngestError::RowCapExceeded {
                table: table.name.clone(),
                cap: options.row_cap,
            });
        }
    }
    Ok(RowDataset {
        table: table.name.clone(),
        source,
        columns,
        row_count,
        batch_size: options.batch_size.max(1),
        peak,
    })
}

/// Batched iterator over the rows of one file.
pub struct RowIter {
    table: String,
    state: Result<ReaderState, Option<IngestError>>,
    batch: VecDeque<Row>,
    batch_size: usize,
    peak: Arc<AtomicUsize>,
}

struct ReaderState {
    reader: csv::Reader<Box<dyn Read + Send>>,
    header: Arc<Header>,
    record: csv::StringRecord,
    next_number: usize,
    done: bool,
}

impl RowIter {
    fn open(table: &str, source: &RowSource, batch_size: usize, peak: Arc<AtomicUsize>) -> Self {
        let state = source
            .open()
            .map_err(|e| IngestError::Io(format!("{table}: {e}")))
            .and_then(|input| {
                let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
                let names: Vec<String> = reader
                    .headers()
                    .map_err(IngestError::from_csv)?
                    .iter()
                    .map(|h| h.trim().to_string())
                    .collect();
                let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
                Ok(ReaderState {
                    reader,
                    header: Arc::new(Header { names, index }),
                    record: csv::StringRecord::new(),
                    next_number: 1,
                    done: false,
                })
            })
            .map_err(Some);
        RowIter {
            table: table.to_string(),
            state,
            batch: VecDeque::with_capacity(batch_size),
            batch_size,
            peak,
        }
    }

    fn header_names(&mut self) -> Result<Vec<String>, IngestError> {
        match &mut self.state {
            Ok(state) => Ok(state.header.names.clone()),
            Err(e) => Err(e.take().unwrap_or_else(|| IngestError::Io(format!("{}: unreadable", self.table)))),
        }
    }

    fn refill(&mut self) -> Result<(), IngestError> {
        let Ok(state) = &mut self.state else { return Ok(()) };
        while !state.done && self.batch.len() < self.batch_size {
            match state.reader.read_record(&mut state.record) {
                Ok(true) => {
                    self.batch.push_back(Row {
                        header: Arc::clone(&state.header),
                        values: state.record.iter().map(str::to_string).collect(),
                        number: state.next_number,
                    });
                    state.next_number += 1;
                }
                Ok(false) => state.done = true,
                Err(e) => {
                    state.done = true;
                    return Err(IngestError::from_csv(e));
                }
            }
        }
        self.peak.fetch_max(self.batch.len(), Ordering::Relaxed);
        Ok(())
    }
}

impl Iterator for RowIter {
    type Item = Result<Row, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if let Err(e) = &mut self.state {
            return e.take().map(Err);
        }
        if self.batch.is_empty() {
            if let Err(e) = self.refill() {
                return Some(Err(e));
            }
        }
        self.batch.pop_front().map(Ok)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_table_catalog, Format};

    fn ekko() -> TableDefinition {
        let csv = "name,description,columns,key_columns\n\
            EKKO,PO header,EBELN:document-number|BUKRS:org-unit|AEDAT:date|UZEIT:time:nullable,EBELN\n";
        parse_table_catalog(csv.as_bytes(), Format::Csv).unwrap().remove(0)
    }

    fn rows_file(n: usize) -> Vec<u8> {
        let mut s = String::from("EBELN,BUKRS,AEDAT,UZEIT\n");
        for i in 0..n {
            s.push_str(&format!("{},1000,20210101,\n", 4500000000u64 + i as u64));
        }
        s.into_bytes()
    }

    #[test]
    fn counts_rows() {
        let ds = load_row_data(&ekko(), rows_file(3).into(), RowOptions::default()).unwrap();
        assert_eq!(ds.row_count(), 3);
        let rows: Vec<Row> = ds.rows().collect::<Result<_, _>>().unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1].get("EBELN"), Some("4500000001"));
        assert_eq!(rows[1].get("UZEIT"), None);
        assert_eq!(rows[2].number(), 3);
        // re-iterable
        assert_eq!(ds.rows().count(), 3);
    }

    #[test]
    fn missing_key_value() {
        let file = b"EBELN,BUKRS,AEDAT,UZEIT\n4500000001,1000,20210101,\n,1000,20210101,\n".to_vec();
        assert_eq!(
            load_row_data(&ekko(), file.into(), RowOptions::default()).unwrap_err(),
            IngestError::MissingKeyValue {
                table: "EKKO".into(),
                row: 2
            }
        );
        let no_key_column = b"BUKRS,AEDAT\n1000,20210101\n".to_vec();
        assert!(matches!(
            load_row_data(&ekko(), no_key_column.into(), RowOptions::default()),
            Err(IngestError::MissingKeyValue { row: 1, .. })
        ));
    }

    #[test]
    fn unknown_column() {
        let file = b"EBELN,LIFNR\n4500000001,100001\n".to_vec();
        assert_eq!(
            load_row_data(&ekko(), file.into(), RowOptions::default()).unwrap_err(),
            IngestError::UnknownColumn {
                table: "EKKO".into(),
                column: "LIFNR".into()
            }
        );
    }

    #[test]
    fn row_cap() {
        let options = RowOptions {
            batch_size: 256,
            row_cap: 10_000,
        };
        assert_eq!(
            load_row_data(&ekko(), rows_file(10_001).into(), options).unwrap_err(),
            IngestError::RowCapExceeded {
                table: "EKKO".into(),
                cap: 10_000
            }
        );
        assert_eq!(load_row_data(&ekko(), rows_file(10_000).into(), options).unwrap().row_count(), 10_000);
    }

    #[test]
    fn buffered_rows_never_exceed_batch_size() {
        for (n, batch) in [(1000, 16), (5, 16), (64, 64), (65, 64)] {
            let options = RowOptions {
                batch_size: batch,
                row_cap: DEFAULT_ROW_CAP,
            };
            let ds = load_row_data(&ekko(), rows_file(n).into(), options).unwrap();
            assert_eq!(ds.rows().count(), n);
            assert!(ds.peak_batch() <= batch, "peak {} > {}", ds.peak_batch(), batch);
            assert_eq!(ds.peak_batch(), n.min(batch));
        }
    }

    #[test]
    fn ragged_rows_are_syntax_errors() {
        let file = b"EBELN,BUKRS\n4500000001\n".to_vec();
        assert!(matches!(
            load_row_data(&ekko(), file.into(), RowOptions::default()),
            Err(IngestError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn missing_file() {
        let source = RowSource::File("/nonexistent/EKKO.csv".into());
        assert!(matches!(
            load_row_data(&ekko(), source, RowOptions::default()),
            Err(IngestError::Io(_))
        ));
    }
}
