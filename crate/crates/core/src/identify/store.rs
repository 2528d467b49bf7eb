use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{IdentifyError, SelectionDocument, TableSelection};

/// One JSON document per selection id under a directory.
#[derive(Debug, Clone)]
pub struct SelectionStore {
    dir: PathBuf,
}

impl SelectionStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        SelectionStore { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Stores `sel` under a fresh id.
    pub fn save(&self, sel: &TableSelection) -> Result<String, IdentifyError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        self.write(&id, sel)?;
        Ok(id)
    }

    /// Replaces the stored selection `id`.
    pub fn update(&self, id: &str, sel: &TableSelection) -> Result<(), IdentifyError> {
        if !self.path(id)?.is_file() {
            return Err(IdentifyError::UnknownSelection(id.to_string()));
        }
        self.write(id, sel)
    }

    pub fn load(&self, id: &str) -> Result<TableSelection, IdentifyError> {
        let path = self.path(id)?;
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(IdentifyError::UnknownSelection(id.to_string()))
            }
            Err(e) => return Err(IdentifyError::StorageFailure(e.to_string())),
        };
        let doc: SelectionDocument =
            serde_json::from_slice(&bytes).map_err(|e| IdentifyError::StorageFailure(format!("{}: {e}", path.display())))?;
        Ok(doc.selection)
    }

    fn path(&self, id: &str) -> Result<PathBuf, IdentifyError> {
        let valid = !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-');
        if !valid {
            return Err(IdentifyError::UnknownSelection(id.to_string()));
        }
        Ok(self.dir.join(format!("{id}.json")))
    }

    fn write(&self, id: &str, sel: &TableSelection) -> Result<(), IdentifyError> {
        let storage = |e: std::io::Error| IdentifyError::StorageFailure(e.to_string());
        let path = self.path(id)?;
        fs::create_dir_all(&self.dir).map_err(storage)?;
        let doc = SelectionDocument {
            id: id.to_string(),
            selection: sel.clone(),
        };
        let mut body = serde_json::to_vec_pretty(&doc).expect("selections always serialize");
        body.push(b'\n');
        let tmp = self.dir.join(format!(".{id}.tmp"));
        let mut file = fs::File::create(&tmp).map_err(storage)?;
        file.write_all(&body).map_err(storage)?;
        file.sync_all().map_err(storage)?;
        fs::rename(&tmp, &path).map_err(storage)
    }
}
