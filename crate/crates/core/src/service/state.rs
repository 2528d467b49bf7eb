use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, Utc};
use parking_lot::{Mutex, RwLock};
use rand::RngCore;
use serde::Serialize;

use crate::identify::SelectionStore;
use crate::timefmt::{self, serde_instant};
use crate::{Settings, Workspace};

pub const DEFAULT_DATASET: &str = "default";

#[derive(Debug, Clone, Serialize)]
pub struct Session {
    pub id: String,
    pub dataset: String,
    pub selection: Option<String>,
    #[serde(with = "serde_instant")]
    pub created: DateTime<Utc>,
    #[serde(with = "serde_instant")]
    pub last_active: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JobState {
    Queued,
    Running,
    Done,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Progress {
    pub done: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Job {
    pub id: String,
    pub session: Option<String>,
    pub selection: Option<String>,
    pub state: JobState,
    pub progress: Progress,
    pub error: Option<String>,
    pub result: Option<String>,
}

impl Job {
    /// Applies a state change if it is a legal transition.
    pub fn advance(&mut self, next: JobState) -> bool {
        let legal = matches!(
            (self.state, next),
            (JobState::Queued, JobState::Running) | (JobState::Running, JobState::Done | JobState::Failed)
        );
        if legal {
            self.state = next;
        }
        legal
    }

    /// Progress only moves forward.
    pub fn report(&mut self, done: usize, total: usize) {
        self.progress.total = total;
        self.progress.done = self.progress.done.max(done.min(total));
    }

    pub fn is_active(&self) -> bool {
        matches!(self.state, JobState::Queued | JobState::Running)
    }
}

/// Shared service state. Cheap to clone.
#[derive(Clone)]
pub struct AppState {
    pub(crate) inner: Arc<Inner>,
}

pub(crate) struct Inner {
    pub data_dir: PathBuf,
    pub settings: Settings,
    pub datasets: RwLock<HashMap<String, Arc<Workspace>>>,
    pub sessions: Mutex<HashMap<String, Session>>,
    pub jobs: Mutex<HashMap<String, Job>>,
    pub selection_locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
    pub store: SelectionStore,
}

impl AppState {
    pub fn new(data_dir: impl Into<PathBuf>, settings: Settings) -> std::io::Result<AppState> {
        let data_dir = data_dir.into();
        fs::create_dir_all(data_dir.join("selections"))?;
        fs::create_dir_all(data_dir.join("results"))?;
        Ok(AppState {
            inner: Arc::new(Inner {
                store: SelectionStore::new(data_dir.join("selections")),
                data_dir,
                settings,
                datasets: RwLock::new(HashMap::new()),
                sessions: Mutex::new(HashMap::new()),
                jobs: Mutex::new(HashMap::new()),
                selection_locks: Mutex::new(HashMap::new()),
            }),
        })
    }

    pub fn settings(&self) -> &Settings {
        &self.inner.settings
    }

    pub fn data_dir(&self) -> &Path {
        &self.inner.data_dir
    }

    pub fn register_dataset(&self, id: &str, workspace: Workspace) {
        self.inner.datasets.write().insert(id.to_string(), Arc::new(workspace));
    }

    pub fn dataset(&self, id: &str) -> Option<Arc<Workspace>> {
        self.inner.datasets.read().get(id).cloned()
    }

    pub fn create_session(&self, dataset: &str) -> Session {
        let now = timefmt::now();
        let session = Session {
            id: session_token(),
            dataset: dataset.to_string(),
            selection: None,
            created: now,
            last_active: now,
        };
        self.inner.sessions.lock().insert(session.id.clone(), session.clone());
        session
    }

    /// Looks up a session and marks it active.
    pub fn touch_session(&self, id: &str) -> Option<Session> {
        let mut sessions = self.inner.sessions.lock();
        let s = sessions.get_mut(id)?;
        s.last_active = timefmt::now();
        Some(s.clone())
    }

    pub fn set_session_selection(&self, id: &str, selection: &str) {
        if let Some(s) = self.inner.sessions.lock().get_mut(id) {
            s.selection = Some(selection.to_string());
        }
    }

    pub fn selection_lock(&self, id: &str) -> Arc<tokio::sync::Mutex<()>> {
        self.inner
            .selection_locks
            .lock()
            .entry(id.to_string())
            .or_default()
            .clone()
    }

    /// Records a queued job unless the session already has an active one.
    pub fn begin_job(&self, session: &str, selection: &str, total: usize) -> Option<Job> {
        let mut jobs = self.inner.jobs.lock();
        if jobs.values().any(|j| j.session.as_deref() == Some(session) && j.is_active()) {
            return None;
        }
        let job = Job {
            id: uuid::Uuid::new_v4().simple().to_string(),
            session: Some(session.to_string()),
            selection: Some(selection.to_string()),
            state: JobState::Queued,
            progress: Progress { done: 0, total },
            error: None,
            result: None,
        };
        jobs.insert(job.id.clone(), job.clone());
        Some(job)
    }

    pub fn job(&self, id: &str) -> Option<Job> {
        self.inner.jobs.lock().get(id).cloned()
    }

    pub(crate) fn update_job(&self, id: &str, f: impl FnOnce(&mut Job)) {
        if let Some(job) = self.inner.jobs.lock().get_mut(id) {
            f(job);
        }
    }

    pub fn result_path(&self, job: &str) -> PathBuf {
        self.inner.data_dir.join("results").join(format!("{job}.ocel.json"))
    }
}

/// 256 random bits, hex encoded.
pub fn session_token() -> String {
    let mut bytes = [0u8; 32];
    rand::rngs::OsRng.fill_bytes(&mut bytes);
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job() -> Job {
        Job {
            id: "j".into(),
            session: None,
            selection: None,
            state: JobState::Queued,
            progress: Progress { done: 0, total: 3 },
            error: None,
            result: None,
        }
    }

    #[test]
    fn transitions() {
        let mut j = job();
        assert!(!j.advance(JobState::Done));
        assert!(j.advance(JobState::Running));
        assert!(!j.advance(JobState::Queued));
        assert!(j.advance(JobState::Failed));
        assert!(!j.advance(JobState::Done));
        assert!(!j.advance(JobState::Running));
    }

    #[test]
    fn progress_is_monotone() {
        let mut j = job();
        j.report(2, 3);
        j.report(1, 3);
        assert_eq!(j.progress, Progress { done: 2, total: 3 });
    }

    #[test]
    fn tokens() {
        let a = session_token();
        assert_eq!(a.len(), 64);
        assert_ne!(a, session_token());
        assert!(valid_id(&a));
        assert!(!valid_id("../x"));
    }
}
