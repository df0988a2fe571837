//! Sessions in memory with optional one-file-per-session persistence.

use std::collections::HashMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use super::{Session, SessionError};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("unknown session {0}")]
    NotFound(String),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("persistence failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Every session sits behind its own lock, so one session's transitions
/// are serialized while different sessions proceed in parallel.
#[derive(Debug, Default)]
pub struct SessionStore {
    dir: Option<PathBuf>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

impl SessionStore {
    pub fn in_memory() -> Self {
        SessionStore::default()
    }

    /// Loads every `*.json` snapshot in `dir`, creating it if needed.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        let dir = dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&dir)?;
        let mut sessions = HashMap::new();
        for entry in std::fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "json") {
                let text = std::fs::read_to_string(&path)?;
                match Session::from_json(&text) {
                    Ok(s) => {
                        sessions.insert(s.id.clone(), Arc::new(Mutex::new(s)));
                    }
                    Err(e) => log::warn!("skipping {}: {e}", path.display()),
                }
            }
        }
        Ok(SessionStore { dir: Some(dir), sessions: RwLock::new(sessions) })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn persist(&self, session: &Session) -> Result<(), StoreError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(session.to_json().as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(dir.join(format!("{}.json", session.id))).map_err(|e| e.error)?;
        Ok(())
    }

    pub fn insert(&self, session: Session) -> Result<Session, StoreError> {
        self.persist(&session)?;
        let snapshot = session.clone();
        self.sessions.write().expect("store lock").insert(session.id.clone(), Arc::new(Mutex::new(session)));
        Ok(snapshot)
    }

    fn handle(&self, id: &str) -> Result<Arc<Mutex<Session>>, StoreError> {
        self.sessions
            .read()
            .expect("store lock")
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(id.to_string()))
    }

    pub fn get(&self, id: &str) -> Result<Session, StoreError> {
        Ok(self.handle(id)?.lock().expect("session lock").clone())
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.read().expect("store lock").keys().cloned().collect();
        ids.sort();
        ids
    }

    /// Applies `f` to a copy and commits it only when `f` succeeds and the
    /// snapshot is written.
    pub fn update<F>(&self, id: &str, f: F) -> Result<Session, StoreError>
    where
        F: FnOnce(&mut Session) -> Result<(), SessionError>,
    {
        let handle = self.handle(id)?;
        let mut guard = handle.lock().expect("session lock");
        let mut next = guard.clone();
        f(&mut next)?;
        self.persist(&next)?;
        *guard = next.clone();
        Ok(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp_model::AugmentedLp;
    use crate::session::{AnswerInput, Mode, Phase, Problem, SessionConfig};
    use crate::wac::Polytope;

    fn session() -> Session {
        let lp = AugmentedLp::from_polytope(Polytope::from_rows(3, 1, &[1.0, -1.0, -1.0], &[1.0, 0.0, 0.0]));
        Session::create(Problem::new(lp), SessionConfig::default(), Mode::Interactive).unwrap()
    }

    #[test]
    fn snapshots_reload_after_each_transition() {
        let dir = tempfile::tempdir().unwrap();
        let store = SessionStore::open(dir.path()).unwrap();
        let s = store.insert(session()).unwrap();
        let answer = AnswerInput::Priorities { p: vec![1.0, 1.2, 0.9, 1.0], satisfied: false };
        let after = store.update(&s.id, |s| s.submit_answer(answer)).unwrap();
        assert_eq!(after.phase, Phase::ReadyToStep);
        let reopened = SessionStore::open(dir.path()).unwrap();
        assert_eq!(reopened.get(&s.id).unwrap(), after);
        let stepped = store.update(&s.id, |s| s.step()).unwrap();
        assert_eq!(SessionStore::open(dir.path()).unwrap().get(&s.id).unwrap(), stepped);
    }

    #[test]
    fn failed_transitions_change_nothing() {
        let store = SessionStore::in_memory();
        let s = store.insert(session()).unwrap();
        assert!(matches!(store.update(&s.id, |s| s.step()), Err(StoreError::Session(SessionError::Phase(_)))));
        assert_eq!(store.get(&s.id).unwrap(), s);
        assert!(matches!(store.get("nope"), Err(StoreError::NotFound(_))));
    }
}
