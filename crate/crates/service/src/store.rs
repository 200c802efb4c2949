//! In-memory sessions with optional snapshot persistence.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use phutball_core::notation::{format_move, parse_move, parse_position, serialize_position};
use phutball_core::{Move, Outcome, Position};
use serde::{Deserialize, Serialize};

use crate::error::ApiError;

#[derive(Clone, Debug)]
pub struct Ply {
    pub mv: Move,
    pub outcome: Outcome,
    pub after: Position,
}

/// One game under analysis. The history replays from `base` to the current
/// position exactly; `revision` counts accepted writes.
#[derive(Clone, Debug)]
pub struct Session {
    pub id: u64,
    pub created: u64,
    /// Corpus name the session started from, if any.
    pub source: Option<String>,
    pub base: Position,
    pub history: Vec<Ply>,
    pub revision: u64,
}

impl Session {
    pub fn current(&self) -> &Position {
        self.history.last().map_or(&self.base, |p| &p.after)
    }

    pub fn outcome(&self) -> Outcome {
        self.history.last().map_or(Outcome::Ongoing, |p| p.outcome)
    }

    pub fn check_revision(&self, expected: Option<u64>) -> Result<(), ApiError> {
        match expected {
            Some(r) if r != self.revision => Err(ApiError::conflict(r, self.revision)),
            _ => Ok(()),
        }
    }

    /// Plays `mv` through the engine; nothing changes on error.
    pub fn apply(&mut self, mv: Move) -> Result<&Ply, ApiError> {
        let (after, outcome) = self.current().apply_move(&mv)?;
        self.history.push(Ply { mv, outcome, after });
        self.revision += 1;
        Ok(self.history.last().expect("just pushed"))
    }

    pub fn undo(&mut self) -> Result<Ply, ApiError> {
        let ply = self.history.pop().ok_or_else(|| {
            ApiError::engine("nothing-to-undo", "the session is at its base position")
        })?;
        self.revision += 1;
        Ok(ply)
    }
}

/// Serialized form: base position text and the moves played from it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub id: u64,
    pub created: u64,
    pub source: Option<String>,
    pub base: String,
    pub moves: Vec<String>,
    pub revision: u64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct Snapshot {
    pub next_id: u64,
    pub sessions: Vec<SessionSnapshot>,
}

#[derive(Default)]
struct Inner {
    next_id: u64,
    sessions: BTreeMap<u64, Session>,
}

/// Sessions behind one lock. Handlers hold it only to read or update a
/// session, never while searching.
#[derive(Default)]
pub struct Store {
    inner: Mutex<Inner>,
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

impl Store {
    pub fn create(
        &self,
        base: Position,
        source: Option<String>,
        moves: Vec<Move>,
    ) -> Result<Session, ApiError> {
        let mut session = Session {
            id: 0,
            created: now(),
            source,
            base,
            history: Vec::new(),
            revision: 0,
        };
        for mv in moves {
            session.apply(mv)?;
        }
        let mut inner = self.inner.lock().expect("store lock");
        inner.next_id += 1;
        session.id = inner.next_id;
        inner.sessions.insert(session.id, session.clone());
        Ok(session)
    }

    pub fn get(&self, id: u64) -> Result<Session, ApiError> {
        self.inner
            .lock()
            .expect("store lock")
            .sessions
            .get(&id)
            .cloned()
            .ok_or_else(|| unknown(id))
    }

    /// Runs `f` on the session under the lock.
    pub fn update<T>(
        &self,
        id: u64,
        f: impl FnOnce(&mut Session) -> Result<T, ApiError>,
    ) -> Result<T, ApiError> {
        let mut inner = self.inner.lock().expect("store lock");
        let session = inner.sessions.get_mut(&id).ok_or_else(|| unknown(id))?;
        f(session)
    }

    pub fn remove(&self, id: u64) -> Result<Session, ApiError> {
        self.inner
            .lock()
            .expect("store lock")
            .sessions
            .remove(&id)
            .ok_or_else(|| unknown(id))
    }

    pub fn list(&self) -> Vec<Session> {
        self.inner
            .lock()
            .expect("store lock")
            .sessions
            .values()
            .cloned()
            .collect()
    }

    pub fn snapshot(&self) -> Snapshot {
        let inner = self.inner.lock().expect("store lock");
        Snapshot {
            next_id: inner.next_id,
            sessions: inner
                .sessions
                .values()
                .map(|s| SessionSnapshot {
                    id: s.id,
                    created: s.created,
                    source: s.source.clone(),
                    base: serialize_position(&s.base),
                    moves: s.history.iter().map(|p| format_move(&p.mv)).collect(),
                    revision: s.revision,
                })
                .collect(),
        }
    }

    /// Rebuilds sessions by replaying each snapshot through the engine.
    pub fn restore(snapshot: Snapshot) -> Result<Store, String> {
        let mut inner = Inner {
            next_id: snapshot.next_id,
            sessions: BTreeMap::new(),
        };
        for s in snapshot.sessions {
            let base = parse_position(&s.base).map_err(|e| format!("session {}: {e}", s.id))?;
            let mut session = Session {
                id: s.id,
                created: s.created,
                source: s.source,
                base,
                history: Vec::new(),
                revision: 0,
            };
            for text in &s.moves {
                let mv = parse_move(text, session.base.geometry())
                    .map_err(|e| format!("session {}: {e}", s.id))?;
                session
                    .apply(mv)
                    .map_err(|e| format!("session {}: {text}: {}", s.id, e.message))?;
            }
            session.revision = s.revision;
            inner.next_id = inner.next_id.max(s.id);
            inner.sessions.insert(s.id, session);
        }
        Ok(Store {
            inner: Mutex::new(inner),
        })
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let json = serde_json::to_string_pretty(&self.snapshot()).map_err(std::io::Error::other)?;
        std::fs::write(path, json)
    }

    /// Loads a snapshot file; a missing file gives an empty store.
    pub fn load(path: &Path) -> Result<Store, String> {
        match std::fs::read_to_string(path) {
            Ok(text) => {
                let snapshot: Snapshot =
                    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
                Store::restore(snapshot)
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Store::default()),
            Err(e) => Err(format!("{}: {e}", path.display())),
        }
    }
}

fn unknown(id: u64) -> ApiError {
    ApiError::not_found("unknown-session", format!("no session {id}"))
}
