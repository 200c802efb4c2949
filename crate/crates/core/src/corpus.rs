//! Built-in positions, proof scripts and the errata registry.
//!
//! Every position entry carries a checksum (board size, ball point, chap
//! count and digest) that is checked on load, so a corrupted transcription
//! fails loudly instead of silently changing what the scripts prove.

use std::cell::RefCell;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::notation::{parse_position, NotationError};
use crate::position::Position;
use crate::script::{parse_script, Script};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("unknown corpus entry {0:?}")]
    UnknownEntry(String),
    #[error("checksum mismatch for {name}: expected {expected}, found {found}")]
    ChecksumMismatch {
        name: String,
        expected: Checksum,
        found: Checksum,
    },
    #[error("{name}: {error}")]
    Parse { name: String, error: NotationError },
}

impl CorpusError {
    pub fn kind(&self) -> &'static str {
        match self {
            CorpusError::UnknownEntry(_) => "unknown-entry",
            CorpusError::ChecksumMismatch { .. } => "checksum-mismatch",
            CorpusError::Parse { .. } => "parse",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checksum {
    pub rows: u32,
    pub cols: u32,
    pub ball: crate::geometry::Coord,
    pub chaps: usize,
    pub digest: u64,
}

impl Checksum {
    pub fn of(pos: &Position) -> Checksum {
        let g = pos.geometry();
        Checksum {
            rows: g.rows() as u32,
            cols: g.cols() as u32,
            ball: pos.ball(),
            chaps: pos.chap_count(),
            digest: pos.digest(),
        }
    }
}

impl std::fmt::Display for Checksum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}x{} ball {} chaps {} digest {:016x}",
            self.rows, self.cols, self.ball, self.chaps, self.digest
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PositionEntry {
    pub name: String,
    pub note: String,
    pub source: String,
    pub checksum: Checksum,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScriptEntry {
    pub name: String,
    pub alias: String,
    pub title: String,
    pub source: String,
}

/// A known discrepancy between a printed line and the engine, with the
/// engine-computed replacement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Erratum {
    pub id: String,
    pub script: String,
    pub printed: String,
    pub replacement: String,
}

#[derive(Clone, Debug)]
pub enum Entry {
    Position(Box<Position>),
    Script(Box<Script>),
}

#[derive(Clone, Debug, Serialize)]
pub struct Corpus {
    pub positions: Vec<PositionEntry>,
    pub scripts: Vec<ScriptEntry>,
    pub errata: Vec<Erratum>,
}

fn checksum(rows: u32, cols: u32, ball: &str, chaps: usize, digest: u64) -> Checksum {
    Checksum {
        rows,
        cols,
        ball: crate::notation::parse_coord_unchecked(ball).expect("valid built-in coordinate"),
        chaps,
        digest,
    }
}

fn builtin() -> Corpus {
    let position = |name: &str, note: &str, source: &str, sum: Checksum| PositionEntry {
        name: name.into(),
        note: note.into(),
        source: source.into(),
        checksum: sum,
    };
    let script = |name: &str, alias: &str, title: &str, source: &str| ScriptEntry {
        name: name.into(),
        alias: alias.into(),
        title: title.into(),
        source: source.into(),
    };
    Corpus {
        positions: vec![
            position(
                "fig1",
                "5x5 rules illustration: corner exits, sidelines, removed chaps",
                include_str!("../corpus/fig1.pos"),
                checksum(5, 5, "a3", 11, 0x1c46_5c13_fcd5_eaea),
            ),
            position(
                "fig2",
                "5x5 shots, tackles and jots",
                include_str!("../corpus/fig2.pos"),
                checksum(5, 5, "a2", 5, 0x9b85_8546_0d51_7b6d),
            ),
            position(
                "fig3",
                "12x10 drawn position",
                include_str!("../corpus/fig3.pos"),
                checksum(12, 10, "a2", 24, 0x708a_d8dd_ce43_7e03),
            ),
            position(
                "fig5",
                "19x15 drawn position on the standard pitch",
                include_str!("../corpus/fig5.pos"),
                checksum(19, 15, "a2", 93, 0xe262_0a8d_794a_65ca),
            ),
        ],
        scripts: vec![
            script(
                "fig1-census",
                "S1",
                "legal moves, outcomes and illegal jumps on the 5x5 illustration",
                include_str!("../corpus/fig1-census.proof"),
            ),
            script(
                "fig2-tactics",
                "S2",
                "the tackle wins while the jot loses",
                include_str!("../corpus/fig2-tactics.proof"),
            ),
            script(
                "thm-main",
                "S3",
                "the nine-move forced line back to the rotated start",
                include_str!("../corpus/thm-main.proof"),
            ),
            script(
                "thm-tree",
                "S4",
                "every deviation from the d5 tackle loses",
                include_str!("../corpus/thm-tree.proof"),
            ),
            script(
                "thm-endgame",
                "S5",
                "Alfred must jump to j11",
                include_str!("../corpus/thm-endgame.proof"),
            ),
            script(
                "cor-lines",
                "S6",
                "the longer deviation on the 19x15 board",
                include_str!("../corpus/cor-lines.proof"),
            ),
        ],
        errata: serde_json::from_str(include_str!("../corpus/errata.json"))
            .expect("built-in errata registry parses"),
    }
}

impl Corpus {
    /// The shipped corpus.
    pub fn builtin() -> &'static Corpus {
        static CORPUS: OnceLock<Corpus> = OnceLock::new();
        CORPUS.get_or_init(builtin)
    }

    /// Parses and checksums a position entry.
    pub fn position(&self, name: &str) -> Result<Position, CorpusError> {
        let entry = self
            .positions
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| CorpusError::UnknownEntry(name.to_string()))?;
        let pos = parse_position(&entry.source).map_err(|error| CorpusError::Parse {
            name: name.to_string(),
            error,
        })?;
        let found = Checksum::of(&pos);
        if found != entry.checksum {
            return Err(CorpusError::ChecksumMismatch {
                name: name.to_string(),
                expected: entry.checksum,
                found,
            });
        }
        Ok(pos)
    }

    /// Finds a script entry by name or alias (`S1`..`S6`, case-insensitive).
    pub fn script_entry(&self, name: &str) -> Option<&ScriptEntry> {
        self.scripts
            .iter()
            .find(|e| e.name == name || e.alias.eq_ignore_ascii_case(name))
    }

    /// Parses a script entry, resolving its base position from this corpus.
    pub fn script(&self, name: &str) -> Result<Script, CorpusError> {
        let entry = self
            .script_entry(name)
            .ok_or_else(|| CorpusError::UnknownEntry(name.to_string()))?;
        let base_error = RefCell::new(None);
        let parsed = parse_script(&entry.source, |base| match self.position(base) {
            Ok(p) => Some(p),
            Err(e) => {
                *base_error.borrow_mut() = Some(e);
                None
            }
        });
        match parsed {
            Ok(script) => Ok(script),
            Err(error) => Err(match base_error.into_inner() {
                Some(e @ (CorpusError::ChecksumMismatch { .. } | CorpusError::Parse { .. })) => e,
                _ => CorpusError::Parse {
                    name: entry.name.clone(),
                    error,
                },
            }),
        }
    }

    /// A position or a script by name.
    pub fn load(&self, name: &str) -> Result<Entry, CorpusError> {
        if self.positions.iter().any(|e| e.name == name) {
            return self.position(name).map(|p| Entry::Position(Box::new(p)));
        }
        self.script(name).map(|s| Entry::Script(Box::new(s)))
    }

    pub fn erratum(&self, id: &str) -> Option<&Erratum> {
        self.errata.iter().find(|e| e.id == id)
    }

    pub fn position_names(&self) -> impl Iterator<Item = &str> {
        self.positions.iter().map(|e| e.name.as_str())
    }

    pub fn script_names(&self) -> impl Iterator<Item = &str> {
        self.scripts.iter().map(|e| e.name.as_str())
    }
}

/// Loads an entry from the shipped corpus.
pub fn load(name: &str) -> Result<Entry, CorpusError> {
    Corpus::builtin().load(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_match_their_checksums() {
        let corpus = Corpus::builtin();
        for name in corpus.position_names() {
            corpus.position(name).unwrap_or_else(|e| panic!("{e}"));
        }
    }

    #[test]
    fn fig3_is_half_turn_symmetric_in_its_chaps() {
        let p = Corpus::builtin().position("fig3").unwrap();
        assert_eq!((p.geometry().rows(), p.geometry().cols()), (12, 10));
        let g = p.geometry();
        assert!(p.chaps().all(|c| p.is_chap(g.rotate(c))));
    }

    #[test]
    fn unknown_and_corrupted_entries() {
        assert!(matches!(load("nope"), Err(CorpusError::UnknownEntry(_))));
        let mut corpus = Corpus::builtin().clone();
        let fig3 = corpus
            .positions
            .iter_mut()
            .find(|e| e.name == "fig3")
            .unwrap();
        fig3.source = fig3.source.replace(" c5", "");
        let err = corpus.position("fig3").unwrap_err();
        assert_eq!(err.kind(), "checksum-mismatch");
        assert_eq!(corpus.script("S3").unwrap_err().kind(), "checksum-mismatch");
    }

    #[test]
    fn scripts_parse_and_aliases_resolve() {
        let corpus = Corpus::builtin();
        for name in corpus.script_names() {
            corpus.script(name).unwrap_or_else(|e| panic!("{e}"));
        }
        assert_eq!(corpus.script_entry("s4").unwrap().name, "thm-tree");
        assert!(corpus.errata.len() <= 3);
    }
}
