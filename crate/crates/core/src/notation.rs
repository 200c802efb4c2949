//! Text formats: coordinates (`a2`), moves (`b3`, `SE,N,NE`) and position files.
//!
//! Position file grammar:
//!
//! ```text
//! %phutball 1
//! rows: 12
//! cols: 10
//! ball: a2
//! to-move: A
//! chaps: c1 c2 c5
//! chaps: d6
//! ```
//!
//! `#` starts a comment. Fields may come in any order after the header;
//! `chaps:` may repeat. CRLF line endings are accepted.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::error::PositionError;
use crate::geometry::{Coord, Direction, Geometry, Role};
use crate::position::{Move, Position};

pub const POSITION_HEADER: &str = "%phutball 1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotationError {
    #[error("malformed coordinate {0:?}")]
    MalformedCoord(String),
    #[error("coordinate {0:?} is outside the board")]
    OutOfRange(String),
    #[error("malformed move {0:?}")]
    MalformedMove(String),
    #[error("unknown direction token {0:?}")]
    UnknownDirectionToken(String),
    #[error("expected header {POSITION_HEADER:?}")]
    BadHeader,
    #[error("duplicate chap at {0}")]
    DuplicateChap(Coord),
    #[error("ball shares its point {0} with a chap")]
    BallOnChap(Coord),
    #[error("missing field {0:?}")]
    MissingField(&'static str),
    #[error("bad field: {0}")]
    BadField(String),
    #[error("unknown claim kind {0:?}")]
    UnknownClaimKind(String),
    #[error("two consecutive moves by {0} with no claim between them")]
    RoleOrderViolation(Role),
    #[error("unknown position {0:?}")]
    UnresolvedPositionName(String),
    #[error("bad script: {0}")]
    BadScript(String),
    #[error("line {line}, column {column}: {error}")]
    At {
        line: usize,
        column: usize,
        error: Box<NotationError>,
    },
}

impl NotationError {
    pub(crate) fn at(self, line: usize, column: usize) -> NotationError {
        match self {
            e @ NotationError::At { .. } => e,
            e => NotationError::At {
                line,
                column,
                error: Box::new(e),
            },
        }
    }

    /// The underlying error without location context.
    pub fn root(&self) -> &NotationError {
        match self {
            NotationError::At { error, .. } => error.root(),
            e => e,
        }
    }

    /// Stable kebab-case name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self.root() {
            NotationError::MalformedCoord(_) => "malformed-coord",
            NotationError::OutOfRange(_) => "out-of-range",
            NotationError::MalformedMove(_) => "malformed-move",
            NotationError::UnknownDirectionToken(_) => "unknown-direction-token",
            NotationError::BadHeader => "bad-header",
            NotationError::DuplicateChap(_) => "duplicate-chap",
            NotationError::BallOnChap(_) => "ball-on-chap",
            NotationError::MissingField(_) => "missing-field",
            NotationError::BadField(_) => "bad-field",
            NotationError::UnknownClaimKind(_) => "unknown-claim-kind",
            NotationError::RoleOrderViolation(_) => "role-order-violation",
            NotationError::UnresolvedPositionName(_) => "unresolved-position-name",
            NotationError::BadScript(_) => "bad-script",
            NotationError::At { .. } => unreachable!(),
        }
    }
}

/// Parses a coordinate without a range check beyond the letter and a positive row.
pub fn parse_coord_unchecked(text: &str) -> Result<Coord, NotationError> {
    let bad = || NotationError::MalformedCoord(text.to_string());
    let mut chars = text.chars();
    let letter = chars.next().ok_or_else(bad)?;
    if !letter.is_ascii_lowercase() {
        return Err(bad());
    }
    let digits = chars.as_str();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return Err(bad());
    }
    let row: u32 = digits.parse().map_err(|_| bad())?;
    if row > u8::MAX as u32 {
        return Err(NotationError::OutOfRange(text.to_string()));
    }
    Ok(Coord::new(letter as u8 - b'a' + 1, row as u8))
}

pub fn parse_coord(text: &str, geometry: Geometry) -> Result<Coord, NotationError> {
    let c = parse_coord_unchecked(text)?;
    if geometry.contains(c.col as i32, c.row as i32) {
        Ok(c)
    } else {
        Err(NotationError::OutOfRange(text.to_string()))
    }
}

pub fn format_coord(c: Coord) -> String {
    c.to_string()
}

fn looks_like_coord(text: &str) -> bool {
    let mut chars = text.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.clone().next().is_some()
        && chars.all(|c| c.is_ascii_digit())
}

/// Parses a direction path: ASCII tokens joined by commas (`SE,N,NE`), or
/// arrow glyphs (`↘↑↗`), optionally comma-separated.
pub fn parse_path(text: &str) -> Result<Vec<Direction>, NotationError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(NotationError::MalformedMove(text.to_string()));
    }
    let mut path = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        if token.is_empty() {
            return Err(NotationError::MalformedMove(text.to_string()));
        }
        if let Some(d) = Direction::from_token(token) {
            path.push(d);
        } else if token.chars().all(|c| Direction::from_arrow(c).is_some()) {
            path.extend(token.chars().filter_map(Direction::from_arrow));
        } else {
            return Err(NotationError::UnknownDirectionToken(token.to_string()));
        }
    }
    Ok(path)
}

pub fn format_path(path: &[Direction]) -> String {
    let tokens: Vec<&str> = path.iter().map(|d| d.token()).collect();
    tokens.join(",")
}

/// Parses a move; coordinates are range-checked against `geometry`.
pub fn parse_move(text: &str, geometry: Geometry) -> Result<Move, NotationError> {
    let text = text.trim();
    if looks_like_coord(text) {
        parse_coord(text, geometry).map(Move::Place)
    } else {
        parse_path(text).map(Move::Jump)
    }
}

/// Parses a move without knowing the board (coordinates are not range-checked).
pub fn parse_move_unchecked(text: &str) -> Result<Move, NotationError> {
    let text = text.trim();
    if looks_like_coord(text) {
        parse_coord_unchecked(text).map(Move::Place)
    } else {
        parse_path(text).map(Move::Jump)
    }
}

pub fn format_move(mv: &Move) -> String {
    match mv {
        Move::Place(c) => c.to_string(),
        Move::Jump(path) => format_path(path),
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_move(self))
    }
}

/// Splits a line into whitespace-separated tokens with 1-based columns,
/// dropping everything from a token starting with `#` (unless `keep_hash`
/// says that token is data).
pub(crate) fn tokens<'a>(
    line: &'a str,
    keep_hash: impl Fn(&[(usize, &'a str)]) -> bool,
) -> Vec<(usize, &'a str)> {
    let mut out: Vec<(usize, &str)> = Vec::new();
    let mut start = None;
    let bytes: Vec<(usize, char)> = line.char_indices().collect();
    let push = |out: &mut Vec<(usize, &'a str)>, s: usize, e: usize| -> bool {
        let tok = &line[s..e];
        if tok.starts_with('#') && !keep_hash(out) {
            return false;
        }
        out.push((line[..s].chars().count() + 1, tok));
        true
    };
    for &(i, ch) in &bytes {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                if !push(&mut out, s, i) {
                    return out;
                }
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        push(&mut out, s, line.len());
    }
    out
}

pub fn parse_position(text: &str) -> Result<Position, NotationError> {
    let mut lines = text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l));
    if lines.next().map(str::trim_end) != Some(POSITION_HEADER) {
        return Err(NotationError::BadHeader.at(1, 1));
    }
    struct Field<'a> {
        line: usize,
        column: usize,
        value: Vec<(usize, &'a str)>,
    }
    let mut rows: Option<Field> = None;
    let mut cols: Option<Field> = None;
    let mut ball: Option<Field> = None;
    let mut to_move: Option<Field> = None;
    let mut chaps: Vec<Field> = Vec::new();

    for (idx, raw) in lines.enumerate() {
        let line_no = idx + 2;
        let toks = tokens(raw, |_| false);
        let Some(&(column, key)) = toks.first() else {
            continue;
        };
        let Some(key) = key.strip_suffix(':') else {
            return Err(
                NotationError::BadField(format!("expected `key:` but found {key:?}"))
                    .at(line_no, column),
            );
        };
        let field = Field {
            line: line_no,
            column,
            value: toks[1..].to_vec(),
        };
        let slot = match key {
            "rows" => &mut rows,
            "cols" => &mut cols,
            "ball" => &mut ball,
            "to-move" => &mut to_move,
            "chaps" => {
                chaps.push(field);
                continue;
            }
            other => {
                return Err(
                    NotationError::BadField(format!("unknown field {other:?}")).at(line_no, column)
                )
            }
        };
        if slot.is_some() {
            return Err(
                NotationError::BadField(format!("repeated field {key:?}")).at(line_no, column)
            );
        }
        *slot = Some(field);
    }

    let single = |f: &Option<Field<'_>>,
                  name: &'static str|
     -> Result<(usize, usize, String), NotationError> {
        let f = f.as_ref().ok_or(NotationError::MissingField(name))?;
        match f.value.as_slice() {
            [(col, v)] => Ok((f.line, *col, v.to_string())),
            _ => Err(
                NotationError::BadField(format!("{name} takes exactly one value"))
                    .at(f.line, f.column),
            ),
        }
    };
    let int =
        |f: &Option<Field<'_>>, name: &'static str| -> Result<(u32, usize, usize), NotationError> {
            let (line, col, v) = single(f, name)?;
            v.parse::<u32>().map(|n| (n, line, col)).map_err(|_| {
                NotationError::BadField(format!("{name} must be an integer")).at(line, col)
            })
        };
    let (r, rl, rc) = int(&rows, "rows")?;
    let (c, _, _) = int(&cols, "cols")?;
    let geometry =
        Geometry::new(r, c).map_err(|e| NotationError::BadField(e.to_string()).at(rl, rc))?;

    let (bl, bc, bv) = single(&ball, "ball")?;
    let ball = parse_coord(&bv, geometry).map_err(|e| e.at(bl, bc))?;
    let (tl, tc, tv) = single(&to_move, "to-move")?;
    let to_move = Role::from_letter(&tv)
        .ok_or_else(|| NotationError::BadField("to-move must be A or B".into()).at(tl, tc))?;

    if chaps.is_empty() {
        return Err(NotationError::MissingField("chaps"));
    }
    let mut coords = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for f in &chaps {
        for &(col, tok) in &f.value {
            let at = parse_coord(tok, geometry).map_err(|e| e.at(f.line, col))?;
            if !seen.insert(at) {
                return Err(NotationError::DuplicateChap(at).at(f.line, col));
            }
            if at == ball {
                return Err(NotationError::BallOnChap(at).at(f.line, col));
            }
            coords.push(at);
        }
    }
    Position::new(geometry, ball, coords, to_move).map_err(|e| match e {
        PositionError::DuplicateChap(c) => NotationError::DuplicateChap(c),
        PositionError::BallOnChap(c) => NotationError::BallOnChap(c),
        PositionError::OffBoard(c) => NotationError::OutOfRange(c.to_string()),
    })
}

/// Canonical text: one `chaps:` line per non-empty column, LF endings.
pub fn serialize_position(pos: &Position) -> String {
    let g = pos.geometry();
    let mut out = String::new();
    let _ = writeln!(out, "{POSITION_HEADER}");
    let _ = writeln!(out, "rows: {}", g.rows());
    let _ = writeln!(out, "cols: {}", g.cols());
    let _ = writeln!(out, "ball: {}", pos.ball());
    let _ = writeln!(out, "to-move: {}", pos.to_move().letter());
    let mut any = false;
    for col in 1..=g.cols() {
        let line: Vec<String> = (1..=g.rows())
            .map(|row| Coord::new(col, row))
            .filter(|&c| pos.is_chap(c))
            .map(|c| c.to_string())
            .collect();
        if !line.is_empty() {
            any = true;
            let _ = writeln!(out, "chaps: {}", line.join(" "));
        }
    }
    if !any {
        out.push_str("chaps:\n");
    }
    out
}

/// Monospaced board: ball `O`, chap `X`, empty `.`; row 1 at the bottom.
pub fn render(pos: &Position) -> String {
    let g = pos.geometry();
    let width = g.rows().to_string().len();
    let mut out = String::new();
    let letters: String = (0..g.cols())
        .map(|i| format!(" {}", (b'a' + i) as char))
        .collect();
    let _ = writeln!(out, "{:width$} {}", "", letters.trim_start());
    for row in (1..=g.rows()).rev() {
        let cells: Vec<&str> = (1..=g.cols())
            .map(|col| {
                let c = Coord::new(col, row);
                if c == pos.ball() {
                    "O"
                } else if pos.is_chap(c) {
                    "X"
                } else {
                    "."
                }
            })
            .collect();
        let _ = writeln!(out, "{row:>width$} {} {row}", cells.join(" "));
    }
    let _ = writeln!(out, "{:width$} {}", "", letters.trim_start());
    out
}
