//! Positions and the exact rules of play: jump tracing, move application,
//! outcome classification and the half-turn symmetry.

use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{MoveError, PlacementFault, PositionError};
use crate::geometry::{Coord, Direction, Geometry, Role, MAX_ROWS};
use crate::hash::keys;

/// Dense occupancy mask, one `u32` per row with bit `col - 1` set for a chap.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Occupancy([u32; MAX_ROWS as usize]);

impl Occupancy {
    pub(crate) const EMPTY: Occupancy = Occupancy([0; MAX_ROWS as usize]);

    #[inline]
    pub(crate) fn get(&self, c: Coord) -> bool {
        self.0[c.row as usize - 1] >> (c.col - 1) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, c: Coord) {
        self.0[c.row as usize - 1] |= 1 << (c.col - 1);
    }

    #[inline]
    pub(crate) fn clear(&mut self, c: Coord) {
        self.0[c.row as usize - 1] &= !(1 << (c.col - 1));
    }

    fn count(&self) -> usize {
        self.0.iter().map(|r| r.count_ones() as usize).sum()
    }
}

/// Which goal line the ball crossed when a jump leaves the board.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GoalSide {
    Top,
    Bottom,
}

impl GoalSide {
    pub fn winner(self) -> Role {
        match self {
            GoalSide::Top => Role::Alfred,
            GoalSide::Bottom => Role::Betty,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Ongoing,
    Win(Role),
}

impl Outcome {
    pub fn winner(self) -> Option<Role> {
        match self {
            Outcome::Ongoing => None,
            Outcome::Win(r) => Some(r),
        }
    }

    pub fn is_win_for(self, role: Role) -> bool {
        self == Outcome::Win(role)
    }

    /// Same outcome seen on the half-turn rotated board.
    pub fn rotated(self) -> Outcome {
        match self {
            Outcome::Ongoing => Outcome::Ongoing,
            Outcome::Win(r) => Outcome::Win(r.opposite()),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Ongoing => f.write_str("ongoing"),
            Outcome::Win(r) => write!(f, "{r} wins"),
        }
    }
}

/// A chap placement or a jump described by its direction sequence.
///
/// Two jumps are the same move only if their paths are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Place(Coord),
    Jump(Vec<Direction>),
}

impl Move {
    pub fn is_jump(&self) -> bool {
        matches!(self, Move::Jump(_))
    }

    /// The move as seen on the half-turn rotated board.
    pub fn rotated(&self, geometry: Geometry) -> Move {
        match self {
            Move::Place(c) => Move::Place(geometry.rotate(*c)),
            Move::Jump(path) => Move::Jump(path.iter().map(|d| d.opposite()).collect()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Landing {
    Point(Coord),
    Exit(GoalSide),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub direction: Direction,
    /// Chaps jumped in this segment, nearest first.
    pub removed: Vec<Coord>,
    pub landing: Landing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpTrace {
    pub segments: Vec<Segment>,
    pub exit: Option<GoalSide>,
}

impl JumpTrace {
    pub fn removed_count(&self) -> usize {
        self.segments.iter().map(|s| s.removed.len()).sum()
    }

    /// Final on-board resting point, if the ball did not leave the board.
    pub fn end(&self) -> Option<Coord> {
        match self.segments.last()?.landing {
            Landing::Point(c) => Some(c),
            Landing::Exit(_) => None,
        }
    }
}

/// Result of extending a jump by one segment.
pub(crate) enum SegmentEnd {
    Land(Coord),
    Exit(GoalSide),
    Sideline,
    NoChap,
}

/// Walks one segment over `chaps` from `from`. Returns the landing kind and
/// leaves the jumped chaps in `removed` (nearest first) without touching `chaps`.
#[inline]
pub(crate) fn scan_segment(
    geometry: Geometry,
    chaps: &Occupancy,
    from: Coord,
    dir: Direction,
    removed: &mut Vec<Coord>,
) -> SegmentEnd {
    removed.clear();
    let (dc, dr) = dir.offset();
    let mut col = from.col as i32 + dc;
    let mut row = from.row as i32 + dr;
    while geometry.contains(col, row) {
        let c = Coord::new(col as u8, row as u8);
        if !chaps.get(c) {
            break;
        }
        removed.push(c);
        col += dc;
        row += dr;
    }
    if removed.is_empty() {
        return SegmentEnd::NoChap;
    }
    if row > geometry.rows() as i32 {
        SegmentEnd::Exit(GoalSide::Top)
    } else if row < 1 {
        SegmentEnd::Exit(GoalSide::Bottom)
    } else if col < 1 || col > geometry.cols() as i32 {
        SegmentEnd::Sideline
    } else {
        SegmentEnd::Land(Coord::new(col as u8, row as u8))
    }
}

/// Board geometry, ball, chaps and side to move.
///
/// Immutable once built; every move produces a new value. Terminal positions
/// (the ball rests on a goal row or has left the board) carry their winner.
#[derive(Clone)]
pub struct Position {
    geometry: Geometry,
    ball: Coord,
    chaps: Occupancy,
    to_move: Role,
    winner: Option<Role>,
    digest: u64,
}

impl Position {
    pub fn new(
        geometry: Geometry,
        ball: Coord,
        chaps: impl IntoIterator<Item = Coord>,
        to_move: Role,
    ) -> Result<Position, PositionError> {
        let on_board = |c: Coord| geometry.contains(c.col as i32, c.row as i32);
        if !on_board(ball) {
            return Err(PositionError::OffBoard(ball));
        }
        let mut occ = Occupancy::EMPTY;
        for c in chaps {
            if !on_board(c) {
                return Err(PositionError::OffBoard(c));
            }
            if occ.get(c) {
                return Err(PositionError::DuplicateChap(c));
            }
            if c == ball {
                return Err(PositionError::BallOnChap(c));
            }
            occ.set(c);
        }
        let winner = resting_winner(geometry, ball);
        let mut pos = Position {
            geometry,
            ball,
            chaps: occ,
            to_move,
            winner,
            digest: 0,
        };
        pos.digest = pos.full_digest();
        Ok(pos)
    }

    #[inline]
    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    #[inline]
    pub fn ball(&self) -> Coord {
        self.ball
    }

    #[inline]
    pub fn to_move(&self) -> Role {
        self.to_move
    }

    #[inline]
    pub fn is_chap(&self, c: Coord) -> bool {
        self.chaps.get(c)
    }

    #[inline]
    pub(crate) fn occupancy(&self) -> &Occupancy {
        &self.chaps
    }

    pub fn chap_count(&self) -> usize {
        self.chaps.count()
    }

    /// Chaps in column-major order.
    pub fn chaps(&self) -> impl Iterator<Item = Coord> + '_ {
        self.geometry.points().filter(|&c| self.chaps.get(c))
    }

    pub fn outcome(&self) -> Outcome {
        match self.winner {
            Some(r) => Outcome::Win(r),
            None => Outcome::Ongoing,
        }
    }

    #[inline]
    pub fn is_terminal(&self) -> bool {
        self.winner.is_some()
    }

    /// 64-bit Zobrist digest; equal positions have equal digests.
    #[inline]
    pub fn digest(&self) -> u64 {
        self.digest
    }

    /// Same board with a different side to move, as if a tempo were passed.
    pub fn with_to_move(&self, role: Role) -> Position {
        let mut next = self.clone();
        if role != self.to_move {
            next.to_move = role;
            next.digest ^= keys().betty_to_move_key();
        }
        next
    }

    fn full_digest(&self) -> u64 {
        let k = keys();
        let mut h = k.dims(self.geometry.rows(), self.geometry.cols());
        h ^= k.ball(self.ball);
        for c in self.chaps() {
            h ^= k.chap(c);
        }
        h ^ k.side(self.to_move) ^ k.winner(self.winner)
    }

    fn ensure_live(&self) -> Result<(), MoveError> {
        if self.is_terminal() {
            Err(MoveError::GameOver)
        } else {
            Ok(())
        }
    }

    /// Follows `path` segment by segment. Each segment jumps the whole
    /// contiguous run of chaps and lands on the first vacant point; chaps
    /// removed by earlier segments are gone for later ones.
    pub fn trace_jump(&self, path: &[Direction]) -> Result<JumpTrace, MoveError> {
        self.ensure_live()?;
        if path.is_empty() {
            return Err(MoveError::EmptyPath);
        }
        let mut chaps = self.chaps;
        let mut at = self.ball;
        let mut segments = Vec::with_capacity(path.len());
        let mut removed = Vec::new();
        for (i, &dir) in path.iter().enumerate() {
            if let Some(Segment {
                landing: Landing::Exit(_),
                ..
            }) = segments.last()
            {
                return Err(MoveError::SegmentAfterExit { segment: i });
            }
            let landing = match scan_segment(self.geometry, &chaps, at, dir, &mut removed) {
                SegmentEnd::NoChap => return Err(MoveError::NoChapToJump { segment: i }),
                SegmentEnd::Sideline => return Err(MoveError::SidelineExit { segment: i }),
                SegmentEnd::Exit(side) => Landing::Exit(side),
                SegmentEnd::Land(c) => {
                    at = c;
                    Landing::Point(c)
                }
            };
            for &c in &removed {
                chaps.clear(c);
            }
            segments.push(Segment {
                direction: dir,
                removed: removed.clone(),
                landing,
            });
        }
        let exit = match segments.last().map(|s| s.landing) {
            Some(Landing::Exit(side)) => Some(side),
            _ => None,
        };
        Ok(JumpTrace { segments, exit })
    }

    pub fn apply_move(&self, mv: &Move) -> Result<(Position, Outcome), MoveError> {
        match mv {
            Move::Place(at) => self.place(*at).map(|p| (p, Outcome::Ongoing)),
            Move::Jump(path) => {
                let trace = self.trace_jump(path)?;
                let next = self.after_jump(&trace);
                let outcome = next.outcome();
                Ok((next, outcome))
            }
        }
    }

    /// Position after a chap placement; never ends the game.
    pub fn place(&self, at: Coord) -> Result<Position, MoveError> {
        self.ensure_live()?;
        let fault = if !self.geometry.contains(at.col as i32, at.row as i32) {
            Some(PlacementFault::OffBoard)
        } else if at == self.ball {
            Some(PlacementFault::Ball)
        } else if self.chaps.get(at) {
            Some(PlacementFault::Occupied)
        } else {
            None
        };
        if let Some(reason) = fault {
            return Err(MoveError::IllegalPlacement { at, reason });
        }
        let k = keys();
        let mut next = self.clone();
        next.chaps.set(at);
        next.to_move = self.to_move.opposite();
        next.digest ^= k.chap(at) ^ k.betty_to_move_key();
        Ok(next)
    }

    /// Position after an already traced jump.
    pub fn after_jump(&self, trace: &JumpTrace) -> Position {
        let k = keys();
        let mut next = self.clone();
        let mut digest = self.digest;
        for seg in &trace.segments {
            for &c in &seg.removed {
                next.chaps.clear(c);
                digest ^= k.chap(c);
            }
        }
        let end = trace.end().unwrap_or_else(|| {
            // Ball left the board; it is kept at its last on-board point.
            trace
                .segments
                .iter()
                .rev()
                .find_map(|s| match s.landing {
                    Landing::Point(c) => Some(c),
                    Landing::Exit(_) => None,
                })
                .unwrap_or(self.ball)
        });
        digest ^= k.ball(self.ball) ^ k.ball(end);
        next.ball = end;
        next.winner = match trace.exit {
            Some(side) => Some(side.winner()),
            None => resting_winner(self.geometry, end),
        };
        digest ^= k.winner(next.winner);
        next.to_move = self.to_move.opposite();
        digest ^= k.betty_to_move_key();
        next.digest = digest;
        next
    }

    /// Every vacant point, column-major.
    pub fn legal_placements(&self) -> Result<Vec<Coord>, MoveError> {
        self.ensure_live()?;
        Ok(self.vacant_points().collect())
    }

    pub(crate) fn vacant_points(&self) -> impl Iterator<Item = Coord> + '_ {
        self.geometry
            .points()
            .filter(move |&c| c != self.ball && !self.chaps.get(c))
    }

    /// Half-turn rotation of the board; the roles trade goals, so the side
    /// to move (and any winner) is swapped.
    pub fn rot180(&self) -> Position {
        let g = self.geometry;
        let mut chaps = Occupancy::EMPTY;
        for c in self.chaps() {
            chaps.set(g.rotate(c));
        }
        let mut pos = Position {
            geometry: g,
            ball: g.rotate(self.ball),
            chaps,
            to_move: self.to_move.opposite(),
            winner: self.winner.map(Role::opposite),
            digest: 0,
        };
        pos.digest = pos.full_digest();
        pos
    }
}

fn resting_winner(geometry: Geometry, ball: Coord) -> Option<Role> {
    if ball.row == geometry.rows() {
        Some(Role::Alfred)
    } else if ball.row == 1 {
        Some(Role::Betty)
    } else {
        None
    }
}

impl crate::hash::Keys {
    #[inline]
    fn betty_to_move_key(&self) -> u64 {
        self.side(Role::Betty)
    }
}

impl PartialEq for Position {
    fn eq(&self, other: &Position) -> bool {
        self.digest == other.digest
            && self.geometry == other.geometry
            && self.ball == other.ball
            && self.to_move == other.to_move
            && self.winner == other.winner
            && self.chaps == other.chaps
    }
}

impl Eq for Position {}

impl Hash for Position {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.digest);
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chaps: Vec<String> = self.chaps().map(|c| c.to_string()).collect();
        f.debug_struct("Position")
            .field("geometry", &self.geometry.to_string())
            .field("ball", &self.ball.to_string())
            .field("to_move", &self.to_move)
            .field("winner", &self.winner)
            .field("chaps", &chaps.join(" "))
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Direction::*;

    fn c(s: &str) -> Coord {
        let col = s.as_bytes()[0] - b'a' + 1;
        Coord::new(col, s[1..].parse().unwrap())
    }

    fn fig1() -> Position {
        let chaps = [
            "b2", "c2", "d2", "e3", "d4", "e5", "a2", "a1", "c4", "a5", "b5",
        ];
        Position::new(
            Geometry::new(5, 5).unwrap(),
            c("a3"),
            chaps.iter().map(|s| c(s)),
            Role::Alfred,
        )
        .unwrap()
    }

    #[test]
    fn corner_exit_through_f6() {
        let t = fig1().trace_jump(&[SE, N, NE]).unwrap();
        let removed: Vec<Vec<Coord>> = t.segments.iter().map(|s| s.removed.clone()).collect();
        assert_eq!(
            removed,
            vec![vec![c("b2")], vec![c("c2")], vec![c("d4"), c("e5")]]
        );
        assert_eq!(t.exit, Some(GoalSide::Top));
    }

    #[test]
    fn fig1_rejections() {
        let p = fig1();
        assert_eq!(
            p.trace_jump(&[SE, N, N, W]),
            Err(MoveError::SidelineExit { segment: 3 })
        );
        assert_eq!(
            p.trace_jump(&[SE, N, SW]),
            Err(MoveError::NoChapToJump { segment: 2 })
        );
        assert_eq!(p.trace_jump(&[]), Err(MoveError::EmptyPath));
        assert_eq!(
            p.trace_jump(&[S, N]),
            Err(MoveError::SegmentAfterExit { segment: 1 })
        );
    }

    #[test]
    fn resting_and_passing_through_goal_rows() {
        let p = fig1();
        let (after, outcome) = p.apply_move(&Move::Jump(vec![SE])).unwrap();
        assert_eq!(outcome, Outcome::Win(Role::Betty));
        assert_eq!(after.ball(), c("c1"));
        assert!(!after.is_chap(c("b2")));

        let (after, outcome) = p.apply_move(&Move::Jump(vec![SE, N])).unwrap();
        assert_eq!(outcome, Outcome::Ongoing);
        assert_eq!(after.ball(), c("c3"));
        assert_eq!(after.to_move(), Role::Betty);
        assert_eq!(after.chap_count(), 9);
    }

    #[test]
    fn placement_faults() {
        let p = fig1();
        let kind = |at| p.place(c(at)).unwrap_err().kind();
        assert_eq!(kind("b2"), "occupied");
        assert_eq!(kind("a3"), "ball-square");
        assert_eq!(p.place(Coord::new(6, 1)).unwrap_err().kind(), "off-board");
        let next = p.place(c("e1")).unwrap();
        assert_eq!(next.chap_count(), 12);
        assert_eq!(next.to_move(), Role::Betty);
        assert!(!next.is_terminal());
    }

    #[test]
    fn terminal_positions_are_frozen() {
        let (done, _) = fig1().apply_move(&Move::Jump(vec![S])).unwrap();
        assert!(done.is_terminal());
        assert_eq!(done.place(c("e1")).unwrap_err(), MoveError::GameOver);
        assert_eq!(done.trace_jump(&[N]).unwrap_err(), MoveError::GameOver);
        assert_eq!(done.legal_placements().unwrap_err(), MoveError::GameOver);
        // rot180 and the digest still work
        assert_eq!(done.rot180().outcome(), Outcome::Win(Role::Alfred));
        let _ = done.digest();
    }

    #[test]
    fn incremental_digest_matches_full() {
        let p = fig1();
        let (a, _) = p.apply_move(&Move::Jump(vec![SE, N, NE])).unwrap();
        assert_eq!(a.digest(), a.full_digest());
        let b = p.place(c("e1")).unwrap();
        assert_eq!(b.digest(), b.full_digest());
        let t = p.with_to_move(Role::Betty);
        assert_eq!(t.digest(), t.full_digest());
        assert_ne!(t.digest(), p.digest());
    }

    #[test]
    fn rot180_is_an_involution() {
        let p = fig1();
        assert_eq!(p.rot180().rot180(), p);
        assert_eq!(p.rot180().ball(), c("e3"));
    }

    #[test]
    fn own_goal_counts_for_the_opponent() {
        // Alfred to move may jump into the bottom row; Betty wins.
        let p = Position::new(
            Geometry::new(5, 5).unwrap(),
            c("c3"),
            [c("c2")],
            Role::Alfred,
        )
        .unwrap();
        let (_, o) = p.apply_move(&Move::Jump(vec![S])).unwrap();
        assert_eq!(o, Outcome::Win(Role::Betty));
    }
}
