//! Enumeration of legal moves.
//!
//! Jumps are expanded depth-first in direction order `NW, N, NE, W, E, SW, S, SE`,
//! listing each path before its extensions, so the jump list comes out
//! lexicographically sorted by path.

use std::collections::HashSet;
use std::ops::ControlFlow;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{Coord, Direction, Geometry, Role};
use crate::position::{
    scan_segment, GoalSide, JumpTrace, Landing, Move, Occupancy, Outcome, Position, SegmentEnd,
};

/// Default cap on the number of jump paths explored from one position.
pub const DEFAULT_PATH_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveGenError {
    #[error("more than {limit} jump paths from one position")]
    PathLimit { limit: usize },
    #[error("the game is already over")]
    GameOver,
}

impl MoveGenError {
    pub fn kind(&self) -> &'static str {
        match self {
            MoveGenError::PathLimit { .. } => "path-limit",
            MoveGenError::GameOver => "game-over",
        }
    }
}

/// One legal jump with its trace and the outcome it produces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JumpLine {
    pub path: Vec<Direction>,
    pub trace: JumpTrace,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoveList {
    pub placements: Vec<Coord>,
    pub jumps: Vec<JumpLine>,
}

impl MoveList {
    pub fn len(&self) -> usize {
        self.placements.len() + self.jumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Jumps first (in path order), then placements (column-major).
    pub fn moves(&self) -> impl Iterator<Item = Move> + '_ {
        self.jumps
            .iter()
            .map(|j| Move::Jump(j.path.clone()))
            .chain(self.placements.iter().map(|&c| Move::Place(c)))
    }
}

/// Visited (landing point, chaps left) and (goal exit, chaps left) pairs.
type SeenStates = (HashSet<(Coord, Occupancy)>, HashSet<(GoalSide, Occupancy)>);

/// Depth-first jump walker over a scratch copy of the chap mask.
///
/// In state mode a path is only reported (and extended) if no earlier path
/// reached the same ball point with the same chaps left. Since paths are
/// generated in lexicographic order, the reported path for each resulting
/// state is the least one reaching it.
pub(crate) struct JumpWalker<'a> {
    pos: &'a Position,
    chaps: Occupancy,
    path: Vec<Direction>,
    removed: Vec<Vec<Coord>>,
    seen: usize,
    limit: usize,
    states: Option<SeenStates>,
    /// Only expand from points where this role may still reach a win.
    prune_for: Option<Role>,
}

impl<'a> JumpWalker<'a> {
    pub(crate) fn new(pos: &'a Position, limit: usize) -> JumpWalker<'a> {
        JumpWalker {
            pos,
            chaps: *pos.occupancy(),
            path: Vec::new(),
            removed: Vec::new(),
            seen: 0,
            limit,
            states: None,
            prune_for: None,
        }
    }

    /// Walker that visits each distinct resulting state once.
    pub(crate) fn by_state(pos: &'a Position) -> JumpWalker<'a> {
        let mut w = JumpWalker::new(pos, DEFAULT_PATH_LIMIT);
        w.states = Some((HashSet::new(), HashSet::new()));
        w
    }

    /// Skips continuations from which `role` cannot possibly reach a win.
    /// Every winning path is still visited.
    pub(crate) fn pruned_for(mut self, role: Role) -> JumpWalker<'a> {
        self.prune_for = Some(role);
        self
    }

    /// Calls `visit(path, landing)` for every legal jump path. Stops early
    /// when `visit` breaks.
    pub(crate) fn walk<F>(&mut self, visit: &mut F) -> Result<(), MoveGenError>
    where
        F: FnMut(&[Direction], Landing) -> ControlFlow<()>,
    {
        if self.pos.is_terminal() {
            return Err(MoveGenError::GameOver);
        }
        self.expand(self.pos.ball(), visit).map(|_| ())
    }

    fn expand<F>(&mut self, at: Coord, visit: &mut F) -> Result<ControlFlow<()>, MoveGenError>
    where
        F: FnMut(&[Direction], Landing) -> ControlFlow<()>,
    {
        let geometry = self.pos.geometry();
        if let Some(role) = self.prune_for {
            if !may_reach_win(geometry, &self.chaps, at, role) {
                return Ok(ControlFlow::Continue(()));
            }
        }
        let depth = self.path.len();
        if self.removed.len() <= depth {
            self.removed.push(Vec::new());
        }
        for dir in Direction::ALL {
            let mut run = std::mem::take(&mut self.removed[depth]);
            let end = scan_segment(geometry, &self.chaps, at, dir, &mut run);
            let landing = match end {
                SegmentEnd::NoChap | SegmentEnd::Sideline => {
                    self.removed[depth] = run;
                    continue;
                }
                SegmentEnd::Exit(side) => Landing::Exit(side),
                SegmentEnd::Land(c) => Landing::Point(c),
            };
            if let Some((points, exits)) = &mut self.states {
                let mut after = self.chaps;
                for &c in &run {
                    after.clear(c);
                }
                let fresh = match landing {
                    Landing::Point(c) => points.insert((c, after)),
                    Landing::Exit(side) => exits.insert((side, after)),
                };
                if !fresh {
                    self.removed[depth] = run;
                    continue;
                }
            }
            self.seen += 1;
            if self.seen > self.limit {
                return Err(MoveGenError::PathLimit { limit: self.limit });
            }
            self.path.push(dir);
            if visit(&self.path, landing).is_break() {
                self.path.pop();
                return Ok(ControlFlow::Break(()));
            }
            if let Landing::Point(next) = landing {
                for &c in &run {
                    self.chaps.clear(c);
                }
                let flow = self.expand(next, visit);
                for &c in &run {
                    self.chaps.set(c);
                }
                if !matches!(flow, Ok(ControlFlow::Continue(()))) {
                    self.path.pop();
                    return flow;
                }
            }
            self.path.pop();
            self.removed[depth] = run;
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// Sound over-approximation of jump reachability: treats every chap as
/// possibly gone once the ball could have jumped it, and tracks only the
/// ball point. False means no jump sequence from `from` can win for `role`.
pub(crate) fn may_reach_win(
    geometry: Geometry,
    chaps: &Occupancy,
    from: Coord,
    role: Role,
) -> bool {
    let goal = geometry.goal_row(role);
    let mut seen = Occupancy::EMPTY;
    let mut stack = vec![from];
    seen.set(from);
    while let Some(p) = stack.pop() {
        for dir in Direction::ALL {
            let (dc, dr) = dir.offset();
            let (mut col, mut row) = (p.col as i32 + dc, p.row as i32 + dr);
            if !geometry.contains(col, row) || !chaps.get(Coord::new(col as u8, row as u8)) {
                continue;
            }
            loop {
                col += dc;
                row += dr;
                if !geometry.contains(col, row) {
                    let side = if row > geometry.rows() as i32 {
                        Some(Role::Alfred)
                    } else if row < 1 {
                        Some(Role::Betty)
                    } else {
                        None
                    };
                    if side == Some(role) {
                        return true;
                    }
                    break;
                }
                let q = Coord::new(col as u8, row as u8);
                if q.row == goal {
                    return true;
                }
                if !seen.get(q) {
                    seen.set(q);
                    stack.push(q);
                }
                if !chaps.get(q) {
                    break;
                }
            }
        }
    }
    false
}

/// Outcome of a jump that ends at `landing`.
pub(crate) fn landing_outcome(pos: &Position, landing: Landing) -> Outcome {
    match landing {
        Landing::Exit(side) => Outcome::Win(side.winner()),
        Landing::Point(c) if c.row == pos.geometry().rows() => Outcome::Win(Role::Alfred),
        Landing::Point(c) if c.row == 1 => Outcome::Win(Role::Betty),
        Landing::Point(_) => Outcome::Ongoing,
    }
}

/// Every legal jump path with its trace and outcome, in path order.
pub fn legal_jumps(pos: &Position) -> Result<Vec<JumpLine>, MoveGenError> {
    legal_jumps_capped(pos, DEFAULT_PATH_LIMIT)
}

pub fn legal_jumps_capped(pos: &Position, limit: usize) -> Result<Vec<JumpLine>, MoveGenError> {
    let mut paths = Vec::new();
    JumpWalker::new(pos, limit).walk(&mut |path, landing| {
        paths.push((path.to_vec(), landing_outcome(pos, landing)));
        ControlFlow::Continue(())
    })?;
    Ok(paths
        .into_iter()
        .map(|(path, outcome)| {
            let trace = pos
                .trace_jump(&path)
                .expect("walker only yields traceable paths");
            JumpLine {
                path,
                trace,
                outcome,
            }
        })
        .collect())
}

pub fn legal_moves(pos: &Position) -> Result<MoveList, MoveGenError> {
    let jumps = legal_jumps(pos)?;
    let placements = pos.legal_placements().map_err(|_| MoveGenError::GameOver)?;
    Ok(MoveList { placements, jumps })
}

/// The `max` least winning jumps for `role`, one per distinct resulting
/// state, in path order.
pub fn least_winning_jumps(
    pos: &Position,
    role: Role,
    max: usize,
) -> Result<Vec<Vec<Direction>>, MoveGenError> {
    let mut wins = Vec::new();
    if max == 0 {
        return Ok(wins);
    }
    JumpWalker::by_state(pos)
        .pruned_for(role)
        .walk(&mut |path, landing| {
            if landing_outcome(pos, landing).is_win_for(role) {
                wins.push(path.to_vec());
                if wins.len() == max {
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        })?;
    Ok(wins)
}

/// Paths of every jump that wins for `role`.
pub fn winning_jumps(pos: &Position, role: Role) -> Result<Vec<Vec<Direction>>, MoveGenError> {
    let mut wins = Vec::new();
    JumpWalker::new(pos, DEFAULT_PATH_LIMIT).walk(&mut |path, landing| {
        if landing_outcome(pos, landing).is_win_for(role) {
            wins.push(path.to_vec());
        }
        ControlFlow::Continue(())
    })?;
    Ok(wins)
}

/// The least winning jump for `role` in path order, if any.
pub fn first_winning_jump(
    pos: &Position,
    role: Role,
) -> Result<Option<Vec<Direction>>, MoveGenError> {
    Ok(least_winning_jumps(pos, role, 1)?.pop())
}

/// One jump per distinct resulting state (the least path reaching it),
/// with its outcome. Every legal jump leads to the same position as
/// exactly one of these.
pub fn distinct_jumps(pos: &Position) -> Result<Vec<(Vec<Direction>, Outcome)>, MoveGenError> {
    let mut out = Vec::new();
    JumpWalker::by_state(pos).walk(&mut |path, landing| {
        out.push((path.to_vec(), landing_outcome(pos, landing)));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Number of legal move sequences of length `plies`; a sequence that ends
/// the game early counts once at the terminal node.
pub fn move_census(pos: &Position, plies: u32) -> Result<u64, MoveGenError> {
    if pos.is_terminal() || plies == 0 {
        return Ok(1);
    }
    let moves = legal_moves(pos)?;
    if plies == 1 {
        return Ok(moves.len() as u64);
    }
    let mut total = 0;
    for line in &moves.jumps {
        total += if line.outcome == Outcome::Ongoing {
            move_census(&pos.after_jump(&line.trace), plies - 1)?
        } else {
            1
        };
    }
    for &at in &moves.placements {
        let next = pos.place(at).expect("listed placement is legal");
        total += move_census(&next, plies - 1)?;
    }
    Ok(total)
}
