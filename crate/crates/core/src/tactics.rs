//! Shots, tackles, jots and the bounded forced-win search.
//!
//! A *shot* is a winning jump for the attacker, whoever is to move. The
//! defender answers with a *tackle* (a placement after which no shot is
//! left) or a *jot* (a jump after which no shot is left, or which wins
//! outright for the defender). A shot that survives every tackle and every
//! jot is a win in one.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::MoveError;
use crate::geometry::{Coord, Direction, Role};
use crate::movegen::{self, distinct_jumps, landing_outcome, JumpWalker, MoveGenError};
use crate::position::{Move, Outcome, Position};

/// Default node cap for one [`win_within`] call.
pub const DEFAULT_NODE_LIMIT: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TacticsError {
    #[error(transparent)]
    MoveGen(#[from] MoveGenError),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error("the move ends the game; nothing to annotate")]
    TerminalAfterMove,
    #[error("search budget of {limit} nodes exceeded")]
    BudgetExceeded { limit: u64 },
}

impl TacticsError {
    pub fn kind(&self) -> &'static str {
        match self {
            TacticsError::MoveGen(e) => e.kind(),
            TacticsError::Move(e) => e.kind(),
            TacticsError::TerminalAfterMove => "terminal-after-move",
            TacticsError::BudgetExceeded { .. } => "budget-exceeded",
        }
    }
}

/// Annotation symbols, weakest to strongest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Annotation {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "!")]
    Shot,
    #[serde(rename = "*!")]
    Unjottable,
    #[serde(rename = "!!")]
    Untackleable,
    #[serde(rename = "#")]
    WinInOne,
}

impl Annotation {
    pub fn symbol(self) -> &'static str {
        match self {
            Annotation::None => "none",
            Annotation::Shot => "!",
            Annotation::Unjottable => "*!",
            Annotation::Untackleable => "!!",
            Annotation::WinInOne => "#",
        }
    }

    /// The properties this symbol asserts are all present in `report`.
    /// `none` asserts nothing.
    pub fn implied_by(self, report: &TacticalReport) -> bool {
        match self {
            Annotation::None => true,
            Annotation::Shot => !report.shot_witnesses.is_empty(),
            Annotation::Unjottable => report.unjottable,
            Annotation::Untackleable => report.untackleable,
            Annotation::WinInOne => report.win_in_one,
        }
    }
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Annotation {
    type Err = ();

    fn from_str(s: &str) -> Result<Annotation, ()> {
        Ok(match s {
            "none" => Annotation::None,
            "!" => Annotation::Shot,
            "*!" => Annotation::Unjottable,
            "!!" => Annotation::Untackleable,
            "#" => Annotation::WinInOne,
            _ => return Err(()),
        })
    }
}

/// Full tactical truth table for one attacker in one position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TacticalReport {
    pub attacker: Role,
    /// Least winning jumps in path order, one per distinct resulting
    /// state, at most [`WITNESS_LIMIT`].
    pub shot_witnesses: Vec<Vec<Direction>>,
    pub unjottable: bool,
    pub untackleable: bool,
    pub win_in_one: bool,
    pub annotation: Annotation,
    /// Least defender jump that escapes the shot, when there is one.
    pub refuting_jot: Option<Vec<Direction>>,
    /// Least defender placement that removes every shot, when there is one.
    pub refuting_tackle: Option<Coord>,
}

pub fn has_shot(pos: &Position, attacker: Role) -> Result<bool, TacticsError> {
    Ok(movegen::first_winning_jump(pos, attacker)?.is_some())
}

/// Most witnesses a report carries.
pub const WITNESS_LIMIT: usize = 8;

/// The least winning jumps for `attacker` (one per distinct resulting state,
/// at most [`WITNESS_LIMIT`]), in path order.
pub fn shot_witnesses(pos: &Position, attacker: Role) -> Result<Vec<Vec<Direction>>, TacticsError> {
    Ok(movegen::least_winning_jumps(pos, attacker, WITNESS_LIMIT)?)
}

/// Every defender placement after which the attacker has no shot left.
pub fn tackles(pos: &Position, attacker: Role) -> Result<Vec<Coord>, TacticsError> {
    let mut out = Vec::new();
    for at in pos.legal_placements()? {
        if !has_shot(&pos.place(at)?, attacker)? {
            out.push(at);
        }
    }
    Ok(out)
}

fn first_tackle(pos: &Position, attacker: Role) -> Result<Option<Coord>, TacticsError> {
    for at in pos.legal_placements()? {
        if !has_shot(&pos.place(at)?, attacker)? {
            return Ok(Some(at));
        }
    }
    Ok(None)
}

/// Walks defender jumps (one per distinct resulting state, in path order)
/// and collects those that escape the attacker, stopping after `max`.
fn find_jots(
    pos: &Position,
    attacker: Role,
    max: usize,
) -> Result<Vec<Vec<Direction>>, TacticsError> {
    let mut out = Vec::new();
    let mut failure = None;
    JumpWalker::by_state(pos).walk(&mut |path, landing| {
        let escapes = match landing_outcome(pos, landing) {
            Outcome::Win(r) => Ok(r != attacker),
            Outcome::Ongoing => pos
                .apply_move(&Move::Jump(path.to_vec()))
                .map_err(TacticsError::from)
                .and_then(|(after, _)| has_shot(&after, attacker).map(|s| !s)),
        };
        match escapes {
            Ok(true) => {
                out.push(path.to_vec());
                if out.len() == max {
                    return ControlFlow::Break(());
                }
            }
            Ok(false) => {}
            Err(e) => {
                failure = Some(e);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Every defender jump that escapes the attacker's shots, one per distinct
/// resulting state.
pub fn jots(pos: &Position, attacker: Role) -> Result<Vec<Vec<Direction>>, TacticsError> {
    find_jots(pos, attacker, usize::MAX)
}

fn first_jot(pos: &Position, attacker: Role) -> Result<Option<Vec<Direction>>, TacticsError> {
    Ok(find_jots(pos, attacker, 1)?.pop())
}

/// True iff the attacker has a shot and still has one after every defender
/// placement. A position without a shot is not an untackleable shot.
pub fn is_untackleable(pos: &Position, attacker: Role) -> Result<bool, TacticsError> {
    Ok(has_shot(pos, attacker)? && first_tackle(pos, attacker)?.is_none())
}

/// True iff the attacker has a shot and no defender jump escapes it.
pub fn is_unjottable(pos: &Position, attacker: Role) -> Result<bool, TacticsError> {
    Ok(has_shot(pos, attacker)? && first_jot(pos, attacker)?.is_none())
}

pub fn is_win_in_one(pos: &Position, attacker: Role) -> Result<bool, TacticsError> {
    Ok(has_shot(pos, attacker)?
        && first_jot(pos, attacker)?.is_none()
        && first_tackle(pos, attacker)?.is_none())
}

pub fn report(pos: &Position, attacker: Role) -> Result<TacticalReport, TacticsError> {
    let shot_witnesses = shot_witnesses(pos, attacker)?;
    if shot_witnesses.is_empty() {
        return Ok(TacticalReport {
            attacker,
            shot_witnesses,
            unjottable: false,
            untackleable: false,
            win_in_one: false,
            annotation: Annotation::None,
            refuting_jot: None,
            refuting_tackle: None,
        });
    }
    let refuting_jot = first_jot(pos, attacker)?;
    let refuting_tackle = first_tackle(pos, attacker)?;
    let unjottable = refuting_jot.is_none();
    let untackleable = refuting_tackle.is_none();
    let win_in_one = unjottable && untackleable;
    let annotation = if win_in_one {
        Annotation::WinInOne
    } else if untackleable {
        Annotation::Untackleable
    } else if unjottable {
        Annotation::Unjottable
    } else {
        Annotation::Shot
    };
    Ok(TacticalReport {
        attacker,
        shot_witnesses,
        unjottable,
        untackleable,
        win_in_one,
        annotation,
        refuting_jot,
        refuting_tackle,
    })
}

/// Tactical report for the mover after playing `mv`.
pub fn annotate(before: &Position, mv: &Move) -> Result<TacticalReport, TacticsError> {
    let mover = before.to_move();
    let (after, outcome) = before.apply_move(mv)?;
    if outcome != Outcome::Ongoing {
        return Err(TacticsError::TerminalAfterMove);
    }
    report(&after, mover)
}

/// Bounded AND/OR search for a forced win.
///
/// Memoized on exact positions, so results do not depend on digest
/// collisions or on the order of earlier queries.
pub struct Solver {
    node_limit: u64,
    nodes: u64,
    memo: HashMap<(Position, Role, u32), bool>,
}

impl Default for Solver {
    fn default() -> Solver {
        Solver::new(DEFAULT_NODE_LIMIT)
    }
}

impl Solver {
    pub fn new(node_limit: u64) -> Solver {
        Solver {
            node_limit,
            nodes: 0,
            memo: HashMap::new(),
        }
    }

    /// Nodes expanded so far (across calls).
    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    /// Can `winner` force a win within `plies` plies from `pos`?
    pub fn win_within(
        &mut self,
        pos: &Position,
        winner: Role,
        plies: u32,
    ) -> Result<bool, TacticsError> {
        if pos.is_terminal() {
            return Ok(pos.outcome().is_win_for(winner));
        }
        if plies == 0 {
            return Ok(false);
        }
        let key = (pos.clone(), winner, plies);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let v = self.search(pos, winner, plies)?;
        self.memo.insert(key, v);
        Ok(v)
    }

    fn tick(&mut self) -> Result<(), TacticsError> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            Err(TacticsError::BudgetExceeded {
                limit: self.node_limit,
            })
        } else {
            Ok(())
        }
    }

    fn search(&mut self, pos: &Position, winner: Role, plies: u32) -> Result<bool, TacticsError> {
        let attacking = pos.to_move() == winner;
        // Jumps first: they end games, so they settle most nodes quickly.
        for (path, outcome) in distinct_jumps(pos)? {
            self.tick()?;
            let ok = match outcome {
                Outcome::Win(r) => r == winner,
                Outcome::Ongoing => {
                    let (next, _) = pos.apply_move(&Move::Jump(path))?;
                    self.win_within(&next, winner, plies - 1)?
                }
            };
            if attacking && ok {
                return Ok(true);
            }
            if !attacking && !ok {
                return Ok(false);
            }
        }
        // A placement never ends the game, so with one ply left it cannot
        // win for the attacker and always refutes for the defender.
        if plies == 1 {
            return Ok(!attacking && pos.vacant_points().next().is_none());
        }
        for at in pos.vacant_points().collect::<Vec<_>>() {
            self.tick()?;
            let next = pos.place(at)?;
            let ok = self.win_within(&next, winner, plies - 1)?;
            if attacking && ok {
                return Ok(true);
            }
            if !attacking && !ok {
                return Ok(false);
            }
        }
        Ok(!attacking)
    }

    /// A principal line for a forced win: at attacker nodes the first
    /// winning move in canonical order (jumps, then placements), at
    /// defender nodes the reply that holds out longest. `None` when there
    /// is no forced win.
    pub fn principal_line(
        &mut self,
        pos: &Position,
        winner: Role,
        plies: u32,
    ) -> Result<Option<Vec<Move>>, TacticsError> {
        if !self.win_within(pos, winner, plies)? {
            return Ok(None);
        }
        let mut line = Vec::new();
        let mut at = pos.clone();
        let mut left = plies;
        while !at.is_terminal() && left > 0 {
            let moves: Vec<Move> = movegen::legal_moves(&at)?.moves().collect();
            let chosen = if at.to_move() == winner {
                self.first_move_where(&at, &moves, |s, next| s.win_within(next, winner, left - 1))?
            } else {
                self.most_resilient(&at, &moves, winner, left)?
            };
            let Some((mv, next)) = chosen else { break };
            line.push(mv);
            at = next;
            left -= 1;
        }
        Ok(Some(line))
    }

    fn first_move_where(
        &mut self,
        at: &Position,
        moves: &[Move],
        mut keep: impl FnMut(&mut Solver, &Position) -> Result<bool, TacticsError>,
    ) -> Result<Option<(Move, Position)>, TacticsError> {
        for mv in moves {
            let (next, _) = at.apply_move(mv)?;
            if keep(self, &next)? {
                return Ok(Some((mv.clone(), next)));
            }
        }
        Ok(None)
    }

    /// The defender reply that holds out longest: the first move after
    /// which the winner needs the most plies, or the first move when every
    /// reply loses at once.
    fn most_resilient(
        &mut self,
        at: &Position,
        moves: &[Move],
        winner: Role,
        left: u32,
    ) -> Result<Option<(Move, Position)>, TacticsError> {
        for depth in (0..left.saturating_sub(1)).rev() {
            let found = self.first_move_where(at, moves, |s, next| {
                Ok(!next.is_terminal() && !s.win_within(next, winner, depth)?)
            })?;
            if found.is_some() {
                return Ok(found);
            }
        }
        self.first_move_where(at, moves, |_, _| Ok(true))
    }
}

/// [`Solver::win_within`] with the default node budget.
pub fn win_within(pos: &Position, winner: Role, plies: u32) -> Result<bool, TacticsError> {
    Solver::default().win_within(pos, winner, plies)
}
