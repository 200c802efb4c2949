//! The demo policy behind the engine-move endpoint. It is meant for
//! exercising the board, not for strong play.

use phutball_core::tactics::{has_shot, tackles};
use phutball_core::{legal_moves, Move, MoveGenError, Outcome, Position, Solver, TacticsError};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    /// First move of the shortest forced win found within the depth cap.
    ForcedWin,
    /// The opponent has a shot and exactly one placement stops it.
    UniqueTackle,
    /// Least move in canonical order that leaves the opponent no shot.
    LeastSafe,
    /// Nothing is safe; the least legal move.
    LeastLegal,
}

fn gives_up(e: &TacticsError) -> bool {
    matches!(
        e,
        TacticsError::BudgetExceeded { .. } | TacticsError::MoveGen(MoveGenError::PathLimit { .. })
    )
}

/// Picks a move for the side to move. A search that runs out of budget
/// falls through to the next rule.
pub fn choose(
    pos: &Position,
    max_plies: u32,
    node_limit: u64,
) -> Result<(Move, Reason), TacticsError> {
    let me = pos.to_move();
    let them = me.opposite();
    let mut solver = Solver::new(node_limit);
    for plies in 1..=max_plies {
        match solver.principal_line(pos, me, plies) {
            Ok(Some(line)) if !line.is_empty() => return Ok((line[0].clone(), Reason::ForcedWin)),
            Ok(_) => {}
            Err(e) if gives_up(&e) => break,
            Err(e) => return Err(e),
        }
    }
    if has_shot(pos, them)? {
        if let [only] = tackles(pos, them)?[..] {
            return Ok((Move::Place(only), Reason::UniqueTackle));
        }
    }
    let mut moves: Vec<Move> = legal_moves(pos)?.moves().collect();
    moves.sort();
    for mv in &moves {
        let (after, outcome) = pos.apply_move(mv)?;
        let safe = match outcome {
            Outcome::Win(r) => r == me,
            Outcome::Ongoing => !has_shot(&after, them)?,
        };
        if safe {
            return Ok((mv.clone(), Reason::LeastSafe));
        }
    }
    let least = moves
        .into_iter()
        .next()
        .ok_or(TacticsError::MoveGen(MoveGenError::GameOver))?;
    Ok((least, Reason::LeastLegal))
}
