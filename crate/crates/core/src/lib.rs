//! Phutball rules engine, tactical analyzer and proof-line verifier.

pub mod corpus;
pub mod error;
pub mod geometry;
mod hash;
pub mod movegen;
pub mod notation;
pub mod position;
pub mod script;
pub mod tactics;
pub mod verify;

pub use error::{GeometryError, MoveError, PlacementFault, PositionError};
pub use geometry::{Coord, Direction, Geometry, Role};
pub use movegen::{
    legal_jumps, legal_moves, move_census, winning_jumps, JumpLine, MoveGenError, MoveList,
};
pub use position::{GoalSide, JumpTrace, Landing, Move, Outcome, Position, Segment};
pub use tactics::{annotate, Annotation, Solver, TacticalReport, TacticsError};
