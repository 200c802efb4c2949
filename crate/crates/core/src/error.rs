use thiserror::Error;

use crate::geometry::Coord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("unsupported board {rows}x{cols} (need 2..=64 rows and 2..=26 columns)")]
    Unsupported { rows: u32, cols: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PositionError {
    #[error("{0} is off the board")]
    OffBoard(Coord),
    #[error("duplicate chap at {0}")]
    DuplicateChap(Coord),
    #[error("ball shares its point {0} with a chap")]
    BallOnChap(Coord),
}

/// Rule violations raised by the board kernel.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("jump path is empty")]
    EmptyPath,
    #[error("segment {segment}: no chap to jump")]
    NoChapToJump { segment: usize },
    #[error("segment {segment}: jump leaves the board across a sideline")]
    SidelineExit { segment: usize },
    #[error("segment {segment}: path continues after the ball left the board")]
    SegmentAfterExit { segment: usize },
    #[error("cannot place a chap at {at}: {reason}")]
    IllegalPlacement { at: Coord, reason: PlacementFault },
    #[error("the game is already over")]
    GameOver,
}

impl MoveError {
    /// Stable kebab-case name used by scripts, reports and the service.
    pub fn kind(&self) -> &'static str {
        match self {
            MoveError::EmptyPath => "empty-path",
            MoveError::NoChapToJump { .. } => "no-chap",
            MoveError::SidelineExit { .. } => "sideline",
            MoveError::SegmentAfterExit { .. } => "segment-after-exit",
            MoveError::IllegalPlacement { reason, .. } => match reason {
                PlacementFault::Occupied => "occupied",
                PlacementFault::Ball => "ball-square",
                PlacementFault::OffBoard => "off-board",
            },
            MoveError::GameOver => "game-over",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlacementFault {
    Occupied,
    Ball,
    OffBoard,
}

impl std::fmt::Display for PlacementFault {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PlacementFault::Occupied => "point already holds a chap",
            PlacementFault::Ball => "point holds the ball",
            PlacementFault::OffBoard => "point is off the board",
        })
    }
}
