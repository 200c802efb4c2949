//! Board geometry: dimensions, points, directions and the two roles.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Largest supported number of rows.
pub const MAX_ROWS: u8 = 64;
/// Largest supported number of columns (column letters `a`..`z`).
pub const MAX_COLS: u8 = 26;

/// Board dimensions, `rows × cols` (the row count comes first, as in "12×10").
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Geometry {
    rows: u8,
    cols: u8,
}

impl Geometry {
    pub fn new(rows: u32, cols: u32) -> Result<Geometry, GeometryError> {
        if !(2..=MAX_ROWS as u32).contains(&rows) || !(2..=MAX_COLS as u32).contains(&cols) {
            return Err(GeometryError::Unsupported { rows, cols });
        }
        Ok(Geometry {
            rows: rows as u8,
            cols: cols as u8,
        })
    }

    #[inline]
    pub fn rows(self) -> u8 {
        self.rows
    }

    #[inline]
    pub fn cols(self) -> u8 {
        self.cols
    }

    #[inline]
    pub fn area(self) -> usize {
        self.rows as usize * self.cols as usize
    }

    #[inline]
    pub fn contains(self, col: i32, row: i32) -> bool {
        col >= 1 && col <= self.cols as i32 && row >= 1 && row <= self.rows as i32
    }

    /// All on-board points in column-major order (`a1, a2, …, b1, …`).
    pub fn points(self) -> impl Iterator<Item = Coord> {
        (1..=self.cols).flat_map(move |col| (1..=self.rows).map(move |row| Coord { col, row }))
    }

    /// Point reflected through the board centre.
    #[inline]
    pub fn rotate(self, c: Coord) -> Coord {
        Coord {
            col: self.cols + 1 - c.col,
            row: self.rows + 1 - c.row,
        }
    }

    /// The goal row owned by `role`: the top row for Alfred, the bottom row for Betty.
    #[inline]
    pub fn goal_row(self, role: Role) -> u8 {
        match role {
            Role::Alfred => self.rows,
            Role::Betty => 1,
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

/// A grid point, 1-based. Ordering is column-major, matching `a1 < a2 < … < b1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coord {
    pub col: u8,
    pub row: u8,
}

impl Coord {
    #[inline]
    pub const fn new(col: u8, row: u8) -> Coord {
        Coord { col, row }
    }

    /// One step in `dir`, or `None` when the step leaves the board.
    #[inline]
    pub fn step(self, dir: Direction, geometry: Geometry) -> Option<Coord> {
        let (dc, dr) = dir.offset();
        let col = self.col as i32 + dc;
        let row = self.row as i32 + dr;
        geometry.contains(col, row).then_some(Coord {
            col: col as u8,
            row: row as u8,
        })
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", (b'a' + self.col - 1) as char, self.row)
    }
}

/// The eight jump directions. North increases the row, east increases the column.
///
/// The declaration order is the canonical enumeration order used everywhere
/// moves are listed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    NW,
    N,
    NE,
    W,
    E,
    SW,
    S,
    SE,
}

impl Direction {
    pub const ALL: [Direction; 8] = [
        Direction::NW,
        Direction::N,
        Direction::NE,
        Direction::W,
        Direction::E,
        Direction::SW,
        Direction::S,
        Direction::SE,
    ];

    /// `(d_col, d_row)`.
    #[inline]
    pub const fn offset(self) -> (i32, i32) {
        match self {
            Direction::NW => (-1, 1),
            Direction::N => (0, 1),
            Direction::NE => (1, 1),
            Direction::W => (-1, 0),
            Direction::E => (1, 0),
            Direction::SW => (-1, -1),
            Direction::S => (0, -1),
            Direction::SE => (1, -1),
        }
    }

    /// The 180° rotation partner.
    #[inline]
    pub const fn opposite(self) -> Direction {
        match self {
            Direction::NW => Direction::SE,
            Direction::N => Direction::S,
            Direction::NE => Direction::SW,
            Direction::W => Direction::E,
            Direction::E => Direction::W,
            Direction::SW => Direction::NE,
            Direction::S => Direction::N,
            Direction::SE => Direction::NW,
        }
    }

    pub const fn token(self) -> &'static str {
        match self {
            Direction::NW => "NW",
            Direction::N => "N",
            Direction::NE => "NE",
            Direction::W => "W",
            Direction::E => "E",
            Direction::SW => "SW",
            Direction::S => "S",
            Direction::SE => "SE",
        }
    }

    pub const fn arrow(self) -> char {
        match self {
            Direction::NW => '↖',
            Direction::N => '↑',
            Direction::NE => '↗',
            Direction::W => '←',
            Direction::E => '→',
            Direction::SW => '↙',
            Direction::S => '↓',
            Direction::SE => '↘',
        }
    }

    pub fn from_token(token: &str) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| d.token() == token)
    }

    pub fn from_arrow(c: char) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| d.arrow() == c)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// The two players. Alfred attacks the top row, Betty the bottom row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Alfred,
    Betty,
}

impl Role {
    #[inline]
    pub const fn opposite(self) -> Role {
        match self {
            Role::Alfred => Role::Betty,
            Role::Betty => Role::Alfred,
        }
    }

    /// Single-letter token used by the text formats.
    pub const fn letter(self) -> char {
        match self {
            Role::Alfred => 'A',
            Role::Betty => 'B',
        }
    }

    pub fn from_letter(s: &str) -> Option<Role> {
        match s {
            "A" => Some(Role::Alfred),
            "B" => Some(Role::Betty),
            _ => None,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Alfred => "Alfred",
            Role::Betty => "Betty",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_bounds() {
        assert!(Geometry::new(12, 10).is_ok());
        assert!(Geometry::new(19, 19).is_ok());
        assert!(Geometry::new(64, 26).is_ok());
        assert!(Geometry::new(1, 5).is_err());
        assert!(Geometry::new(5, 27).is_err());
        assert!(Geometry::new(65, 5).is_err());
    }

    #[test]
    fn rotation_of_c1_on_12x10() {
        let g = Geometry::new(12, 10).unwrap();
        assert_eq!(g.rotate(Coord::new(3, 1)), Coord::new(8, 12));
    }

    #[test]
    fn direction_partners() {
        for d in Direction::ALL {
            assert_eq!(d.opposite().opposite(), d);
            let (a, b) = d.offset();
            let (c, e) = d.opposite().offset();
            assert_eq!((a + c, b + e), (0, 0));
        }
    }

    #[test]
    fn role_involution() {
        for r in [Role::Alfred, Role::Betty] {
            assert_eq!(r.opposite().opposite(), r);
            assert_ne!(r.opposite(), r);
        }
    }

    #[test]
    fn coord_order_is_column_major() {
        let g = Geometry::new(3, 2).unwrap();
        let names: Vec<String> = g.points().map(|c| c.to_string()).collect();
        assert_eq!(names, ["a1", "a2", "a3", "b1", "b2", "b3"]);
    }
}
