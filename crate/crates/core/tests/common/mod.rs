//! Reference implementations and random positions shared by the
//! integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use phutball_core::{Coord, Direction, Geometry, Outcome, Position, Role};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Where a naive jump ends: off the board through a goal line, or at a
/// point with the chaps that are left.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum End {
    Exit {
        top: bool,
        chaps: BTreeSet<(i32, i32)>,
    },
    Point {
        at: (i32, i32),
        chaps: BTreeSet<(i32, i32)>,
    },
}

#[derive(Clone, Debug)]
pub struct NaiveJump {
    pub path: Vec<Direction>,
    pub end: End,
    pub outcome: Outcome,
}

const DIRS: [(Direction, i32, i32); 8] = [
    (Direction::NW, -1, 1),
    (Direction::N, 0, 1),
    (Direction::NE, 1, 1),
    (Direction::W, -1, 0),
    (Direction::E, 1, 0),
    (Direction::SW, -1, -1),
    (Direction::S, 0, -1),
    (Direction::SE, 1, -1),
];

fn outcome(rows: i32, end: &End) -> Outcome {
    match end {
        End::Exit { top: true, .. } => Outcome::Win(Role::Alfred),
        End::Exit { top: false, .. } => Outcome::Win(Role::Betty),
        End::Point { at, .. } if at.1 == rows => Outcome::Win(Role::Alfred),
        End::Point { at, .. } if at.1 == 1 => Outcome::Win(Role::Betty),
        End::Point { .. } => Outcome::Ongoing,
    }
}

fn walk(
    rows: i32,
    cols: i32,
    at: (i32, i32),
    chaps: &BTreeSet<(i32, i32)>,
    path: &mut Vec<Direction>,
    out: &mut Vec<NaiveJump>,
) {
    for (dir, dc, dr) in DIRS {
        let mut left = chaps.clone();
        let (mut c, mut r) = (at.0 + dc, at.1 + dr);
        let mut jumped = 0;
        while left.remove(&(c, r)) {
            jumped += 1;
            c += dc;
            r += dr;
        }
        if jumped == 0 {
            continue;
        }
        path.push(dir);
        if r > rows || r < 1 {
            let end = End::Exit {
                top: r > rows,
                chaps: left,
            };
            out.push(NaiveJump {
                path: path.clone(),
                outcome: outcome(rows, &end),
                end,
            });
        } else if c >= 1 && c <= cols {
            let end = End::Point {
                at: (c, r),
                chaps: left.clone(),
            };
            out.push(NaiveJump {
                path: path.clone(),
                outcome: outcome(rows, &end),
                end,
            });
            walk(rows, cols, (c, r), &left, path, out);
        }
        path.pop();
    }
}

/// Every legal jump, straight from the rules, in lexicographic path order.
pub fn naive_jumps(pos: &Position) -> Vec<NaiveJump> {
    let g = pos.geometry();
    let chaps: BTreeSet<(i32, i32)> = pos.chaps().map(|c| (c.col as i32, c.row as i32)).collect();
    let mut out = Vec::new();
    let ball = (pos.ball().col as i32, pos.ball().row as i32);
    walk(
        g.rows() as i32,
        g.cols() as i32,
        ball,
        &chaps,
        &mut Vec::new(),
        &mut out,
    );
    out.sort_by(|a, b| a.path.cmp(&b.path));
    out
}

pub fn naive_placements(pos: &Position) -> Vec<Coord> {
    pos.geometry()
        .points()
        .filter(|&c| c != pos.ball() && !pos.is_chap(c))
        .collect()
}

pub fn naive_has_shot(pos: &Position, attacker: Role) -> bool {
    naive_jumps(pos)
        .iter()
        .any(|j| j.outcome.is_win_for(attacker))
}

pub fn naive_tackles(pos: &Position, attacker: Role) -> Vec<Coord> {
    naive_placements(pos)
        .into_iter()
        .filter(|&c| !naive_has_shot(&pos.place(c).unwrap(), attacker))
        .collect()
}

/// End states of the defender jumps that escape the attacker.
pub fn naive_jot_ends(pos: &Position, attacker: Role) -> BTreeSet<End> {
    naive_jumps(pos)
        .into_iter()
        .filter(|j| match j.outcome {
            Outcome::Win(r) => r != attacker,
            Outcome::Ongoing => {
                let (after, _) = pos
                    .apply_move(&phutball_core::Move::Jump(j.path.clone()))
                    .unwrap();
                !naive_has_shot(&after, attacker)
            }
        })
        .map(|j| j.end)
        .collect()
}

/// End state of a jump path, computed by the naive walker.
pub fn naive_end(pos: &Position, path: &[Direction]) -> End {
    naive_jumps(pos)
        .into_iter()
        .find(|j| j.path == path)
        .expect("path is a legal jump")
        .end
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random non-terminal position with 3..=6 rows, 2..=6 columns and at
/// most `max_chaps` chaps. Chaps cluster around the ball half the time so
/// that jumps are common.
pub fn random_position(rng: &mut ChaCha8Rng, max_chaps: usize) -> Position {
    let rows = rng.gen_range(3..=6u32);
    let cols = rng.gen_range(2..=6u32);
    let g = Geometry::new(rows, cols).unwrap();
    let ball = Coord::new(rng.gen_range(1..=cols) as u8, rng.gen_range(2..rows) as u8);
    let mut points: Vec<Coord> = g.points().filter(|&c| c != ball).collect();
    if rng.gen_bool(0.5) {
        points.sort_by_key(|c| {
            (c.col as i32 - ball.col as i32).abs() + (c.row as i32 - ball.row as i32).abs()
        });
        let keep = (points.len() * 2 / 3).max(1);
        points.truncate(keep);
    }
    points.shuffle(rng);
    let n = rng.gen_range(0..=max_chaps.min(points.len()));
    let to_move = if rng.gen_bool(0.5) {
        Role::Alfred
    } else {
        Role::Betty
    };
    Position::new(g, ball, points[..n].iter().copied(), to_move).unwrap()
}

/// End state reached by a jump, read off the engine's own application.
pub fn engine_end(pos: &Position, path: &[Direction]) -> End {
    let trace = pos.trace_jump(path).unwrap();
    let after = pos.after_jump(&trace);
    let chaps = after
        .chaps()
        .map(|c| (c.col as i32, c.row as i32))
        .collect();
    match trace.exit {
        Some(side) => End::Exit {
            top: side == phutball_core::GoalSide::Top,
            chaps,
        },
        None => {
            let b = trace.end().unwrap();
            End::Point {
                at: (b.col as i32, b.row as i32),
                chaps,
            }
        }
    }
}

fn rotate_end(pos: &Position, end: End) -> End {
    let (rows, cols) = (pos.geometry().rows() as i32, pos.geometry().cols() as i32);
    let turn = |chaps: BTreeSet<(i32, i32)>| {
        chaps
            .into_iter()
            .map(|(c, r)| (cols + 1 - c, rows + 1 - r))
            .collect()
    };
    match end {
        End::Exit { top, chaps } => End::Exit {
            top: !top,
            chaps: turn(chaps),
        },
        End::Point { at, chaps } => End::Point {
            at: (cols + 1 - at.0, rows + 1 - at.1),
            chaps: turn(chaps),
        },
    }
}

/// Compares every tactical predicate for each side with the same predicate
/// for the other side on the half-turned board, forced wins up to `plies`.
pub fn check_dual(pos: &Position, plies: u32) -> Result<(), String> {
    use phutball_core::tactics::{self, jots, tackles, win_within};
    let rot = pos.rot180();
    let g = pos.geometry();
    let err = |what: &str, role: Role| format!("{what} differs for {role} on\n{pos:?}");
    if rot.rot180() != *pos {
        return Err("rot180 is not an involution".into());
    }
    for role in [Role::Alfred, Role::Betty] {
        let other = role.opposite();
        let a = tactics::report(pos, role).map_err(|e| e.to_string())?;
        let b = tactics::report(&rot, other).map_err(|e| e.to_string())?;
        if (
            a.annotation,
            a.unjottable,
            a.untackleable,
            a.win_in_one,
            a.shot_witnesses.is_empty(),
        ) != (
            b.annotation,
            b.unjottable,
            b.untackleable,
            b.win_in_one,
            b.shot_witnesses.is_empty(),
        ) {
            return Err(err("tactical report", role));
        }
        if tactics::has_shot(pos, role).ok() != tactics::has_shot(&rot, other).ok() {
            return Err(err("has_shot", role));
        }
        let t: BTreeSet<Coord> = tackles(pos, role)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|c| g.rotate(c))
            .collect();
        let u: BTreeSet<Coord> = tackles(&rot, other)
            .map_err(|e| e.to_string())?
            .into_iter()
            .collect();
        if t != u {
            return Err(err("tackles", role));
        }
        let j: BTreeSet<End> = jots(pos, role)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|p| rotate_end(pos, engine_end(pos, p)))
            .collect();
        let k: BTreeSet<End> = jots(&rot, other)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|p| engine_end(&rot, p))
            .collect();
        if j != k {
            return Err(err("jots", role));
        }
        for n in 0..=plies {
            if win_within(pos, role, n).ok() != win_within(&rot, other, n).ok() {
                return Err(err(&format!("win_within {n}"), role));
            }
        }
    }
    Ok(())
}
