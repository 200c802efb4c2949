//! Proof scripts: annotated move lines, branches and claims over a named
//! base position.
//!
//! ```text
//! use fig3
//! move A b3 expect !            # α(i)
//! claim jot-refuted A NE,N,E d6
//! move B c4 expect !
//! branch deviation {
//!   move A NE,N expect none
//!   move B d6 expect ! lenient
//! }
//! claim unique-tackle B d5
//! ```
//!
//! A `branch` forks the line at the point where it appears; the parent line
//! continues from the same position after the block. Roles must alternate
//! along a line unless a claim sits between the two moves, in which case the
//! second move is played as a tempo (the other side passes).

use std::fmt::{self, Write as _};

use crate::geometry::{Coord, Direction, Geometry, Role};
use crate::notation::{format_path, parse_coord, parse_move, parse_path, tokens, NotationError};
use crate::position::{Move, Outcome, Position};
use crate::tactics::Annotation;

/// A parsed script together with its resolved base position.
#[derive(Clone, Debug, PartialEq)]
pub struct Script {
    pub base: String,
    pub position: Position,
    pub body: Vec<Statement>,
}

/// One statement with the source line it came from. Equality ignores the line.
#[derive(Clone, Debug)]
pub struct Statement {
    pub line: usize,
    pub kind: StatementKind,
}

impl PartialEq for Statement {
    fn eq(&self, other: &Statement) -> bool {
        self.kind == other.kind
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StatementKind {
    Move(Step),
    Claim(ClaimStep),
    Branch {
        name: String,
        body: Vec<Statement>,
    },
    /// A known transcription correction, emitted into the report as is.
    Erratum(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub role: Role,
    pub mv: Move,
    pub expect: Annotation,
    pub lenient: Option<Leniency>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimStep {
    pub claim: Claim,
    pub lenient: Option<Leniency>,
}

/// A failure under leniency is reported as an erratum instead of failing the
/// script. `erratum` names the registry entry it corresponds to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leniency {
    pub erratum: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transform {
    Identity,
    Rot180,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Claim {
    Shot {
        attacker: Role,
        via: Vec<Vec<Direction>>,
    },
    NoShot(Role),
    Unjottable(Role),
    Untackleable(Role),
    WinInOne(Role),
    /// `at` is the defender's only tackle against `attacker`'s shot.
    UniqueTackle {
        attacker: Role,
        at: Coord,
    },
    /// `at` is the only tackle and no jot escapes.
    UniqueDefense {
        attacker: Role,
        at: Coord,
    },
    /// The defender's `jot` is answered by the attacker placing at `reply`,
    /// which leaves the attacker a win in one.
    JotRefuted {
        attacker: Role,
        jot: Vec<Direction>,
        reply: Coord,
    },
    NoJumps,
    PlacementCount(usize),
    JumpCount(usize),
    JumpSet(Vec<Vec<Direction>>),
    Outcome {
        mv: Move,
        result: Outcome,
    },
    /// Current position equals the transformed base position.
    PositionEquals(Transform),
    ChapCount(usize),
    WinWithin {
        winner: Role,
        plies: u32,
    },
    /// Every move of the side to move is listed, loses to an immediate
    /// opponent winning jump, or is an own goal.
    BranchCoverage(Vec<Move>),
    IllegalJump {
        path: Vec<Direction>,
        kind: String,
    },
    /// Every base chap in this column (1-based) is still on the board.
    ColumnIntact(u8),
}

impl Claim {
    pub fn kind(&self) -> &'static str {
        match self {
            Claim::Shot { .. } => "shot",
            Claim::NoShot(_) => "no-shot",
            Claim::Unjottable(_) => "unjottable",
            Claim::Untackleable(_) => "untackleable",
            Claim::WinInOne(_) => "win-in-one",
            Claim::UniqueTackle { .. } => "unique-tackle",
            Claim::UniqueDefense { .. } => "unique-defense",
            Claim::JotRefuted { .. } => "jot-refuted",
            Claim::NoJumps => "no-jumps",
            Claim::PlacementCount(_) => "placement-count",
            Claim::JumpCount(_) => "jump-count",
            Claim::JumpSet(_) => "jump-set",
            Claim::Outcome { .. } => "outcome",
            Claim::PositionEquals(_) => "position-equals",
            Claim::ChapCount(_) => "chap-count",
            Claim::WinWithin { .. } => "win-within",
            Claim::BranchCoverage(_) => "branch-coverage",
            Claim::IllegalJump { .. } => "illegal-jump",
            Claim::ColumnIntact(_) => "column-intact",
        }
    }
}

fn paths(list: &[Vec<Direction>]) -> String {
    list.iter()
        .map(|p| format_path(p))
        .collect::<Vec<_>>()
        .join(" ")
}

fn outcome_token(o: Outcome) -> &'static str {
    match o {
        Outcome::Ongoing => "ongoing",
        Outcome::Win(Role::Alfred) => "A",
        Outcome::Win(Role::Betty) => "B",
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind())?;
        match self {
            Claim::Shot { attacker, via } => {
                write!(f, " {}", attacker.letter())?;
                if !via.is_empty() {
                    write!(f, " via {}", paths(via))?;
                }
                Ok(())
            }
            Claim::NoShot(r)
            | Claim::Unjottable(r)
            | Claim::Untackleable(r)
            | Claim::WinInOne(r) => {
                write!(f, " {}", r.letter())
            }
            Claim::UniqueTackle { attacker, at } | Claim::UniqueDefense { attacker, at } => {
                write!(f, " {} {at}", attacker.letter())
            }
            Claim::JotRefuted {
                attacker,
                jot,
                reply,
            } => {
                write!(f, " {} {} {reply}", attacker.letter(), format_path(jot))
            }
            Claim::NoJumps => Ok(()),
            Claim::PlacementCount(k) | Claim::JumpCount(k) | Claim::ChapCount(k) => {
                write!(f, " {k}")
            }
            Claim::JumpSet(list) => write!(f, " {}", paths(list)),
            Claim::Outcome { mv, result } => write!(f, " {mv} {}", outcome_token(*result)),
            Claim::PositionEquals(t) => f.write_str(match t {
                Transform::Identity => " identity",
                Transform::Rot180 => " rot180",
            }),
            Claim::WinWithin { winner, plies } => write!(f, " {} {plies}", winner.letter()),
            Claim::BranchCoverage(moves) => {
                for mv in moves {
                    write!(f, " {mv}")?;
                }
                Ok(())
            }
            Claim::IllegalJump { path, kind } => write!(f, " {} {kind}", format_path(path)),
            Claim::ColumnIntact(col) => write!(f, " {}", (b'a' + col - 1) as char),
        }
    }
}

/// Where the previous statement of the current line leaves the role order.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Prev {
    Start,
    Move(Role),
    Claim,
}

struct Parser<'a> {
    lines: Vec<(usize, Vec<(usize, &'a str)>)>,
    next: usize,
    geometry: Geometry,
}

type Tok<'a> = (usize, &'a str);

/// Parses a script, resolving its `use` line through `resolve`.
pub fn parse_script(
    text: &str,
    resolve: impl Fn(&str) -> Option<Position>,
) -> Result<Script, NotationError> {
    let lines: Vec<(usize, Vec<Tok>)> = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .enumerate()
        .map(|(i, l)| {
            let toks = tokens(l, |before: &[Tok]| {
                matches!(before.last(), Some((_, "expect")))
            });
            (i + 1, toks)
        })
        .filter(|(_, t)| !t.is_empty())
        .collect();
    let Some((line, first)) = lines.first() else {
        return Err(NotationError::BadScript("empty script".into()));
    };
    let (base, position) = match first.as_slice() {
        [(_, "use"), (col, name)] => {
            let pos = resolve(name).ok_or_else(|| {
                NotationError::UnresolvedPositionName(name.to_string()).at(*line, *col)
            })?;
            (name.to_string(), pos)
        }
        _ => {
            return Err(
                NotationError::BadScript("a script starts with `use <position>`".into())
                    .at(*line, first[0].0),
            )
        }
    };
    let mut parser = Parser {
        lines,
        next: 1,
        geometry: position.geometry(),
    };
    let body = parser.block(Prev::Start, false)?;
    Ok(Script {
        base,
        position,
        body,
    })
}

fn bad(msg: impl Into<String>, at: Tok) -> NotationError {
    NotationError::BadScript(msg.into()).at(0, at.0)
}

impl<'a> Parser<'a> {
    fn block(&mut self, mut prev: Prev, nested: bool) -> Result<Vec<Statement>, NotationError> {
        let mut body = Vec::new();
        while self.next < self.lines.len() {
            let (line, toks) = self.lines[self.next].clone();
            self.next += 1;
            let located = |e: NotationError| relocate(e, line);
            match toks[0].1 {
                "}" if toks.len() == 1 => {
                    if nested {
                        return Ok(body);
                    }
                    return Err(located(bad("unmatched `}`", toks[0])));
                }
                "move" => {
                    let step = self.step(&toks).map_err(located)?;
                    if prev == Prev::Move(step.role) {
                        return Err(
                            NotationError::RoleOrderViolation(step.role).at(line, toks[1].0)
                        );
                    }
                    prev = Prev::Move(step.role);
                    body.push(Statement {
                        line,
                        kind: StatementKind::Move(step),
                    });
                }
                "claim" => {
                    let claim = self.claim(&toks).map_err(located)?;
                    prev = Prev::Claim;
                    body.push(Statement {
                        line,
                        kind: StatementKind::Claim(claim),
                    });
                }
                "branch" => {
                    let name = match toks.as_slice() {
                        [_, (_, name), (_, "{")] => name.to_string(),
                        _ => return Err(located(bad("expected `branch <name> {`", toks[0]))),
                    };
                    let inner = self.block(prev, true)?;
                    body.push(Statement {
                        line,
                        kind: StatementKind::Branch { name, body: inner },
                    });
                }
                "erratum" => match toks.as_slice() {
                    [_, (_, id)] => body.push(Statement {
                        line,
                        kind: StatementKind::Erratum(id.to_string()),
                    }),
                    _ => return Err(located(bad("expected `erratum <id>`", toks[0]))),
                },
                "use" => return Err(located(bad("`use` must be the first line", toks[0]))),
                other => {
                    return Err(located(bad(
                        format!("unknown statement {other:?}"),
                        toks[0],
                    )))
                }
            }
        }
        if nested {
            let line = self.lines.last().map_or(0, |l| l.0);
            return Err(NotationError::BadScript("unclosed branch".into()).at(line, 1));
        }
        Ok(body)
    }

    fn step(&self, toks: &[Tok]) -> Result<Step, NotationError> {
        let (role, mv, expect, rest) = match toks {
            [_, role, mv, (_, "expect"), expect, rest @ ..] => (role, mv, expect, rest),
            _ => return Err(bad("expected `move <A|B> <move> expect <symbol>`", toks[0])),
        };
        let role = parse_role(*role)?;
        let mv = parse_move(mv.1, self.geometry).map_err(|e| e.at(0, mv.0))?;
        let expect = expect
            .1
            .parse::<Annotation>()
            .map_err(|_| bad(format!("unknown annotation {:?}", expect.1), *expect))?;
        let lenient = parse_leniency(rest)?;
        Ok(Step {
            role,
            mv,
            expect,
            lenient,
        })
    }

    fn claim(&self, toks: &[Tok]) -> Result<ClaimStep, NotationError> {
        let Some(&kind) = toks.get(1) else {
            return Err(bad("expected a claim kind", toks[0]));
        };
        let mut args = &toks[2..];
        let mut lenient = None;
        if let Some(i) = args.iter().position(|t| t.1 == "lenient") {
            lenient = parse_leniency(&args[i..])?;
            args = &args[..i];
        }
        let g = self.geometry;
        let arity = |n: usize| -> Result<(), NotationError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(bad(format!("`{}` takes {n} argument(s)", kind.1), kind))
            }
        };
        let coord = |t: Tok| parse_coord(t.1, g).map_err(|e| e.at(0, t.0));
        let path = |t: Tok| parse_path(t.1).map_err(|e| e.at(0, t.0));
        let count = |t: Tok| t.1.parse::<usize>().map_err(|_| bad("expected a count", t));
        let claim = match kind.1 {
            "shot" => {
                let attacker = parse_role(*args.first().ok_or_else(|| bad("missing role", kind))?)?;
                let via = match &args[1..] {
                    [] => Vec::new(),
                    [(_, "via"), list @ ..] if !list.is_empty() => {
                        list.iter().map(|&t| path(t)).collect::<Result<_, _>>()?
                    }
                    _ => return Err(bad("expected `shot <A|B> [via <path>...]`", kind)),
                };
                Claim::Shot { attacker, via }
            }
            "no-shot" | "unjottable" | "untackleable" | "win-in-one" => {
                arity(1)?;
                let r = parse_role(args[0])?;
                match kind.1 {
                    "no-shot" => Claim::NoShot(r),
                    "unjottable" => Claim::Unjottable(r),
                    "untackleable" => Claim::Untackleable(r),
                    _ => Claim::WinInOne(r),
                }
            }
            "unique-tackle" | "unique-defense" => {
                arity(2)?;
                let attacker = parse_role(args[0])?;
                let at = coord(args[1])?;
                if kind.1 == "unique-tackle" {
                    Claim::UniqueTackle { attacker, at }
                } else {
                    Claim::UniqueDefense { attacker, at }
                }
            }
            "jot-refuted" => {
                arity(3)?;
                Claim::JotRefuted {
                    attacker: parse_role(args[0])?,
                    jot: path(args[1])?,
                    reply: coord(args[2])?,
                }
            }
            "no-jumps" => {
                arity(0)?;
                Claim::NoJumps
            }
            "placement-count" | "jump-count" | "chap-count" => {
                arity(1)?;
                let k = count(args[0])?;
                match kind.1 {
                    "placement-count" => Claim::PlacementCount(k),
                    "jump-count" => Claim::JumpCount(k),
                    _ => Claim::ChapCount(k),
                }
            }
            "jump-set" => Claim::JumpSet(args.iter().map(|&t| path(t)).collect::<Result<_, _>>()?),
            "outcome" => {
                arity(2)?;
                let mv = parse_move(args[0].1, g).map_err(|e| e.at(0, args[0].0))?;
                let result = match args[1].1 {
                    "ongoing" => Outcome::Ongoing,
                    r => Outcome::Win(
                        parse_role(args[1])
                            .map_err(|_| bad(format!("bad result {r:?}"), args[1]))?,
                    ),
                };
                Claim::Outcome { mv, result }
            }
            "position-equals" => {
                arity(1)?;
                Claim::PositionEquals(match args[0].1 {
                    "identity" => Transform::Identity,
                    "rot180" => Transform::Rot180,
                    _ => return Err(bad("expected `identity` or `rot180`", args[0])),
                })
            }
            "win-within" => {
                arity(2)?;
                Claim::WinWithin {
                    winner: parse_role(args[0])?,
                    plies: args[1]
                        .1
                        .parse()
                        .map_err(|_| bad("expected a ply count", args[1]))?,
                }
            }
            "branch-coverage" => Claim::BranchCoverage(
                args.iter()
                    .map(|t| parse_move(t.1, g).map_err(|e| e.at(0, t.0)))
                    .collect::<Result<_, _>>()?,
            ),
            "illegal-jump" => {
                arity(2)?;
                Claim::IllegalJump {
                    path: path(args[0])?,
                    kind: args[1].1.to_string(),
                }
            }
            "column-intact" => {
                arity(1)?;
                let t = args[0];
                match t.1.as_bytes() {
                    [c @ b'a'..=b'z'] if c - b'a' < g.cols() => Claim::ColumnIntact(c - b'a' + 1),
                    _ => return Err(bad("expected a column letter on the board", t)),
                }
            }
            other => return Err(NotationError::UnknownClaimKind(other.to_string()).at(0, kind.0)),
        };
        Ok(ClaimStep { claim, lenient })
    }
}

/// Replaces the placeholder line 0 used while parsing a single line.
fn relocate(e: NotationError, line: usize) -> NotationError {
    match e {
        NotationError::At {
            line: 0,
            column,
            error,
        } => NotationError::At {
            line,
            column,
            error,
        },
        e @ NotationError::At { .. } => e,
        e => e.at(line, 1),
    }
}

fn parse_role(t: Tok) -> Result<Role, NotationError> {
    Role::from_letter(t.1).ok_or_else(|| bad(format!("expected A or B, found {:?}", t.1), t))
}

fn parse_leniency(rest: &[Tok]) -> Result<Option<Leniency>, NotationError> {
    match rest {
        [] => Ok(None),
        [(_, "lenient")] => Ok(Some(Leniency { erratum: None })),
        [(_, "lenient"), (_, id)] => Ok(Some(Leniency {
            erratum: Some(id.to_string()),
        })),
        [t, ..] => Err(bad(format!("unexpected {:?}", t.1), *t)),
    }
}

fn write_leniency(out: &mut String, lenient: &Option<Leniency>) {
    if let Some(l) = lenient {
        out.push_str(" lenient");
        if let Some(id) = &l.erratum {
            let _ = write!(out, " {id}");
        }
    }
}

fn write_body(out: &mut String, body: &[Statement], depth: usize) {
    for s in body {
        let indent = "  ".repeat(depth);
        match &s.kind {
            StatementKind::Move(step) => {
                let _ = write!(
                    out,
                    "{indent}move {} {} expect {}",
                    step.role.letter(),
                    step.mv,
                    step.expect
                );
                write_leniency(out, &step.lenient);
            }
            StatementKind::Claim(c) => {
                let _ = write!(out, "{indent}claim {}", c.claim);
                write_leniency(out, &c.lenient);
            }
            StatementKind::Branch { name, body } => {
                let _ = writeln!(out, "{indent}branch {name} {{");
                write_body(out, body, depth + 1);
                let _ = write!(out, "{indent}}}");
            }
            StatementKind::Erratum(id) => {
                let _ = write!(out, "{indent}erratum {id}");
            }
        }
        out.push('\n');
    }
}

/// Canonical text of a script. Comments are not preserved.
pub fn format_script(script: &Script) -> String {
    let mut out = format!("use {}\n", script.base);
    write_body(&mut out, &script.body, 0);
    out
}
