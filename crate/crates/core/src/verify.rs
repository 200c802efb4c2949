//! Replays proof scripts against the engine and checks every expectation.
//!
//! Each `move` is applied and the mover's tactical report compared with the
//! expected symbol; each `claim` is dispatched to one engine predicate. By
//! default an expected symbol holds when the computed report has every
//! property it asserts (`!` holds for a computed `!!`); strict mode requires
//! the exact symbol and ignores leniency.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Corpus, CorpusError};
use crate::geometry::{Direction, Role};
use crate::movegen::{self, landing_outcome};
use crate::notation::format_path;
use crate::position::{Move, Outcome, Position};
use crate::script::{
    Claim, ClaimStep, Leniency, Script, Statement, StatementKind, Step, Transform,
};
use crate::tactics::{self, Annotation, Solver, TacticalReport};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("step {step} (line {line}): {mv} by {role} is illegal: {reason}")]
    ReplayIllegalMove {
        step: usize,
        line: usize,
        role: Role,
        mv: String,
        reason: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Erratum,
}

/// Result of one step or claim, with the evidence behind it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub line: usize,
    /// Slash-separated branch path; empty on the main line.
    pub branch: String,
    pub statement: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub erratum: Option<String>,
    pub evidence: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScriptReport {
    pub script: String,
    pub base: String,
    pub checks: Vec<Check>,
    /// Errata emitted, in order of first appearance.
    pub errata: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Wall-clock time; kept out of the rendered reports so they stay
    /// byte-for-byte reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl ScriptReport {
    pub fn failures(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .count()
            + usize::from(self.error.is_some())
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }
}

/// Outcome of evaluating one claim.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimResult {
    pub holds: bool,
    pub evidence: String,
}

fn paths(list: &[Vec<Direction>]) -> String {
    if list.is_empty() {
        return "none".into();
    }
    list.iter()
        .map(|p| format_path(p))
        .collect::<Vec<_>>()
        .join(" ")
}

fn summarize(report: &TacticalReport) -> String {
    let mut s = format!("computed {}", report.annotation);
    if let Some(w) = report.shot_witnesses.first() {
        let _ = write!(s, "; shot {}", format_path(w));
    }
    if let Some(j) = &report.refuting_jot {
        let _ = write!(s, "; jot {}", format_path(j));
    }
    if let Some(t) = report.refuting_tackle {
        let _ = write!(s, "; tackle {t}");
    }
    s
}

fn holds(h: bool, evidence: impl Into<String>) -> ClaimResult {
    ClaimResult {
        holds: h,
        evidence: evidence.into(),
    }
}

/// Evaluates `claim` at `pos`. `base` is the script's starting position.
/// Engine errors (limits, illegal claim arguments) make the claim fail.
pub fn check_claim(base: &Position, pos: &Position, claim: &Claim) -> ClaimResult {
    match evaluate(base, pos, claim) {
        Ok(r) => r,
        Err(e) => holds(false, format!("engine error: {e}")),
    }
}

type Eval = Result<ClaimResult, Box<dyn std::error::Error>>;

fn evaluate(base: &Position, pos: &Position, claim: &Claim) -> Eval {
    Ok(match claim {
        Claim::Shot { attacker, via } => {
            let witnesses = tactics::shot_witnesses(pos, *attacker)?;
            let mut evidence = format!("witnesses {}", paths(&witnesses));
            let mut ok = !witnesses.is_empty();
            for path in via {
                let wins = match pos.trace_jump(path) {
                    Ok(trace) => {
                        let last = trace.segments.last().expect("traced jumps are non-empty");
                        landing_outcome(pos, last.landing).is_win_for(*attacker)
                    }
                    Err(_) => false,
                };
                if !wins {
                    ok = false;
                    let _ = write!(evidence, "; {} is not a winning jump", format_path(path));
                }
            }
            holds(ok, evidence)
        }
        Claim::NoShot(r) => {
            let w = movegen::first_winning_jump(pos, *r)?;
            holds(
                w.is_none(),
                format!("shot {}", w.map_or("none".into(), |w| format_path(&w))),
            )
        }
        Claim::Unjottable(r) | Claim::Untackleable(r) | Claim::WinInOne(r) => {
            let report = tactics::report(pos, *r)?;
            let ok = match claim {
                Claim::Unjottable(_) => report.unjottable,
                Claim::Untackleable(_) => report.untackleable,
                _ => report.win_in_one,
            };
            holds(ok, summarize(&report))
        }
        Claim::UniqueTackle { attacker, at } | Claim::UniqueDefense { attacker, at } => {
            let shot = movegen::first_winning_jump(pos, *attacker)?;
            let tackles = tactics::tackles(pos, *attacker)?;
            let listed = tackles
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            let mut evidence = format!(
                "shot {}; tackles {}",
                shot.as_ref().map_or("none".into(), |w| format_path(w)),
                if listed.is_empty() { "none" } else { &listed }
            );
            let mut ok = shot.is_some() && tackles == [*at];
            if matches!(claim, Claim::UniqueDefense { .. }) {
                let jots = tactics::jots(pos, *attacker)?;
                let _ = write!(evidence, "; jots {}", paths(&jots));
                ok &= jots.is_empty();
            }
            holds(ok, evidence)
        }
        Claim::JotRefuted {
            attacker,
            jot,
            reply,
        } => {
            if pos.to_move() != attacker.opposite() {
                return Ok(holds(
                    false,
                    format!("{} is not to move", attacker.opposite()),
                ));
            }
            let (jotted, outcome) = pos.apply_move(&Move::Jump(jot.clone()))?;
            if outcome != Outcome::Ongoing {
                return Ok(holds(false, format!("the jot ends the game: {outcome}")));
            }
            let (answered, _) = jotted.apply_move(&Move::Place(*reply))?;
            let report = tactics::report(&answered, *attacker)?;
            holds(
                report.win_in_one,
                format!(
                    "jot lands {}; after {reply}: {}",
                    jotted.ball(),
                    summarize(&report)
                ),
            )
        }
        Claim::NoJumps => {
            let jumps = movegen::distinct_jumps(pos)?;
            let first = jumps.first().map_or("none".into(), |(p, _)| format_path(p));
            holds(jumps.is_empty(), format!("first jump {first}"))
        }
        Claim::PlacementCount(k) => {
            let n = pos.legal_placements()?.len();
            holds(n == *k, format!("{n} placements"))
        }
        Claim::JumpCount(k) => {
            let n = movegen::legal_jumps(pos)?.len();
            holds(n == *k, format!("{n} jumps"))
        }
        Claim::JumpSet(expected) => {
            let found: BTreeSet<Vec<Direction>> = movegen::legal_jumps(pos)?
                .into_iter()
                .map(|j| j.path)
                .collect();
            let expected: BTreeSet<Vec<Direction>> = expected.iter().cloned().collect();
            let missing: Vec<_> = expected.difference(&found).cloned().collect();
            let extra: Vec<_> = found.difference(&expected).cloned().collect();
            holds(
                missing.is_empty() && extra.is_empty(),
                format!("missing {}; extra {}", paths(&missing), paths(&extra)),
            )
        }
        Claim::Outcome { mv, result } => {
            let (_, outcome) = pos.apply_move(mv)?;
            holds(outcome == *result, format!("{outcome}"))
        }
        Claim::PositionEquals(t) => {
            let target = match t {
                Transform::Identity => base.clone(),
                Transform::Rot180 => base.rot180(),
            };
            let same = *pos == target;
            let evidence = if same {
                "equal".to_string()
            } else {
                let missing = target.chaps().filter(|&c| !pos.is_chap(c)).count();
                let extra = pos.chaps().filter(|&c| !target.is_chap(c)).count();
                format!(
                    "ball {} vs {}; to move {} vs {}; {missing} chaps missing, {extra} extra",
                    pos.ball(),
                    target.ball(),
                    pos.to_move(),
                    target.to_move()
                )
            };
            holds(same, evidence)
        }
        Claim::ChapCount(k) => {
            let n = pos.chap_count();
            holds(n == *k, format!("{n} chaps"))
        }
        Claim::WinWithin { winner, plies } => {
            let mut solver = Solver::default();
            let won = solver.win_within(pos, *winner, *plies)?;
            let mut evidence = format!("{} nodes", solver.nodes());
            if won {
                if let Some(line) = solver.principal_line(pos, *winner, *plies)? {
                    let moves: Vec<String> = line.iter().map(|m| m.to_string()).collect();
                    let _ = write!(evidence, "; line {}", moves.join(" "));
                }
            }
            holds(won, evidence)
        }
        Claim::BranchCoverage(allowed) => branch_coverage(pos, allowed)?,
        Claim::IllegalJump { path, kind } => match pos.trace_jump(path) {
            Ok(_) => holds(false, "legal"),
            Err(e) => holds(e.kind() == kind, format!("{} ({e})", e.kind())),
        },
        Claim::ColumnIntact(col) => {
            let gone: Vec<String> = base
                .chaps()
                .filter(|c| c.col == *col && !pos.is_chap(*c))
                .map(|c| c.to_string())
                .collect();
            holds(
                gone.is_empty(),
                if gone.is_empty() {
                    "intact".to_string()
                } else {
                    format!("removed {}", gone.join(" "))
                },
            )
        }
    })
}

/// Every move of the side to move is allowed, an own goal, or hands the
/// opponent a winning jump.
fn branch_coverage(pos: &Position, allowed: &[Move]) -> Eval {
    let mover = pos.to_move();
    let opponent = mover.opposite();
    let moves = movegen::legal_moves(pos)?;
    let (mut listed, mut refuted) = (0, 0);
    let mut uncovered = Vec::new();
    for mv in moves.moves() {
        if allowed.contains(&mv) {
            listed += 1;
            continue;
        }
        let (next, outcome) = pos.apply_move(&mv)?;
        let lost = match outcome {
            Outcome::Win(r) => r == opponent,
            Outcome::Ongoing => movegen::first_winning_jump(&next, opponent)?.is_some(),
        };
        if lost {
            refuted += 1;
        } else {
            uncovered.push(mv.to_string());
        }
    }
    let unplayable: Vec<String> = allowed
        .iter()
        .filter(|m| !moves.moves().any(|x| &x == *m))
        .map(|m| m.to_string())
        .collect();
    let mut evidence = format!(
        "{listed} listed, {refuted} refuted, {} uncovered",
        uncovered.len()
    );
    if !uncovered.is_empty() {
        let _ = write!(evidence, ": {}", uncovered.join(" "));
    }
    if !unplayable.is_empty() {
        let _ = write!(evidence, "; not legal: {}", unplayable.join(" "));
    }
    Ok(holds(
        uncovered.is_empty() && unplayable.is_empty(),
        evidence,
    ))
}

struct Runner<'a> {
    name: &'a str,
    options: VerifyOptions,
    base: &'a Position,
    checks: Vec<Check>,
    errata: Vec<String>,
    steps: usize,
}

impl Runner<'_> {
    fn status(
        &self,
        ok: bool,
        line: usize,
        lenient: &Option<Leniency>,
    ) -> (Status, Option<String>) {
        match (ok, lenient) {
            (true, _) => (Status::Pass, None),
            (false, Some(l)) if !self.options.strict => {
                let id = l
                    .erratum
                    .clone()
                    .unwrap_or_else(|| format!("{}:{line}", self.name));
                (Status::Erratum, Some(id))
            }
            _ => (Status::Fail, None),
        }
    }

    fn record(
        &mut self,
        line: usize,
        branch: &str,
        statement: String,
        status: (Status, Option<String>),
        evidence: String,
    ) {
        if let Some(id) = &status.1 {
            if !self.errata.contains(id) {
                self.errata.push(id.clone());
            }
        }
        self.checks.push(Check {
            line,
            branch: branch.to_string(),
            statement,
            status: status.0,
            erratum: status.1,
            evidence,
        });
    }

    fn body(
        &mut self,
        mut pos: Position,
        body: &[Statement],
        branch: &str,
        mut after_claim: bool,
    ) -> Result<(), VerifyError> {
        for s in body {
            match &s.kind {
                StatementKind::Move(step) => {
                    pos = self.step(pos, step, s.line, branch, after_claim)?;
                    after_claim = false;
                }
                StatementKind::Claim(c) => {
                    self.claim(&pos, c, s.line, branch);
                    after_claim = true;
                }
                StatementKind::Branch { name, body } => {
                    let path = if branch.is_empty() {
                        name.clone()
                    } else {
                        format!("{branch}/{name}")
                    };
                    self.body(pos.clone(), body, &path, after_claim)?;
                }
                StatementKind::Erratum(id) => {
                    self.record(
                        s.line,
                        branch,
                        format!("erratum {id}"),
                        (Status::Erratum, Some(id.clone())),
                        "transcription note".into(),
                    );
                }
            }
        }
        Ok(())
    }

    fn step(
        &mut self,
        pos: Position,
        step: &Step,
        line: usize,
        branch: &str,
        after_claim: bool,
    ) -> Result<Position, VerifyError> {
        self.steps += 1;
        let illegal = |reason: String| VerifyError::ReplayIllegalMove {
            step: self.steps,
            line,
            role: step.role,
            mv: step.mv.to_string(),
            reason,
        };
        let before = if step.role == pos.to_move() {
            pos
        } else if after_claim && !pos.is_terminal() {
            pos.with_to_move(step.role)
        } else {
            return Err(illegal(format!("{} is to move", pos.to_move())));
        };
        let (after, outcome) = before
            .apply_move(&step.mv)
            .map_err(|e| illegal(e.to_string()))?;
        let (ok, evidence) = if outcome != Outcome::Ongoing {
            (
                step.expect == Annotation::None,
                format!("game over: {outcome}"),
            )
        } else {
            match tactics::report(&after, step.role) {
                Ok(r) if self.options.strict => (r.annotation == step.expect, summarize(&r)),
                Ok(r) => (step.expect.implied_by(&r), summarize(&r)),
                Err(e) => (false, format!("engine error: {e}")),
            }
        };
        let status = self.status(ok, line, &step.lenient);
        let statement = format!(
            "move {} {} expect {}",
            step.role.letter(),
            step.mv,
            step.expect
        );
        self.record(line, branch, statement, status, evidence);
        Ok(after)
    }

    fn claim(&mut self, pos: &Position, c: &ClaimStep, line: usize, branch: &str) {
        let result = check_claim(self.base, pos, &c.claim);
        let status = self.status(result.holds, line, &c.lenient);
        self.record(
            line,
            branch,
            format!("claim {}", c.claim),
            status,
            result.evidence,
        );
    }
}

/// Replays `script`, named `name` in the report.
pub fn run_script(
    name: &str,
    script: &Script,
    options: VerifyOptions,
) -> Result<ScriptReport, VerifyError> {
    let start = Instant::now();
    let mut runner = Runner {
        name,
        options,
        base: &script.position,
        checks: Vec::new(),
        errata: Vec::new(),
        steps: 0,
    };
    runner.body(script.position.clone(), &script.body, "", false)?;
    Ok(ScriptReport {
        script: name.to_string(),
        base: script.base.clone(),
        checks: runner.checks,
        errata: runner.errata,
        error: None,
        elapsed: start.elapsed(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PositionStatus {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub positions: Vec<PositionStatus>,
    pub scripts: Vec<ScriptReport>,
    /// Every erratum emitted, sorted.
    pub errata: Vec<String>,
    /// Emitted errata missing from the registry.
    pub unregistered: Vec<String>,
    pub failures: usize,
    pub passed: bool,
}

/// Runs one corpus script, turning load and replay errors into a failed report.
pub fn verify_script(corpus: &Corpus, name: &str, options: VerifyOptions) -> ScriptReport {
    let failed = |error: String, base: String| ScriptReport {
        script: name.to_string(),
        base,
        checks: Vec::new(),
        errata: Vec::new(),
        error: Some(error),
        elapsed: Duration::ZERO,
    };
    match corpus.script(name) {
        Ok(script) => run_script(name, &script, options)
            .unwrap_or_else(|e| failed(e.to_string(), script.base.clone())),
        Err(e) => failed(e.to_string(), String::new()),
    }
}

/// Checks every position entry and runs every script, in corpus order.
/// Scripts run on separate threads; the summary order does not depend on
/// scheduling.
pub fn verify_all(corpus: &Corpus, options: VerifyOptions) -> Summary {
    let positions: Vec<PositionStatus> = corpus
        .positions
        .iter()
        .map(|e| PositionStatus {
            name: e.name.clone(),
            error: corpus
                .position(&e.name)
                .err()
                .map(|e: CorpusError| e.to_string()),
        })
        .collect();
    let scripts: Vec<ScriptReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = corpus
            .scripts
            .iter()
            .map(|e| scope.spawn(move || verify_script(corpus, &e.name, options)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verifier thread panicked"))
            .collect()
    });
    let errata: BTreeSet<String> = scripts
        .iter()
        .flat_map(|s| s.errata.iter().cloned())
        .collect();
    let unregistered: Vec<String> = errata
        .iter()
        .filter(|id| corpus.erratum(id).is_none())
        .cloned()
        .collect();
    let failures = positions.iter().filter(|p| p.error.is_some()).count()
        + scripts.iter().map(|s| s.failures()).sum::<usize>();
    Summary {
        positions,
        passed: failures == 0 && unregistered.is_empty(),
        scripts,
        errata: errata.into_iter().collect(),
        unregistered,
        failures,
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::Erratum => "errata",
    }
}

impl ScriptReport {
    /// Human-readable report, one line per check.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} on {}: {} ({} checks, {} failed, {} errata)\n",
            self.script,
            self.base,
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks.len(),
            self.failures(),
            self.errata.len()
        );
        for c in &self.checks {
            let at = if c.branch.is_empty() {
                format!("{}", c.line)
            } else {
                format!("{} [{}]", c.line, c.branch)
            };
            let _ = write!(
                out,
                "  {:<6} {at}: {} => {}",
                status_word(c.status),
                c.statement,
                c.evidence
            );
            if let Some(id) = &c.erratum {
                let _ = write!(out, " (erratum {id})");
            }
            out.push('\n');
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "  error: {e}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

impl Summary {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.positions {
            match &p.error {
                None => {
                    let _ = writeln!(out, "position {}: ok", p.name);
                }
                Some(e) => {
                    let _ = writeln!(out, "position {}: FAIL {e}", p.name);
                }
            }
        }
        for s in &self.scripts {
            out.push_str(&s.to_text());
        }
        let _ = writeln!(
            out,
            "errata: {}",
            if self.errata.is_empty() {
                "none".into()
            } else {
                self.errata.join(" ")
            }
        );
        if !self.unregistered.is_empty() {
            let _ = writeln!(out, "unregistered errata: {}", self.unregistered.join(" "));
        }
        let _ = writeln!(
            out,
            "{} ({} failures)",
            if self.passed { "PASS" } else { "FAIL" },
            self.failures
        );
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
