//! Acceptance run: one PASS/FAIL line per criterion, with timings.
//! Exits nonzero when any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use common::*;
use phutball_core::corpus::{Checksum, Corpus};
use phutball_core::notation::{format_path, parse_move, parse_path, parse_position};
use phutball_core::tactics::{self, annotate, is_win_in_one, win_within, Annotation};
use phutball_core::verify::{verify_all, verify_script, ScriptReport, Status, VerifyOptions};
use phutball_core::{legal_jumps, legal_moves, Move, Outcome, Position, Role};

type Verdict = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Verdict);

const DEFAULT: VerifyOptions = VerifyOptions { strict: false };

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn play(pos: &Position, moves: &[&str]) -> Result<Position, String> {
    let mut pos = pos.clone();
    for m in moves {
        let mv = parse_move(m, pos.geometry()).map_err(|e| e.to_string())?;
        pos = pos.apply_move(&mv).map_err(|e| format!("{m}: {e}"))?.0;
    }
    Ok(pos)
}

fn mv(pos: &Position, text: &str) -> Move {
    parse_move(text, pos.geometry()).expect("valid move")
}

fn script_clean(report: &ScriptReport) -> Result<(), String> {
    ensure(report.passed(), || {
        let first = report.checks.iter().find(|c| c.status == Status::Fail);
        format!(
            "{} fails: {}",
            report.script,
            first
                .map(|c| format!("line {}: {} => {}", c.line, c.statement, c.evidence))
                .or_else(|| report.error.clone())
                .unwrap_or_default()
        )
    })
}

fn fig1_census() -> Verdict {
    let pos = Corpus::builtin()
        .position("fig1")
        .map_err(|e| e.to_string())?;
    let moves = legal_moves(&pos).map_err(|e| e.to_string())?;
    ensure(moves.placements.len() == 13, || {
        format!("{} placements", moves.placements.len())
    })?;
    let a = Outcome::Win(Role::Alfred);
    let b = Outcome::Win(Role::Betty);
    let expected: BTreeMap<String, Outcome> = [
        ("S", b),
        ("SE", b),
        ("SE,N", Outcome::Ongoing),
        ("SE,N,N", a),
        ("SE,N,SE", b),
        ("SE,N,NE", a),
    ]
    .into_iter()
    .map(|(p, o)| (p.to_string(), o))
    .collect();
    let found: BTreeMap<String, Outcome> = legal_jumps(&pos)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|j| (format_path(&j.path), j.outcome))
        .collect();
    ensure(found == expected, || format!("jumps {found:?}"))?;
    for (path, kind) in [
        ("SE,NE", "sideline"),
        ("SE,N,N,W", "sideline"),
        ("SE,N,N,SE", "sideline"),
        ("SE,N,SW", "no-chap"),
    ] {
        let err = pos.trace_jump(&parse_path(path).unwrap()).err();
        ensure(err.as_ref().map(|e| e.kind()) == Some(kind), || {
            format!("{path}: {err:?}")
        })?;
    }
    Ok("13 placements, 6 jumps, 4 rejections".into())
}

fn fig2_tactics() -> Verdict {
    let pos = Corpus::builtin()
        .position("fig2")
        .map_err(|e| e.to_string())?;
    let witnesses = tactics::shot_witnesses(&pos, Role::Betty).map_err(|e| e.to_string())?;
    ensure(witnesses.contains(&parse_path("NE,S").unwrap()), || {
        format!("witnesses {witnesses:?}")
    })?;
    let tackled = play(&pos, &["c4"])?;
    let tackle_wins = is_win_in_one(&tackled, Role::Alfred).map_err(|e| e.to_string())?
        && win_within(&tackled, Role::Alfred, 2).map_err(|e| e.to_string())?;
    ensure(tackle_wins, || "tackle c4 is not a win for Alfred".into())?;
    let jotted = play(&pos, &["NE,S,E,N"])?;
    let after_e2 = play(&jotted, &["e2"])?;
    ensure(
        is_win_in_one(&after_e2, Role::Betty).map_err(|e| e.to_string())?,
        || "e2 is not a win in one".into(),
    )?;
    let jot_loses = (1..=3).any(|n| win_within(&jotted, Role::Betty, n).unwrap_or(false));
    ensure(jot_loses, || {
        "Betty has no forced win after the jot within 3 plies".into()
    })?;
    script_clean(&verify_script(Corpus::builtin(), "fig2-tactics", DEFAULT))?;
    Ok("shot NE,S; tackle c4 wins in 2; jot loses in 3".into())
}

fn main_line() -> Verdict {
    let start = Corpus::builtin()
        .position("fig3")
        .map_err(|e| e.to_string())?;
    let line = ["b3", "c4", "d5", "e6", "f7", "g8", "h9", "i10", "NE"];
    let expected = [
        Annotation::Shot,
        Annotation::Shot,
        Annotation::Shot,
        Annotation::Shot,
        Annotation::Shot,
        Annotation::Shot,
        Annotation::Unjottable,
        Annotation::None,
        Annotation::None,
    ];
    let mut pos = start.clone();
    for (m, want) in line.iter().zip(expected) {
        let got = annotate(&pos, &mv(&pos, m))
            .map_err(|e| e.to_string())?
            .annotation;
        ensure(got == want, || {
            format!("{m}: computed {got}, expected {want}")
        })?;
        pos = play(&pos, &[m])?;
    }
    ensure(pos == start.rot180(), || {
        "final position is not the half-turned start".into()
    })?;
    ensure(
        pos.to_move() == start.to_move().opposite() && pos.chap_count() == 24,
        || "roles or chap count".into(),
    )?;
    let report = verify_script(Corpus::builtin(), "thm-main", DEFAULT);
    script_clean(&report)?;
    for kind in ["unique-tackle", "unique-defense", "jot-refuted"] {
        ensure(
            report.checks.iter().any(|c| c.statement.contains(kind)),
            || format!("no {kind} claims"),
        )?;
    }
    ensure(report.errata.is_empty(), || {
        format!("errata {:?}", report.errata)
    })?;
    Ok(format!("9 annotations, {} checks", report.checks.len()))
}

fn deviation_tree() -> Verdict {
    let report = verify_script(Corpus::builtin(), "thm-tree", DEFAULT);
    script_clean(&report)?;
    let root = report
        .checks
        .iter()
        .find(|c| c.branch.is_empty() && c.statement.starts_with("claim branch-coverage"))
        .ok_or("no root coverage claim")?;
    ensure(root.status == Status::Pass, || {
        format!("root coverage {}", root.evidence)
    })?;
    // Each printed "#" must compute as a win in one, with no leniency.
    let wins: Vec<_> = report
        .checks
        .iter()
        .filter(|c| c.statement.contains("expect #"))
        .collect();
    let broken: Vec<String> = wins
        .iter()
        .filter(|c| !c.evidence.starts_with("computed #"))
        .map(|c| format!("[{}] {} => {}", c.branch, c.statement, c.evidence))
        .collect();
    ensure(broken.is_empty(), || {
        format!(
            "{} of {} \"#\" leaves are not wins in one: {}",
            broken.len(),
            wins.len(),
            broken.join("; ")
        )
    })?;
    Ok(format!(
        "{} \"#\" leaves, root {}",
        wins.len(),
        root.evidence
    ))
}

fn endgame() -> Verdict {
    let start = Corpus::builtin()
        .position("fig3")
        .map_err(|e| e.to_string())?;
    let i10 = play(&start, &["b3", "c4", "d5", "e6", "f7", "g8", "h9", "i10"])?;
    let threat = play(&i10.with_to_move(Role::Betty), &["j11"])?;
    ensure(
        legal_jumps(&threat).map_err(|e| e.to_string())?.is_empty(),
        || "Alfred still has jumps after j11".into(),
    )?;
    let a1 = play(&threat.with_to_move(Role::Betty), &["a1"])?;
    ensure(
        is_win_in_one(&a1, Role::Betty).map_err(|e| e.to_string())?,
        || "j11 then a1 is not a win in one".into(),
    )?;
    // A named witness need not be among the least ones, so check it directly.
    let has = |pos: &Position, via: Option<&str>| -> Result<bool, String> {
        if !tactics::has_shot(pos, Role::Betty).map_err(|e| e.to_string())? {
            return Ok(false);
        }
        Ok(via.is_none_or(|p| {
            pos.apply_move(&Move::Jump(parse_path(p).unwrap()))
                .is_ok_and(|(_, o)| o.is_win_for(Role::Betty))
        }))
    };
    for (moves, via) in [
        (&["a1"][..], None),
        (&["b1"], None),
        (&["b2"], Some("E,SW")),
        (&["d2", "j11", "b2"], Some("E,SE")),
        (&["a3"], Some("N,SE")),
    ] {
        let pos = play(&i10, moves)?;
        ensure(has(&pos, via)?, || {
            format!(
                "{} gives Betty no shot {}",
                moves.join(" "),
                via.unwrap_or("")
            )
        })?;
    }
    let line = ["a4", "a1", "NE", "i10", "h9", "g8", "f7", "e6", "d5", "c4"];
    let mut pos = i10.clone();
    let mut last = Annotation::None;
    for m in line {
        last = annotate(&pos, &mv(&pos, m))
            .map_err(|e| e.to_string())?
            .annotation;
        pos = play(&pos, &[m])?;
    }
    ensure(last == Annotation::WinInOne, || {
        format!("final c4 computed {last}")
    })?;
    script_clean(&verify_script(Corpus::builtin(), "thm-endgame", DEFAULT))?;
    Ok("j11 forced; a1 b1 b2 d2-b2 a3 all give shots; a4 line ends c4 #".into())
}

fn standard_board_line() -> Verdict {
    let corpus = Corpus::builtin();
    let pos = corpus.position("fig5").map_err(|e| e.to_string())?;
    ensure(
        (pos.geometry().rows(), pos.geometry().cols()) == (19, 15),
        || "fig5 is not 19x15".into(),
    )?;
    for (m, before) in [("b3", pos.clone()), ("c4", play(&pos, &["b3"])?)] {
        let report = annotate(&before, &mv(&before, m)).map_err(|e| e.to_string())?;
        ensure(Annotation::Shot.implied_by(&report), || {
            format!("{m} computed {}", report.annotation)
        })?;
    }
    let report = verify_script(corpus, "cor-lines", DEFAULT);
    script_clean(&report)?;
    let j8 = report
        .checks
        .iter()
        .find(|c| c.statement.contains("j8 expect #"))
        .ok_or("no j8 step")?;
    ensure(j8.evidence.starts_with("computed #"), || {
        format!("j8 {}", j8.evidence)
    })?;
    Ok(format!(
        "{} checks, digest {:016x}",
        report.checks.len(),
        Checksum::of(&pos).digest
    ))
}

fn oracle() -> Verdict {
    let mut rng = rng(11);
    let n = 500;
    for i in 0..n {
        let pos = random_position(&mut rng, 10);
        let naive = naive_jumps(&pos);
        let engine = legal_jumps(&pos).map_err(|e| e.to_string())?;
        let same = engine.len() == naive.len()
            && engine.iter().zip(&naive).all(|(e, n)| {
                e.path == n.path && e.outcome == n.outcome && engine_end(&pos, &e.path) == n.end
            });
        ensure(same, || {
            format!("jump discrepancy on position {i}:\n{pos:?}")
        })?;
        ensure(
            pos.legal_placements().map_err(|e| e.to_string())? == naive_placements(&pos),
            || format!("placement discrepancy on position {i}"),
        )?;
        for role in [Role::Alfred, Role::Betty] {
            ensure(
                tactics::has_shot(&pos, role).ok() == Some(naive_has_shot(&pos, role)),
                || format!("shot discrepancy on position {i}"),
            )?;
        }
    }
    Ok(format!("{n} positions, 0 discrepancies"))
}

fn symmetry() -> Verdict {
    let corpus = Corpus::builtin();
    for name in corpus.position_names() {
        let pos = corpus.position(name).map_err(|e| e.to_string())?;
        check_dual(&pos, if name == "fig5" { 1 } else { 2 }).map_err(|e| format!("{name}: {e}"))?;
    }
    let mut rng = rng(12);
    for _ in 0..200 {
        check_dual(&random_position(&mut rng, 10), 3)?;
    }
    Ok("4 corpus positions, 200 random".into())
}

fn sensitivity() -> Verdict {
    let mut corpus = Corpus::builtin().clone();
    let fig3 = corpus
        .positions
        .iter_mut()
        .find(|e| e.name == "fig3")
        .unwrap();
    fig3.source = fig3.source.replace(" c5", "");
    fig3.checksum = Checksum::of(&parse_position(&fig3.source).map_err(|e| e.to_string())?);
    let reports: Vec<ScriptReport> = ["thm-main", "thm-tree"]
        .iter()
        .map(|s| verify_script(&corpus, s, DEFAULT))
        .collect();
    let failures: Vec<String> = reports
        .iter()
        .map(|r| format!("{} {}", r.script, r.failures()))
        .collect();
    let total: usize = reports.iter().map(|r| r.failures()).sum();
    ensure(total > 0, || "scripts still pass without c5".into())?;
    Ok(format!("failures without c5: {}", failures.join(", ")))
}

fn verify_everything() -> Verdict {
    let corpus = Corpus::builtin();
    let a = verify_all(corpus, DEFAULT);
    let b = verify_all(corpus, DEFAULT);
    ensure(a.passed, || format!("{} failures", a.failures))?;
    ensure(
        a.to_text() == b.to_text() && a.to_json() == b.to_json(),
        || "reports differ between runs".into(),
    )?;
    ensure(corpus.errata.len() <= 3, || {
        format!("registry has {} entries", corpus.errata.len())
    })?;
    ensure(a.unregistered.is_empty(), || {
        format!("unregistered {:?}", a.unregistered)
    })?;
    Ok(format!("errata {}", a.errata.join(" ")))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("fig1 census", Duration::from_secs(1), fig1_census),
        ("fig2 tactics", Duration::from_secs(5), fig2_tactics),
        ("main line (S3)", Duration::from_secs(60), main_line),
        (
            "deviation tree (S4)",
            Duration::from_secs(120),
            deviation_tree,
        ),
        ("endgame (S5)", Duration::from_secs(60), endgame),
        (
            "19x15 line (S6)",
            Duration::from_secs(120),
            standard_board_line,
        ),
        ("oracle equivalence", Duration::MAX, oracle),
        ("symmetry duality", Duration::MAX, symmetry),
        ("sensitivity", Duration::MAX, sensitivity),
        ("verify --all", Duration::from_secs(300), verify_everything),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let verdict = run();
        let elapsed = start.elapsed();
        let verdict = match verdict {
            Ok(_) if elapsed > budget => Err(format!("took {elapsed:?}, budget {budget:?}")),
            v => v,
        };
        match verdict {
            Ok(detail) => println!(
                "PASS  {name:<24} {:>8.1} ms  {detail}",
                elapsed.as_secs_f64() * 1e3
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "FAIL  {name:<24} {:>8.1} ms  {why}",
                    elapsed.as_secs_f64() * 1e3
                );
            }
        }
    }
    println!("{} of 10 criteria pass", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
