//! `phutball`: verify the corpus, inspect positions and run the service.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use phutball_core::corpus::Corpus;
use phutball_core::notation::{format_move, format_path, parse_move, parse_position, render};
use phutball_core::tactics::{self, Solver, DEFAULT_NODE_LIMIT};
use phutball_core::verify::{verify_all, verify_script, VerifyOptions};
use phutball_core::{legal_moves, Position, Role};

#[derive(Parser)]
#[command(
    name = "phutball",
    version,
    about = "Phutball engine, tactical analyzer and proof verifier"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay corpus scripts and check every claim.
    Verify {
        /// Script name or alias (S1..S6).
        script: Option<String>,
        /// Verify every position and script.
        #[arg(long, conflicts_with = "script")]
        all: bool,
        /// Ignore leniency: every annotation must match exactly.
        #[arg(long)]
        strict: bool,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        /// Print per-script wall-clock times to stderr.
        #[arg(long)]
        timing: bool,
    },
    /// List legal moves with their outcomes.
    Moves(PositionArgs),
    /// Tactical report for the mover after a move.
    Annotate {
        #[command(flatten)]
        position: PositionArgs,
        /// The move, e.g. `b3` or `NE,S`.
        #[arg(name = "MOVE")]
        mv: String,
    },
    /// Search for a forced win.
    Solve {
        #[command(flatten)]
        position: PositionArgs,
        /// The side that should win: A or B.
        #[arg(long = "for", value_parser = parse_role)]
        winner: Role,
        #[arg(long)]
        plies: u32,
        /// Search node budget.
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        nodes: u64,
    },
    /// Print the board.
    Render(PositionArgs),
    /// List the corpus entries and the errata registry.
    Corpus,
    /// Run the HTTP analysis service.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Load sessions from this file at start and save them on shutdown.
        #[arg(long)]
        snapshot: Option<PathBuf>,
        /// Deepest forced-win search the service will run.
        #[arg(long, default_value_t = 3)]
        max_plies: u32,
        /// Node budget per service search.
        #[arg(long, default_value_t = 2_000_000)]
        nodes: u64,
    },
}

#[derive(Args)]
struct PositionArgs {
    /// Corpus position name (fig1, fig2, fig3, fig5) or a position file.
    position: String,
    /// Moves to play first, separated by spaces, e.g. "b3 c4".
    #[arg(long)]
    after: Option<String>,
}

fn parse_role(s: &str) -> Result<Role, String> {
    Role::from_letter(s).ok_or_else(|| format!("expected A or B, not {s:?}"))
}

enum Failure {
    /// Bad input: exit status 2.
    Usage(String),
    /// A verification ran and failed: exit status 1.
    Verify,
}

impl From<String> for Failure {
    fn from(s: String) -> Failure {
        Failure::Usage(s)
    }
}

fn load(args: &PositionArgs) -> Result<Position, String> {
    let corpus = Corpus::builtin();
    let mut pos = if corpus.position_names().any(|n| n == args.position) {
        corpus.position(&args.position).map_err(|e| e.to_string())?
    } else {
        let text = std::fs::read_to_string(&args.position)
            .map_err(|e| format!("{}: {e}", args.position))?;
        parse_position(&text).map_err(|e| format!("{}: {e}", args.position))?
    };
    for (i, text) in args
        .after
        .iter()
        .flat_map(|s| s.split_whitespace())
        .enumerate()
    {
        let mv = parse_move(text, pos.geometry())
            .map_err(|e| format!("--after move {} ({text}): {e}", i + 1))?;
        pos = pos
            .apply_move(&mv)
            .map_err(|e| format!("--after move {} ({text}): {e}", i + 1))?
            .0;
    }
    Ok(pos)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn moves(pos: &Position) -> Result<String, String> {
    let list = legal_moves(pos).map_err(|e| e.to_string())?;
    let mut out = format!("{} to move\n", pos.to_move());
    let placements: Vec<String> = list.placements.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(
        out,
        "{} placements: {}",
        placements.len(),
        placements.join(" ")
    );
    let _ = writeln!(out, "{} jumps:", list.jumps.len());
    let width = list
        .jumps
        .iter()
        .map(|j| format_path(&j.path).len())
        .max()
        .unwrap_or(0);
    for j in &list.jumps {
        let _ = writeln!(out, "  {:<width$}  {}", format_path(&j.path), j.outcome);
    }
    Ok(out)
}

fn annotate(pos: &Position, text: &str) -> Result<String, String> {
    let mv = parse_move(text, pos.geometry()).map_err(|e| e.to_string())?;
    let report = tactics::annotate(pos, &mv).map_err(|e| e.to_string())?;
    let paths = |ps: &[Vec<phutball_core::Direction>]| {
        if ps.is_empty() {
            "none".to_string()
        } else {
            ps.iter()
                .map(|p| format_path(p))
                .collect::<Vec<_>>()
                .join(" ")
        }
    };
    let mut out = format!("{}\n", report.annotation);
    let _ = writeln!(out, "attacker: {}", report.attacker);
    let _ = writeln!(out, "shot witnesses: {}", paths(&report.shot_witnesses));
    let _ = writeln!(out, "unjottable: {}", yes_no(report.unjottable));
    let _ = writeln!(out, "untackleable: {}", yes_no(report.untackleable));
    let _ = writeln!(out, "win in one: {}", yes_no(report.win_in_one));
    if let Some(j) = &report.refuting_jot {
        let _ = writeln!(out, "refuting jot: {}", format_path(j));
    }
    if let Some(t) = report.refuting_tackle {
        let _ = writeln!(out, "refuting tackle: {t}");
    }
    Ok(out)
}

fn solve(pos: &Position, winner: Role, plies: u32, nodes: u64) -> Result<String, String> {
    let mut solver = Solver::new(nodes);
    let line = solver
        .principal_line(pos, winner, plies)
        .map_err(|e| e.to_string())?;
    Ok(match line {
        Some(line) => {
            let moves: Vec<String> = line.iter().map(format_move).collect();
            format!(
                "{winner} wins within {plies} plies\nline: {}\n",
                moves.join(" ")
            )
        }
        None => format!("no forced win for {winner} within {plies} plies\n"),
    })
}

fn corpus_listing() -> String {
    let c = Corpus::builtin();
    let mut out = String::from("positions:\n");
    for e in &c.positions {
        let _ = writeln!(
            out,
            "  {:<6} {}x{}  {}",
            e.name, e.checksum.rows, e.checksum.cols, e.note
        );
    }
    out.push_str("scripts:\n");
    for e in &c.scripts {
        let _ = writeln!(out, "  {:<12} {:<3} {}", e.name, e.alias, e.title);
    }
    out.push_str("errata:\n");
    for e in &c.errata {
        let _ = writeln!(out, "  {} ({}): {}", e.id, e.script, e.replacement);
    }
    out
}

fn verify(
    script: Option<String>,
    all: bool,
    strict: bool,
    json: bool,
    timing: bool,
) -> Result<String, Failure> {
    let corpus = Corpus::builtin();
    let options = VerifyOptions { strict };
    let (out, passed) = match (script, all) {
        (_, true) => {
            let summary = verify_all(corpus, options);
            if timing {
                for s in &summary.scripts {
                    eprintln!(
                        "{:<12} {:>10.1} ms",
                        s.script,
                        s.elapsed.as_secs_f64() * 1e3
                    );
                }
            }
            let out = if json {
                summary.to_json() + "\n"
            } else {
                summary.to_text()
            };
            (out, summary.passed)
        }
        (Some(name), false) => {
            let entry = corpus
                .script_entry(&name)
                .ok_or_else(|| format!("unknown script {name:?}"))?;
            let report = verify_script(corpus, &entry.name, options);
            if timing {
                eprintln!(
                    "{:<12} {:>10.1} ms",
                    report.script,
                    report.elapsed.as_secs_f64() * 1e3
                );
            }
            let out = if json {
                report.to_json() + "\n"
            } else {
                report.to_text()
            };
            (out, report.passed())
        }
        (None, false) => return Err(Failure::Usage("give a script name or --all".into())),
    };
    print!("{out}");
    if passed {
        Ok(String::new())
    } else {
        Err(Failure::Verify)
    }
}

fn serve(
    bind: String,
    port: u16,
    snapshot: Option<PathBuf>,
    max_plies: u32,
    nodes: u64,
) -> Result<String, String> {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .init();
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((bind.as_str(), port))
            .await
            .map_err(|e| format!("{bind}:{port}: {e}"))?;
        let config = phutball_service::Config {
            snapshot,
            max_plies,
            node_limit: nodes,
        };
        phutball_service::serve(listener, config)
            .await
            .map_err(|e| e.to_string())
    })?;
    Ok(String::new())
}

fn run(cli: Cli) -> Result<String, Failure> {
    Ok(match cli.command {
        Command::Verify {
            script,
            all,
            strict,
            json,
            timing,
        } => verify(script, all, strict, json, timing)?,
        Command::Moves(p) => moves(&load(&p)?)?,
        Command::Annotate { position, mv } => annotate(&load(&position)?, &mv)?,
        Command::Solve {
            position,
            winner,
            plies,
            nodes,
        } => solve(&load(&position)?, winner, plies, nodes)?,
        Command::Render(p) => {
            let pos = load(&p)?;
            format!("{}{} to move\n", render(&pos), pos.to_move())
        }
        Command::Corpus => corpus_listing(),
        Command::Serve {
            bind,
            port,
            snapshot,
            max_plies,
            nodes,
        } => serve(bind, port, snapshot, max_plies, nodes)?,
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
