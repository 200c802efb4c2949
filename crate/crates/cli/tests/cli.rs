//! The `phutball` binary end to end.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::process::{Command, Output, Stdio};

fn phutball(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phutball"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_all_passes() {
    let o = phutball(&["verify", "--all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.ends_with("PASS (0 failures)\n"));
    assert!(text.contains("errata: cor-beta-numbering fig1-arrow-macro tree-b5d7b7-c6"));
    let json: serde_json::Value =
        serde_json::from_slice(&phutball(&["verify", "--all", "--json"]).stdout).unwrap();
    assert_eq!(json["passed"], true);
}

#[test]
fn verify_one_script_by_alias() {
    let o = phutball(&["verify", "S3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("thm-main on fig3: PASS"));
    assert!(!text.contains("thm-tree"));
    let json: serde_json::Value =
        serde_json::from_slice(&phutball(&["verify", "S3", "--json"]).stdout).unwrap();
    assert_eq!(json["script"], "thm-main");
}

#[test]
fn strict_verification_fails_with_status_one() {
    let o = phutball(&["verify", "--strict", "S4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn usage_errors_exit_with_status_two() {
    assert_eq!(phutball(&["verify"]).status.code(), Some(2));
    assert_eq!(phutball(&["verify", "S9"]).status.code(), Some(2));
    assert_eq!(phutball(&["moves", "missing.pos"]).status.code(), Some(2));
    let o = phutball(&["annotate", "fig3", "k9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside the board"));
}

#[test]
fn moves_on_the_illustration() {
    let text = stdout(&phutball(&["moves", "fig1"]));
    assert!(text.contains("13 placements: a4 b1 b3 b4 c1 c3 c5 d1 d3 d5 e1 e2 e4\n"));
    assert!(text.contains("6 jumps:\n"));
    assert!(text.contains("  SE,N,NE  Alfred wins\n"));
    assert!(text.contains("  SE,N     ongoing\n"));
}

#[test]
fn annotate_b3() {
    let text = stdout(&phutball(&["annotate", "fig3", "b3"]));
    assert_eq!(text.lines().next(), Some("!"));
    assert!(text.contains("refuting tackle: c4"));
}

#[test]
fn solve_after_the_tackle() {
    let o = phutball(&[
        "solve", "fig2", "--after", "c4", "--for", "A", "--plies", "2",
    ]);
    let text = stdout(&o);
    assert!(text.starts_with("Alfred wins within 2 plies\n"), "{text}");
    assert!(text.trim_end().ends_with(" NE"));
    let text = stdout(&phutball(&["solve", "fig3", "--for", "B", "--plies", "1"]));
    assert_eq!(text, "no forced win for Betty within 1 plies\n");
}

#[test]
fn render_and_position_files() {
    let text = stdout(&phutball(&["render", "fig3"]));
    assert_eq!(text.matches('X').count(), 24);
    assert_eq!(text.matches('O').count(), 1);
    assert!(text
        .lines()
        .next()
        .unwrap()
        .trim_start()
        .starts_with("a b c"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2-tackled.pos");
    let fig2 = phutball_core::corpus::Corpus::builtin()
        .positions
        .iter()
        .find(|e| e.name == "fig2")
        .unwrap()
        .source
        .clone();
    std::fs::write(&path, &fig2).unwrap();
    let from_file = stdout(&phutball(&[
        "render",
        path.to_str().unwrap(),
        "--after",
        "c4",
    ]));
    assert_eq!(
        from_file,
        stdout(&phutball(&["render", "fig2", "--after", "c4"]))
    );

    std::fs::write(&path, fig2.replace("ball: a2", "ball: a9")).unwrap();
    let o = phutball(&["render", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).into_owned();
    assert!(err.contains("line ") && err.contains("column "), "{err}");
}

#[test]
fn corpus_listing() {
    let text = stdout(&phutball(&["corpus"]));
    for name in ["fig1", "fig5", "thm-endgame", "S6", "tree-b5d7b7-c6"] {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn serve_answers_over_http() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_phutball"))
        .args(["serve", "--port", "0"])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut lines = BufReader::new(child.stderr.take().unwrap()).lines();
    let addr = loop {
        let line = lines.next().expect("server exited").unwrap();
        if let Some(at) = line.split("listening on ").nth(1) {
            break at.trim().to_string();
        }
    };
    let mut stream = TcpStream::connect(&addr).unwrap();
    write!(
        stream,
        "GET /corpus/positions/fig3 HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n"
    )
    .unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("\"ball\":\"a2\""));
}
