//! Half-turn duality: every tactical predicate for one side equals the same
//! predicate for the other side on the rotated board.

mod common;

use common::*;
use phutball_core::corpus::Corpus;
use phutball_core::notation::parse_move;

#[test]
fn corpus_positions_are_dual() {
    let corpus = Corpus::builtin();
    for name in corpus.position_names() {
        let pos = corpus.position(name).unwrap();
        let plies = if name == "fig5" { 1 } else { 2 };
        check_dual(&pos, plies).unwrap();
    }
}

#[test]
fn positions_along_the_main_line_are_dual() {
    let mut pos = Corpus::builtin().position("fig3").unwrap();
    for mv in ["b3", "c4", "d5", "e6", "f7", "g8", "h9", "i10", "NE"] {
        pos = pos
            .apply_move(&parse_move(mv, pos.geometry()).unwrap())
            .unwrap()
            .0;
        check_dual(&pos, 1).unwrap();
    }
}

#[test]
fn random_positions_are_dual() {
    let mut rng = rng(4);
    for _ in 0..200 {
        check_dual(&random_position(&mut rng, 10), 3).unwrap();
    }
}
