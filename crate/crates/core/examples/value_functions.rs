//! Scores one board with every heuristic term and both built-in value functions.

use evo2048::heuristics::{canonical_post10, canonical_pre10, eval_spec, eval_term, HeuristicTerm, TermKind, ValueFunctionSpec};
use evo2048::Board;

fn main() {
    let board = Board::from_values([[2, 0, 0, 0], [4, 8, 2, 0], [16, 32, 64, 4], [1024, 256, 128, 8]]).unwrap();
    println!("{board}");
    for kind in TermKind::ALL {
        println!("{:<20} {:.4}", kind.name(), eval_term(&HeuristicTerm::new(kind), board));
    }
    let (pre, post) = (canonical_pre10(), canonical_post10());
    println!("\n{} = {:.6}", pre.id, eval_spec(&pre, board));
    println!("{} = {:.6}", post.id, eval_spec(&post, board));

    let json = post.to_json();
    let back = ValueFunctionSpec::from_json(&json).unwrap();
    assert_eq!(back, post);
    println!("\n{json}");
}
