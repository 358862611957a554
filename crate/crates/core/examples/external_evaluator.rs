//! Evaluates boards with a Python value function running in a separate process.

use evo2048::heuristics::{materialize_python_program, python_handle, Evaluator, ExternalEvaluator};
use evo2048::Board;

const LISTING: &str = "
def evaluate(board):
    empty = sum(1 for row in board for v in row if v == 0)
    corner = 1.0 if board[3][3] == max(max(r) for r in board) else 0.0
    return 0.5 * empty / 16.0 + 0.5 * corner
";

fn main() {
    let dir = std::env::temp_dir().join(format!("evo2048-programs-{}", std::process::id()));
    let path = materialize_python_program(&dir, "corner", LISTING).unwrap();
    let evaluator = ExternalEvaluator::spawn(&python_handle(&path, 2_000)).expect("python3 is available");
    for rows in [
        [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 2, 0], [0, 0, 0, 64]],
        [[64, 0, 0, 0], [0, 0, 0, 0], [0, 0, 2, 0], [0, 0, 0, 4]],
    ] {
        let b = Board::from_values(rows).unwrap();
        println!("{b}-> {}\n", evaluator.evaluate(b).unwrap());
    }
}
