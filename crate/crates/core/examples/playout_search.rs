//! Plays one game with the playout search guided by the post-refinement value function.

use evo2048::heuristics::canonical_post10;
use evo2048::search::{play_mcts_game, select_move};
use evo2048::rng::stream_rng;
use evo2048::{Board, SearchConfig};

fn main() {
    let cfg = SearchConfig::default();
    let spec = canonical_post10();

    let board = Board::from_values([[0, 0, 2, 0], [0, 4, 0, 0], [2, 8, 16, 0], [4, 32, 64, 128]]).unwrap();
    let (dir, evals) = select_move(board, &spec, &cfg, &mut stream_rng(1)).unwrap();
    for e in &evals {
        println!("{:<5} value {:.4}  mean gain {:.1}", e.dir.name(), e.mean_value, e.mean_score_delta);
    }
    println!("chosen: {dir}\n");

    let record = play_mcts_game(&spec, &cfg, 7).unwrap();
    println!(
        "full game: {} moves, score {}, highest tile {}",
        record.steps.len(),
        record.final_score,
        record.highest_tile
    );
}
