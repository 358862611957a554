mod common;

use evo2048::engine::{legal_moves, play_game, MoveDir};
use evo2048::heuristics::{canonical_post10, FnEvaluator};
use evo2048::rng::stream_rng;
use evo2048::search::{play_mcts_game, select_move};
use evo2048::{Board, SearchConfig};
use proptest::prelude::*;

fn cfg(playouts: u32, depth: u32, lambda: f64) -> SearchConfig {
    SearchConfig {
        playouts_per_move: playouts,
        playout_depth: depth,
        leaf_mix: lambda,
        ..SearchConfig::default()
    }
}

#[test]
fn pure_score_prefers_the_merge() {
    // Both horizontal moves merge the 2s; vertical moves cannot merge anything.
    let b = Board::from_values([[2, 2, 0, 0], [0; 4], [0; 4], [0; 4]]).unwrap();
    let zero = FnEvaluator(|_| 0.0);
    let (dir, evals) = select_move(b, &zero, &cfg(400, 1, 1.0), &mut stream_rng(1)).unwrap();
    let delta = |d: MoveDir| evals.iter().find(|e| e.dir == d).unwrap().mean_score_delta;
    assert!(delta(MoveDir::Left) > delta(MoveDir::Down));
    assert!(delta(MoveDir::Left) >= 4.0);
    assert!(matches!(dir, MoveDir::Left | MoveDir::Right));
}

#[test]
fn constant_evaluator_plays_like_first_legal_policy() {
    let zero = FnEvaluator(|_| 0.0);
    for seed in 0..5 {
        let searched = play_mcts_game(&zero, &cfg(3, 2, 0.0), seed).unwrap();
        let first = play_game(seed, |b| legal_moves(b)[0]);
        assert_eq!(searched, first);
    }
}

#[test]
fn thread_count_does_not_change_games() {
    let spec = canonical_post10();
    let serial = play_mcts_game(&spec, &cfg(6, 3, 0.5), 9).unwrap();
    let parallel = SearchConfig {
        parallel_playouts: true,
        ..cfg(6, 3, 0.5)
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let threaded = pool.install(|| play_mcts_game(&spec, &parallel, 9).unwrap());
    assert_eq!(serial, threaded);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn legal_choice_and_exact_budget(seed: u64, playouts in 1u32..6) {
        let b = common::random_board(&mut stream_rng(seed));
        prop_assume!(!legal_moves(b).is_empty());
        let spec = canonical_post10();
        let (dir, evals) = select_move(b, &spec, &cfg(playouts, 3, 0.5), &mut stream_rng(seed)).unwrap();
        prop_assert!(legal_moves(b).contains(&dir));
        prop_assert_eq!(evals.len(), legal_moves(b).len());
        prop_assert!(evals.iter().all(|e| e.playouts == playouts));
    }
}
