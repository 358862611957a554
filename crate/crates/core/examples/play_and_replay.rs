//! Plays a seeded random game, writes it as JSONL, reads it back and replays it.

use evo2048::engine::{legal_moves, play_game, read_jsonl, replay, write_jsonl};
use evo2048::rng::stream_rng;
use rand::Rng;

fn main() {
    let mut policy_rng = stream_rng(99);
    let record = play_game(42, |b| {
        let moves = legal_moves(b);
        moves[policy_rng.random_range(0..moves.len())]
    });
    println!(
        "seed {} finished after {} moves: score {}, highest tile {}",
        record.seed,
        record.steps.len(),
        record.final_score,
        record.highest_tile
    );
    println!("{}", record.final_board());

    let mut buf = Vec::new();
    write_jsonl(&mut buf, std::slice::from_ref(&record)).unwrap();
    let back = read_jsonl(buf.as_slice()).unwrap();
    let boards = replay(&back[0]).expect("record replays");
    println!("replayed {} boards from {} bytes of JSONL", boards.len(), buf.len());
}
