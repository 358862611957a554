//! Builds executor and refinement prompts and parses replies through a mock transport.

use std::sync::Arc;

use evo2048::agents::{
    build_move_prompt, build_refine_prompt, AgentClient, AgentEndpoint, MockTransport, PayloadKind, PromptRole,
    RefineHistory, RefineTarget,
};
use evo2048::engine::{legal_moves, play_game};
use evo2048::evolution::{StrategyAuthor, StrategyText};
use evo2048::heuristics::canonical_pre10;
use evo2048::Board;

fn main() {
    let board = Board::from_values([[2, 0, 0, 0], [0, 4, 0, 0], [0, 0, 8, 2], [16, 32, 64, 128]]).unwrap();
    let strategy = StrategyText::new(1, "Keep the 128 in the bottom-right corner.", StrategyAuthor::Seed, 4000).unwrap();
    let prompt = build_move_prompt(board, Some(&strategy), PromptRole::ExecutorMove, 4000).unwrap();
    println!("{}\nhash {}\n", prompt.text, prompt.bundle_hash());

    let client = AgentClient::new(
        AgentEndpoint::default(),
        Arc::new(MockTransport::constant("Moving up would break the row.\nFINAL: RIGHT")),
    )
    .unwrap();
    let reply = client.request(&prompt, PayloadKind::Move).unwrap();
    println!("parsed: {:?}\n", reply.payload);

    let games: Vec<_> = (0..3).map(|s| play_game(s, |b| legal_moves(b)[0])).collect();
    let spec = canonical_pre10();
    let history = RefineHistory {
        games: &games,
        ..Default::default()
    };
    let refine = build_refine_prompt(history, RefineTarget::Spec(&spec), 3000).unwrap();
    println!("{}", refine.text);
}
