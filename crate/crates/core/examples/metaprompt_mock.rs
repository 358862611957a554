//! Runs two strategy rounds with scripted executor and thinker agents (no network).

use evo2048::agents::{EchoThinker, PreferenceExecutor};
use evo2048::evolution::{run_metaprompt, MetapromptConfig, RunDir};

fn main() {
    let root = std::env::temp_dir().join(format!("evo2048-metaprompt-{}", std::process::id()));
    let dir = RunDir::new(&root);
    let cfg = MetapromptConfig {
        rounds: 2,
        ..MetapromptConfig::default()
    };
    let reports = run_metaprompt(
        &cfg,
        "Prefer Down then Left then Right. Keep the largest tile in the bottom-left corner.",
        &PreferenceExecutor,
        &EchoThinker,
        &dir,
        None,
        None,
    )
    .unwrap();
    for r in &reports {
        println!(
            "round {} ({} games): mean {:.1} ± {:.1}, best tile {}",
            r.cycle_index,
            r.scores.len(),
            r.mean_score,
            r.ci95_half_width,
            r.best_tile()
        );
    }
    println!("strategies and games under {}", root.display());
}
