//! Runs a short refinement loop with the deterministic mutator and prints the lineage.
//!
//! Usage: cargo run --release --example evolve_value_function [run_dir]

use evo2048::evolution::{run_evolution, DeterministicMutator, EvolutionConfig, RunDir, RunOptions};
use evo2048::metrics::emit_report;
use evo2048::SearchConfig;

fn main() {
    let root = std::env::args().nth(1).map(std::path::PathBuf::from).unwrap_or_else(|| {
        std::env::temp_dir().join(format!("evo2048-example-{}", std::process::id()))
    });
    let dir = RunDir::new(&root);
    let cfg = EvolutionConfig {
        cycles: 10,
        games_per_cycle: 4,
        ..EvolutionConfig::default()
    };
    let search = SearchConfig {
        playouts_per_move: 15,
        playout_depth: 6,
        ..SearchConfig::default()
    };
    let progress = |r: &evo2048::evolution::CycleReport| {
        println!("cycle {:>2} {:<12} mean {:>8.1} ± {:.1}", r.cycle_index, r.spec_id, r.mean_score, r.ci95_half_width);
    };
    let opts = RunOptions {
        progress: Some(&progress),
        ..Default::default()
    };
    let out = run_evolution(&cfg, &search, &dir, &DeterministicMutator::default(), &opts).unwrap();
    for rb in &out.lineage.rollbacks {
        println!(
            "segment {} closed at cycle {}: kept {:?} as {}",
            rb.segment_index, rb.closed_at_cycle, rb.chosen, rb.new_base
        );
    }
    let report = emit_report(&dir).unwrap();
    if let Some(t) = report.trend {
        println!("slope {:.1} points/cycle, r {:.3}", t.slope, t.pearson_r);
    }
    println!("run directory: {}", root.display());
}
