//! Confidence intervals, trend and distribution tables over a batch of games.

use evo2048::engine::{legal_moves, play_game};
use evo2048::metrics::{cycle_stats, distribution, trend, DistributionKind};

fn main() {
    // Ten "cycles" of five games with the first-legal-move policy.
    let mut means = Vec::new();
    let mut all = Vec::new();
    for cycle in 0..10u64 {
        let games: Vec<_> = (0..5).map(|g| play_game(cycle * 100 + g, |b| legal_moves(b)[0])).collect();
        let scores: Vec<f64> = games.iter().map(|g| g.final_score as f64).collect();
        let s = cycle_stats(&scores).unwrap();
        println!("cycle {:>2}: mean {:>7.1}  95% CI [{:.1}, {:.1}]", cycle + 1, s.mean, s.low(), s.high());
        means.push(s.mean);
        all.extend(games);
    }
    let t = trend(&means).unwrap();
    println!("\nslope {:.2}/cycle, pearson {:.3}, spearman {:.3}", t.slope, t.pearson_r, t.spearman_rho);
    for kind in [DistributionKind::HighestTile, DistributionKind::ScoreRange] {
        let table = distribution(&all, kind).unwrap();
        println!("\n{kind}");
        for b in &table.buckets {
            println!("  {:>8} {:>5.1}%", b.label, b.percentage);
        }
    }
}
