//! Shows the score-weighted rollback draw on a closed segment.

use evo2048::evolution::{rollback_select, selection_weights, Candidate, SegmentState};
use evo2048::rng::stream_rng;

fn main() {
    let means = [4200.0, 6100.0, 3900.0, 7800.0, 5000.0];
    let segment = SegmentState {
        segment_index: 0,
        base_spec_id: "seed-pre10".into(),
        candidates: means
            .iter()
            .enumerate()
            .map(|(i, &m)| Candidate {
                spec_id: format!("c{:04}-m", i + 1),
                cycle_index: i as u32 + 1,
                mean_score: m,
                failed: i == 2,
            })
            .collect(),
    };
    let floor = 0.01;
    let weights = selection_weights(&segment.candidates, floor).unwrap();
    let total: f64 = weights.iter().sum();
    let mut counts = [0usize; 5];
    let mut rng = stream_rng(5);
    for _ in 0..100_000 {
        counts[rollback_select(&segment, floor, &mut rng).unwrap()] += 1;
    }
    for ((c, w), n) in segment.candidates.iter().zip(&weights).zip(counts) {
        println!(
            "{} mean {:>6.0}{}  p {:.4}  drawn {:.4}",
            c.spec_id,
            c.mean_score,
            if c.failed { " (failed)" } else { "" },
            w / total,
            n as f64 / 100_000.0
        );
    }
}
