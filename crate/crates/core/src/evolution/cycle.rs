use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::GameRecord;
use crate::heuristics::{ExternalEvaluator, ExternalEvaluatorHandle, ValueFunctionSpec};
use crate::metrics::cycle_stats;
use crate::search::{play_mcts_game, SearchConfig, SearchError};

/// Aggregate of one cycle (or one metaprompt round).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub cycle_index: u32,
    pub spec_id: String,
    /// Game files relative to the run directory, in seed order.
    pub game_records: Vec<String>,
    pub seeds: Vec<u64>,
    pub scores: Vec<u64>,
    pub mean_score: f64,
    pub ci95_half_width: f64,
    pub highest_tile_histogram: BTreeMap<u32, usize>,
    /// Set when the cycle failed; scores are then all zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl CycleReport {
    pub fn from_records(cycle_index: u32, spec_id: &str, seeds: &[u64], records: &[GameRecord]) -> Self {
        let scores: Vec<u64> = records.iter().map(|r| r.final_score).collect();
        let as_f64: Vec<f64> = scores.iter().map(|&s| s as f64).collect();
        let stats = cycle_stats(&as_f64).unwrap_or(crate::metrics::CycleStats {
            mean: 0.0,
            ci95_half_width: 0.0,
        });
        let mut highest_tile_histogram = BTreeMap::new();
        for r in records {
            *highest_tile_histogram.entry(r.highest_tile).or_insert(0) += 1;
        }
        CycleReport {
            cycle_index,
            spec_id: spec_id.to_string(),
            game_records: Vec::new(),
            seeds: seeds.to_vec(),
            scores,
            mean_score: stats.mean,
            ci95_half_width: stats.ci95_half_width,
            highest_tile_histogram,
            failure: None,
        }
    }

    pub fn failed(cycle_index: u32, spec_id: &str, seeds: &[u64], reason: String) -> Self {
        CycleReport {
            cycle_index,
            spec_id: spec_id.to_string(),
            game_records: Vec::new(),
            seeds: seeds.to_vec(),
            scores: vec![0; seeds.len()],
            mean_score: 0.0,
            ci95_half_width: 0.0,
            highest_tile_histogram: BTreeMap::new(),
            failure: Some(reason),
        }
    }

    pub fn is_failed(&self) -> bool {
        self.failure.is_some()
    }

    pub fn best_tile(&self) -> u32 {
        self.highest_tile_histogram.keys().next_back().copied().unwrap_or(0)
    }
}

/// How the games of a cycle score their leaves.
pub enum CycleEvaluator<'a> {
    Declarative(&'a ValueFunctionSpec),
    /// One evaluator process is started per game.
    External(ExternalEvaluatorHandle),
}

impl CycleEvaluator<'_> {
    fn play(&self, search: &SearchConfig, seed: u64) -> Result<GameRecord, SearchError> {
        match self {
            CycleEvaluator::Declarative(spec) => play_mcts_game(*spec, search, seed),
            CycleEvaluator::External(handle) => {
                let ev = ExternalEvaluator::spawn(handle)?;
                play_mcts_game(&ev, search, seed)
            }
        }
    }
}

pub struct CycleOutcome {
    pub report: CycleReport,
    /// Completed games, in seed order. A failed cycle keeps the games that finished.
    pub records: Vec<GameRecord>,
}

/// Plays one game per seed (in parallel) and aggregates the results.
///
/// Any evaluator failure marks the whole cycle failed instead of returning an error.
pub fn run_cycle(
    evaluator: &CycleEvaluator<'_>,
    spec_id: &str,
    cycle_index: u32,
    search: &SearchConfig,
    seeds: &[u64],
) -> CycleOutcome {
    let results: Vec<Result<GameRecord, SearchError>> = seeds.par_iter().map(|&s| evaluator.play(search, s)).collect();
    let mut records = Vec::with_capacity(results.len());
    let mut failure = None;
    for (seed, r) in seeds.iter().zip(results) {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => {
                failure.get_or_insert_with(|| format!("game with seed {seed}: {e}"));
            }
        }
    }
    let report = match failure {
        None => CycleReport::from_records(cycle_index, spec_id, seeds, &records),
        Some(reason) => {
            log::warn!("cycle {cycle_index} ({spec_id}) failed: {reason}");
            CycleReport::failed(cycle_index, spec_id, seeds, reason)
        }
    };
    CycleOutcome { report, records }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristics::canonical_pre10;

    fn quick() -> SearchConfig {
        SearchConfig {
            playouts_per_move: 2,
            playout_depth: 2,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn single_game_mean_is_its_score() {
        let spec = canonical_pre10();
        let out = run_cycle(&CycleEvaluator::Declarative(&spec), &spec.id, 1, &quick(), &[11]);
        assert_eq!(out.report.mean_score, out.records[0].final_score as f64);
        assert_eq!(out.report.ci95_half_width, 0.0);
    }

    #[test]
    fn identical_seeds_have_zero_width() {
        let spec = canonical_pre10();
        let out = run_cycle(&CycleEvaluator::Declarative(&spec), &spec.id, 1, &quick(), &[5; 10]);
        assert_eq!(out.report.scores.len(), 10);
        assert!(out.report.scores.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(out.report.ci95_half_width, 0.0);
        assert_eq!(out.report.highest_tile_histogram.values().sum::<usize>(), 10);
    }

    #[test]
    fn broken_evaluator_fails_the_cycle() {
        let h = ExternalEvaluatorHandle::new("sh", vec!["-c".into(), "echo nope".into()], 1_000);
        let out = run_cycle(&CycleEvaluator::External(h), "bad", 3, &quick(), &[1, 2]);
        assert!(out.report.is_failed());
        assert_eq!(out.report.scores, vec![0, 0]);
        assert_eq!(out.report.mean_score, 0.0);
        assert!(out.records.is_empty());
    }
}
