use std::fmt;

use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::engine::GameRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    HighestTile,
    ScoreRange,
}

impl fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistributionKind::HighestTile => "highest_tile",
            DistributionKind::ScoreRange => "score_range",
        })
    }
}

/// Highest-tile labels, largest first. "2048" also collects larger tiles and
/// "8" collects smaller ones so that every game lands in a bucket.
pub const TILE_LABELS: [&str; 9] = ["2048", "1024", "512", "256", "128", "64", "32", "16", "8"];

/// Score-range labels, highest first. Ranges are half-open: [lo, hi).
pub const SCORE_LABELS: [&str; 6] = ["25K+", "20K-25K", "15K-20K", "10K-15K", "5K-10K", "0-5K"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub label: String,
    pub count: usize,
    pub percentage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionTable {
    pub kind: DistributionKind,
    pub buckets: Vec<Bucket>,
    pub total_games: usize,
}

impl DistributionTable {
    pub fn percentage(&self, label: &str) -> Option<f64> {
        self.buckets.iter().find(|b| b.label == label).map(|b| b.percentage)
    }
}

fn tile_bucket(tile: u32) -> usize {
    let e = tile.max(1).trailing_zeros().clamp(3, 11);
    (11 - e) as usize
}

fn score_bucket(score: u64) -> usize {
    let band = (score / 5_000).min(5) as usize;
    5 - band
}

/// Buckets `(final_score, highest_tile)` outcomes.
pub fn distribution_of(outcomes: &[(u64, u32)], kind: DistributionKind) -> Result<DistributionTable, StatsError> {
    if outcomes.is_empty() {
        return Err(StatsError::Empty);
    }
    let labels: &[&str] = match kind {
        DistributionKind::HighestTile => &TILE_LABELS,
        DistributionKind::ScoreRange => &SCORE_LABELS,
    };
    let mut counts = vec![0usize; labels.len()];
    for &(score, tile) in outcomes {
        let i = match kind {
            DistributionKind::HighestTile => tile_bucket(tile),
            DistributionKind::ScoreRange => score_bucket(score),
        };
        counts[i] += 1;
    }
    let total = outcomes.len();
    Ok(DistributionTable {
        kind,
        buckets: labels
            .iter()
            .zip(counts)
            .map(|(l, count)| Bucket {
                label: l.to_string(),
                count,
                percentage: 100.0 * count as f64 / total as f64,
            })
            .collect(),
        total_games: total,
    })
}

pub fn distribution(records: &[GameRecord], kind: DistributionKind) -> Result<DistributionTable, StatsError> {
    let outcomes: Vec<(u64, u32)> = records.iter().map(|r| (r.final_score, r.highest_tile)).collect();
    distribution_of(&outcomes, kind)
}
