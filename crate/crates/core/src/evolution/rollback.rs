use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::rng::StreamRng;

/// A spec evaluated during the current segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub spec_id: String,
    pub cycle_index: u32,
    pub mean_score: f64,
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentState {
    pub segment_index: u32,
    pub base_spec_id: String,
    pub candidates: Vec<Candidate>,
}

impl SegmentState {
    pub fn new(segment_index: u32, base_spec_id: impl Into<String>) -> Self {
        SegmentState {
            segment_index,
            base_spec_id: base_spec_id.into(),
            candidates: Vec::new(),
        }
    }
}

/// Selection weights `m_i + floor * max_j m_j`, with failed candidates scored 0.
///
/// `None` when every candidate failed or all weights vanish.
pub fn selection_weights(candidates: &[Candidate], floor: f64) -> Option<Vec<f64>> {
    if candidates.iter().all(|c| c.failed || !c.mean_score.is_finite()) {
        return None;
    }
    let means: Vec<f64> = candidates
        .iter()
        .map(|c| if c.failed || !c.mean_score.is_finite() { 0.0 } else { c.mean_score.max(0.0) })
        .collect();
    let max = means.iter().copied().fold(0.0, f64::max);
    let weights: Vec<f64> = means.iter().map(|m| m + floor * max).collect();
    (weights.iter().sum::<f64>() > 0.0).then_some(weights)
}

/// Samples the index of the candidate that becomes the next segment's base,
/// or `None` if the previous base should be kept.
pub fn rollback_select(segment: &SegmentState, floor: f64, rng: &mut StreamRng) -> Option<usize> {
    let weights = selection_weights(&segment.candidates, floor)?;
    let dist = WeightedIndex::new(&weights).ok()?;
    Some(dist.sample(rng))
}
