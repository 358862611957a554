//! Training loops: value-function refinement in rollback segments, and
//! two-agent strategy rounds.

mod cycle;
mod metaprompt;
mod mutate;
mod rollback;
mod runner;
mod store;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cycle::{run_cycle, CycleEvaluator, CycleOutcome, CycleReport};
pub use metaprompt::{
    run_baseline, run_metaprompt, run_metaprompt_round, MetapromptConfig, RoundError, RoundOutcome, StrategyAuthor,
    StrategyText, DEFAULT_STRATEGY_CAP,
};
pub use mutate::{DeterministicMutator, LlmMutator, MutationContext, Mutator};
pub use rollback::{rollback_select, selection_weights, Candidate, SegmentState};
pub use runner::{game_seed, run_evolution, Checkpoint, EvolutionOutcome, RunOptions};
pub use store::{LineageNode, LineageTree, RollbackEvent, RunDir, RunLock, RunSnapshot};

use crate::agents::AgentError;
use crate::heuristics::SpecError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutatorKind {
    Deterministic,
    ExternalLlm,
}

impl fmt::Display for MutatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MutatorKind::Deterministic => "deterministic",
            MutatorKind::ExternalLlm => "external_llm",
        })
    }
}

impl FromStr for MutatorKind {
    type Err = EvolutionError;

    fn from_str(s: &str) -> Result<Self, EvolutionError> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "deterministic" => Ok(MutatorKind::Deterministic),
            "external_llm" | "llm" => Ok(MutatorKind::ExternalLlm),
            other => Err(EvolutionError::InvalidConfig(format!("unknown mutator {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolutionConfig {
    pub cycles: u32,
    pub games_per_cycle: u32,
    pub segment_length: u32,
    pub mutator: MutatorKind,
    /// Floor added to every rollback weight, as a fraction of the best mean.
    pub selection_floor: f64,
    pub master_seed: u64,
    /// Gaussian noise scale for the deterministic mutator, relative to total weight.
    pub mutation_sigma: f64,
    /// Chance that the deterministic mutator adds or removes one term.
    pub toggle_prob: f64,
    /// Per-request timeout for program-backed value functions.
    pub evaluator_timeout_ms: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            cycles: 30,
            games_per_cycle: 10,
            segment_length: 5,
            mutator: MutatorKind::Deterministic,
            selection_floor: 0.01,
            master_seed: 0,
            mutation_sigma: 0.05,
            toggle_prob: 0.2,
            evaluator_timeout_ms: 2_000,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<(), EvolutionError> {
        let bad = |m: &str| Err(EvolutionError::InvalidConfig(m.to_string()));
        if self.cycles == 0 {
            return bad("cycles must be at least 1");
        }
        if self.games_per_cycle == 0 {
            return bad("games per cycle must be at least 1");
        }
        if self.segment_length == 0 {
            return bad("segment length must be at least 1");
        }
        if !(self.selection_floor.is_finite() && self.selection_floor >= 0.0) {
            return bad("selection floor must be finite and nonnegative");
        }
        if !(self.mutation_sigma.is_finite() && self.mutation_sigma >= 0.0) {
            return bad("mutation sigma must be finite and nonnegative");
        }
        if !(0.0..=1.0).contains(&self.toggle_prob) {
            return bad("toggle probability must lie in [0, 1]");
        }
        if self.evaluator_timeout_ms == 0 {
            return bad("evaluator timeout must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EvolutionError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    Corrupt { path: String, message: String },
    #[error("run directory {0} is in use by another process")]
    Locked(String),
    #[error("run directory holds a different configuration: {0}")]
    ConfigMismatch(String),
    #[error("strategy text is invalid: {0}")]
    InvalidStrategy(String),
    #[error("round {round} aborted: {reason}")]
    RoundAborted { round: u32, reason: String },
}
