use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CycleReport, EvolutionConfig, EvolutionError, RunDir, RunSnapshot};
use crate::agents::{AgentEndpoint, AgentError, MoveAgent, StrategyAgent};
use crate::engine::{try_play_game, GameRecord, PlayError};
use crate::rng::{derive_seed, Stream};
use crate::search::SearchConfig;

pub const DEFAULT_STRATEGY_CAP: usize = 4_000;

/// Reasoning kept per game for the thinker: the last few executor replies.
const REASONING_TAIL: usize = 3;
const REASONING_CHARS: usize = 240;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyAuthor {
    Thinker,
    Seed,
}

/// Strategy prose the executor follows during one round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyText {
    pub round_index: u32,
    pub text: String,
    pub author: StrategyAuthor,
}

impl StrategyText {
    pub fn new(round_index: u32, text: impl Into<String>, author: StrategyAuthor, cap: usize) -> Result<Self, EvolutionError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(EvolutionError::InvalidStrategy("empty".into()));
        }
        let len = text.chars().count();
        if len > cap {
            return Err(EvolutionError::InvalidStrategy(format!("{len} characters exceeds the cap of {cap}")));
        }
        Ok(StrategyText {
            round_index,
            text,
            author,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetapromptConfig {
    pub rounds: u32,
    pub games_per_round: u32,
    /// Games (and therefore executor requests) in flight at once.
    pub concurrency: usize,
    pub master_seed: u64,
    pub strategy_cap: usize,
}

impl Default for MetapromptConfig {
    fn default() -> Self {
        MetapromptConfig {
            rounds: 25,
            games_per_round: 20,
            concurrency: 20,
            master_seed: 0,
            strategy_cap: DEFAULT_STRATEGY_CAP,
        }
    }
}

impl MetapromptConfig {
    pub fn validate(&self) -> Result<(), EvolutionError> {
        let bad = |m: &str| Err(EvolutionError::InvalidConfig(m.to_string()));
        if self.rounds == 0 {
            return bad("rounds must be at least 1");
        }
        if self.games_per_round == 0 {
            return bad("games per round must be at least 1");
        }
        if self.concurrency == 0 {
            return bad("concurrency must be at least 1");
        }
        if self.strategy_cap == 0 {
            return bad("strategy cap must be positive");
        }
        Ok(())
    }

    pub fn game_seed(&self, round: u32, game: u32) -> u64 {
        derive_seed(self.master_seed, Stream::Executor, &[round as u64, game as u64])
    }
}

#[derive(Debug, Clone)]
pub struct RoundOutcome {
    pub report: CycleReport,
    pub records: Vec<GameRecord>,
    /// One reasoning excerpt per game, aligned with `records`.
    pub reasoning: Vec<String>,
    pub next: StrategyText,
}

/// A round that stopped early, with every game that finished or got partway.
#[derive(Debug)]
pub struct RoundError {
    pub reason: String,
    pub partial: Vec<GameRecord>,
}

fn clip(s: &str) -> String {
    let flat = s.replace('\n', " ");
    flat.chars().take(REASONING_CHARS).collect()
}

fn pool(concurrency: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(concurrency)
        .build()
        .expect("thread pool")
}

fn play_with_executor(
    executor: &dyn MoveAgent,
    strategy: Option<&StrategyText>,
    seed: u64,
) -> Result<(GameRecord, String), (String, GameRecord)> {
    let mut tail: Vec<String> = Vec::new();
    let result = try_play_game(seed, |b| {
        let d = executor.choose_move(b, strategy)?;
        if tail.len() == REASONING_TAIL {
            tail.remove(0);
        }
        tail.push(clip(&d.reasoning));
        Ok::<_, AgentError>(d.dir)
    });
    match result {
        Ok(rec) => Ok((rec, tail.join(" | "))),
        Err(e) => {
            let reason = match &e {
                PlayError::IllegalMove { board, dir, .. } => format!("illegal move {dir} on {board:?}"),
                PlayError::Policy { source, .. } => source.to_string(),
            };
            Err((reason, e.partial().clone()))
        }
    }
}

/// Plays one game per seed with moves from `executor` following `strategy`,
/// then asks `thinker` for the next strategy.
pub fn run_metaprompt_round(
    strategy: &StrategyText,
    seeds: &[u64],
    executor: &dyn MoveAgent,
    thinker: &dyn StrategyAgent,
    concurrency: usize,
    strategy_cap: usize,
) -> Result<RoundOutcome, RoundError> {
    let results: Vec<_> = pool(concurrency.max(1))
        .install(|| seeds.par_iter().map(|&s| play_with_executor(executor, Some(strategy), s)).collect());
    let mut records = Vec::with_capacity(seeds.len());
    let mut reasoning = Vec::with_capacity(seeds.len());
    let mut failure = None;
    for r in results {
        match r {
            Ok((rec, why)) => {
                records.push(rec);
                reasoning.push(why);
            }
            Err((reason, partial)) => {
                failure.get_or_insert(reason);
                records.push(partial);
            }
        }
    }
    if let Some(reason) = failure {
        return Err(RoundError {
            reason,
            partial: records,
        });
    }
    let report = CycleReport::from_records(strategy.round_index, &format!("strategy-{}", strategy.round_index), seeds, &records);
    let text = thinker.refine(strategy, &records, &reasoning).map_err(|e| RoundError {
        reason: format!("thinker: {e}"),
        partial: records.clone(),
    })?;
    let text: String = text.chars().take(strategy_cap).collect();
    let next = StrategyText::new(strategy.round_index + 1, text, StrategyAuthor::Thinker, strategy_cap).map_err(|e| {
        RoundError {
            reason: e.to_string(),
            partial: records.clone(),
        }
    })?;
    Ok(RoundOutcome {
        report,
        records,
        reasoning,
        next,
    })
}

fn snapshot(mode: &str, cfg: &MetapromptConfig, agent: Option<AgentEndpoint>) -> RunSnapshot {
    RunSnapshot {
        mode: mode.into(),
        evolution: EvolutionConfig {
            master_seed: cfg.master_seed,
            ..EvolutionConfig::default()
        },
        search: SearchConfig::default(),
        metaprompt: Some(cfg.clone()),
        agent,
    }
}

/// Runs `cfg.rounds` metaprompt rounds, persisting strategies, reports and games.
///
/// Rounds are numbered from 1. An aborted round keeps its partial games on disk.
pub fn run_metaprompt(
    cfg: &MetapromptConfig,
    initial: &str,
    executor: &dyn MoveAgent,
    thinker: &dyn StrategyAgent,
    dir: &RunDir,
    agent: Option<AgentEndpoint>,
    progress: Option<&(dyn Fn(&CycleReport) + Sync)>,
) -> Result<Vec<CycleReport>, EvolutionError> {
    cfg.validate()?;
    let _lock = dir.lock()?;
    dir.create()?;
    dir.write_json(&dir.config_path(), &snapshot("metaprompt", cfg, agent))?;
    let mut strategy = StrategyText::new(1, initial, StrategyAuthor::Seed, cfg.strategy_cap)?;
    let mut reports = Vec::new();
    for round in 1..=cfg.rounds {
        dir.write_json(&dir.strategy_path(round), &strategy)?;
        let seeds: Vec<u64> = (0..cfg.games_per_round).map(|g| cfg.game_seed(round, g)).collect();
        match run_metaprompt_round(&strategy, &seeds, executor, thinker, cfg.concurrency, cfg.strategy_cap) {
            Ok(out) => {
                let mut report = out.report;
                report.game_records = dir.write_games(round, &out.records)?;
                dir.write_cycle(&report)?;
                if let Some(p) = progress {
                    p(&report);
                }
                reports.push(report);
                strategy = out.next;
            }
            Err(e) => {
                dir.write_games(round, &e.partial)?;
                return Err(EvolutionError::RoundAborted { round, reason: e.reason });
            }
        }
    }
    dir.write_json(&dir.strategy_path(cfg.rounds + 1), &strategy)?;
    Ok(reports)
}

/// Plays `games` games with moves chosen directly by `executor`, no strategy.
pub fn run_baseline(
    games: u32,
    master_seed: u64,
    executor: &dyn MoveAgent,
    concurrency: usize,
    dir: &RunDir,
    agent: Option<AgentEndpoint>,
) -> Result<CycleReport, EvolutionError> {
    let cfg = MetapromptConfig {
        rounds: 1,
        games_per_round: games,
        concurrency,
        master_seed,
        ..MetapromptConfig::default()
    };
    cfg.validate()?;
    let _lock = dir.lock()?;
    dir.create()?;
    dir.write_json(&dir.config_path(), &snapshot("baseline", &cfg, agent))?;
    let seeds: Vec<u64> = (0..games).map(|g| cfg.game_seed(1, g)).collect();
    let results: Vec<_> =
        pool(concurrency.max(1)).install(|| seeds.par_iter().map(|&s| play_with_executor(executor, None, s)).collect());
    let mut records = Vec::new();
    let mut failure = None;
    for r in results {
        match r {
            Ok((rec, _)) => records.push(rec),
            Err((reason, partial)) => {
                failure.get_or_insert(reason);
                records.push(partial);
            }
        }
    }
    let paths = dir.write_games(1, &records)?;
    if let Some(reason) = failure {
        return Err(EvolutionError::RoundAborted { round: 1, reason });
    }
    let mut report = CycleReport::from_records(1, "baseline", &seeds, &records);
    report.game_records = paths;
    dir.write_cycle(&report)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{EchoThinker, FirstLegalExecutor, MoveDecision};
    use crate::engine::Board;

    fn strategy(text: &str) -> StrategyText {
        StrategyText::new(1, text, StrategyAuthor::Seed, DEFAULT_STRATEGY_CAP).unwrap()
    }

    #[test]
    fn mock_fixed_point() {
        let s = strategy("keep the largest tile in the bottom-left corner");
        let seeds: Vec<u64> = (0..20).collect();
        let out = run_metaprompt_round(&s, &seeds, &FirstLegalExecutor, &EchoThinker, 4, DEFAULT_STRATEGY_CAP).unwrap();
        assert_eq!(out.next.text, s.text);
        assert_eq!(out.next.round_index, 2);
        assert_eq!(out.records.len(), 20);
        assert_eq!(out.report.highest_tile_histogram.values().sum::<usize>(), 20);
        assert!(out.records.iter().all(|r| r.terminal));
    }

    #[test]
    fn strategy_bounds() {
        assert!(StrategyText::new(0, "   ", StrategyAuthor::Seed, 10).is_err());
        assert!(StrategyText::new(0, "x".repeat(11), StrategyAuthor::Seed, 10).is_err());
    }

    struct Flaky;
    impl MoveAgent for Flaky {
        fn choose_move(&self, board: Board, _s: Option<&StrategyText>) -> Result<MoveDecision, AgentError> {
            if board.tile_sum() > 64 {
                Err(AgentError::Timeout("slow".into()))
            } else {
                FirstLegalExecutor.choose_move(board, None)
            }
        }
    }

    #[test]
    fn agent_failure_aborts_with_partial_games() {
        let s = strategy("anything");
        let err = run_metaprompt_round(&s, &[1, 2, 3], &Flaky, &EchoThinker, 2, 100).unwrap_err();
        assert!(err.reason.contains("timed out"));
        assert_eq!(err.partial.len(), 3);
        assert!(err.partial.iter().all(|r| !r.terminal && !r.steps.is_empty()));
    }
}
