//! Flat Monte Carlo playout search.
//!
//! Each legal root move is expanded once; from the resulting afterstate a
//! fixed number of playouts each sample a spawn, roll out a bounded number of
//! moves with a cheap policy, and score the leaf as
//! `lambda * g / (g + 1000) + (1 - lambda) * value(leaf)` where `g` is the
//! score gained from the root move onward. The move with the best mean wins;
//! ties go to the earliest direction in `Up, Down, Left, Right` order.
//!
//! Every playout draws from its own RNG derived from `(move seed, direction,
//! playout index)`, so results do not depend on how playouts are scheduled.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{slide, spawn, try_play_game, Board, GameRecord, MoveDir, PlayError, Slide};
use crate::heuristics::{EvalError, Evaluator};
use crate::rng::{derive_seed, stream_rng, Stream, StreamRng};

/// Squashing constant for the in-playout score gain.
pub const SCORE_NORMALIZER: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RolloutPolicy {
    #[default]
    UniformRandom,
    /// Largest immediate merge score, ties broken at random.
    Greedy1ply,
}

impl std::str::FromStr for RolloutPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform_random" | "random" => Ok(RolloutPolicy::UniformRandom),
            "greedy_1ply" | "greedy" => Ok(RolloutPolicy::Greedy1ply),
            other => Err(format!("unknown rollout policy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub playouts_per_move: u32,
    pub playout_depth: u32,
    pub rollout_policy: RolloutPolicy,
    /// Blend between normalized score gain (1.0) and leaf value (0.0).
    pub leaf_mix: f64,
    pub rng_seed: u64,
    /// Run the playouts of one decision on the rayon pool. Results are identical either way.
    pub parallel_playouts: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            playouts_per_move: 50,
            playout_depth: 10,
            rollout_policy: RolloutPolicy::UniformRandom,
            leaf_mix: 0.5,
            rng_seed: 0,
            parallel_playouts: false,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.playouts_per_move == 0 {
            return Err(SearchError::InvalidConfig("playouts_per_move must be >= 1".into()));
        }
        if self.playout_depth == 0 {
            return Err(SearchError::InvalidConfig("playout_depth must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.leaf_mix) {
            return Err(SearchError::InvalidConfig(format!("leaf_mix {} outside [0, 1]", self.leaf_mix)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveEvaluation {
    pub dir: MoveDir,
    pub mean_value: f64,
    pub playouts: u32,
    pub mean_score_delta: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SearchError {
    #[error("no legal move on terminal board {0:?}")]
    Terminal(Board),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid search config: {0}")]
    InvalidConfig(String),
}

#[inline]
fn all_slides(board: Board) -> [Slide; 4] {
    MoveDir::ALL.map(|d| slide(board, d))
}

fn rollout_move(slides: &[Slide; 4], policy: RolloutPolicy, rng: &mut StreamRng) -> Option<usize> {
    let mut candidates = [0usize; 4];
    let mut n = 0;
    match policy {
        RolloutPolicy::UniformRandom => {
            for (i, s) in slides.iter().enumerate() {
                if s.moved {
                    candidates[n] = i;
                    n += 1;
                }
            }
        }
        RolloutPolicy::Greedy1ply => {
            let best = slides.iter().filter(|s| s.moved).map(|s| s.score_delta).max()?;
            for (i, s) in slides.iter().enumerate() {
                if s.moved && s.score_delta == best {
                    candidates[n] = i;
                    n += 1;
                }
            }
        }
    }
    match n {
        0 => None,
        1 => Some(candidates[0]),
        _ => Some(candidates[rng.random_range(0..n)]),
    }
}

/// One playout from an afterstate. Returns (value, score gained including the root move).
fn playout<E: Evaluator + ?Sized>(
    afterstate: Board,
    root_gain: u32,
    evaluator: &E,
    cfg: &SearchConfig,
    rng: &mut StreamRng,
) -> Result<(f64, u64), EvalError> {
    let mut gained = u64::from(root_gain);
    let (mut board, _) = spawn(afterstate, rng).expect("afterstate of a legal move has room");
    let mut leaf = board;
    for _ in 0..cfg.playout_depth {
        let slides = all_slides(board);
        let Some(i) = rollout_move(&slides, cfg.rollout_policy, rng) else {
            break;
        };
        gained += u64::from(slides[i].score_delta);
        leaf = slides[i].board;
        board = spawn(leaf, rng).expect("moved board has room").0;
    }
    let lambda = cfg.leaf_mix;
    let mut value = 0.0;
    if lambda > 0.0 {
        let g = gained as f64;
        value += lambda * (g / (g + SCORE_NORMALIZER));
    }
    if lambda < 1.0 {
        value += (1.0 - lambda) * evaluator.evaluate(leaf)?;
    }
    Ok((value, gained))
}

/// Chooses a move for `board`. Draws exactly one `u64` from `rng`.
pub fn select_move<E: Evaluator + ?Sized>(
    board: Board,
    evaluator: &E,
    cfg: &SearchConfig,
    rng: &mut StreamRng,
) -> Result<(MoveDir, Vec<MoveEvaluation>), SearchError> {
    let slides = all_slides(board);
    let legal: Vec<(MoveDir, Slide)> = MoveDir::ALL
        .into_iter()
        .zip(slides)
        .filter(|(_, s)| s.moved)
        .collect();
    if legal.is_empty() {
        return Err(SearchError::Terminal(board));
    }
    let move_seed: u64 = rng.random();
    let n = cfg.playouts_per_move;

    let run = |(dir, s): (MoveDir, Slide), j: u32| {
        let mut prng = stream_rng(derive_seed(move_seed, Stream::Playout, &[dir.index() as u64, u64::from(j)]));
        playout(s.board, s.score_delta, evaluator, cfg, &mut prng)
    };
    let jobs: Vec<((MoveDir, Slide), u32)> = legal
        .iter()
        .flat_map(|&m| (0..n).map(move |j| (m, j)))
        .collect();
    let results: Vec<(f64, u64)> = if cfg.parallel_playouts {
        jobs.into_par_iter().map(|(m, j)| run(m, j)).collect::<Result<_, _>>()?
    } else {
        jobs.into_iter().map(|(m, j)| run(m, j)).collect::<Result<_, _>>()?
    };

    let mut evaluations = Vec::with_capacity(legal.len());
    for (k, chunk) in results.chunks(n as usize).enumerate() {
        let mut value_sum = 0.0;
        let mut gain_sum = 0u64;
        for &(v, g) in chunk {
            value_sum += v;
            gain_sum += g;
        }
        evaluations.push(MoveEvaluation {
            dir: legal[k].0,
            mean_value: value_sum / f64::from(n),
            playouts: n,
            mean_score_delta: gain_sum as f64 / f64::from(n),
        });
    }
    let mut best = &evaluations[0];
    for e in &evaluations[1..] {
        if e.mean_value > best.mean_value {
            best = e;
        }
    }
    Ok((best.dir, evaluations))
}

/// Plays a full game with [`select_move`] as the policy.
///
/// Spawns come from the game stream seeded by `seed`; search randomness comes
/// from a separate stream derived from `seed` and `cfg.rng_seed`.
pub fn play_mcts_game<E: Evaluator + ?Sized>(
    evaluator: &E,
    cfg: &SearchConfig,
    seed: u64,
) -> Result<GameRecord, SearchError> {
    cfg.validate()?;
    let mut search_rng = stream_rng(derive_seed(seed, Stream::Search, &[cfg.rng_seed]));
    try_play_game(seed, |b| select_move(b, evaluator, cfg, &mut search_rng).map(|(d, _)| d)).map_err(|e| match e {
        PlayError::Policy { source, .. } => source,
        PlayError::IllegalMove { board, .. } => unreachable!("search only returns legal moves, board {board:?}"),
    })
}
