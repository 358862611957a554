//! Plays 2048 with a flat Monte Carlo playout search whose leaves are scored by
//! heuristic value functions, and evolves those value functions over training
//! cycles with score-weighted rollback.
//!
//! The crate is organised bottom-up:
//!
//! - [`engine`]: packed boards, slides, seeded spawns, replayable game records.
//! - [`heuristics`]: the heuristic term library, declarative value-function
//!   specs and the out-of-process evaluator protocol.
//! - [`search`]: playout-based move selection.
//! - [`evolution`]: refinement cycles, mutation, rollback segments and the
//!   two-agent strategy rounds.
//! - [`agents`]: prompt rendering, reply parsing, chat-completion transports
//!   and scripted mock agents.
//! - [`metrics`]: confidence intervals, trends, distribution tables, reports.
//! - [`cli`]: configuration and the commands behind the `evo2048` binary.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod agents;
pub mod cli;
pub mod engine;
pub mod evolution;
pub mod heuristics;
pub mod metrics;
pub mod rng;
pub mod search;

pub use engine::{Board, GameRecord, MoveDir};
pub use heuristics::{Evaluator, ValueFunctionSpec};
pub use search::SearchConfig;
