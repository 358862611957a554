//! Statistics over persisted runs: per-cycle confidence intervals, trends,
//! distribution tables and the report files derived from them.

mod distribution;
mod report;
mod stats;

pub use distribution::{
    distribution, distribution_of, Bucket, DistributionKind, DistributionTable, SCORE_LABELS, TILE_LABELS,
};
pub use report::{build_report, emit_report, CycleRow, RunReport, REPORT_SCHEMA_VERSION};
pub use stats::{cycle_stats, ranks, t_quantile_975, trend, CycleStats, TrendSummary};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("no data")]
    Empty,
    #[error("a trend needs at least 2 points, got {0}")]
    TooFewPoints(usize),
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("no cycles found in {0}")]
    NoCycles(String),
    #[error("cannot read run directory {0}")]
    Unreadable(String),
    #[error(transparent)]
    Run(#[from] crate::evolution::EvolutionError),
}
