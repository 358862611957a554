use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{cycle_stats, distribution, trend, DistributionKind, DistributionTable, ReportError, TrendSummary};
use crate::evolution::{RunDir, RunSnapshot};
use crate::GameRecord;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRow {
    pub cycle_index: u32,
    pub spec_id: String,
    pub games: usize,
    pub mean_score: f64,
    pub ci95_half_width: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub best_tile: u32,
    pub failed: bool,
}

/// Everything in `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub mode: Option<String>,
    /// Fewer cycles are on disk than the run was configured for.
    pub partial: bool,
    pub cycles_expected: Option<u32>,
    pub cycles: Vec<CycleRow>,
    /// Present once there are at least two cycles.
    pub trend: Option<TrendSummary>,
    /// Headline correlation: Pearson r of cycle means against the cycle index.
    pub rho: Option<f64>,
    pub total_games: usize,
    pub highest_tile: DistributionTable,
    pub score_range: DistributionTable,
}

/// Recomputes every statistic from the game files of each completed cycle.
///
/// Failed cycles contribute a mean of 0 and no games to the distributions.
pub fn build_report(dir: &RunDir) -> Result<RunReport, ReportError> {
    if !dir.root().is_dir() {
        return Err(ReportError::Unreadable(dir.root().display().to_string()));
    }
    let cycles = dir.read_cycles()?;
    if cycles.is_empty() {
        return Err(ReportError::NoCycles(dir.root().display().to_string()));
    }
    let snapshot: Option<RunSnapshot> = if dir.config_path().exists() {
        Some(dir.read_json(&dir.config_path())?)
    } else {
        None
    };
    let cycles_expected = snapshot.as_ref().map(|s| match (&s.metaprompt, s.mode.as_str()) {
        (Some(m), "metaprompt") => m.rounds,
        (Some(_), _) => 1,
        (None, _) => s.evolution.cycles,
    });

    let mut rows = Vec::new();
    let mut all_games: Vec<GameRecord> = Vec::new();
    for report in cycles.values() {
        let games = dir.read_cycle_games(report)?;
        let failed = report.is_failed();
        let (mean, half) = if failed || games.is_empty() {
            (0.0, 0.0)
        } else {
            let scores: Vec<f64> = games.iter().map(|g| g.final_score as f64).collect();
            let s = cycle_stats(&scores).expect("nonempty");
            (s.mean, s.ci95_half_width)
        };
        rows.push(CycleRow {
            cycle_index: report.cycle_index,
            spec_id: report.spec_id.clone(),
            games: games.len(),
            mean_score: mean,
            ci95_half_width: half,
            ci_low: mean - half,
            ci_high: mean + half,
            best_tile: games.iter().map(|g| g.highest_tile).max().unwrap_or(0),
            failed,
        });
        if !failed {
            all_games.extend(games);
        }
    }
    let means: Vec<f64> = rows.iter().map(|r| r.mean_score).collect();
    let trend = trend(&means).ok();
    let empty_table = |kind| DistributionTable {
        kind,
        buckets: Vec::new(),
        total_games: 0,
    };
    let table = |kind| distribution(&all_games, kind).unwrap_or_else(|_| empty_table(kind));
    Ok(RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        mode: snapshot.as_ref().map(|s| s.mode.clone()),
        partial: cycles_expected.is_some_and(|n| (rows.len() as u32) < n),
        cycles_expected,
        rho: trend.map(|t| t.pearson_r),
        trend,
        total_games: all_games.len(),
        highest_tile: table(DistributionKind::HighestTile),
        score_range: table(DistributionKind::ScoreRange),
        cycles: rows,
    })
}

fn cycles_csv(report: &RunReport) -> String {
    let mut out = String::from("cycle,spec_id,games,mean,ci95_half_width,ci_low,ci_high,best_tile,failed\n");
    for r in &report.cycles {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.cycle_index, r.spec_id, r.games, r.mean_score, r.ci95_half_width, r.ci_low, r.ci_high, r.best_tile, r.failed
        );
    }
    out
}

fn table_csv(table: &DistributionTable) -> String {
    let mut out = String::from("label,count,percentage\n");
    for b in &table.buckets {
        let _ = writeln!(out, "{},{},{}", b.label, b.count, b.percentage);
    }
    out
}

/// Writes `report.json`, `cycles.csv`, `highest_tile.csv` and `score_range.csv`.
///
/// The output depends only on the persisted run, so repeated calls produce
/// byte-identical files.
pub fn emit_report(dir: &RunDir) -> Result<RunReport, ReportError> {
    let report = build_report(dir)?;
    let root = dir.root();
    dir.write_json(&root.join("report.json"), &report)?;
    dir.write_text(&root.join("cycles.csv"), &cycles_csv(&report))?;
    dir.write_text(&root.join("highest_tile.csv"), &table_csv(&report.highest_tile))?;
    dir.write_text(&root.join("score_range.csv"), &table_csv(&report.score_range))?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_directory_has_no_cycles() {
        let tmp = tempfile::tempdir().unwrap();
        assert!(matches!(build_report(&RunDir::new(tmp.path())), Err(ReportError::NoCycles(_))));
        assert!(matches!(
            build_report(&RunDir::new(tmp.path().join("missing"))),
            Err(ReportError::Unreadable(_))
        ));
    }
}
