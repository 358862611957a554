mod common;

use common::*;
use evo2048::metrics::{cycle_stats, distribution_of, t_quantile_975, trend, DistributionKind, SCORE_LABELS, TILE_LABELS};

const TOL: f64 = 1e-9;

/// Two-sided 95% t quantiles from printed tables.
const T_TABLE: [(usize, f64); 4] = [(1, 12.706204736174698), (7, 2.364624251592785), (9, 2.2621571627409915), (29, 2.045229642132703)];

#[test]
fn t_quantiles_match_tables() {
    for (dof, t) in T_TABLE {
        assert!((t_quantile_975(dof) - t).abs() < 1e-9, "dof {dof}");
    }
}

#[test]
fn textbook_interval() {
    let xs = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
    let s = cycle_stats(&xs).unwrap();
    // Sum of squared deviations is 32, so s = sqrt(32/7).
    let hand = 2.364624251592785 * (32.0f64 / 7.0).sqrt() / 8.0f64.sqrt();
    assert!((s.mean - 5.0).abs() < TOL);
    assert!((s.ci95_half_width - hand).abs() < TOL);
    let (mean, sd) = ref_mean_sd(&xs);
    assert!((s.mean - mean).abs() < TOL);
    assert!((s.ci95_half_width - 2.364624251592785 * sd / 8.0f64.sqrt()).abs() < TOL);
    assert_eq!(cycle_stats(&[100.0]).unwrap().ci95_half_width, 0.0);
    assert_eq!(cycle_stats(&[3.0; 6]).unwrap().ci95_half_width, 0.0);
}

#[test]
fn trend_matches_closed_form() {
    let series = [
        vec![10.0, 20.0, 30.0],
        vec![4409.3, 6473.3, 11350.7, 9120.0, 12004.5, 8650.2, 15222.0, 14980.1, 16002.9, 19555.5],
        vec![3.0, -1.5, 7.25, 2.0, 9.5, 11.0, 0.5],
    ];
    for ys in &series {
        let t = trend(ys).unwrap();
        let (slope, intercept, r) = ref_ols(ys);
        assert!((t.slope - slope).abs() < TOL * slope.abs().max(1.0), "{ys:?}");
        assert!((t.intercept - intercept).abs() < TOL * intercept.abs().max(1.0));
        assert!((t.pearson_r - r).abs() < TOL);
        assert!((t.spearman_rho - ref_spearman_no_ties(ys)).abs() < TOL);
    }
    let perfect = trend(&[10.0, 20.0, 30.0]).unwrap();
    assert!((perfect.slope - 10.0).abs() < TOL && (perfect.pearson_r - 1.0).abs() < TOL);
    let flat = trend(&[5.0; 4]).unwrap();
    assert!(flat.degenerate && flat.slope == 0.0 && flat.pearson_r == 0.0);
}

#[test]
fn highest_tile_column_is_reproduced() {
    let outcomes = tile_fixture(TILE_COUNTS);
    assert_eq!(outcomes.len(), 300);
    let t = distribution_of(&outcomes, DistributionKind::HighestTile).unwrap();
    for (label, want) in TILE_LABELS.iter().zip(TILE_PERCENTAGES) {
        assert_eq!(one_decimal(t.percentage(label).unwrap()), want, "{label}");
    }
}

#[test]
fn score_range_column_is_reproduced() {
    let outcomes = score_fixture(SCORE_COUNTS);
    let t = distribution_of(&outcomes, DistributionKind::ScoreRange).unwrap();
    for (label, want) in SCORE_LABELS.iter().zip(SCORE_PERCENTAGES) {
        assert_eq!(one_decimal(t.percentage(label).unwrap()), want, "{label}");
    }
    let sum: f64 = t.buckets.iter().map(|b| b.percentage).sum();
    assert!((sum - 100.0).abs() < 1e-9);
}

#[test]
fn buckets_match_brute_force_recount() {
    let games: Vec<_> = (0..200).map(random_policy_game).collect();
    let outcomes: Vec<(u64, u32)> = games.iter().map(|g| (g.final_score, g.highest_tile)).collect();
    let t = distribution_of(&outcomes, DistributionKind::ScoreRange).unwrap();
    let bounds = [(25_000, u64::MAX), (20_000, 25_000), (15_000, 20_000), (10_000, 15_000), (5_000, 10_000), (0, 5_000)];
    for (b, (lo, hi)) in t.buckets.iter().zip(bounds) {
        let n = outcomes.iter().filter(|(s, _)| *s >= lo && *s < hi).count();
        assert_eq!(b.count, n, "{}", b.label);
    }
    let tiles = distribution_of(&outcomes, DistributionKind::HighestTile).unwrap();
    assert_eq!(tiles.buckets.iter().map(|b| b.count).sum::<usize>(), 200);
}
