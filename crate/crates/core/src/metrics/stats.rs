use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleStats {
    pub mean: f64,
    pub ci95_half_width: f64,
}

impl CycleStats {
    pub fn low(&self) -> f64 {
        self.mean - self.ci95_half_width
    }

    pub fn high(&self) -> f64 {
        self.mean + self.ci95_half_width
    }
}

/// Two-sided 97.5% quantile of Student's t with `dof` degrees of freedom.
pub fn t_quantile_975(dof: usize) -> f64 {
    StudentsT::new(0.0, 1.0, dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975)
}

/// Mean and t-based 95% confidence half-width (n - 1 degrees of freedom).
pub fn cycle_stats(scores: &[f64]) -> Result<CycleStats, StatsError> {
    if scores.is_empty() {
        return Err(StatsError::Empty);
    }
    let n = scores.len();
    let mean = scores.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Ok(CycleStats {
            mean,
            ci95_half_width: 0.0,
        });
    }
    let ss: f64 = scores.iter().map(|s| (s - mean) * (s - mean)).sum();
    if ss == 0.0 {
        return Ok(CycleStats {
            mean,
            ci95_half_width: 0.0,
        });
    }
    let sd = (ss / (n - 1) as f64).sqrt();
    Ok(CycleStats {
        mean,
        ci95_half_width: t_quantile_975(n - 1) * sd / (n as f64).sqrt(),
    })
}

/// Linear trend of per-cycle means against the 1-based cycle index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendSummary {
    pub slope: f64,
    pub intercept: f64,
    pub pearson_r: f64,
    pub spearman_rho: f64,
    pub n_cycles: usize,
    /// The means have zero variance; correlations are reported as 0.
    pub degenerate: bool,
}

/// Sum of the values in ascending order, so the result does not depend on input order.
fn ordered_sum(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

/// Sum of squared deviations, independent of input order.
fn ordered_ss(values: &[f64], mean: f64) -> f64 {
    let mut v: Vec<f64> = values.iter().map(|y| (y - mean) * (y - mean)).collect();
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

/// Covariance numerator against centered indices, accumulated over mirrored
/// index pairs: sum_j (j - mid) * (y_j - y_{n+1-j}). The mean cancels, and
/// reversing `y` negates every term exactly.
fn index_cross(y: &[f64]) -> f64 {
    let n = y.len();
    let mid = (n as f64 + 1.0) / 2.0;
    (0..n / 2)
        .map(|i| ((i + 1) as f64 - mid) * (y[i] - y[n - 1 - i]))
        .sum()
}

/// Fractional ranks (1-based, ties share their average rank).
pub fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

fn index_correlation(y: &[f64], sxx: f64) -> Option<f64> {
    let mean = ordered_sum(y) / y.len() as f64;
    let syy = ordered_ss(y, mean);
    if syy == 0.0 {
        return None;
    }
    Some((index_cross(y) / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// OLS slope/intercept plus Pearson and Spearman correlation with the cycle index.
pub fn trend(cycle_means: &[f64]) -> Result<TrendSummary, StatsError> {
    let n = cycle_means.len();
    if n < 2 {
        return Err(StatsError::TooFewPoints(n));
    }
    let nf = n as f64;
    let x_mean = (nf + 1.0) / 2.0;
    let sxx = nf * (nf * nf - 1.0) / 12.0;
    let slope = index_cross(cycle_means) / sxx;
    let y_mean = ordered_sum(cycle_means) / nf;
    let pearson = index_correlation(cycle_means, sxx);
    let spearman = index_correlation(&ranks(cycle_means), sxx);
    Ok(TrendSummary {
        slope,
        intercept: y_mean - slope * x_mean,
        pearson_r: pearson.unwrap_or(0.0),
        spearman_rho: spearman.unwrap_or(0.0),
        n_cycles: n,
        degenerate: pearson.is_none(),
    })
}
