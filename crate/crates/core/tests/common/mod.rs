//! Independent reference implementations shared by the integration tests.
//!
//! Everything here works on plain 4x4 grids of tile values and is written
//! directly from the rule descriptions, without the crate's packed tables.
#![allow(dead_code)]

use evo2048::engine::{legal_moves, play_game, Board, GameRecord, MoveDir};
use evo2048::rng::stream_rng;
use rand::Rng;

pub type Grid = [[u32; 4]; 4];

/// Largest tile a packed cell holds; two of them never merge.
pub const CAP_TILE: u32 = 32768;

/// Slides one line toward index 0, merging each tile at most once.
pub fn naive_line(line: [u32; 4]) -> ([u32; 4], u32) {
    let tiles: Vec<u32> = line.iter().copied().filter(|&v| v != 0).collect();
    let mut out = [0u32; 4];
    let mut score = 0;
    let mut k = 0;
    let mut i = 0;
    while i < tiles.len() {
        if i + 1 < tiles.len() && tiles[i] == tiles[i + 1] && tiles[i] < CAP_TILE {
            out[k] = tiles[i] * 2;
            score += tiles[i] * 2;
            i += 2;
        } else {
            out[k] = tiles[i];
            i += 1;
        }
        k += 1;
    }
    (out, score)
}

/// Cell coordinates of line `l`, position `p`, counted from the edge the tiles move toward.
fn coord(dir: MoveDir, l: usize, p: usize) -> (usize, usize) {
    match dir {
        MoveDir::Left => (l, p),
        MoveDir::Right => (l, 3 - p),
        MoveDir::Up => (p, l),
        MoveDir::Down => (3 - p, l),
    }
}

/// Cell-by-cell slide: returns the new grid, score gained and whether anything changed.
pub fn naive_slide(grid: Grid, dir: MoveDir) -> (Grid, u32, bool) {
    let mut out = [[0u32; 4]; 4];
    let mut score = 0;
    for l in 0..4 {
        let mut line = [0u32; 4];
        for (p, cell) in line.iter_mut().enumerate() {
            let (r, c) = coord(dir, l, p);
            *cell = grid[r][c];
        }
        let (moved, s) = naive_line(line);
        score += s;
        for (p, v) in moved.iter().enumerate() {
            let (r, c) = coord(dir, l, p);
            out[r][c] = *v;
        }
    }
    (out, score, out != grid)
}

/// Boards of varied density with exponents mostly in 1..=11.
pub fn random_board<R: Rng>(rng: &mut R) -> Board {
    let density: f64 = rng.random_range(0.0..=1.0);
    let top: u8 = if rng.random_bool(0.05) { 15 } else { 11 };
    let mut cells = [0u8; 16];
    for c in cells.iter_mut() {
        if rng.random_bool(density) {
            *c = rng.random_range(1..=top);
        }
    }
    Board::from_exponents(cells).unwrap()
}

fn log2(v: u32) -> f64 {
    (v as f64).log2()
}

fn highest_at(g: &Grid) -> Option<(usize, usize, u32)> {
    let mut best: Option<(usize, usize, u32)> = None;
    for (r, row) in g.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            if v > 0 && best.is_none_or(|(_, _, b)| v > b) {
                best = Some((r, c, v));
            }
        }
    }
    best
}

fn adjacent_pairs(g: &Grid) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for r in 0..4 {
        for c in 0..4 {
            if c + 1 < 4 {
                out.push((g[r][c], g[r][c + 1]));
            }
            if r + 1 < 4 {
                out.push((g[r][c], g[r + 1][c]));
            }
        }
    }
    out
}

pub fn ref_empty_ratio(g: &Grid) -> f64 {
    g.iter().flatten().filter(|&&v| v == 0).count() as f64 / 16.0
}

pub fn ref_highest_ratio(g: &Grid) -> f64 {
    match highest_at(g) {
        Some((_, _, v)) => (log2(v) / 11.0).clamp(0.0, 1.0),
        None => 0.0,
    }
}

pub fn ref_corner_bonus(g: &Grid) -> f64 {
    match highest_at(g) {
        Some((3, 0, _)) | Some((3, 3, _)) => 1.0,
        Some((0, 0, _)) | Some((0, 3, _)) => 0.5,
        Some((3, _, _)) => 0.25,
        _ => 0.0,
    }
}

pub fn ref_corner_proximity(g: &Grid) -> f64 {
    let Some((row, col, _)) = highest_at(g) else {
        return 0.0;
    };
    let (row, col) = (row as f64, col as f64);
    let br_distance = (3.0 - row) + (3.0 - col);
    let br_proximity = 1.0 - br_distance / 6.0;
    let others = [(0.0, 0.0), (0.0, 3.0), (3.0, 0.0)];
    let other = others
        .iter()
        .map(|&(r, c): &(f64, f64)| 1.0 - ((row - r).abs() + (col - c).abs()) / 6.0)
        .fold(f64::MIN, f64::max);
    0.7 * br_proximity + 0.3 * other
}

pub fn ref_bottom_row_ratio(g: &Grid) -> f64 {
    let total: u64 = g.iter().flatten().map(|&v| v as u64).sum();
    if total == 0 {
        return 0.0;
    }
    g[3].iter().map(|&v| v as u64).sum::<u64>() as f64 / total as f64
}

pub fn ref_merge_ratio(g: &Grid) -> f64 {
    adjacent_pairs(g).iter().filter(|(a, b)| *a != 0 && a == b).count() as f64 / 24.0
}

pub fn ref_merge_value_ratio(g: &Grid) -> f64 {
    let total: u64 = g.iter().flatten().map(|&v| v as u64).sum();
    if total == 0 {
        return 0.0;
    }
    let paired: u64 = adjacent_pairs(g)
        .iter()
        .filter(|(a, b)| *a != 0 && a == b)
        .map(|(a, _)| *a as u64)
        .sum();
    paired as f64 / (2.0 * total as f64)
}

/// Monotone over the nonzero entries, comparing neighbours only where both are occupied.
fn ref_monotone(line: [u32; 4], decreasing_ok: bool, increasing_ok: bool) -> bool {
    if line.iter().all(|&v| v == 0) {
        return false;
    }
    let mut dec = true;
    let mut inc = true;
    for i in 0..3 {
        if line[i] != 0 && line[i + 1] != 0 {
            if line[i] < line[i + 1] {
                dec = false;
            }
            if line[i] > line[i + 1] {
                inc = false;
            }
        }
    }
    (decreasing_ok && dec) || (increasing_ok && inc)
}

pub fn ref_monotonicity(g: &Grid) -> f64 {
    let bottom = g[3];
    let right = [g[0][3], g[1][3], g[2][3], g[3][3]];
    let mut s = 0.0;
    if ref_monotone(bottom, true, true) {
        s += 0.5;
    }
    if ref_monotone(right, false, true) {
        s += 0.5;
    }
    s
}

pub fn ref_snake_ratio(g: &Grid) -> f64 {
    let mut path = Vec::new();
    for c in (0..4).rev() {
        path.push(g[3][c]);
    }
    for c in 0..4 {
        path.push(g[2][c]);
    }
    for c in (0..4).rev() {
        path.push(g[1][c]);
    }
    for c in 0..4 {
        path.push(g[0][c]);
    }
    let mut snake_score = 0;
    for i in 0..15 {
        if path[i] > 0 && path[i + 1] > 0 && path[i] >= path[i + 1] {
            snake_score += 1;
        }
    }
    snake_score as f64 / 15.0
}

pub fn ref_smoothness_ratio(g: &Grid) -> f64 {
    let mut smoothness = 0.0;
    for (a, b) in adjacent_pairs(g) {
        if a != 0 && b != 0 {
            let diff = (log2(a) - log2(b)).abs();
            smoothness += 1.0 / (1.0 + diff);
        }
    }
    smoothness / 24.0
}

pub fn ref_pre10(g: &Grid) -> f64 {
    0.35 * ref_empty_ratio(g)
        + 0.20 * ref_highest_ratio(g)
        + 0.15 * ref_corner_bonus(g)
        + 0.10 * ref_bottom_row_ratio(g)
        + 0.10 * ref_merge_value_ratio(g)
        + 0.05 * ref_merge_ratio(g)
        + 0.05 * ref_monotonicity(g)
}

pub fn ref_post10(g: &Grid) -> f64 {
    0.30 * ref_empty_ratio(g)
        + 0.20 * ref_highest_ratio(g)
        + 0.15 * ref_corner_proximity(g)
        + 0.10 * ref_merge_ratio(g)
        + 0.10 * ref_smoothness_ratio(g)
        + 0.15 * ref_snake_ratio(g)
}

/// Hand-picked boards covering the corner, snake, smoothness and empty cases.
pub fn curated_boards() -> Vec<(&'static str, Grid)> {
    vec![
        ("empty", [[0; 4]; 4]),
        ("2048 bottom-right", [[0; 4], [0; 4], [0; 4], [0, 0, 0, 2048]]),
        ("2048 top-left", [[2048, 0, 0, 0], [0; 4], [0; 4], [0; 4]]),
        ("bottom row descending", [[0; 4], [0; 4], [0; 4], [8, 16, 32, 64]]),
        ("bottom row ascending left", [[0; 4], [0; 4], [0; 4], [64, 32, 16, 8]]),
        ("full snake", [[8, 4, 2, 2], [16, 32, 64, 128], [2048, 1024, 512, 256], [4096, 8192, 16384, 32768]]),
        ("all fours", [[4; 4]; 4]),
        ("single pair", [[2, 2, 0, 0], [0; 4], [0; 4], [0; 4]]),
        ("checkerboard", [[2, 4, 2, 4], [4, 2, 4, 2], [2, 4, 2, 4], [4, 2, 4, 2]]),
        ("ties for highest", [[0, 0, 0, 512], [0; 4], [0; 4], [512, 0, 0, 0]]),
        ("right column toward bottom", [[2, 0, 0, 2], [0, 0, 0, 8], [0, 0, 0, 32], [0, 0, 0, 128]]),
        ("bottom edge highest", [[2, 2, 4, 0], [0, 8, 0, 0], [0, 0, 0, 0], [0, 256, 0, 0]]),
        ("center highest", [[2, 0, 0, 0], [0, 1024, 0, 0], [0, 0, 4, 0], [0, 0, 0, 8]]),
        ("mixed midgame", [[2, 8, 2, 0], [16, 4, 32, 2], [64, 128, 16, 4], [1024, 512, 256, 8]]),
    ]
}

/// Random-policy games: each move is uniform over the legal moves.
pub fn random_policy_game(seed: u64) -> GameRecord {
    let mut rng = stream_rng(seed ^ 0x5eed_0f_7a_11);
    play_game(seed, move |b| {
        let legal = legal_moves(b);
        legal[rng.random_range(0..legal.len())]
    })
}

/// (score, highest tile) outcomes with the given per-bucket counts.
pub fn tile_fixture(counts_2048_to_8: [usize; 9]) -> Vec<(u64, u32)> {
    let tiles = [2048u32, 1024, 512, 256, 128, 64, 32, 16, 8];
    tiles
        .iter()
        .zip(counts_2048_to_8)
        .flat_map(|(&t, n)| std::iter::repeat_n((1000, t), n))
        .collect()
}

pub fn score_fixture(counts_25k_down: [usize; 6]) -> Vec<(u64, u32)> {
    let scores = [26_000u64, 22_000, 17_500, 12_000, 5_000, 4_999];
    scores
        .iter()
        .zip(counts_25k_down)
        .flat_map(|(&s, n)| std::iter::repeat_n((s, 512), n))
        .collect()
}

/// Highest-tile column of the value-function table: 300 games.
pub const TILE_COUNTS: [usize; 9] = [16, 84, 64, 44, 48, 29, 11, 3, 1];
pub const TILE_PERCENTAGES: [f64; 9] = [5.3, 28.0, 21.3, 14.7, 16.0, 9.7, 3.7, 1.0, 0.3];
/// Score-range column: 300 games.
pub const SCORE_COUNTS: [usize; 6] = [0, 26, 57, 44, 85, 88];
pub const SCORE_PERCENTAGES: [f64; 6] = [0.0, 8.7, 19.0, 14.7, 28.3, 29.3];

/// Rounds to one decimal place the way a printed table does.
pub fn one_decimal(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Plain two-pass sample statistics.
pub fn ref_mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Closed-form OLS on (1..=n, ys) and Pearson from raw sums.
pub fn ref_ols(ys: &[f64]) -> (f64, f64, f64) {
    let n = ys.len() as f64;
    let xs: Vec<f64> = (1..=ys.len()).map(|i| i as f64).collect();
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let r = (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt());
    (slope, intercept, r)
}

/// Spearman via the rank-difference formula; valid when there are no ties.
pub fn ref_spearman_no_ties(ys: &[f64]) -> f64 {
    let n = ys.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| ys[a].partial_cmp(&ys[b]).unwrap());
    let mut rank = vec![0.0; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = (r + 1) as f64;
    }
    let d2: f64 = rank.iter().enumerate().map(|(i, r)| (r - (i + 1) as f64).powi(2)).sum();
    let n = n as f64;
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}
