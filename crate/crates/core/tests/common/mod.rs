//! Brute-force oracles built from point pairs only; they share no code with
//! the sweeps they check.

#![allow(dead_code)]

use std::collections::HashMap;

use nkline::feasibility::Rational;
use num_integer::Integer;

/// `(vx, vy, vy·x − vx·y)` of the line through two points, `None` for axis
/// lines.
fn key(p: (i64, i64), q: (i64, i64)) -> Option<(i64, i64, i64)> {
    let (mut dx, mut dy) = (q.0 - p.0, q.1 - p.1);
    if dx == 0 || dy == 0 {
        return None;
    }
    if dx < 0 {
        dx = -dx;
        dy = -dy;
    }
    let g = dx.gcd(&dy);
    let (vx, vy) = (dx / g, dy / g);
    Some((vx, vy, vy * p.0 - vx * p.1))
}

/// Points on a line from the number of pairs it carries.
fn points_from_pairs(pairs: u64) -> u64 {
    let mut l = 2;
    while l * (l - 1) / 2 < pairs {
        l += 1;
    }
    assert_eq!(l * (l - 1) / 2, pairs);
    l
}

/// Generic-secant pair counts for an arbitrary point list.
fn pair_counts(points: &[(i64, i64)]) -> HashMap<(i64, i64, i64), u64> {
    let mut lines = HashMap::new();
    for (i, &p) in points.iter().enumerate() {
        for &q in &points[i + 1..] {
            if let Some(k) = key(p, q) {
                *lines.entry(k).or_insert(0u64) += 1;
            }
        }
    }
    lines
}

fn grid(n: u32) -> Vec<(i64, i64)> {
    let n = n as i64;
    (1..=n).flat_map(|x| (1..=n).map(move |y| (x, y))).collect()
}

/// Generic secants of `[1, n]²` with at least `j` grid points.
pub fn census_by_pairs(n: u32, j: u32) -> u64 {
    pair_counts(&grid(n))
        .into_values()
        .filter(|&p| points_from_pairs(p) >= j as u64)
        .count() as u64
}

/// Histogram `h[L]` = number of generic secants with exactly `L` grid points.
pub fn secant_histogram(n: u32) -> Vec<u64> {
    let mut h = vec![0u64; n as usize + 1];
    for p in pair_counts(&grid(n)).into_values() {
        h[points_from_pairs(p) as usize] += 1;
    }
    h
}

/// Largest number of the given points on a common generic line. Every grid
/// point of a grid with `n ≥ 2` lies on some generic secant, so a nonempty
/// set scores at least 1.
pub fn max_collinear(points: &[(u32, u32)]) -> u64 {
    let pts: Vec<(i64, i64)> = points.iter().map(|&(x, y)| (x as i64, y as i64)).collect();
    let floor = u64::from(!pts.is_empty());
    pair_counts(&pts).into_values().map(points_from_pairs).max().unwrap_or(0).max(floor)
}

/// Maximum over all generic secants of `Σ α(block(p))`, where `alpha[i][j]`
/// is the density of block `(i, j)` and blocks have side `n / m`.
pub fn max_load_by_pairs(n: u32, alpha: &[Vec<Rational>]) -> Rational {
    let m = alpha.len() as i64;
    let side = n as i64 / m;
    let a = |p: (i64, i64)| alpha[((p.0 - 1) / side) as usize][((p.1 - 1) / side) as usize];
    let inside = |p: (i64, i64)| p.0 >= 1 && p.1 >= 1 && p.0 <= n as i64 && p.1 <= n as i64;
    let pts = grid(n);
    let mut loads: HashMap<(i64, i64, i64), Rational> = HashMap::new();
    for (i, &p) in pts.iter().enumerate() {
        for &q in &pts[i + 1..] {
            let Some(k) = key(p, q) else { continue };
            // only accumulate from the lexicographically first point of the line
            if inside((p.0 - k.0, p.1 - k.1)) {
                continue;
            }
            *loads.entry(k).or_insert_with(|| a(p)) += a(q);
        }
    }
    loads.into_values().max().unwrap_or_default()
}
