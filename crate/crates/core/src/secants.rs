//! Exact secant sweeps: certification of collinearity bounds and the
//! rich-secant census.
//!
//! For a direction `(vx, vy)` every point is bucketed by its intercept
//! `vy·x − vx·y`; two points share a bucket iff they lie on a common line of
//! that direction. Buckets live in a dense array indexed from the smallest
//! intercept the grid can produce, so a sweep is one pass over the set plus
//! one pass to reset the touched slots.

use std::f64::consts::PI;

use thiserror::Error;

use crate::exec::Execution;
use crate::grid::{Direction, Line, Point, PointSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SecantsError {
    #[error("multiplicity threshold must be at least 2, got {0}")]
    ThresholdTooSmall(u32),
}

/// Primitive directions whose lines can hold at least `t` grid points of
/// `[1, n]^2`, i.e. those of modulus at most `(n − 1) / (t − 1)`.
pub fn primitive_directions(n: u32, t: u32) -> Result<Vec<Direction>, SecantsError> {
    if t < 2 {
        return Err(SecantsError::ThresholdTooSmall(t));
    }
    let max_modulus = (n.saturating_sub(1) / (t - 1)) as i64;
    Ok(directions_up_to(max_modulus))
}

fn directions_up_to(max_modulus: i64) -> Vec<Direction> {
    (1..=max_modulus).flat_map(Direction::with_modulus).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepMode {
    /// Only directions whose lines can exceed `k − h` grid points.
    Threshold,
    /// Every direction of modulus up to `n − 1`.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub k: u32,
    pub required_reserve: u32,
    pub mode: SweepMode,
    /// Largest row or column count.
    pub axis_max: usize,
    /// Largest count on a generic line among the swept directions.
    pub generic_max: usize,
    /// `k − generic_max`; negative when some generic line exceeds `k`.
    pub achieved_reserve: i64,
    pub worst_line: Option<Line>,
    /// One entry per swept direction, in sweep order.
    pub per_direction_max: Vec<(Direction, usize)>,
    /// Grid points on the richest line of any direction that was not swept
    /// (0 when the sweep was complete).
    pub unswept_bound: usize,
}

impl VerificationReport {
    /// Every line meets the set in at most `k` points and every generic
    /// secant in at most `k − h`.
    pub fn passed(&self) -> bool {
        self.axis_max <= self.k as usize
            && (self.generic_max as i64) <= self.k as i64 - self.required_reserve as i64
    }

    /// The reserve this report proves, counting unswept directions at their
    /// point-count bound. `None` if the report did not pass.
    pub fn certified_reserve(&self) -> Option<u32> {
        self.passed()
            .then(|| self.k - self.generic_max.max(self.unswept_bound) as u32)
    }
}

pub fn verify(set: &PointSet, k: u32, reserve: u32, mode: SweepMode) -> VerificationReport {
    verify_with(set, k, reserve, mode, Execution::default())
}

pub fn verify_with(
    set: &PointSet,
    k: u32,
    reserve: u32,
    mode: SweepMode,
    exec: Execution,
) -> VerificationReport {
    let n = set.n();
    let full = n as i64 - 1;
    let limit = k as i64 - reserve as i64;
    let max_modulus = match mode {
        SweepMode::Exhaustive => full,
        SweepMode::Threshold if limit <= 1 => full,
        SweepMode::Threshold => (full / limit).min(full),
    };
    let unswept_bound = if max_modulus < full {
        (full / (max_modulus + 1)) as usize + 1
    } else {
        0
    };

    let axis_max = set
        .column_counts()
        .into_iter()
        .chain(set.row_counts())
        .max()
        .unwrap_or(0);

    let directions = directions_up_to(max_modulus);
    let sweeps = exec.map_init(&directions, Vec::new, |buf: &mut Vec<u32>, &d| {
        sweep_direction(d, n, set.points(), buf)
    });

    let mut generic_max = 0;
    let mut worst_line = None;
    let mut per_direction_max = Vec::with_capacity(directions.len());
    for (&d, (count, c)) in directions.iter().zip(sweeps) {
        per_direction_max.push((d, count));
        if count > generic_max {
            generic_max = count;
            worst_line = Some(Line::new(d, c));
        }
    }

    VerificationReport {
        k,
        required_reserve: reserve,
        mode,
        axis_max,
        generic_max,
        achieved_reserve: k as i64 - generic_max as i64,
        worst_line,
        per_direction_max,
        unswept_bound,
    }
}

/// Richest line of direction `d` through `points`: `(count, intercept)`,
/// ties going to the smallest `|intercept|`. `buf` must be all-zero on entry
/// and is left all-zero.
fn sweep_direction(d: Direction, n: u32, points: &[Point], buf: &mut Vec<u32>) -> (usize, i64) {
    let (lo, hi) = d.intercept_range(n);
    let width = (hi - lo + 1) as usize;
    if buf.len() < width {
        buf.resize(width, 0);
    }
    let mut best = 0u32;
    let mut best_c = 0i64;
    for &p in points {
        let c = d.intercept(p);
        let slot = &mut buf[(c - lo) as usize];
        *slot += 1;
        if *slot > best || (*slot == best && c.abs() < best_c.abs()) {
            best = *slot;
            best_c = c;
        }
    }
    for &p in points {
        buf[(d.intercept(p) - lo) as usize] = 0;
    }
    (best as usize, best_c)
}

/// Number of generic secants of `[1, n]^2` with at least `j` grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusRow {
    pub j: u32,
    pub count: u64,
}

/// Closed-form census: along a positive-slope direction `v`, the number of
/// `t`-point progressions is `N_t = (n − (t−1)vx)^+ · (n − (t−1)vy)^+`, and a
/// line with `L ≥ j` points contributes exactly once to `N_j − N_{j+1}`.
/// Negative slopes mirror positive ones.
pub fn census(n: u32, j: u32) -> Result<CensusRow, SecantsError> {
    if j < 2 {
        return Err(SecantsError::ThresholdTooSmall(j));
    }
    let n = n as i64;
    let progressions = |t: i64, vx: i64, vy: i64| -> i64 {
        (n - (t - 1) * vx).max(0) * (n - (t - 1) * vy).max(0)
    };
    let max_modulus = (n - 1) / (j as i64 - 1);
    let mut count = 0u64;
    for modulus in 1..=max_modulus {
        for d in Direction::with_modulus(modulus) {
            if d.vy() < 0 {
                continue;
            }
            let (vx, vy) = (d.vx(), d.vy());
            let lines = progressions(j as i64, vx, vy) - progressions(j as i64 + 1, vx, vy);
            count += 2 * lines as u64;
        }
    }
    Ok(CensusRow { j, count })
}

/// Census computed by sweeping every direction over the full grid; an
/// independent route to the same numbers as [`census`].
pub fn census_by_sweep(n: u32, j: u32, exec: Execution) -> Result<CensusRow, SecantsError> {
    let dirs = primitive_directions(n, j)?;
    let counts = exec.map_init(&dirs, Vec::new, |buf: &mut Vec<u32>, &d| {
        let (lo, hi) = d.intercept_range(n);
        buf.clear();
        buf.resize((hi - lo + 1) as usize, 0);
        for x in 1..=n {
            for y in 1..=n {
                buf[(d.intercept(Point::new(x, y)) - lo) as usize] += 1;
            }
        }
        buf.iter().filter(|&&c| c >= j).count() as u64
    });
    Ok(CensusRow {
        j,
        count: counts.into_iter().sum(),
    })
}

/// The asymptotic rich-secant count `(6/π²)·n⁴/j³`.
pub fn asymptotic_census(n: u32, j: u32) -> f64 {
    6.0 / (PI * PI) * (n as f64).powi(4) / (j as f64).powi(3)
}

/// Upper bound `L·n⁴/κ³` on the generic secants with more than `κ` points.
pub fn richness_bound(n: u32, kappa: f64, l: f64) -> f64 {
    l * (n as f64).powi(4) / kappa.powi(3)
}
