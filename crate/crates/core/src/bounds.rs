//! Explicit constants of the probabilistic construction.
//!
//! With `b = 2m − 1` the maximum number of blocks a generic line can cross:
//!
//! ```text
//! D1 = sqrt((2 − 3ε/2)·ln n + ½·ln(b·K·L / (1 − p)))
//! D2 = sqrt(b·n)·D1 + b
//! D3 = (D2 + h) / (1 − δ)
//! ```
//!
//! A `(k, δ)`-feasible block matrix yields a set with reserve `h` with
//! probability at least `p` once `k ≥ D3` (and `k ≥ n^ε`). All logarithms are
//! natural.

use std::ops::RangeInclusive;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("p = {0} must lie in [0, 1)")]
    P(f64),
    #[error("epsilon = {0} must lie in [0, 1]")]
    Epsilon(f64),
    #[error("delta = {0} must be below 1")]
    Delta(f64),
    #[error("block count m = {0} must be at least 2")]
    Blocks(u32),
    #[error("n = {0} must be at least 2")]
    GridSide(u64),
    #[error("constants K = {k}, L = {l} must be positive")]
    Constants { k: f64, l: f64 },
    #[error("D1 radicand {0} is not positive")]
    Radicand(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsParams {
    pub n: u64,
    pub p: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub h: u32,
    pub m: u32,
    pub k_const: f64,
    pub l_const: f64,
}

impl BoundsParams {
    /// `p = 1/2`, `ε = 1/2`, `δ = 4/5`, `h = 15`, `m = 4`, `K = L = 1`.
    pub fn standard(n: u64) -> Self {
        BoundsParams {
            n,
            p: 0.5,
            epsilon: 0.5,
            delta: 0.8,
            h: 15,
            m: 4,
            k_const: 1.0,
            l_const: 1.0,
        }
    }

    pub fn bands(&self) -> u32 {
        2 * self.m - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsProfile {
    pub params: BoundsParams,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    /// `n^ε`, the smallest admissible line threshold.
    pub kappa_min: f64,
}

impl BoundsProfile {
    /// `D3 / sqrt(n ln n)`.
    pub fn slope(&self) -> f64 {
        let n = self.params.n as f64;
        self.d3 / (n * n.ln()).sqrt()
    }
}

pub fn compute_profile(params: BoundsParams) -> Result<BoundsProfile, BoundsError> {
    let BoundsParams {
        n,
        p,
        epsilon,
        delta,
        h,
        m,
        k_const,
        l_const,
    } = params;
    if !(0.0..1.0).contains(&p) {
        return Err(BoundsError::P(p));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(BoundsError::Epsilon(epsilon));
    }
    if delta >= 1.0 || delta.is_nan() {
        return Err(BoundsError::Delta(delta));
    }
    if m < 2 {
        return Err(BoundsError::Blocks(m));
    }
    if n < 2 {
        return Err(BoundsError::GridSide(n));
    }
    if k_const.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
        || l_const.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
    {
        return Err(BoundsError::Constants { k: k_const, l: l_const });
    }
    let b = params.bands() as f64;
    let nf = n as f64;
    let radicand = (2.0 - 1.5 * epsilon) * nf.ln() + 0.5 * (b * k_const * l_const / (1.0 - p)).ln();
    if radicand <= 0.0 {
        return Err(BoundsError::Radicand(radicand));
    }
    let d1 = radicand.sqrt();
    let d2 = (b * nf).sqrt() * d1 + b;
    let d3 = (d2 + h as f64) / (1.0 - delta);
    Ok(BoundsProfile {
        params,
        d1,
        d2,
        d3,
        kappa_min: nf.powf(epsilon),
    })
}

/// `lim D3 / sqrt(n ln n) = sqrt(b·(2 − 3ε/2)) / (1 − δ)`.
pub fn asymptotic_slope(epsilon: f64, delta: f64, m: u32) -> f64 {
    let b = (2 * m - 1) as f64;
    (b * (2.0 - 1.5 * epsilon)).sqrt() / (1.0 - delta)
}

/// `[⌈C·sqrt(n ln n)⌉, ⌊5n/6⌋]`, optionally restricted to multiples of
/// `step`; `None` when empty.
pub fn feasible_k_range(n: u64, c: f64, step: Option<u64>) -> Option<RangeInclusive<u64>> {
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let lower = (c * (nf * nf.ln()).sqrt()).ceil().max(0.0) as u64;
    let upper = 5 * n / 6;
    let (lower, upper) = match step {
        Some(s) if s > 1 => (lower.div_ceil(s) * s, upper / s * s),
        _ => (lower, upper),
    };
    (lower <= upper).then_some(lower..=upper)
}

/// Smallest `n` for which [`feasible_k_range`] is nonempty.
pub fn smallest_feasible_n(c: f64, step: Option<u64>) -> u64 {
    let ok = |n: u64| feasible_k_range(n, c, step).is_some();
    let mut hi = 2u64;
    while !ok(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    // The gap 5n/6 − C sqrt(n ln n) is increasing past its minimum; rounding
    // to `step` can flicker near the crossing, so finish with a linear pass.
    while hi - lo > 64 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let start = lo.saturating_sub(64).max(2);
    (start..=hi).find(|&n| ok(n)).unwrap_or(hi)
}
