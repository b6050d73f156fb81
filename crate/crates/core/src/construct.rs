//! Constructions of `k·n`-point no-`(k+1)`-in-line sets and the end-to-end
//! pipeline that combines them.
//!
//! Every constructor re-verifies its output; nothing is trusted on the
//! strength of the argument alone.

use std::fmt;

use thiserror::Error;

use crate::bifactor::{self, derive_seed, sample_r_factor, BipartiteFactor, FactorError};
use crate::exec::Execution;
use crate::feasibility::{
    build_paper_r, build_remark_r, max_expected_load, FeasibilityError, FeasibilityMatrix,
    Rational, SubgridDecomposition,
};
use crate::grid::{GridError, GridSpec, Point, PointSet};
use crate::secants::{verify_with, SweepMode, VerificationReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Matrix(#[from] FeasibilityError),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error("point set is not {expected}-regular")]
    NotRegular { expected: u32 },
    #[error("input reserve audit failed: needed {required}, verified {achieved}")]
    ReserveAudit { required: u32, achieved: i64 },
    #[error("reserve chain broken: {available} left after adjusting k, {needed} needed to grow n")]
    ReserveChain { available: i64, needed: u32 },
    #[error("bi-uniform construction exhausted {} retries (best reserve {})", .0.attempt_reserves.len(), .0.best_report.achieved_reserve)]
    RetriesExhausted(Box<BiUniformFailure>),
    #[error("strict-mode hypothesis violated: {0}")]
    Strict(String),
    #[error("output failed certification: {0}")]
    Certification(String),
}

/// Which block-density matrix drives the randomized construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixKind {
    /// The 4×4 sparse/dense matrix.
    Paper4,
    /// The 3×3 matrix `k/10 · [[3,4,3],[4,2,4],[3,4,3]]`.
    Remark3,
}

impl MatrixKind {
    pub fn m(self) -> u32 {
        match self {
            MatrixKind::Paper4 => 4,
            MatrixKind::Remark3 => 3,
        }
    }

    pub fn build(self, n: u32, k: u32) -> Result<FeasibilityMatrix, FeasibilityError> {
        match self {
            MatrixKind::Paper4 => build_paper_r(n, k),
            MatrixKind::Remark3 => build_remark_r(n, k),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MatrixKind::Paper4 => "paper4",
            MatrixKind::Remark3 => "remark3",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Explicit {
        n: u32,
        k: u32,
    },
    BiUniform {
        n: u32,
        k: u32,
        matrix: String,
        max_expected_load: Rational,
        target_reserve: u32,
        achieved_reserve: i64,
        retries_used: u32,
    },
    AdjustK {
        from_k: u32,
        to_k: u32,
        reserve_after: u32,
    },
    AdjustN {
        from_n: u32,
        to_n: u32,
        k: u32,
    },
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Explicit { n, k } => write!(f, "explicit n={n} k={k}"),
            Step::BiUniform {
                n,
                k,
                matrix,
                max_expected_load,
                target_reserve,
                achieved_reserve,
                retries_used,
            } => write!(
                f,
                "bi-uniform n={n} k={k} matrix={matrix} E(R)={max_expected_load} \
                 target_reserve={target_reserve} achieved_reserve={achieved_reserve} \
                 retries_used={retries_used}"
            ),
            Step::AdjustK {
                from_k,
                to_k,
                reserve_after,
            } => write!(f, "adjust-k {from_k}->{to_k} reserve_after={reserve_after}"),
            Step::AdjustN { from_n, to_n, k } => write!(f, "adjust-n {from_n}->{to_n} k={k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionMode {
    Explicit,
    BiUniform,
    Pipeline { strict: bool },
}

impl fmt::Display for ConstructionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructionMode::Explicit => f.write_str("explicit"),
            ConstructionMode::BiUniform => f.write_str("biuniform"),
            ConstructionMode::Pipeline { strict: true } => f.write_str("auto (strict)"),
            ConstructionMode::Pipeline { strict: false } => f.write_str("auto (best-effort)"),
        }
    }
}

/// A certified output with the steps that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionCertificate {
    pub n: u32,
    pub k: u32,
    pub mode: ConstructionMode,
    pub seed: Option<u64>,
    pub retries_used: u32,
    pub set: PointSet,
    pub report: VerificationReport,
    pub lineage: Vec<Step>,
}

fn to_cells(set: &PointSet) -> impl Iterator<Item = (usize, usize)> + '_ {
    set.iter().map(|p| (p.x as usize - 1, p.y as usize - 1))
}

fn regular_factor(set: &PointSet, k: u32) -> Result<BipartiteFactor, ConstructError> {
    if set.regularity() != Some(k as usize) {
        return Err(ConstructError::NotRegular { expected: k });
    }
    Ok(BipartiteFactor::from_cells(set.n() as usize, to_cells(set))?)
}

fn certify(set: &PointSet, k: u32, reserve: u32, exec: Execution) -> Result<VerificationReport, ConstructError> {
    let report = verify_with(set, k, reserve, SweepMode::Threshold, exec);
    if set.regularity() != Some(k as usize) {
        return Err(ConstructError::Certification(format!("output is not {k}-regular")));
    }
    if !report.passed() {
        return Err(ConstructError::Certification(format!(
            "generic max {} exceeds {} on {:?}",
            report.generic_max,
            k as i64 - reserve as i64,
            report.worst_line
        )));
    }
    Ok(report)
}

/// Complement construction for `⌈2n/3⌉ ≤ k ≤ n`.
///
/// Removes `P0 = [1, n−k]²`, `P1 = [n−k+1, 2n−2k] × [2k−n+1, k]`, and a
/// circulant `(n−k)`-factor on the columns and rows those two blocks leave
/// empty. Each removed block covers exactly the excess of the slope `+1`
/// (resp. `−1`) lines near the main diagonals; every other generic line has
/// at most `⌊(n−1)/2⌋ + 1 ≤ k` grid points.
pub fn explicit_construct(n: u32, k: u32) -> Result<PointSet, ConstructError> {
    if n == 0 || k > n || 3 * (k as u64) < 2 * (n as u64) {
        return Err(ConstructError::Parameters(format!(
            "explicit construction needs 2n/3 <= k <= n, got n={n} k={k}"
        )));
    }
    let grid = GridSpec::new(n)?;
    let d = n - k;
    let mut removed = PointSet::new(
        grid,
        (1..=d)
            .flat_map(|x| (1..=d).map(move |y| Point::new(x, y)))
            .chain((d + 1..=2 * d).flat_map(|x| (2 * k - n + 1..=k).map(move |y| Point::new(x, y)))),
    )?;
    let cols = removed.column_counts();
    let rows = removed.row_counts();
    let empty_xs: Vec<u32> = (1..=n).filter(|&x| cols[x as usize - 1] == 0).collect();
    let empty_ys: Vec<u32> = (1..=n).filter(|&y| rows[y as usize - 1] == 0).collect();
    let filler = bifactor::circulant_factor(&empty_xs, &empty_ys, d as usize)?;
    removed = PointSet::new(grid, removed.iter().chain(filler))?;
    Ok(PointSet::full(grid).difference(&removed))
}

/// [`explicit_construct`] plus certification.
pub fn certify_explicit(n: u32, k: u32, exec: Execution) -> Result<ConstructionCertificate, ConstructError> {
    let set = explicit_construct(n, k)?;
    let report = certify(&set, k, 0, exec)?;
    Ok(ConstructionCertificate {
        n,
        k,
        mode: ConstructionMode::Explicit,
        seed: None,
        retries_used: 0,
        set,
        report,
        lineage: vec![Step::Explicit { n, k }],
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiUniformConfig {
    pub seed: u64,
    pub max_retries: u32,
    pub target_reserve: u32,
    /// Switch-chain length per block; `None` for the default.
    pub steps: Option<u64>,
    pub exec: Execution,
}

impl BiUniformConfig {
    pub fn new(seed: u64, max_retries: u32, target_reserve: u32) -> Self {
        BiUniformConfig {
            seed,
            max_retries,
            target_reserve,
            steps: None,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiUniformSuccess {
    pub set: PointSet,
    pub report: VerificationReport,
    pub retries_used: u32,
    /// `k − generic_max` of every attempt, in order.
    pub attempt_reserves: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiUniformFailure {
    /// The attempt with the largest achieved reserve (earliest on ties).
    pub best_set: PointSet,
    pub best_report: VerificationReport,
    pub attempt_reserves: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BiUniformOutcome {
    Certified(BiUniformSuccess),
    Exhausted(BiUniformFailure),
}

/// One bi-uniform sample: an independent random `r(i, j)`-factor per block,
/// seeded by `(seed, retry, i, j)`.
pub fn sample_biuniform(
    dec: &SubgridDecomposition,
    r: &FeasibilityMatrix,
    seed: u64,
    retry: u32,
    steps: Option<u64>,
    exec: Execution,
) -> Result<PointSet, ConstructError> {
    let m = dec.m() as usize;
    let side = dec.block_side();
    let blocks = exec.map_range(m * m, |b| {
        let (i, j) = (b / m, b % m);
        let block_seed = derive_seed(seed, &[retry as u64, i as u64, j as u64]);
        sample_r_factor(side as usize, r.entry(i, j) as usize, block_seed, steps)
    });
    let mut points = Vec::with_capacity(dec.grid().n() as usize * r.row_sums()[0] as usize);
    for (b, factor) in blocks.into_iter().enumerate() {
        let (i, j) = ((b / m) as u32, (b % m) as u32);
        for (a, c) in factor?.cells() {
            points.push(Point::new(i * side + a as u32 + 1, j * side + c as u32 + 1));
        }
    }
    Ok(PointSet::new(dec.grid(), points)?)
}

/// Samples bi-uniform sets until one verifies with the target reserve.
pub fn biuniform_construct(
    n: u32,
    k: u32,
    r: &FeasibilityMatrix,
    cfg: BiUniformConfig,
) -> Result<BiUniformOutcome, ConstructError> {
    let dec = SubgridDecomposition::new(GridSpec::new(n)?, r.m())?;
    if r.block_side() != dec.block_side() {
        return Err(FeasibilityError::Mismatch.into());
    }
    if r.row_sums().iter().chain(&r.column_sums()).any(|&s| s != k) {
        return Err(ConstructError::Parameters(format!(
            "matrix row and column sums must all equal k={k}"
        )));
    }
    if cfg.max_retries == 0 {
        return Err(ConstructError::Parameters("at least one retry is required".into()));
    }
    let mut reserves = Vec::new();
    let mut best: Option<(PointSet, VerificationReport)> = None;
    for retry in 0..cfg.max_retries {
        let set = sample_biuniform(&dec, r, cfg.seed, retry, cfg.steps, cfg.exec)?;
        debug_assert_eq!(set.regularity(), Some(k as usize));
        let report = verify_with(&set, k, cfg.target_reserve, SweepMode::Threshold, cfg.exec);
        reserves.push(report.achieved_reserve);
        if report.passed() {
            return Ok(BiUniformOutcome::Certified(BiUniformSuccess {
                set,
                report,
                retries_used: retry + 1,
                attempt_reserves: reserves,
            }));
        }
        if best
            .as_ref()
            .is_none_or(|(_, b)| report.achieved_reserve > b.achieved_reserve)
        {
            best = Some((set, report));
        }
    }
    let (best_set, best_report) = best.expect("at least one attempt");
    Ok(BiUniformOutcome::Exhausted(BiUniformFailure {
        best_set,
        best_report,
        attempt_reserves: reserves,
    }))
}

/// Removes the first `count` matchings of a 1-factorization of the regular
/// set `set`.
pub fn strip_factors(set: &PointSet, count: u32) -> Result<PointSet, ConstructError> {
    let k = set.regularity().ok_or(ConstructError::NotRegular {
        expected: set.len() as u32 / set.n(),
    })? as u32;
    if count > k {
        return Err(ConstructError::Parameters(format!(
            "cannot remove {count} factors from a {k}-factor"
        )));
    }
    if count == 0 {
        return Ok(set.clone());
    }
    let fac = bifactor::one_factorize(&regular_factor(set, k)?);
    let removed = (0..count as usize)
        .flat_map(|i| fac.cells(i).collect::<Vec<_>>())
        .map(|(a, b)| Point::new(a as u32 + 1, b as u32 + 1));
    Ok(set.difference(&PointSet::new(set.grid(), removed)?))
}

fn audit_reserve(set: &PointSet, k: u32, reserve: u32) -> Result<(), ConstructError> {
    if set.regularity() != Some(k as usize) {
        return Err(ConstructError::NotRegular { expected: k });
    }
    let report = verify_with(set, k, reserve, SweepMode::Threshold, Execution::default());
    if !report.passed() {
        return Err(ConstructError::ReserveAudit {
            required: reserve,
            achieved: report.achieved_reserve,
        });
    }
    Ok(())
}

/// Lowers `k` to `k_target` by deleting `k − k_target` perfect matchings;
/// the reserve drops by the same amount.
pub fn adjust_k(set: &PointSet, k: u32, reserve: u32, k_target: u32) -> Result<PointSet, ConstructError> {
    if k_target > k {
        return Err(ConstructError::Parameters(format!("k' = {k_target} exceeds k = {k}")));
    }
    if k - k_target > reserve {
        return Err(ConstructError::Parameters(format!(
            "reserve {reserve} cannot absorb k - k' = {}",
            k - k_target
        )));
    }
    audit_reserve(set, k, reserve)?;
    let out = strip_factors(set, k - k_target)?;
    certify(&out, k_target, reserve - (k - k_target), Execution::default())?;
    Ok(out)
}

/// Grows the grid from `n` to `n + h/2` while keeping `k` points per row and
/// column, consuming a generic reserve of `h` (even).
///
/// For `i = 1..=h/2` the `k` points of the `i`-th matching with smallest `x`
/// are erased and projected onto the new column `x = n + i` and the new row
/// `y = n + i`.
pub fn adjust_n(set: &PointSet, k: u32, reserve: u32) -> Result<PointSet, ConstructError> {
    if !reserve.is_multiple_of(2) {
        return Err(ConstructError::Parameters(format!("reserve {reserve} must be even")));
    }
    let half = reserve / 2;
    if half > k {
        return Err(ConstructError::Parameters(format!(
            "h/2 = {half} exceeds the {k} available matchings"
        )));
    }
    audit_reserve(set, k, reserve)?;
    if half == 0 {
        return Ok(set.clone());
    }
    let n = set.n();
    let fac = bifactor::one_factorize(&regular_factor(set, k)?);
    let mut erased = Vec::new();
    let mut added = Vec::new();
    for i in 0..half {
        // a matching has one point per x, so the k smallest x are 1..=k
        for (a, b) in fac.cells(i as usize).take(k as usize) {
            let (x, y) = (a as u32 + 1, b as u32 + 1);
            erased.push(Point::new(x, y));
            added.push(Point::new(n + i + 1, y));
            added.push(Point::new(x, n + i + 1));
        }
    }
    let kept = set.difference(&PointSet::new(set.grid(), erased)?);
    let grown = GridSpec::new(n + half)?;
    let out = PointSet::new(grown, kept.iter().chain(added))?;
    certify(&out, k, 0, Execution::default())?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub seed: u64,
    pub retries: u32,
    pub matrix: MatrixKind,
    pub strict: bool,
    /// Constant `C` in the strict-mode lower bound `k ≥ C·sqrt(n ln n)`.
    pub c_const: f64,
    pub target_reserve: u32,
    pub steps: Option<u64>,
    pub exec: Execution,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            retries: 64,
            matrix: MatrixKind::Paper4,
            strict: false,
            c_const: 2.5 * 35f64.sqrt(),
            target_reserve: 15,
            steps: None,
            exec: Execution::default(),
        }
    }
}

/// Routing decided by [`plan`] before any sampling happens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plan {
    Explicit,
    BiUniform {
        n: u32,
        k: u32,
        /// Reserve left after lowering `k`.
        reserve_after_k: u32,
        /// Reserve spent growing `n` back.
        reserve_for_n: u32,
    },
}

/// Chooses the route for `(n', k')` and checks the reserve arithmetic.
pub fn plan(n_target: u32, k_target: u32, cfg: &PipelineConfig) -> Result<Plan, ConstructError> {
    if k_target == 0 || k_target > n_target {
        return Err(ConstructError::Parameters(format!(
            "need 1 <= k <= n, got n={n_target} k={k_target}"
        )));
    }
    if cfg.strict {
        if n_target < 68 {
            return Err(ConstructError::Strict(format!("n' = {n_target} < 68")));
        }
        let nf = n_target as f64;
        let floor = cfg.c_const * (nf * nf.ln()).sqrt();
        if (k_target as f64) < floor {
            return Err(ConstructError::Strict(format!(
                "k' = {k_target} < C sqrt(n' ln n') = {floor:.2}"
            )));
        }
    }
    if 3 * k_target as u64 >= 2 * n_target as u64 {
        return Ok(Plan::Explicit);
    }
    let m = cfg.matrix.m();
    let n = m * (n_target / m);
    let k = 10 * k_target.div_ceil(10);
    if cfg.strict && n < 66 {
        return Err(ConstructError::Strict(format!("rounded n = {n} < 66")));
    }
    if n == 0 || 6 * k as u64 > 5 * n as u64 {
        return Err(ConstructError::Parameters(format!(
            "rounded k = {k} exceeds 5n/6 for rounded n = {n}"
        )));
    }
    let available = cfg.target_reserve as i64 - (k - k_target) as i64;
    let needed = 2 * (n_target - n);
    if available < needed as i64 {
        return Err(ConstructError::ReserveChain { available, needed });
    }
    Ok(Plan::BiUniform {
        n,
        k,
        reserve_after_k: available as u32,
        reserve_for_n: needed,
    })
}

/// Builds a certified `k'·n'` set on `[1, n']²`.
///
/// `k' ≥ 2n'/3` goes straight to the explicit construction. Otherwise `n'`
/// is rounded down to a multiple of the block count and `k'` up to a
/// multiple of 10, the bi-uniform construction is run with the target
/// reserve, and the two adjustments bring `k` and `n` back to the targets.
pub fn pipeline(n_target: u32, k_target: u32, cfg: PipelineConfig) -> Result<ConstructionCertificate, ConstructError> {
    let mode = ConstructionMode::Pipeline { strict: cfg.strict };
    let (n, k, h_k, h_n) = match plan(n_target, k_target, &cfg)? {
        Plan::Explicit => {
            let cert = certify_explicit(n_target, k_target, cfg.exec)?;
            return Ok(ConstructionCertificate { mode, ..cert });
        }
        Plan::BiUniform {
            n,
            k,
            reserve_after_k,
            reserve_for_n,
        } => (n, k, reserve_after_k, reserve_for_n),
    };

    let r = cfg.matrix.build(n, k)?;
    let dec = SubgridDecomposition::new(GridSpec::new(n)?, r.m())?;
    let load = max_expected_load(&r, &dec)?.value;
    let bcfg = BiUniformConfig {
        seed: cfg.seed,
        max_retries: cfg.retries,
        target_reserve: cfg.target_reserve,
        steps: cfg.steps,
        exec: cfg.exec,
    };
    let success = match biuniform_construct(n, k, &r, bcfg)? {
        BiUniformOutcome::Certified(s) => s,
        BiUniformOutcome::Exhausted(f) => return Err(ConstructError::RetriesExhausted(Box::new(f))),
    };
    let mut lineage = vec![Step::BiUniform {
        n,
        k,
        matrix: cfg.matrix.name().to_string(),
        max_expected_load: load,
        target_reserve: cfg.target_reserve,
        achieved_reserve: success.report.achieved_reserve,
        retries_used: success.retries_used,
    }];

    let reduced = adjust_k(&success.set, k, cfg.target_reserve, k_target)?;
    lineage.push(Step::AdjustK {
        from_k: k,
        to_k: k_target,
        reserve_after: h_k,
    });
    let grown = adjust_n(&reduced, k_target, h_n)?;
    lineage.push(Step::AdjustN {
        from_n: n,
        to_n: n_target,
        k: k_target,
    });
    debug_assert_eq!(grown.n(), n_target);
    let report = certify(&grown, k_target, 0, cfg.exec)?;
    Ok(ConstructionCertificate {
        n: n_target,
        k: k_target,
        mode,
        seed: Some(cfg.seed),
        retries_used: success.retries_used,
        set: grown,
        report,
        lineage,
    })
}
