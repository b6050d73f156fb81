//! Block decomposition of the grid and block-density matrices.
//!
//! A [`FeasibilityMatrix`] assigns every block `G(i, j)` of an `m × m`
//! decomposition a regularity `r(i, j)`; a uniform random `r(i, j)`-factor in
//! that block puts each of its cells in the set with probability
//! `alpha(i, j) = r(i, j) / (n / m)`. The expected number of chosen points on
//! a line is therefore the `alpha`-weighted count of grid points it crosses,
//! which this module evaluates exactly with rational arithmetic.
//!
//! Block indices are 0-based here: block `(i, j)` covers
//! `x ∈ [i·s + 1, (i + 1)·s]`, `y ∈ [j·s + 1, (j + 1)·s]` with `s = n / m`.

use std::ops::RangeInclusive;

use num_rational::Ratio;
use thiserror::Error;

use crate::exec::Execution;
use crate::grid::{Direction, GridSpec, Line, Point};

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeasibilityError {
    #[error("block count {m} must divide the grid side {n}")]
    Indivisible { n: u32, m: u32 },
    #[error("block count must be at least 1")]
    ZeroBlocks,
    #[error("k = {k} must be a multiple of 10")]
    KNotMultipleOfTen { k: u32 },
    #[error("entry r({i}, {j}) = {value} exceeds the block side {side}")]
    EntryTooLarge { i: usize, j: usize, value: u32, side: u32 },
    #[error("matrix must be {m} x {m}")]
    Shape { m: u32 },
    #[error("matrix and decomposition disagree on block layout")]
    Mismatch,
    #[error("{0} meets the grid in fewer than two points")]
    NotASecant(Line),
}

/// The `m × m` tiling of `[1, n]^2` into equal square blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubgridDecomposition {
    grid: GridSpec,
    m: u32,
}

impl SubgridDecomposition {
    pub fn new(grid: GridSpec, m: u32) -> Result<Self, FeasibilityError> {
        if m == 0 {
            return Err(FeasibilityError::ZeroBlocks);
        }
        if m > grid.n() || !grid.n().is_multiple_of(m) {
            return Err(FeasibilityError::Indivisible { n: grid.n(), m });
        }
        Ok(SubgridDecomposition { grid, m })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn block_side(&self) -> u32 {
        self.grid.n() / self.m
    }

    pub fn block_of(&self, p: Point) -> (usize, usize) {
        let s = self.block_side();
        (((p.x - 1) / s) as usize, ((p.y - 1) / s) as usize)
    }

    /// `(x range, y range)` of block `(i, j)`.
    pub fn block(&self, i: usize, j: usize) -> (RangeInclusive<u32>, RangeInclusive<u32>) {
        let s = self.block_side();
        let (i, j) = (i as u32, j as u32);
        (i * s + 1..=(i + 1) * s, j * s + 1..=(j + 1) * s)
    }
}

/// Block regularities `r(i, j)`, each at most the block side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityMatrix {
    m: u32,
    block_side: u32,
    entries: Vec<u32>,
}

impl FeasibilityMatrix {
    pub fn new(
        block_side: u32,
        rows: &[Vec<u32>],
    ) -> Result<Self, FeasibilityError> {
        let m = rows.len() as u32;
        if m == 0 {
            return Err(FeasibilityError::ZeroBlocks);
        }
        if rows.iter().any(|r| r.len() != m as usize) {
            return Err(FeasibilityError::Shape { m });
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, &value) in row.iter().enumerate() {
                if value > block_side {
                    return Err(FeasibilityError::EntryTooLarge {
                        i,
                        j,
                        value,
                        side: block_side,
                    });
                }
            }
        }
        Ok(FeasibilityMatrix {
            m,
            block_side,
            entries: rows.concat(),
        })
    }

    pub fn zeros(dec: &SubgridDecomposition) -> Self {
        let m = dec.m();
        FeasibilityMatrix {
            m,
            block_side: dec.block_side(),
            entries: vec![0; (m * m) as usize],
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn block_side(&self) -> u32 {
        self.block_side
    }

    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.m as usize + j]
    }

    pub fn alpha(&self, i: usize, j: usize) -> Rational {
        Ratio::new(self.entry(i, j) as i64, self.block_side as i64)
    }

    pub fn max_entry(&self) -> u32 {
        self.entries.iter().copied().max().unwrap_or(0)
    }

    /// `sum_j r(i, j)` for each `i`: the points in any column of block row `i`.
    pub fn row_sums(&self) -> Vec<u32> {
        let m = self.m as usize;
        (0..m).map(|i| (0..m).map(|j| self.entry(i, j)).sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<u32> {
        let m = self.m as usize;
        (0..m).map(|j| (0..m).map(|i| self.entry(i, j)).sum()).collect()
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries
            .chunks(self.m as usize)
            .map(<[u32]>::to_vec)
            .collect()
    }

    fn check(&self, dec: &SubgridDecomposition) -> Result<(), FeasibilityError> {
        if self.m != dec.m() || self.block_side != dec.block_side() {
            return Err(FeasibilityError::Mismatch);
        }
        Ok(())
    }
}

/// The 4×4 two-level matrix: blocks on either main block diagonal get
/// `2k/10`, all others `3k/10`.
pub fn build_paper_r(n: u32, k: u32) -> Result<FeasibilityMatrix, FeasibilityError> {
    if n == 0 || !n.is_multiple_of(4) {
        return Err(FeasibilityError::Indivisible { n, m: 4 });
    }
    if !k.is_multiple_of(10) {
        return Err(FeasibilityError::KNotMultipleOfTen { k });
    }
    let (sparse, dense) = (2 * k / 10, 3 * k / 10);
    let rows: Vec<Vec<u32>> = (0..4)
        .map(|i| {
            (0..4)
                .map(|j| if i == j || i + j == 3 { sparse } else { dense })
                .collect()
        })
        .collect();
    FeasibilityMatrix::new(n / 4, &rows)
}

/// The 3×3 matrix `k/10 · [[3, 4, 3], [4, 2, 4], [3, 4, 3]]`.
pub fn build_remark_r(n: u32, k: u32) -> Result<FeasibilityMatrix, FeasibilityError> {
    if n == 0 || !n.is_multiple_of(3) {
        return Err(FeasibilityError::Indivisible { n, m: 3 });
    }
    if !k.is_multiple_of(10) {
        return Err(FeasibilityError::KNotMultipleOfTen { k });
    }
    const PATTERN: [[u32; 3]; 3] = [[3, 4, 3], [4, 2, 4], [3, 4, 3]];
    let rows: Vec<Vec<u32>> = PATTERN
        .iter()
        .map(|r| r.iter().map(|&v| v * k / 10).collect())
        .collect();
    FeasibilityMatrix::new(n / 3, &rows)
}

/// Expected number of points of the bi-uniform set on `line`.
pub fn expected_load(
    r: &FeasibilityMatrix,
    dec: &SubgridDecomposition,
    line: Line,
) -> Result<Rational, FeasibilityError> {
    r.check(dec)?;
    let mut weight = 0i64;
    let mut count = 0usize;
    for p in line.grid_points(dec.grid()) {
        let (i, j) = dec.block_of(p);
        weight += r.entry(i, j) as i64;
        count += 1;
    }
    if count < 2 {
        return Err(FeasibilityError::NotASecant(line));
    }
    Ok(Ratio::new(weight, r.block_side() as i64))
}

/// Maximum of [`expected_load`] over every generic secant, with the first
/// line attaining it (earliest direction, then smallest `|intercept|`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadMaximum {
    pub value: Rational,
    /// `None` only for the 1×1 grid, which has no generic secant.
    pub line: Option<Line>,
    /// Directions actually swept before the modulus bound cut the search.
    pub directions_swept: usize,
}

pub fn max_expected_load(
    r: &FeasibilityMatrix,
    dec: &SubgridDecomposition,
) -> Result<LoadMaximum, FeasibilityError> {
    max_expected_load_with(r, dec, Execution::default())
}

pub fn max_expected_load_with(
    r: &FeasibilityMatrix,
    dec: &SubgridDecomposition,
    exec: Execution,
) -> Result<LoadMaximum, FeasibilityError> {
    r.check(dec)?;
    let n = dec.grid().n();
    let side = r.block_side() as i64;
    let alpha_max = r.max_entry() as i64;
    // Weighted grid, row-major by x, in numerator units (denominator = side).
    let weights: Vec<(Point, i64)> = dec
        .grid()
        .points()
        .map(|p| {
            let (i, j) = dec.block_of(p);
            (p, r.entry(i, j) as i64)
        })
        .collect();

    let mut best: Option<(i64, Line)> = None;
    let mut swept = 0;
    for modulus in 1..n as i64 {
        let bound = alpha_max * ((n as i64 - 1) / modulus + 1);
        if let Some((b, _)) = best {
            if bound <= b {
                break;
            }
        }
        let dirs = Direction::with_modulus(modulus);
        swept += dirs.len();
        let results = exec.map_init(&dirs, Vec::new, |buf: &mut Vec<(i64, u32)>, &d| {
            heaviest_secant(d, n, &weights, buf)
        });
        for (d, res) in dirs.iter().zip(results) {
            if let Some((w, c)) = res {
                if best.is_none_or(|(b, _)| w > b) {
                    best = Some((w, Line::new(*d, c)));
                }
            }
        }
    }
    Ok(match best {
        Some((w, line)) => LoadMaximum {
            value: Ratio::new(w, side),
            line: Some(line),
            directions_swept: swept,
        },
        None => LoadMaximum {
            value: Ratio::from_integer(0),
            line: None,
            directions_swept: swept,
        },
    })
}

/// Heaviest line of direction `d` among those with at least two grid points.
fn heaviest_secant(
    d: Direction,
    n: u32,
    weights: &[(Point, i64)],
    buf: &mut Vec<(i64, u32)>,
) -> Option<(i64, i64)> {
    let (lo, hi) = d.intercept_range(n);
    buf.clear();
    buf.resize((hi - lo + 1) as usize, (0, 0));
    for &(p, w) in weights {
        let slot = &mut buf[(d.intercept(p) - lo) as usize];
        slot.0 += w;
        slot.1 += 1;
    }
    let mut best: Option<(i64, i64)> = None;
    for (idx, &(w, cnt)) in buf.iter().enumerate() {
        if cnt < 2 {
            continue;
        }
        let c = lo + idx as i64;
        let better = match best {
            None => true,
            Some((bw, bc)) => w > bw || (w == bw && c.abs() < bc.abs()),
        };
        if better {
            best = Some((w, c));
        }
    }
    best
}

/// Why a matrix fails to be `(k, delta)`-feasible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeasibilityWitness {
    MatrixRow { index: usize, sum: u32 },
    MatrixColumn { index: usize, sum: u32 },
    Line { line: Line, load: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub max_load: Rational,
    pub witness: Option<FeasibilityWitness>,
}

/// Checks that all row and column sums equal `k` and that no generic secant
/// has expected load above `delta · k`.
pub fn is_feasible(
    r: &FeasibilityMatrix,
    dec: &SubgridDecomposition,
    k: u32,
    delta: Rational,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    let max = max_expected_load(r, dec)?;
    let fail = |w| FeasibilityVerdict {
        feasible: false,
        max_load: max.value,
        witness: Some(w),
    };
    if let Some((index, &sum)) = r.row_sums().iter().enumerate().find(|(_, &s)| s != k) {
        return Ok(fail(FeasibilityWitness::MatrixRow { index, sum }));
    }
    if let Some((index, &sum)) = r.column_sums().iter().enumerate().find(|(_, &s)| s != k) {
        return Ok(fail(FeasibilityWitness::MatrixColumn { index, sum }));
    }
    if max.value > delta * Ratio::from_integer(k as i64) {
        let line = max.line.expect("positive load implies a secant");
        return Ok(fail(FeasibilityWitness::Line {
            line,
            load: max.value,
        }));
    }
    Ok(FeasibilityVerdict {
        feasible: true,
        max_load: max.value,
        witness: None,
    })
}
