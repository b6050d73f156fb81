//! Regular bipartite structure on `m × m` cell grids.
//!
//! A cell `(a, b)` is row `a`, column `b`, both 0-based. An `r`-factor has
//! exactly `r` cells in every row and column. This module samples random
//! `r`-factors with the degree-preserving switch chain, finds perfect
//! matchings with Hopcroft–Karp, and splits `r`-factors into `r` disjoint
//! perfect matchings (Kőnig's line colouring).

use std::collections::VecDeque;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exec::Execution;
use crate::grid::Point;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("regularity {r} is outside [0, {m}]")]
    RegularityOutOfRange { m: usize, r: usize },
    #[error("cell ({a}, {b}) is outside the {m} x {m} grid")]
    CellOutOfRange { a: usize, b: usize, m: usize },
    #[error("cell ({a}, {b}) appears twice")]
    DuplicateCell { a: usize, b: usize },
    #[error("cell set is not regular: {0}")]
    NotRegular(String),
    #[error("row and column index lists differ in length ({rows} vs {cols})")]
    LengthMismatch { rows: usize, cols: usize },
    #[error("matching size {s} must lie in [1, {m}]")]
    MatchingSize { s: usize, m: usize },
    #[error("at least one trial is required")]
    NoTrials,
}

/// Mixes a master seed with a path of indices into an independent 64-bit
/// seed (SplitMix64 finaliser applied per component).
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    path.iter().fold(mix(master), |h, &p| mix(h ^ mix(p)))
}

/// An `r`-regular cell set of the complete `m × m` bipartite graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteFactor {
    m: usize,
    r: usize,
    /// Column indices per row, ascending.
    rows: Vec<Vec<u32>>,
}

impl BipartiteFactor {
    /// Audits `cells` for range, duplicates and regularity.
    pub fn from_cells<I>(m: usize, cells: I) -> Result<Self, FactorError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut rows = vec![Vec::new(); m];
        let mut col_deg = vec![0usize; m];
        for (a, b) in cells {
            if a >= m || b >= m {
                return Err(FactorError::CellOutOfRange { a, b, m });
            }
            rows[a].push(b as u32);
            col_deg[b] += 1;
        }
        for (a, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
                return Err(FactorError::DuplicateCell { a, b: w[0] as usize });
            }
        }
        let r = rows.first().map_or(0, Vec::len);
        if let Some(a) = rows.iter().position(|row| row.len() != r) {
            return Err(FactorError::NotRegular(format!(
                "row {a} has degree {} but row 0 has {r}",
                rows[a].len()
            )));
        }
        if let Some(b) = col_deg.iter().position(|&d| d != r) {
            return Err(FactorError::NotRegular(format!(
                "column {b} has degree {} but rows have {r}",
                col_deg[b]
            )));
        }
        Ok(BipartiteFactor { m, r, rows })
    }

    /// Cell `(a, b)` present iff `(b − a) mod m < r`.
    pub fn circulant(m: usize, r: usize) -> Result<Self, FactorError> {
        if r > m {
            return Err(FactorError::RegularityOutOfRange { m, r });
        }
        let rows = (0..m)
            .map(|a| {
                let mut row: Vec<u32> = (0..r).map(|s| ((a + s) % m) as u32).collect();
                row.sort_unstable();
                row
            })
            .collect();
        Ok(BipartiteFactor { m, r, rows })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.m * self.r
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        a < self.m && self.rows[a].binary_search(&(b as u32)).is_ok()
    }

    pub fn row(&self, a: usize) -> &[u32] {
        &self.rows[a]
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.iter().map(move |&b| (a, b as usize)))
    }
}

/// Default switch-chain length `⌈10·m·r·ln(m + 1)⌉`.
pub fn default_steps(m: usize, r: usize) -> u64 {
    (10.0 * m as f64 * r as f64 * ((m + 1) as f64).ln()).ceil() as u64
}

/// Samples an approximately uniform `r`-factor: starts from the circulant
/// factor and runs `steps` proposals of the 2×2 switch chain. A proposal
/// picks two present cells `(a, b)`, `(a', b')` uniformly; if `(a, b')` and
/// `(a', b)` are both absent the checkerboard is flipped, otherwise nothing
/// changes. Identical arguments give identical factors.
pub fn sample_r_factor(
    m: usize,
    r: usize,
    seed: u64,
    steps: Option<u64>,
) -> Result<BipartiteFactor, FactorError> {
    let start = BipartiteFactor::circulant(m, r)?;
    if r == 0 || r == m {
        return Ok(start);
    }
    let steps = steps.unwrap_or_else(|| default_steps(m, r));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = start.rows;
    let mut present = vec![false; m * m];
    for (a, row) in rows.iter().enumerate() {
        for &b in row {
            present[a * m + b as usize] = true;
        }
    }
    for _ in 0..steps {
        let a = rng.gen_range(0..m);
        let i = rng.gen_range(0..r);
        let a2 = rng.gen_range(0..m);
        let i2 = rng.gen_range(0..r);
        let (b, b2) = (rows[a][i] as usize, rows[a2][i2] as usize);
        if a == a2 || b == b2 || present[a * m + b2] || present[a2 * m + b] {
            continue;
        }
        rows[a][i] = b2 as u32;
        rows[a2][i2] = b as u32;
        present[a * m + b] = false;
        present[a2 * m + b2] = false;
        present[a * m + b2] = true;
        present[a2 * m + b] = true;
        debug_assert!(rows[a].len() == r && rows[a2].len() == r);
    }
    for row in &mut rows {
        row.sort_unstable();
    }
    Ok(BipartiteFactor { m, r, rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContainmentEstimate {
    pub hits: u64,
    pub trials: u64,
}

impl ContainmentEstimate {
    pub fn probability(&self) -> f64 {
        self.hits as f64 / self.trials as f64
    }

    pub fn standard_error(&self) -> f64 {
        let p = self.probability();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Fraction of sampled `r`-factors containing the matching
/// `{(0, 0), …, (s − 1, s − 1)}`.
pub fn matching_containment_probability(
    m: usize,
    r: usize,
    s: usize,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<ContainmentEstimate, FactorError> {
    if r > m {
        return Err(FactorError::RegularityOutOfRange { m, r });
    }
    if s == 0 || s > m {
        return Err(FactorError::MatchingSize { s, m });
    }
    if trials == 0 {
        return Err(FactorError::NoTrials);
    }
    let hits = exec.map_range(trials as usize, |t| {
        let f = sample_r_factor(m, r, derive_seed(seed, &[t as u64]), None)
            .expect("validated above");
        (0..s).all(|i| f.contains(i, i))
    });
    Ok(ContainmentEstimate {
        hits: hits.into_iter().filter(|&h| h).count() as u64,
        trials,
    })
}

/// Rows with too few neighbours: `|neighbours| < |rows|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HallWitness {
    pub rows: Vec<usize>,
    pub neighbours: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchingOutcome {
    /// `perm[a]` is the column matched to row `a`.
    Perfect(Vec<usize>),
    Deficient(HallWitness),
}

/// Perfect matching of the bipartite graph on `m + m` vertices with the
/// given `(row, column)` edges, or a Hall-violating row set.
pub fn perfect_matching<I>(m: usize, cells: I) -> MatchingOutcome
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut adj = vec![Vec::new(); m];
    for (a, b) in cells {
        if a < m && b < m {
            adj[a].push(b as u32);
        }
    }
    for row in &mut adj {
        row.sort_unstable();
        row.dedup();
    }
    let (row_match, col_match) = hopcroft_karp(m, &adj);
    if row_match.iter().all(|&b| b != FREE) {
        return MatchingOutcome::Perfect(row_match.iter().map(|&b| b as usize).collect());
    }
    // Alternating reachability from the free rows yields the Hall obstruction.
    let mut seen_row = vec![false; m];
    let mut seen_col = vec![false; m];
    let mut queue: VecDeque<usize> = (0..m).filter(|&a| row_match[a] == FREE).collect();
    for &a in &queue {
        seen_row[a] = true;
    }
    while let Some(a) = queue.pop_front() {
        for &b in &adj[a] {
            let b = b as usize;
            if !seen_col[b] {
                seen_col[b] = true;
                let next = col_match[b] as usize;
                if !seen_row[next] {
                    seen_row[next] = true;
                    queue.push_back(next);
                }
            }
        }
    }
    let pick = |v: &[bool]| v.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| i).collect();
    MatchingOutcome::Deficient(HallWitness {
        rows: pick(&seen_row),
        neighbours: pick(&seen_col),
    })
}

const FREE: u32 = u32::MAX;

/// Maximum matching; returns `(column of each row, row of each column)`.
fn hopcroft_karp(m: usize, adj: &[Vec<u32>]) -> (Vec<u32>, Vec<u32>) {
    let mut row_match = vec![FREE; m];
    let mut col_match = vec![FREE; m];
    for a in 0..m {
        if let Some(&b) = adj[a].iter().find(|&&b| col_match[b as usize] == FREE) {
            row_match[a] = b;
            col_match[b as usize] = a as u32;
        }
    }
    let mut dist = vec![u32::MAX; m];
    let mut next_edge = vec![0usize; m];
    let mut queue = VecDeque::with_capacity(m);
    loop {
        // BFS layers from free rows
        queue.clear();
        for a in 0..m {
            if row_match[a] == FREE {
                dist[a] = 0;
                queue.push_back(a);
            } else {
                dist[a] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(a) = queue.pop_front() {
            for &b in &adj[a] {
                let owner = col_match[b as usize];
                if owner == FREE {
                    found = true;
                } else if dist[owner as usize] == u32::MAX {
                    dist[owner as usize] = dist[a] + 1;
                    queue.push_back(owner as usize);
                }
            }
        }
        if !found {
            break;
        }
        next_edge.iter_mut().for_each(|e| *e = 0);
        for a in 0..m {
            if row_match[a] == FREE {
                augment(a, adj, &mut dist, &mut next_edge, &mut row_match, &mut col_match);
            }
        }
    }
    (row_match, col_match)
}

fn augment(
    a: usize,
    adj: &[Vec<u32>],
    dist: &mut [u32],
    next_edge: &mut [usize],
    row_match: &mut [u32],
    col_match: &mut [u32],
) -> bool {
    while next_edge[a] < adj[a].len() {
        let b = adj[a][next_edge[a]] as usize;
        next_edge[a] += 1;
        let owner = col_match[b];
        let ok = owner == FREE
            || (dist[owner as usize] == dist[a] + 1
                && augment(owner as usize, adj, dist, next_edge, row_match, col_match));
        if ok {
            row_match[a] = b as u32;
            col_match[b] = a as u32;
            return true;
        }
    }
    dist[a] = u32::MAX;
    false
}

/// `k` pairwise disjoint perfect matchings whose union is a `k`-factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneFactorization {
    pub m: usize,
    /// `factors[i][a]` is the column of row `a` in the `i`-th matching.
    pub factors: Vec<Vec<usize>>,
}

impl OneFactorization {
    pub fn cells(&self, i: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.factors[i].iter().enumerate().map(|(a, &b)| (a, b))
    }
}

/// Splits `f` by peeling off one perfect matching at a time from the
/// residual graph, which stays regular after every extraction.
pub fn one_factorize(f: &BipartiteFactor) -> OneFactorization {
    let m = f.m();
    let mut residual: Vec<Vec<u32>> = f.rows.clone();
    let mut factors = Vec::with_capacity(f.r());
    for _ in 0..f.r() {
        let (row_match, _) = hopcroft_karp(m, &residual);
        let perm: Vec<usize> = row_match
            .iter()
            .map(|&b| {
                assert!(b != FREE, "regular bipartite graphs have perfect matchings");
                b as usize
            })
            .collect();
        for (a, &b) in perm.iter().enumerate() {
            let pos = residual[a]
                .binary_search(&(b as u32))
                .expect("matched edge is in the residual graph");
            residual[a].remove(pos);
        }
        factors.push(perm);
    }
    OneFactorization { m, factors }
}

/// Circulant `r`-regular point set on the index lists `xs × ys`: point
/// `(xs[a], ys[b])` is present iff `(b − a) mod q < r`, `q = |xs| = |ys|`.
pub fn circulant_factor(xs: &[u32], ys: &[u32], r: usize) -> Result<Vec<Point>, FactorError> {
    let q = xs.len();
    if ys.len() != q {
        return Err(FactorError::LengthMismatch { rows: ys.len(), cols: q });
    }
    if r > q {
        return Err(FactorError::RegularityOutOfRange { m: q, r });
    }
    let mut out = Vec::with_capacity(q * r);
    for (a, &x) in xs.iter().enumerate() {
        for s in 0..r {
            out.push(Point::new(x, ys[(a + s) % q]));
        }
    }
    Ok(out)
}
