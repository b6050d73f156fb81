//! Grid, point-set and line primitives.
//!
//! Points are 1-indexed: the grid of side `n` is `[1, n] × [1, n]`. A column
//! is the set of points with a fixed `x`, a row the set with a fixed `y`.

use std::fmt;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid side must be at least 1")]
    EmptyGrid,
    #[error("point ({x}, {y}) lies outside [1, {n}]^2")]
    OutOfRange { x: u32, y: u32, n: u32 },
    #[error("duplicate point ({x}, {y})")]
    Duplicate { x: u32, y: u32 },
    #[error("({vx}, {vy}) is not a primitive generic direction")]
    BadDirection { vx: i64, vy: i64 },
}

/// Side length of a square grid `[1, n]^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    n: u32,
}

impl GridSpec {
    pub fn new(n: u32) -> Result<Self, GridError> {
        if n == 0 {
            return Err(GridError::EmptyGrid);
        }
        Ok(GridSpec { n })
    }

    pub fn n(self) -> u32 {
        self.n
    }

    pub fn contains(self, x: i64, y: i64) -> bool {
        let n = self.n as i64;
        (1..=n).contains(&x) && (1..=n).contains(&y)
    }

    /// All grid points in row-major (`x`, then `y`) order.
    pub fn points(self) -> impl Iterator<Item = Point> {
        let n = self.n;
        (1..=n).flat_map(move |x| (1..=n).map(move |y| Point::new(x, y)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub const fn new(x: u32, y: u32) -> Self {
        Point { x, y }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A subset of the grid. Points are kept sorted by `(x, y)` next to a
/// membership bitmap, so both ordered iteration and `contains` are cheap.
#[derive(Clone, PartialEq, Eq)]
pub struct PointSet {
    grid: GridSpec,
    points: Vec<Point>,
    bits: Vec<u64>,
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointSet")
            .field("n", &self.grid.n)
            .field("len", &self.points.len())
            .finish()
    }
}

impl PointSet {
    pub fn empty(grid: GridSpec) -> Self {
        let n = grid.n as usize;
        PointSet {
            grid,
            points: Vec::new(),
            bits: vec![0; (n * n).div_ceil(64)],
        }
    }

    pub fn full(grid: GridSpec) -> Self {
        let mut s = Self::empty(grid);
        for p in grid.points() {
            s.set_bit(p);
            s.points.push(p);
        }
        s
    }

    /// Builds a set from arbitrary points, rejecting out-of-range and
    /// duplicate entries.
    pub fn new<I>(grid: GridSpec, points: I) -> Result<Self, GridError>
    where
        I: IntoIterator<Item = Point>,
    {
        let mut s = Self::empty(grid);
        for p in points {
            s.insert(p)?;
        }
        s.points.sort_unstable();
        Ok(s)
    }

    fn index(&self, p: Point) -> usize {
        (p.x as usize - 1) * self.grid.n as usize + (p.y as usize - 1)
    }

    fn set_bit(&mut self, p: Point) {
        let i = self.index(p);
        self.bits[i / 64] |= 1 << (i % 64);
    }

    fn insert(&mut self, p: Point) -> Result<(), GridError> {
        if !self.grid.contains(p.x as i64, p.y as i64) {
            return Err(GridError::OutOfRange {
                x: p.x,
                y: p.y,
                n: self.grid.n,
            });
        }
        if self.contains(p) {
            return Err(GridError::Duplicate { x: p.x, y: p.y });
        }
        self.set_bit(p);
        self.points.push(p);
        Ok(())
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn n(&self) -> u32 {
        self.grid.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: Point) -> bool {
        if !self.grid.contains(p.x as i64, p.y as i64) {
            return false;
        }
        let i = self.index(p);
        self.bits[i / 64] & (1 << (i % 64)) != 0
    }

    /// Points in ascending `(x, y)` order.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = Point> + '_ {
        self.points.iter().copied()
    }

    /// Point count per column, indexed by `x - 1`.
    pub fn column_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.grid.n as usize];
        for p in &self.points {
            c[p.x as usize - 1] += 1;
        }
        c
    }

    /// Point count per row, indexed by `y - 1`.
    pub fn row_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.grid.n as usize];
        for p in &self.points {
            c[p.y as usize - 1] += 1;
        }
        c
    }

    /// `Some(k)` when every row and every column holds exactly `k` points.
    pub fn regularity(&self) -> Option<usize> {
        let cols = self.column_counts();
        let k = cols[0];
        let uniform = |v: &[usize]| v.iter().all(|&c| c == k);
        (uniform(&cols) && uniform(&self.row_counts())).then_some(k)
    }

    /// Set difference `self \ other` on the same grid.
    pub fn difference(&self, other: &PointSet) -> PointSet {
        let kept = self.iter().filter(|&p| !other.contains(p));
        PointSet::new(self.grid, kept).expect("subset of a valid set")
    }
}

/// Primitive direction `(vx, vy)` of a generic (non-axis) line, normalised to
/// `vx > 0`, `vy != 0` and `gcd(vx, |vy|) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Direction {
    vx: i64,
    vy: i64,
}

impl Direction {
    pub fn new(vx: i64, vy: i64) -> Result<Self, GridError> {
        if vx <= 0 || vy == 0 || vx.gcd(&vy) != 1 {
            return Err(GridError::BadDirection { vx, vy });
        }
        Ok(Direction { vx, vy })
    }

    /// Direction of the line through two distinct points, or `None` when
    /// they share a row or column.
    pub fn through(a: Point, b: Point) -> Option<Self> {
        let mut dx = b.x as i64 - a.x as i64;
        let mut dy = b.y as i64 - a.y as i64;
        if dx == 0 || dy == 0 {
            return None;
        }
        if dx < 0 {
            dx = -dx;
            dy = -dy;
        }
        let g = dx.gcd(&dy);
        Some(Direction {
            vx: dx / g,
            vy: dy / g,
        })
    }

    pub fn vx(self) -> i64 {
        self.vx
    }

    pub fn vy(self) -> i64 {
        self.vy
    }

    pub fn modulus(self) -> i64 {
        self.vx.max(self.vy.abs())
    }

    /// `vy·x − vx·y`, constant along every line of this direction.
    pub fn intercept(self, p: Point) -> i64 {
        self.vy * p.x as i64 - self.vx * p.y as i64
    }

    /// Inclusive range of intercepts taken over the grid of side `n`.
    pub fn intercept_range(self, n: u32) -> (i64, i64) {
        let n = n as i64;
        if self.vy > 0 {
            (self.vy - self.vx * n, self.vy * n - self.vx)
        } else {
            ((self.vy - self.vx) * n, self.vy - self.vx)
        }
    }

    /// All primitive directions of modulus exactly `m`, ordered by `vx`,
    /// then `|vy|`, positive slope first.
    pub fn with_modulus(m: i64) -> Vec<Direction> {
        let mut out = Vec::new();
        for vx in 1..=m {
            let vys: Box<dyn Iterator<Item = i64>> = if vx == m {
                Box::new(1..=m)
            } else {
                Box::new(std::iter::once(m))
            };
            for a in vys {
                if vx.gcd(&a) == 1 {
                    out.push(Direction { vx, vy: a });
                    out.push(Direction { vx, vy: -a });
                }
            }
        }
        out
    }

    /// Upper bound on the grid points of any line with this direction.
    pub fn max_points(self, n: u32) -> usize {
        ((n as i64 - 1) / self.modulus()) as usize + 1
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.vx, self.vy)
    }
}

/// A generic line, identified by its direction and intercept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Line {
    pub direction: Direction,
    pub intercept: i64,
}

impl Line {
    pub fn new(direction: Direction, intercept: i64) -> Self {
        Line {
            direction,
            intercept,
        }
    }

    pub fn through(a: Point, b: Point) -> Option<Self> {
        let d = Direction::through(a, b)?;
        Some(Line::new(d, d.intercept(a)))
    }

    pub fn contains(&self, p: Point) -> bool {
        self.direction.intercept(p) == self.intercept
    }

    /// The grid points lying on this line, by increasing `x`.
    pub fn grid_points(self, grid: GridSpec) -> impl Iterator<Item = Point> {
        let Direction { vx, vy } = self.direction;
        let c = self.intercept;
        (1..=grid.n() as i64).filter_map(move |x| {
            let num = vy * x - c;
            if num % vx != 0 {
                return None;
            }
            let y = num / vx;
            grid.contains(x, y).then(|| Point::new(x as u32, y as u32))
        })
    }

    pub fn count_in(&self, set: &PointSet) -> usize {
        self.grid_points(set.grid())
            .filter(|&p| set.contains(p))
            .count()
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}*x - {}*y = {}",
            self.direction.vy, self.direction.vx, self.intercept
        )
    }
}
