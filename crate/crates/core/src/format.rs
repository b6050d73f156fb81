//! The `nkline v1` text format.
//!
//! ```text
//! nkline v1
//! n=<n> k=<k> reserve=<h|unknown> seed=<seed|none>
//! x y
//! ...
//! ```
//!
//! Body lines are 1-indexed points sorted ascending by `(x, y)`. A file with
//! a numeric reserve claims certification and must hold exactly `k·n` points.

use std::fmt::Write as _;

use thiserror::Error;

use crate::grid::{GridSpec, Point, PointSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError {
        line,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSetFile {
    pub set: PointSet,
    pub k: u32,
    pub reserve: Option<u32>,
    pub seed: Option<u64>,
}

impl PointSetFile {
    pub fn serialize(&self) -> String {
        let mut out = String::with_capacity(16 + self.set.len() * 8);
        out.push_str("nkline v1\n");
        let reserve = self.reserve.map_or("unknown".to_string(), |h| h.to_string());
        let seed = self.seed.map_or("none".to_string(), |s| s.to_string());
        writeln!(out, "n={} k={} reserve={reserve} seed={seed}", self.set.n(), self.k).unwrap();
        for p in self.set.iter() {
            writeln!(out, "{} {}", p.x, p.y).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut lines = text.split_terminator('\n').enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, "nkline v1")) => {}
            Some((i, other)) => return err(i, format!("expected `nkline v1`, found `{other}`")),
            None => return err(1, "empty file"),
        }
        let Some((hl, header)) = lines.next() else {
            return err(2, "missing header line");
        };
        let fields: Vec<&str> = header.split(' ').collect();
        let field = |idx: usize, key: &str| -> Result<&str, FormatError> {
            match fields.get(idx).and_then(|f| f.strip_prefix(key)?.strip_prefix('=')) {
                Some(v) => Ok(v),
                None => err(hl, format!("expected field `{key}=` in position {}", idx + 1)),
            }
        };
        if fields.len() != 4 {
            return err(hl, format!("expected 4 header fields, found {}", fields.len()));
        }
        let num = |v: &str, key: &str| -> Result<u64, FormatError> {
            v.parse().or_else(|_| err(hl, format!("bad value `{v}` for {key}")))
        };
        let n = num(field(0, "n")?, "n")?;
        let k = num(field(1, "k")?, "k")?;
        let reserve = match field(2, "reserve")? {
            "unknown" => None,
            v => Some(num(v, "reserve")?),
        };
        let seed = match field(3, "seed")? {
            "none" => None,
            v => Some(num(v, "seed")?),
        };
        let narrow = |v: u64, key: &str| -> Result<u32, FormatError> {
            u32::try_from(v).or_else(|_| err(hl, format!("{key} = {v} is too large")))
        };
        let n = narrow(n, "n")?;
        let k = narrow(k, "k")?;
        let reserve = reserve.map(|h| narrow(h, "reserve")).transpose()?;
        let grid = GridSpec::new(n).or_else(|e| err(hl, e.to_string()))?;

        let mut points = Vec::new();
        let mut last_line = hl;
        for (i, line) in lines {
            last_line = i;
            let mut parts = line.split(' ');
            let (Some(xs), Some(ys), None) = (parts.next(), parts.next(), parts.next()) else {
                return err(i, format!("expected `x y`, found `{line}`"));
            };
            let (Ok(x), Ok(y)) = (xs.parse::<u32>(), ys.parse::<u32>()) else {
                return err(i, format!("expected two integers, found `{line}`"));
            };
            if !grid.contains(x as i64, y as i64) {
                return err(i, format!("point ({x}, {y}) outside [1, {n}]^2"));
            }
            let p = Point::new(x, y);
            match points.last() {
                Some(&q) if q == p => return err(i, format!("duplicate point {p}")),
                Some(&q) if q > p => return err(i, format!("point {p} out of order after {q}")),
                _ => {}
            }
            points.push(p);
        }
        if reserve.is_some() && points.len() as u64 != k as u64 * n as u64 {
            return err(
                last_line + 1,
                format!("certified file needs {} points, found {}", k as u64 * n as u64, points.len()),
            );
        }
        let set = PointSet::new(grid, points).or_else(|e| err(last_line, e.to_string()))?;
        Ok(PointSetFile { set, k, reserve, seed })
    }
}
