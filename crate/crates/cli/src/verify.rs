use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use nkline::format::PointSetFile;
use nkline::secants::{verify, SweepMode};

use crate::Exit;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long = "in")]
    input: PathBuf,
    /// Line bound; defaults to the file's k.
    #[arg(long)]
    k: Option<u32>,
    /// Required generic-secant reserve.
    #[arg(long, default_value_t = 0)]
    reserve: u32,
    /// Sweep every direction instead of only those that could exceed k − reserve.
    #[arg(long)]
    exhaustive: bool,
}

pub fn run(a: Args) -> Result<Exit> {
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let file = PointSetFile::parse(&text).with_context(|| format!("parsing {}", a.input.display()))?;
    let k = a.k.unwrap_or(file.k);
    let mode = if a.exhaustive { SweepMode::Exhaustive } else { SweepMode::Threshold };
    let r = verify(&file.set, k, a.reserve, mode);
    println!("points: {}", file.set.len());
    println!("axis max: {}", r.axis_max);
    println!("generic max: {}", r.generic_max);
    println!("achieved reserve: {}", r.achieved_reserve);
    match r.worst_line {
        Some(l) => println!("worst line: {l} ({} points)", r.generic_max),
        None => println!("worst line: none"),
    }
    println!("directions swept: {}", r.per_direction_max.len());
    if r.passed() {
        println!("certified: k={k} reserve={}", r.certified_reserve().unwrap_or(a.reserve));
        Ok(Exit::Ok)
    } else {
        println!("not certified for k={k} reserve={}", a.reserve);
        Ok(Exit::Verification)
    }
}
