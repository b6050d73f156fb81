use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use nkline::secants::{asymptotic_census, census, richness_bound};

use crate::Exit;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long)]
    n: u32,
    /// Count secants with at least j grid points; accepts a comma list.
    #[arg(long, value_delimiter = ',', required_unless_present = "kappa", conflicts_with = "kappa")]
    j: Vec<u32>,
    /// Count secants with more than kappa grid points.
    #[arg(long)]
    kappa: Option<f64>,
    /// Also print count ÷ (6/π²)·n⁴/j³.
    #[arg(long)]
    ratio: bool,
    /// Constant of the richness bound printed with --kappa.
    #[arg(long = "L", default_value_t = 1.0)]
    l_const: f64,
    /// Write the rows to a CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

struct Row {
    j: u32,
    count: u64,
    asymptotic: f64,
}

pub fn run(a: Args) -> Result<Exit> {
    let js: Vec<u32> = match a.kappa {
        Some(kappa) if kappa.is_finite() && kappa >= 1.0 => vec![kappa.floor() as u32 + 1],
        Some(kappa) => bail!("kappa = {kappa} must be at least 1"),
        None => a.j.clone(),
    };
    let mut rows = Vec::with_capacity(js.len());
    for j in js {
        let row = census(a.n, j)?;
        rows.push(Row {
            j,
            count: row.count,
            asymptotic: asymptotic_census(a.n, j),
        });
    }
    for r in &rows {
        print!("n={} j={} count={}", a.n, r.j, r.count);
        if a.ratio {
            print!(" asymptotic={:.3} ratio={:.6}", r.asymptotic, r.count as f64 / r.asymptotic);
        }
        println!();
    }
    if let Some(kappa) = a.kappa {
        println!("richness bound L·n^4/kappa^3 = {:.3}", richness_bound(a.n, kappa, a.l_const));
    }
    if let Some(path) = &a.csv {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(["n", "j", "count", "asymptotic", "ratio"])?;
        for r in &rows {
            w.write_record([
                a.n.to_string(),
                r.j.to_string(),
                r.count.to_string(),
                format!("{:.6}", r.asymptotic),
                format!("{:.6}", r.count as f64 / r.asymptotic),
            ])?;
        }
        w.flush()?;
    }
    Ok(Exit::Ok)
}
