use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::ValueEnum;
use nkline::bounds::asymptotic_slope;
use nkline::construct::{
    biuniform_construct, certify_explicit, pipeline, BiUniformConfig, BiUniformFailure,
    BiUniformOutcome, ConstructError, ConstructionCertificate, ConstructionMode, MatrixKind,
    PipelineConfig, Step,
};
use nkline::feasibility::{max_expected_load, SubgridDecomposition};
use nkline::format::PointSetFile;
use nkline::{Execution, GridSpec};

use crate::Exit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Auto,
    Explicit,
    Biuniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Matrix {
    Paper4,
    Remark3,
}

impl From<Matrix> for MatrixKind {
    fn from(m: Matrix) -> Self {
        match m {
            Matrix::Paper4 => MatrixKind::Paper4,
            Matrix::Remark3 => MatrixKind::Remark3,
        }
    }
}

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    #[arg(long, value_enum, default_value = "auto")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bi-uniform samples to draw before giving up.
    #[arg(long, default_value_t = 64)]
    retries: u32,
    /// Target generic-secant reserve for the bi-uniform stage.
    #[arg(long, default_value_t = 15)]
    reserve: u32,
    #[arg(long, value_enum, default_value = "paper4")]
    matrix: Matrix,
    /// Enforce the asymptotic hypotheses (n ≥ 68, k ≥ C·sqrt(n ln n)).
    #[arg(long)]
    strict: bool,
    /// Constant C for --strict; defaults to the limiting slope of the chosen matrix.
    #[arg(long = "C")]
    c_const: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

pub fn sidecar(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".report.txt");
    PathBuf::from(s)
}

pub fn run(a: Args) -> Result<Exit> {
    if a.k == 0 || a.k > a.n {
        anyhow::bail!("need 1 <= k <= n, got n={} k={}", a.n, a.k);
    }
    let started = Instant::now();
    let matrix = MatrixKind::from(a.matrix);
    let result = match a.mode {
        Mode::Explicit => certify_explicit(a.n, a.k, Execution::default()),
        Mode::Biuniform => run_biuniform(&a, matrix),
        Mode::Auto => pipeline(
            a.n,
            a.k,
            PipelineConfig {
                seed: a.seed,
                retries: a.retries,
                matrix,
                strict: a.strict,
                c_const: a.c_const.unwrap_or_else(|| asymptotic_slope(0.5, 0.8, matrix.m())),
                target_reserve: a.reserve,
                steps: None,
                exec: Execution::default(),
            },
        ),
    };
    let report_path = sidecar(&a.out);
    match result {
        Ok(cert) => {
            let reserve = cert
                .report
                .certified_reserve()
                .context("certificate did not pass verification")?;
            let file = PointSetFile {
                set: cert.set.clone(),
                k: cert.k,
                reserve: Some(reserve),
                seed: cert.seed,
            };
            fs::write(&a.out, file.serialize()).with_context(|| format!("writing {}", a.out.display()))?;
            let text = success_report(&cert, reserve, started.elapsed().as_secs_f64());
            fs::write(&report_path, &text).with_context(|| format!("writing {}", report_path.display()))?;
            print!("{text}");
            Ok(Exit::Ok)
        }
        Err(ConstructError::RetriesExhausted(f)) => {
            let text = failure_report(&a, &f, started.elapsed().as_secs_f64());
            fs::write(&report_path, &text).with_context(|| format!("writing {}", report_path.display()))?;
            eprint!("{text}");
            Ok(Exit::Construction)
        }
        Err(
            e @ (ConstructError::Parameters(_)
            | ConstructError::Matrix(_)
            | ConstructError::Strict(_)
            | ConstructError::ReserveChain { .. }),
        ) => Err(e.into()),
        Err(e) => {
            eprintln!("construction failed: {e}");
            Ok(Exit::Construction)
        }
    }
}

fn run_biuniform(a: &Args, matrix: MatrixKind) -> Result<ConstructionCertificate, ConstructError> {
    let r = matrix.build(a.n, a.k)?;
    let dec = SubgridDecomposition::new(GridSpec::new(a.n)?, r.m())?;
    let load = max_expected_load(&r, &dec)?.value;
    let cfg = BiUniformConfig::new(a.seed, a.retries, a.reserve);
    match biuniform_construct(a.n, a.k, &r, cfg)? {
        BiUniformOutcome::Certified(s) => Ok(ConstructionCertificate {
            n: a.n,
            k: a.k,
            mode: ConstructionMode::BiUniform,
            seed: Some(a.seed),
            retries_used: s.retries_used,
            lineage: vec![Step::BiUniform {
                n: a.n,
                k: a.k,
                matrix: matrix.name().to_string(),
                max_expected_load: load,
                target_reserve: a.reserve,
                achieved_reserve: s.report.achieved_reserve,
                retries_used: s.retries_used,
            }],
            set: s.set,
            report: s.report,
        }),
        BiUniformOutcome::Exhausted(f) => Err(ConstructError::RetriesExhausted(Box::new(f))),
    }
}

fn success_report(cert: &ConstructionCertificate, reserve: u32, secs: f64) -> String {
    let mut s = String::new();
    let seed = cert.seed.map_or("none".to_string(), |v| v.to_string());
    writeln!(s, "status: certified").unwrap();
    writeln!(s, "mode: {}", cert.mode).unwrap();
    writeln!(s, "n: {}  k: {}  points: {}  seed: {seed}", cert.n, cert.k, cert.set.len()).unwrap();
    writeln!(s, "lineage:").unwrap();
    for (i, step) in cert.lineage.iter().enumerate() {
        writeln!(s, "  {}. {step}", i + 1).unwrap();
    }
    writeln!(s, "axis max: {}", cert.report.axis_max).unwrap();
    writeln!(s, "generic max: {}", cert.report.generic_max).unwrap();
    if let Some(l) = cert.report.worst_line {
        writeln!(s, "worst line: {l}").unwrap();
    }
    writeln!(s, "achieved reserve: {reserve}").unwrap();
    writeln!(s, "retries used: {}", cert.retries_used).unwrap();
    writeln!(s, "wall time: {secs:.3} s").unwrap();
    s
}

fn failure_report(a: &Args, f: &BiUniformFailure, secs: f64) -> String {
    let mut s = String::new();
    writeln!(s, "status: retries exhausted").unwrap();
    writeln!(s, "n: {}  k: {}  seed: {}", a.n, a.k, a.seed).unwrap();
    writeln!(s, "target reserve: {}", a.reserve).unwrap();
    writeln!(s, "best achieved reserve: {}", f.best_report.achieved_reserve).unwrap();
    if let Some(l) = f.best_report.worst_line {
        writeln!(s, "best attempt worst line: {l} ({} points)", f.best_report.generic_max).unwrap();
    }
    let reserves: Vec<String> = f.attempt_reserves.iter().map(|h| h.to_string()).collect();
    writeln!(s, "attempt reserves: {}", reserves.join(" ")).unwrap();
    writeln!(s, "retries used: {}", f.attempt_reserves.len()).unwrap();
    writeln!(s, "wall time: {secs:.3} s").unwrap();
    s
}
