use anyhow::Result;
use nkline::bounds::{asymptotic_slope, compute_profile, feasible_k_range, smallest_feasible_n, BoundsParams};

use crate::Exit;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long)]
    n: u64,
    /// Success probability.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.8)]
    delta: f64,
    /// Target reserve.
    #[arg(long, default_value_t = 15)]
    h: u32,
    /// Blocks per side of the subgrid decomposition.
    #[arg(long, default_value_t = 4)]
    m: u32,
    #[arg(long = "K", default_value_t = 1.0)]
    k_const: f64,
    #[arg(long = "L", default_value_t = 1.0)]
    l_const: f64,
    /// Slope C of the lower end k ≥ C·sqrt(n ln n); defaults to the limit for m.
    #[arg(long = "C")]
    c_const: Option<f64>,
    /// Restrict the k-range to multiples of this step.
    #[arg(long)]
    step: Option<u64>,
}

pub fn run(a: Args) -> Result<Exit> {
    let params = BoundsParams {
        n: a.n,
        p: a.p,
        epsilon: a.epsilon,
        delta: a.delta,
        h: a.h,
        m: a.m,
        k_const: a.k_const,
        l_const: a.l_const,
    };
    let prof = compute_profile(params)?;
    let limit = asymptotic_slope(a.epsilon, a.delta, a.m);
    let c = a.c_const.unwrap_or(limit);
    println!("D1 = {:.12}", prof.d1);
    println!("D2 = {:.12}", prof.d2);
    println!("D3 = {:.12}", prof.d3);
    println!("n^epsilon = {:.6}", prof.kappa_min);
    println!("D3 / sqrt(n ln n) = {:.9}", prof.slope());
    println!("limiting slope = {limit:.9}");
    match feasible_k_range(a.n, c, a.step) {
        Some(r) => println!("feasible k for C={c:.6}: [{}, {}]", r.start(), r.end()),
        None => println!("feasible k for C={c:.6}: empty"),
    }
    println!("smallest n with a feasible k for C={c:.6}: {}", smallest_feasible_n(c, a.step));
    Ok(Exit::Ok)
}
