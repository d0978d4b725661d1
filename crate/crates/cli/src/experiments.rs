//! Batch experiments over grids of `(N, seed)`.
//!
//! Tasks run on the rayon pool and are collected in task order, and each
//! task derives its randomness from the base seed and its own index only, so
//! results do not depend on the thread count.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use tessel_core::bounds::{partition_diameter_constant, rip_bound_at};
use tessel_core::discrepancy::{l2_wedge_exact, l2_wedge_montecarlo, sup_wedge_lower};
use tessel_core::rng::{derive_seed, stream};
use tessel_core::sampling::{jittered_from_partition, random_set};
use tessel_core::{Method, Partition, PointSet};

use crate::error::{CliError, CliResult};

/// Seed of the point set for `(N, trial)`.
pub fn set_seed(base: u64, n: usize, trial: u64) -> u64 {
    derive_seed(derive_seed(base, n as u64), trial)
}

/// Seed for the search or Monte-Carlo stream attached to a set seed.
pub fn aux_seed(set_seed: u64) -> u64 {
    derive_seed(set_seed, u64::MAX)
}

/// Generates random or jittered sets with partitions shared across seeds.
pub struct Generator {
    method: Method,
    d: usize,
    partitions: Vec<(usize, Arc<Partition>)>,
}

impl Generator {
    pub fn new(method: Method, d: usize, ns: &[usize]) -> CliResult<Self> {
        let partitions = match method {
            Method::Jittered => ns
                .iter()
                .map(|&n| Ok((n, Arc::new(Partition::build(d, n)?))))
                .collect::<CliResult<Vec<_>>>()?,
            Method::Random => Vec::new(),
            other => return Err(CliError::Usage(format!("cannot generate sets with method {other:?}"))),
        };
        Ok(Generator { method, d, partitions })
    }

    pub fn generate(&self, n: usize, seed: u64) -> CliResult<PointSet> {
        match self.method {
            Method::Jittered => {
                let p = self
                    .partitions
                    .iter()
                    .find(|(m, _)| *m == n)
                    .map(|(_, p)| p)
                    .ok_or_else(|| CliError::Usage(format!("no partition prepared for N = {n}")))?;
                Ok(jittered_from_partition(p, seed)?)
            }
            _ => Ok(random_set(self.d, n, seed)?),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StolarskyRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    pub exact: f64,
    pub mc: f64,
    pub stderr: f64,
    pub zscore: f64,
}

/// Exact versus Monte-Carlo L² wedge discrepancy of random sets.
pub fn stolarsky_verify(d: usize, ns: &[usize], seeds: u64, m: usize, base: u64) -> CliResult<Vec<StolarskyRow>> {
    let tasks: Vec<(usize, u64)> = ns.iter().flat_map(|&n| (0..seeds).map(move |s| (n, s))).collect();
    tasks
        .par_iter()
        .map(|&(n, trial)| {
            let seed = set_seed(base, n, trial);
            let z = random_set(d, n, seed)?;
            let exact = l2_wedge_exact(&z)?;
            let mc = l2_wedge_montecarlo(&z, m, &mut stream(aux_seed(seed), 0))?;
            Ok(StolarskyRow {
                n,
                seed,
                exact,
                mc: mc.mean,
                stderr: mc.stderr,
                zscore: (mc.mean - exact) / mc.stderr,
            })
        })
        .collect()
}

pub const STOLARSKY_HEADER: &str = "N,seed,exact,mc,stderr,zscore";

pub fn stolarsky_csv(rows: &[StolarskyRow]) -> String {
    let mut out = format!("{STOLARSKY_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.16e},{:.16e},{:.16e},{:.6}\n",
            r.n, r.seed, r.exact, r.mc, r.stderr, r.zscore
        ));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    /// `K_d N^(-1-1/d)` for jittered sets, `(1/N)(1/2 - V_d)` for random sets.
    pub reference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Scaling {
    pub method: Method,
    pub d: usize,
    pub seeds: u64,
    pub rows: Vec<ScalingRow>,
    pub slope: f64,
    pub expected_slope: f64,
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Mean exact L² wedge discrepancy per `N` and its log–log slope.
pub fn scaling(method: Method, d: usize, ns: &[usize], seeds: u64, base: u64) -> CliResult<Scaling> {
    if ns.len() < 3 {
        return Err(CliError::Usage("scaling needs at least three values of N".into()));
    }
    if seeds < 2 {
        return Err(CliError::Usage("scaling needs at least two seeds".into()));
    }
    let gen = Generator::new(method, d, ns)?;
    let tasks: Vec<(usize, u64)> = ns.iter().flat_map(|&n| (0..seeds).map(move |s| (n, s))).collect();
    let values: Vec<f64> = tasks
        .par_iter()
        .map(|&(n, trial)| Ok(l2_wedge_exact(&gen.generate(n, set_seed(base, n, trial))?)?))
        .collect::<CliResult<_>>()?;
    let kd = partition_diameter_constant(d)?;
    let random_constant = 0.5 - tessel_core::sphere::second_moment(d)?;
    let rows: Vec<ScalingRow> = ns
        .iter()
        .zip(values.chunks(seeds as usize))
        .map(|(&n, v)| {
            let k = v.len() as f64;
            let mean = v.iter().sum::<f64>() / k;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
            let nf = n as f64;
            ScalingRow {
                n,
                mean,
                stderr: (var / k).sqrt(),
                reference: match method {
                    Method::Jittered => kd * nf.powf(-1.0 - 1.0 / d as f64),
                    _ => random_constant / nf,
                },
            }
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean).collect();
    Ok(Scaling {
        method,
        d,
        seeds,
        slope: loglog_slope(&xs, &ys),
        expected_slope: match method {
            Method::Jittered => -1.0 - 1.0 / d as f64,
            _ => -1.0,
        },
        rows,
    })
}

pub fn scaling_csv(s: &Scaling) -> String {
    let mut out = String::from("N,mean,stderr,reference\n");
    for r in &s.rows {
        out.push_str(&format!("{},{:.16e},{:.16e},{:.16e}\n", r.n, r.mean, r.stderr, r.reference));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SupRow {
    pub trial: u64,
    pub seed: u64,
    pub lower: f64,
    pub threshold: f64,
    pub below: bool,
}

/// Sup lower bounds for `seeds` sets against `C_d N^(-1/2-1/(2d)) sqrt(log N)`.
pub fn sup_trials(method: Method, d: usize, n: usize, seeds: u64, budget: usize, base: u64) -> CliResult<Vec<SupRow>> {
    let gen = Generator::new(method, d, &[n])?;
    let threshold = rip_bound_at(d, n as u64)?;
    (0..seeds)
        .into_par_iter()
        .map(|trial| {
            let seed = set_seed(base, n, trial);
            let z = gen.generate(n, seed)?;
            let lower = sup_wedge_lower(&z, budget, &mut stream(aux_seed(seed), 0))?.value;
            Ok(SupRow {
                trial,
                seed,
                lower,
                threshold,
                below: lower < threshold,
            })
        })
        .collect()
}
