//! Explicit constants and size bounds for jittered one-bit tessellations.

// Unused only when a std build of the crate provides inherent float math.
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::sphere::{omega_ratio, surface_area};
use crate::Result;

/// Absolute constant in the approximating-family cardinality bound.
pub const NET_CONSTANT: f64 = 82.0;

/// Absolute constant in the closed form of the `N(d, delta)` upper bound.
pub const N_UPPER_CONSTANT: f64 = 4000.0;

/// Constant of the intermediate (proof) form of the `N(d, delta)` bound.
pub const N_UPPER_PROOF_CONSTANT: f64 = 400.0;

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(invalid("d", alloc::format!("bounds need d >= 2, got {d}")));
    }
    Ok(())
}

/// Diameter constant of regular partitions, `K_d = 8 (Omega d / omega)^(1/d)`.
pub fn partition_diameter_constant(d: usize) -> Result<f64> {
    check_d(d)?;
    let r = omega_ratio(d)?;
    Ok(8.0 * (d as f64 / r).powf(1.0 / d as f64))
}

/// `C_d = 20 d^(3/4 + 1/(4d))`, valid for `N >= 100 d`.
pub fn wedge_cd(d: usize) -> Result<f64> {
    check_d(d)?;
    let df = d as f64;
    Ok(20.0 * df.powf(0.75 + 0.25 / df))
}

/// Chernoff–Hoeffding tail `2 exp(-2 lambda^2 / m)` for a sum of `m`
/// centered Bernoulli variables.
pub fn hoeffding_tail(m: usize, lambda: f64) -> Result<f64> {
    if m < 1 {
        return Err(invalid("m", "need at least one summand"));
    }
    if !(lambda > 0.0) {
        return Err(invalid("lambda", "must be positive"));
    }
    Ok(2.0 * (-2.0 * lambda * lambda / m as f64).exp())
}

/// Bound on the number of cells of a regular partition meeting the boundary
/// of a wedge: `64 d^(1/d) (omega/Omega)^(1 - 1/d) N^(1 - 1/d)`.
pub fn boundary_cell_bound(d: usize, n: usize) -> Result<f64> {
    check_d(d)?;
    if n < 1 {
        return Err(invalid("N", "must be at least 1"));
    }
    let df = d as f64;
    let e = 1.0 - 1.0 / df;
    Ok(64.0 * df.powf(1.0 / df) * omega_ratio(d)?.powf(e) * (n as f64).powf(e))
}

/// Deviation threshold `lambda = sqrt(alpha_d M) sqrt(log N)` of the union
/// bound.
pub fn lambda_plan(alpha_d: usize, m: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid("N", "need N >= 2 so that log N > 0"));
    }
    if !(m > 0.0) {
        return Err(invalid("M", "must be positive"));
    }
    Ok((alpha_d as f64 * m).sqrt() * (n as f64).ln().sqrt())
}

/// Cardinality bound `(82 d)^(d+1) eps^(-2(d+1))` of the approximating family.
pub fn net_cardinality_bound(d: usize, epsilon: f64) -> Result<f64> {
    check_d(d)?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(invalid("epsilon", "must lie in (0, 1]"));
    }
    let e = (d + 1) as f64;
    Ok((NET_CONSTANT * d as f64).powf(e) * epsilon.powf(-2.0 * e))
}

/// `C_d N^(-1/2 - 1/(2d)) sqrt(log N)`: the wedge discrepancy achieved by
/// jittered sampling with positive probability.
pub fn rip_bound_at(d: usize, n: u64) -> Result<f64> {
    if n < 2 {
        return Err(invalid("N", "need N >= 2"));
    }
    let df = d as f64;
    let nf = n as f64;
    Ok(wedge_cd(d)? * nf.powf(-0.5 - 0.5 / df) * nf.ln().sqrt())
}

/// The size bounds for a `delta`-uniform tessellation of `S^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NUpper {
    /// `100 d`.
    pub floor: u64,
    /// `400 d^g delta^(-2d/(d+1)) ((d+1) log(400 d^g) + 2d log(1/delta))^(d/(d+1))`,
    /// `g = 3/2 - 1/(d+1)`, rounded up.
    pub proof_form: u64,
    /// `4000 d^a delta^(-2 + 2/(d+1)) (1 + log d + log(1/delta))^(d/(d+1))`,
    /// `a = 5/2 - 2/(d+1)`, rounded up.
    pub final_form: u64,
    /// Smallest `N >= max(floor, proof_form, final_form)` with
    /// `rip_bound_at(d, N) < delta`.
    pub n: u64,
    /// `rip_bound_at(d, n)`.
    pub rip_bound: f64,
    pub check: bool,
}

fn proof_form(d: usize, delta: f64) -> f64 {
    let df = d as f64;
    let g = 1.5 - 1.0 / (df + 1.0);
    let lead = N_UPPER_PROOF_CONSTANT * df.powf(g);
    let inner = (df + 1.0) * lead.ln() + 2.0 * df * (1.0 / delta).ln();
    lead * delta.powf(-2.0 * df / (df + 1.0)) * inner.powf(df / (df + 1.0))
}

fn final_form(d: usize, delta: f64) -> f64 {
    let df = d as f64;
    let a = 2.5 - 2.0 / (df + 1.0);
    let inner = 1.0 + df.ln() + (1.0 / delta).ln();
    N_UPPER_CONSTANT * df.powf(a) * delta.powf(-2.0 + 2.0 / (df + 1.0)) * inner.powf(df / (df + 1.0))
}

/// Smallest `n >= start` with `rip_bound_at(d, n) < delta`; the bound is
/// decreasing for `n >= 3`.
fn first_passing(d: usize, delta: f64, start: u64) -> Result<u64> {
    let start = start.max(3);
    if rip_bound_at(d, start)? < delta {
        return Ok(start);
    }
    let mut hi = start;
    while rip_bound_at(d, hi)? >= delta {
        hi = hi.checked_mul(2).ok_or_else(|| invalid("delta", "too small"))?;
    }
    let mut lo = hi / 2; // fails
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if rip_bound_at(d, mid)? < delta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Upper bounds on the number of hyperplanes needed for a `delta`-RIP
/// sign-linear map of `S^d`.
pub fn n_upper(d: usize, delta: f64) -> Result<NUpper> {
    check_d(d)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", "must lie in (0, 1)"));
    }
    let floor = 100 * d as u64;
    let proof = proof_form(d, delta).ceil() as u64;
    let fin = final_form(d, delta).ceil() as u64;
    let n = first_passing(d, delta, floor.max(proof).max(fin))?;
    let rip_bound = rip_bound_at(d, n)?;
    Ok(NUpper {
        floor,
        proof_form: proof,
        final_form: fin,
        n,
        rip_bound,
        check: rip_bound < delta,
    })
}

/// All explicit constants for one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsTable {
    pub d: usize,
    pub omega_big: f64,
    pub omega_small: f64,
    pub ratio: f64,
    #[serde(rename = "K_d")]
    pub k_d: f64,
    #[serde(rename = "C_d")]
    pub c_d: f64,
    /// Exponent of the approximating-family size, `2(d+1)`.
    pub alpha_d: usize,
    /// Prefactor of the approximating-family size, `(82 d)^(d+1)`.
    #[serde(rename = "A_d")]
    pub a_d: f64,
    /// Dimension exponent of the closed-form size bound, `5/2 - 2/(d+1)`.
    pub alpha: f64,
    /// Dimension exponent of the proof-form size bound, `3/2 - 1/(d+1)`.
    pub gamma_exp: f64,
}

impl BoundsTable {
    pub fn new(d: usize) -> Result<Self> {
        check_d(d)?;
        let df = d as f64;
        Ok(BoundsTable {
            d,
            omega_big: surface_area(d)?,
            omega_small: surface_area(d - 1)?,
            ratio: omega_ratio(d)?,
            k_d: partition_diameter_constant(d)?,
            c_d: wedge_cd(d)?,
            alpha_d: 2 * (d + 1),
            a_d: (NET_CONSTANT * df).powf(df + 1.0),
            alpha: 2.5 - 2.0 / (df + 1.0),
            gamma_exp: 1.5 - 1.0 / (df + 1.0),
        })
    }
}
