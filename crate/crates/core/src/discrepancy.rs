//! Discrepancy of a point set with respect to wedges, caps and slices.
//!
//! The L² wedge discrepancy is exact through the energy identity
//! `||Delta_Z||² = wedge_energy(Z) - (V_d - 1/4)`, and the L² cap discrepancy
//! through `D² = c_d (U_d - mean |z_i - z_j|)`. The sup wedge discrepancy is
//! bracketed: [`sup_wedge_lower`] evaluates `|Delta_Z|` at searched pairs,
//! [`sup_wedge_net_upper`] bounds it over a finite approximating family.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use hashbrown::HashMap;
// Unused only when a std build of the crate provides inherent float math.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::energy::wedge_energy;
use crate::error::invalid;
use crate::onebit::{wedge_count_flat, PointSet, Wedge};
use crate::partition::Partition;
use crate::quad::integrate_with_breaks;
use crate::sphere::{
    distance_from_dot, dot, mean_distance, norm, omega_ratio, polar_cap_measure_with,
    second_moment, uniform_into, Point,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Wedge,
    Cap,
    Slice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    ExactStolarsky,
    MonteCarlo,
    SupLower,
    SupNetUpper,
}

/// The test set at which a reported value is attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Wedge { x: Point, y: Point },
    Cap { center: Point, height: f64 },
    Slice { x: Point, y: Point },
}

impl Region {
    pub fn into_wedge(self) -> Option<Wedge> {
        match self {
            Region::Wedge { x, y } => Wedge::new(x, y).ok(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub family: Family,
    pub mode: Mode,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Region>,
}

impl DiscrepancyReport {
    pub fn exact(family: Family, value: f64) -> Self {
        DiscrepancyReport {
            family,
            mode: Mode::ExactStolarsky,
            value,
            stderr: None,
            samples: None,
            witness: None,
        }
    }

    pub fn monte_carlo(family: Family, estimate: MonteCarlo) -> Self {
        DiscrepancyReport {
            family,
            mode: Mode::MonteCarlo,
            value: estimate.mean,
            stderr: Some(estimate.stderr),
            samples: Some(estimate.samples),
            witness: None,
        }
    }
}

/// A sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

// Welford accumulator.
#[derive(Default)]
struct Running {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Running {
    fn push(&mut self, v: f64) {
        self.n += 1;
        let delta = v - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (v - self.mean);
    }

    fn finish(&self) -> MonteCarlo {
        let var = self.m2 / (self.n - 1) as f64;
        MonteCarlo {
            mean: self.mean,
            stderr: (var / self.n as f64).sqrt(),
            samples: self.n,
        }
    }
}

fn check_samples(m: usize) -> Result<()> {
    if m < 2 {
        return Err(invalid("M", "need at least two Monte-Carlo samples"));
    }
    Ok(())
}

/// `||Delta_Z||²` from the energy identity; `d >= 2`.
pub fn l2_wedge_exact(z: &PointSet) -> Result<f64> {
    Ok(wedge_energy(z) - (second_moment(z.d)? - 0.25))
}

/// Mean of `Delta_Z(x, y)²` over `m` independent uniform pairs.
pub fn l2_wedge_montecarlo<R: Rng + ?Sized>(z: &PointSet, m: usize, rng: &mut R) -> Result<MonteCarlo> {
    check_samples(m)?;
    let dim = z.d + 1;
    let flat = z.flat();
    let n = z.len() as f64;
    let (mut x, mut y) = (vec![0.0; dim], vec![0.0; dim]);
    let mut acc = Running::default();
    for _ in 0..m {
        uniform_into(&mut x, rng);
        uniform_into(&mut y, rng);
        let dl = wedge_count_flat(&flat, dim, &x, &y) as f64 / n - distance_from_dot(dot(&x, &y));
        acc.push(dl * dl);
    }
    Ok(acc.finish())
}

/// Mean pairwise Euclidean distance `(1/N²) sum_{i,j} |z_i - z_j|`.
pub fn mean_chord(z: &PointSet) -> f64 {
    let n = z.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let t = z.points[i].dot(&z.points[j]).clamp(-1.0, 1.0);
            s += (2.0 - 2.0 * t).sqrt();
        }
    }
    2.0 * s / (n * n) as f64
}

/// L² cap discrepancy `c_d (U_d - mean |z_i - z_j|)`; `d >= 2`.
pub fn l2_cap_exact(z: &PointSet) -> Result<f64> {
    let c_d = omega_ratio(z.d)? / z.d as f64;
    Ok(c_d * (mean_distance(z.d)? - mean_chord(z)))
}

/// Monte-Carlo estimate of
/// `int_{-1}^{1} int (#{z_k . x >= t}/N - sigma(C(x, t)))² dsigma(x) dt`.
pub fn l2_cap_montecarlo<R: Rng + ?Sized>(z: &PointSet, m: usize, rng: &mut R) -> Result<MonteCarlo> {
    check_samples(m)?;
    let (d, dim) = (z.d, z.d + 1);
    let ratio = omega_ratio(d)?;
    let flat = z.flat();
    let n = z.len() as f64;
    let mut x = vec![0.0; dim];
    let mut acc = Running::default();
    for _ in 0..m {
        uniform_into(&mut x, rng);
        let t: f64 = rng.random_range(-1.0..=1.0);
        let count = flat.chunks_exact(dim).filter(|p| dot(p, &x) >= t).count();
        let dl = count as f64 / n - polar_cap_measure_with(t.acos(), d, ratio);
        acc.push(2.0 * dl * dl);
    }
    Ok(acc.finish())
}

/// Monte-Carlo estimate of the mean squared slice discrepancy over uniform
/// pairs; slices `{z : x . z > 0 > y . z}` have measure `d(x, y)/2`.
pub fn l2_slice_montecarlo<R: Rng + ?Sized>(z: &PointSet, m: usize, rng: &mut R) -> Result<MonteCarlo> {
    check_samples(m)?;
    let dim = z.d + 1;
    let flat = z.flat();
    let n = z.len() as f64;
    let (mut x, mut y) = (vec![0.0; dim], vec![0.0; dim]);
    let mut acc = Running::default();
    for _ in 0..m {
        uniform_into(&mut x, rng);
        uniform_into(&mut y, rng);
        let count = flat
            .chunks_exact(dim)
            .filter(|p| dot(p, &x) > 0.0 && dot(p, &y) < 0.0)
            .count();
        let dl = count as f64 / n - 0.5 * distance_from_dot(dot(&x, &y));
        acc.push(dl * dl);
    }
    Ok(acc.finish())
}

fn normalize_in_place(v: &mut [f64]) {
    let n = norm(v);
    v.iter_mut().for_each(|c| *c /= n);
}

/// A uniformly random unit vector orthogonal to the unit vector `p`.
fn random_tangent<R: Rng + ?Sized>(p: &[f64], rng: &mut R, out: &mut [f64]) {
    loop {
        for c in out.iter_mut() {
            *c = rng.sample(StandardNormal);
        }
        let t = dot(out, p);
        out.iter_mut().zip(p).for_each(|(o, q)| *o -= t * q);
        if norm(out) > 1e-8 {
            normalize_in_place(out);
            return;
        }
    }
}

// out = normalize(u + a p)
fn tilt(u: &[f64], p: &[f64], a: f64, out: &mut [f64]) {
    out.iter_mut()
        .zip(u.iter().zip(p))
        .for_each(|(o, (ui, pi))| *o = ui + a * pi);
    normalize_in_place(out);
}

struct Search<'a> {
    flat: &'a [f64],
    dim: usize,
    n: f64,
}

impl Search<'_> {
    fn delta(&self, x: &[f64], y: &[f64]) -> f64 {
        wedge_count_flat(self.flat, self.dim, x, y) as f64 / self.n - distance_from_dot(dot(x, y))
    }
}

const STEP_MIN: f64 = 1e-6;
const STEP_MAX: f64 = 0.5;
const STEP_RESET: f64 = 0.1;

/// A lower bound on `sup |Delta_Z|`: the largest `|Delta_Z(x, y)|` found in
/// `budget` evaluations.
///
/// Evaluations cycle through four kinds: a uniform random pair, a pair whose
/// wedge boundary passes close to one or two points of `Z`, and two local
/// refinements of the best pair so far. The random draws do not depend on
/// `budget`, so a larger budget extends the same sequence and never returns
/// a smaller value.
pub fn sup_wedge_lower<R: Rng + ?Sized>(z: &PointSet, budget: usize, rng: &mut R) -> Result<DiscrepancyReport> {
    if budget < 1 {
        return Err(invalid("budget", "need at least one evaluation"));
    }
    let dim = z.d + 1;
    let flat = z.flat();
    let search = Search {
        flat: &flat,
        dim,
        n: z.len() as f64,
    };
    let (mut x, mut y) = (vec![0.0; dim], vec![0.0; dim]);
    let (mut u, mut v) = (vec![0.0; dim], vec![0.0; dim]);
    let (mut best_x, mut best_y) = (vec![0.0; dim], vec![0.0; dim]);
    let mut best = -1.0;
    let mut step = STEP_RESET;
    let (ln_lo, ln_hi) = (1e-4f64.ln(), 0.5f64.ln());
    let pick = |rng: &mut R| {
        let k = rng.random_range(0..z.len());
        &flat[k * dim..(k + 1) * dim]
    };

    for i in 0..budget {
        match i % 4 {
            0 => {
                uniform_into(&mut x, rng);
                uniform_into(&mut y, rng);
            }
            1 => {
                let p = pick(rng);
                let a = rng.random_range(ln_lo..ln_hi).exp();
                random_tangent(p, rng, &mut u);
                match rng.random_range(0..3u8) {
                    // a thin wedge around p
                    0 => {
                        tilt(&u, p, a, &mut x);
                        tilt(&u, p, -a, &mut y);
                    }
                    // a nearly full wedge leaving p out
                    1 => {
                        tilt(&u, p, a, &mut x);
                        tilt(&u, p, -a, &mut y);
                        y.iter_mut().for_each(|c| *c = -*c);
                    }
                    // both boundaries near points of Z
                    _ => {
                        let q = pick(rng);
                        random_tangent(q, rng, &mut v);
                        let b = rng.random_range(ln_lo..ln_hi).exp();
                        let (sa, sb) = (rng.random::<bool>(), rng.random::<bool>());
                        tilt(&u, p, if sa { a } else { -a }, &mut x);
                        tilt(&v, q, if sb { b } else { -b }, &mut y);
                    }
                }
            }
            _ => {
                x.copy_from_slice(&best_x);
                y.copy_from_slice(&best_y);
                let target = if rng.random::<bool>() { &mut x } else { &mut y };
                random_tangent(target, rng, &mut u);
                let s = step * rng.sample::<f64, _>(StandardNormal);
                target.iter_mut().zip(&u).for_each(|(t, ui)| *t += s * ui);
                normalize_in_place(target);
            }
        }
        let value = search.delta(&x, &y).abs();
        let improved = value > best;
        if improved {
            best = value;
            best_x.copy_from_slice(&x);
            best_y.copy_from_slice(&y);
        }
        if i % 4 >= 2 {
            step = if improved { (step * 1.5).min(STEP_MAX) } else { step * 0.9 };
            if step < STEP_MIN {
                step = STEP_RESET;
            }
        }
    }
    Ok(DiscrepancyReport {
        family: Family::Wedge,
        mode: Mode::SupLower,
        value: best,
        stderr: None,
        samples: Some(budget as u64),
        witness: Some(Region::Wedge {
            x: Point::normalize(best_x)?,
            y: Point::normalize(best_y)?,
        }),
    })
}

/// Largest candidate partition used to build a net.
pub const MAX_CANDIDATES: usize = 4_000_000;
/// Largest net for which the family is built.
pub const MAX_NET: usize = 100_000;

/// A net `H` of `S^d` with covering radius at most `gamma`, defining the
/// approximating family `{W^int_xy(gamma), W^ext_xy(gamma) : x, y in H}`
/// with
///
/// - `W^int = {p.x >= g, p.y <= -g} u {p.x <= -g, p.y >= g}`,
/// - `W^ext = {p.x >= -g, p.y <= g} u {p.x <= g, p.y >= -g}`.
///
/// For every wedge `W_x'y'` and net points with `|x - x'|, |y - y'| <= gamma`,
/// `W^int_xy ⊆ W_x'y' ⊆ W^ext_xy`, and `sigma(W^ext \ W^int) <= epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxFamily {
    pub d: usize,
    pub epsilon: f64,
    /// `epsilon Omega / (4 omega)`.
    pub gamma: f64,
    pub net: Vec<Point>,
    /// Proven Euclidean covering radius of the net, at most `gamma`.
    pub covering_radius: f64,
    /// Number of partition cells whose centers seeded the net.
    pub candidates: usize,
}

fn grid_key(p: &[f64], cell: f64, offset: &[i64]) -> u64 {
    p.iter().zip(offset).fold(0xcbf2_9ce4_8422_2325u64, |h, (c, o)| {
        let k = ((c / cell).floor() as i64 + o) as u64;
        crate::rng::mix(h ^ k)
    })
}

/// Builds a net from the centers of a fine equal-area partition: cells have
/// diameter at most `gamma/3`, and centers are kept greedily when no kept
/// center is closer than `2 gamma/3`.
pub fn build_approx_family(d: usize, epsilon: f64) -> Result<ApproxFamily> {
    if d < 2 {
        return Err(invalid("d", "the approximating family is built for d >= 2"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid("epsilon", "must lie in (0, 1)"));
    }
    let gamma = epsilon / (4.0 * omega_ratio(d)?);
    let rho = gamma / 3.0;
    let sep = gamma - rho;

    let mut n_c = ((6.0 / rho).powi(d as i32).ceil() as usize).max(16);
    let partition = loop {
        if n_c > MAX_CANDIDATES {
            return Err(Error::FamilyTooLarge { net: n_c });
        }
        let p = Partition::build(d, n_c)?;
        let m = p.max_diameter_bound();
        if m <= rho {
            break p;
        }
        n_c = ((n_c as f64) * (m / rho).powi(d as i32) * 1.05).ceil() as usize;
    };

    let dim = d + 1;
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(dim as u32))
        .map(|mut k| {
            (0..dim)
                .map(|_| {
                    let o = (k % 3) as i64 - 1;
                    k /= 3;
                    o
                })
                .collect()
        })
        .collect();
    let zero = vec![0i64; dim];
    let mut buckets: HashMap<u64, Vec<u32>> = HashMap::new();
    let mut kept: Vec<f64> = Vec::new();
    let sep2 = sep * sep;
    for i in 0..partition.len() {
        let c = partition.cell_center(i)?;
        let c = c.coords();
        let near = offsets.iter().any(|o| {
            buckets.get(&grid_key(c, sep, o)).is_some_and(|b| {
                b.iter().any(|&j| {
                    let q = &kept[j as usize * dim..(j as usize + 1) * dim];
                    c.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < sep2
                })
            })
        });
        if near {
            continue;
        }
        let j = (kept.len() / dim) as u32;
        if j as usize >= MAX_NET {
            return Err(Error::FamilyTooLarge { net: MAX_NET + 1 });
        }
        kept.extend_from_slice(c);
        buckets.entry(grid_key(c, sep, &zero)).or_default().push(j);
    }
    let net = kept
        .chunks_exact(dim)
        .map(|c| Point::normalize(c.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ApproxFamily {
        d,
        epsilon,
        gamma,
        net,
        covering_radius: partition.max_diameter_bound() + sep,
        candidates: partition.len(),
    })
}

/// Normalized measures of `W^int_xy(gamma)` and `W^ext_xy(gamma)` for
/// `x . y = cos(beta)`, with the quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionMeasures {
    pub interior: f64,
    pub exterior: f64,
    pub error: f64,
}

// Angular measure of the region's trace on the circle of radius r in the
// plane of x and y, where x = (1, 0) and y = (cos beta, sin beta).
fn arc_measure(r: f64, gamma: f64, beta: f64, exterior: bool) -> f64 {
    let c = if r > 0.0 { gamma / r } else { f64::INFINITY };
    if c >= 1.0 {
        return if exterior { 2.0 * PI } else { 0.0 };
    }
    let a = c.acos();
    let tau = 2.0 * PI;
    let mut ends: Vec<f64> = [a, -a, PI - a, a - PI]
        .iter()
        .flat_map(|&t| [t, t + beta])
        .map(|t| {
            let m = t % tau;
            if m < 0.0 { m + tau } else { m }
        })
        .collect();
    ends.push(0.0);
    ends.push(tau);
    ends.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let inside = |t: f64| {
        let (cx, cy) = (t.cos(), (t - beta).cos());
        if exterior {
            (cx >= -c && cy <= c) || (cx <= c && cy >= -c)
        } else {
            (cx >= c && cy <= -c) || (cx <= -c && cy >= c)
        }
    };
    ends.windows(2)
        .filter(|w| w[1] > w[0] && inside(0.5 * (w[0] + w[1])))
        .map(|w| w[1] - w[0])
        .sum()
}

/// Measures of the interior and exterior regions at angle `beta` between
/// `x` and `y`.
///
/// The projection of a uniform point of `S^d` onto a 2-plane has uniform
/// angle and radius `r` with `P(|u| <= r) = 1 - (1 - r²)^((d-1)/2)`, so both
/// measures are one-dimensional integrals over that distribution.
pub fn region_measures(d: usize, gamma: f64, beta: f64) -> Result<RegionMeasures> {
    if d < 2 {
        return Err(invalid("d", "need d >= 2"));
    }
    if !(gamma > 0.0) {
        return Err(invalid("gamma", "must be positive"));
    }
    let e = (d - 1) as f64 / 2.0;
    let radius = |u: f64| (1.0 - (1.0 - u).max(0.0).powf(1.0 / e)).max(0.0).sqrt();
    let to_u = |r: f64| 1.0 - (1.0 - r * r).powf(e);
    let half = 0.5 * beta;
    let breaks: Vec<f64> = [gamma, gamma / half.cos(), gamma / half.sin()]
        .iter()
        .filter(|r| r.is_finite() && **r > 0.0 && **r < 1.0)
        .map(|&r| to_u(r))
        .collect();
    let tol = 1e-10;
    let measure = |exterior: bool| {
        integrate_with_breaks(
            |u| arc_measure(radius(u), gamma, beta, exterior) / (2.0 * PI),
            0.0,
            1.0,
            &breaks,
            tol,
        )
    };
    let int = measure(false)?;
    let ext = measure(true)?;
    Ok(RegionMeasures {
        interior: int.value,
        exterior: ext.value,
        error: int.error + ext.error,
    })
}

// Each region is a union of two pieces, each cut by one half-space in y;
// turning y by an angle t moves each half-space by measure at most t/pi.
const MEASURE_LIPSCHITZ: f64 = 2.0 / PI;

/// Region measures tabulated on a uniform grid in `beta` with a rigorous
/// enclosure between grid points.
struct MeasureTable {
    h: f64,
    interior: Vec<f64>,
    exterior: Vec<f64>,
    slack: f64,
}

impl MeasureTable {
    fn new(d: usize, gamma: f64, epsilon: f64) -> Result<Self> {
        // interpolation slack L h / 2 at most epsilon / 100
        let cells = (PI / (epsilon / (50.0 * MEASURE_LIPSCHITZ))).ceil() as usize;
        let h = PI / cells as f64;
        let mut interior = Vec::with_capacity(cells + 1);
        let mut exterior = Vec::with_capacity(cells + 1);
        let mut qerr: f64 = 0.0;
        for k in 0..=cells {
            let m = region_measures(d, gamma, k as f64 * h)?;
            interior.push(m.interior);
            exterior.push(m.exterior);
            qerr = qerr.max(m.error);
        }
        Ok(MeasureTable {
            h,
            interior,
            exterior,
            slack: 0.5 * MEASURE_LIPSCHITZ * h + qerr,
        })
    }

    /// Lower bound on the interior measure and upper bound on the exterior
    /// measure at `beta`.
    fn enclose(&self, beta: f64) -> (f64, f64) {
        let k = ((beta / self.h) as usize).min(self.interior.len() - 2);
        let lo = self.interior[k].min(self.interior[k + 1]) - self.slack;
        let hi = self.exterior[k].max(self.exterior[k + 1]) + self.slack;
        (lo.max(0.0), hi.min(1.0))
    }
}

impl ApproxFamily {
    pub fn len(&self) -> usize {
        self.net.len()
    }

    pub fn is_empty(&self) -> bool {
        self.net.is_empty()
    }

    /// `2 |H|²`.
    pub fn family_size(&self) -> f64 {
        2.0 * (self.net.len() as f64).powi(2)
    }

    /// The packing bound `(4/gamma)^(d+1)` on the net size.
    pub fn volume_bound(&self) -> f64 {
        (4.0 / self.gamma).powi(self.d as i32 + 1)
    }

    /// Index of the net point closest to `x`.
    pub fn nearest(&self, x: &Point) -> Result<usize> {
        if x.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d + 1,
                found: x.dim() + 1,
            });
        }
        let mut best = (0, f64::NEG_INFINITY);
        for (i, q) in self.net.iter().enumerate() {
            let t = q.dot(x);
            if t > best.1 {
                best = (i, t);
            }
        }
        Ok(best.0)
    }

    pub fn interior_contains(&self, i: usize, j: usize, p: &Point) -> bool {
        let (s, t, g) = (self.net[i].dot(p), self.net[j].dot(p), self.gamma);
        (s >= g && t <= -g) || (s <= -g && t >= g)
    }

    pub fn exterior_contains(&self, i: usize, j: usize, p: &Point) -> bool {
        let (s, t, g) = (self.net[i].dot(p), self.net[j].dot(p), self.gamma);
        (s >= -g && t <= g) || (s <= g && t >= -g)
    }
}

/// A rigorous upper bound on `sup |Delta_Z|` over all wedges.
pub fn sup_wedge_net_upper(z: &PointSet, epsilon: f64) -> Result<DiscrepancyReport> {
    let family = build_approx_family(z.d, epsilon)?;
    sup_wedge_net_upper_with(z, &family)
}

/// [`sup_wedge_net_upper`] over a prebuilt family.
///
/// With `W^int ⊆ W ⊆ W^ext`, `count(W)/N - sigma(W)` lies between
/// `count(W^int)/N - sigma(W^ext)` and `count(W^ext)/N - sigma(W^int)`, so the
/// maximum of those two bounds over net pairs bounds the sup. It never
/// exceeds the family discrepancy plus `epsilon`.
pub fn sup_wedge_net_upper_with(z: &PointSet, family: &ApproxFamily) -> Result<DiscrepancyReport> {
    if z.d != family.d {
        return Err(Error::DimensionMismatch {
            expected: family.d + 1,
            found: z.d + 1,
        });
    }
    let table = MeasureTable::new(family.d, family.gamma, family.epsilon)?;
    let (n, h, g) = (z.len(), family.net.len(), family.gamma);
    let words = n.div_ceil(64);
    // per net point: p.x >= g, p.x <= -g, p.x >= -g, p.x <= g
    let mut sets = vec![0u64; 4 * h * words];
    for (i, q) in family.net.iter().enumerate() {
        let base = 4 * i * words;
        for (k, p) in z.iter().enumerate() {
            let t = q.dot(p);
            let (w, bit) = (k / 64, 1u64 << (k % 64));
            for (s, on) in [t >= g, t <= -g, t >= -g, t <= g].into_iter().enumerate() {
                if on {
                    sets[base + s * words + w] |= bit;
                }
            }
        }
    }
    let row = |i: usize, s: usize| &sets[(4 * i + s) * words..(4 * i + s + 1) * words];
    let nf = n as f64;
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for i in 0..h {
        let (pi, mi, epi, emi) = (row(i, 0), row(i, 1), row(i, 2), row(i, 3));
        for j in i..h {
            let (pj, mj, epj, emj) = (row(j, 0), row(j, 1), row(j, 2), row(j, 3));
            let (mut int, mut ext) = (0u32, 0u32);
            for w in 0..words {
                int += (pi[w] & mj[w]).count_ones() + (mi[w] & pj[w]).count_ones();
                ext += ((epi[w] & emj[w]) | (emi[w] & epj[w])).count_ones();
            }
            let beta = family.net[i].dot(&family.net[j]).clamp(-1.0, 1.0).acos();
            let (int_lo, ext_hi) = table.enclose(beta);
            let v = (ext as f64 / nf - int_lo).max(ext_hi - int as f64 / nf);
            if v > best.0 {
                best = (v, i, j);
            }
        }
    }
    Ok(DiscrepancyReport {
        family: Family::Wedge,
        mode: Mode::SupNetUpper,
        value: best.0.max(0.0),
        stderr: None,
        samples: Some((h * (h + 1) / 2) as u64),
        witness: Some(Region::Wedge {
            x: family.net[best.1].clone(),
            y: family.net[best.2].clone(),
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::sampling::random_set;

    fn set(points: Vec<Point>) -> PointSet {
        PointSet::from_points(points).unwrap()
    }

    #[test]
    fn exact_wedge_examples() {
        let p = Point::basis(2, 0);
        let two_over_pi2 = 2.0 / (PI * PI);
        assert!((l2_wedge_exact(&set(vec![p.clone()])).unwrap() - two_over_pi2).abs() < 1e-12);
        assert!((l2_wedge_exact(&set(vec![p.clone(), p.antipode()])).unwrap() - two_over_pi2).abs() < 1e-12);
        let basis = set((0..3).map(|k| Point::basis(2, k)).collect());
        assert!((l2_wedge_exact(&basis).unwrap() - (two_over_pi2 - 1.0 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn exact_cap_examples() {
        let p = Point::basis(2, 0);
        assert!((l2_cap_exact(&set(vec![p.clone()])).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((l2_cap_exact(&set(vec![p.clone(), p.antipode()])).unwrap() - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_single_point() {
        let z = set(vec![Point::basis(2, 0)]);
        let mc = l2_wedge_montecarlo(&z, 200_000, &mut stream(1, 0)).unwrap();
        let exact = l2_wedge_exact(&z).unwrap();
        assert!((mc.mean - exact).abs() < 4.0 * mc.stderr, "{mc:?} vs {exact}");
        assert!(l2_wedge_montecarlo(&z, 0, &mut stream(1, 0)).is_err());
        let cap = l2_cap_montecarlo(&z, 200_000, &mut stream(2, 0)).unwrap();
        assert!((cap.mean - 1.0 / 3.0).abs() < 4.0 * cap.stderr, "{cap:?}");
    }

    #[test]
    fn sup_lower_single_point() {
        let z = set(vec![Point::basis(2, 0)]);
        let r = sup_wedge_lower(&z, 4000, &mut stream(3, 0)).unwrap();
        assert!(r.value >= 0.95, "{}", r.value);
        assert!(r.value <= 1.0);
        let w = r.witness.unwrap().into_wedge().unwrap();
        let dl = crate::onebit::delta(&z, &w.x, &w.y).unwrap();
        assert!((dl.abs() - r.value).abs() < 1e-12);
    }

    #[test]
    fn sup_lower_is_monotone_in_budget() {
        let z = random_set(2, 64, 4).unwrap();
        let mut prev = 0.0;
        for budget in [1, 10, 100, 1000, 5000] {
            let v = sup_wedge_lower(&z, budget, &mut stream(5, 0)).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
        assert!(sup_wedge_lower(&z, 0, &mut stream(5, 0)).is_err());
    }

    #[test]
    fn arc_measure_limits() {
        // no belt: wedge of angle beta has arc measure 2 beta
        for &beta in &[0.0, 0.3, 1.5, PI] {
            let a = arc_measure(1.0, 1e-15, beta, false);
            let b = arc_measure(1.0, 1e-15, beta, true);
            assert!((a - 2.0 * beta).abs() < 1e-6, "{a} {beta}");
            assert!((b - 2.0 * beta).abs() < 1e-6);
        }
    }

    #[test]
    fn region_measures_sandwich_the_wedge() {
        for d in [2, 3, 5] {
            let eps = 0.1;
            let gamma = eps / (4.0 * omega_ratio(d).unwrap());
            for k in 0..=20 {
                let beta = PI * k as f64 / 20.0;
                let m = region_measures(d, gamma, beta).unwrap();
                let w = beta / PI;
                assert!(m.interior <= w + 1e-9 && w <= m.exterior + 1e-9, "d={d} {m:?} {w}");
                assert!(m.exterior - m.interior <= eps + 1e-9, "d={d} {m:?}");
                assert!(m.error < 1e-9);
            }
        }
    }

    #[test]
    fn region_measures_match_monte_carlo() {
        let d = 2;
        let gamma = 0.07;
        let beta = 1.1f64;
        let m = region_measures(d, gamma, beta).unwrap();
        let x = [1.0, 0.0, 0.0];
        let y = [beta.cos(), beta.sin(), 0.0];
        let mut rng = stream(8, 0);
        let mut p = [0.0; 3];
        let (mut int, mut ext) = (0usize, 0usize);
        let trials = 400_000;
        for _ in 0..trials {
            uniform_into(&mut p, &mut rng);
            let (s, t) = (dot(&p, &x), dot(&p, &y));
            int += ((s >= gamma && t <= -gamma) || (s <= -gamma && t >= gamma)) as usize;
            ext += ((s >= -gamma && t <= gamma) || (s <= gamma && t >= -gamma)) as usize;
        }
        for (count, exact) in [(int, m.interior), (ext, m.exterior)] {
            let f = count as f64 / trials as f64;
            let se = (exact * (1.0 - exact) / trials as f64).sqrt();
            assert!((f - exact).abs() < 4.0 * se, "{f} {exact}");
        }
    }

    #[test]
    fn net_upper_brackets_single_point() {
        let z = set(vec![Point::basis(2, 0)]);
        let up = sup_wedge_net_upper(&z, 0.2).unwrap();
        assert!(up.value >= 1.0 - 0.2);
        let lo = sup_wedge_lower(&z, 2000, &mut stream(1, 1)).unwrap();
        assert!(lo.value <= up.value);
    }

    #[test]
    fn family_validation() {
        assert!(build_approx_family(1, 0.1).is_err());
        assert!(build_approx_family(2, 0.0).is_err());
        assert!(build_approx_family(2, 1.0).is_err());
    }
}
