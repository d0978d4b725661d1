//! Recursive zonal equal-area partitions of `S^d`.
//!
//! The sphere is cut into a north polar cap, a stack of collars and a south
//! polar cap, each of measure `k/N` for an integer `k`. Every collar is the
//! product of its colatitude band with a partition of `S^(d-1)` into `k`
//! cells, built by the same procedure one dimension down. On `S^1` the cells
//! are equal longitude sectors.
//!
//! Points are written `x = (cos phi, sin phi * w)` with colatitude `phi`
//! measured from `e_0` and `w` in `S^(d-1)`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

// Unused only when a std build of the crate provides inherent float math.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::sphere::{self, invert_cap_measure, polar_cap_measure_with, Point};
use crate::{Error, Result};

// Sampled angles are kept this far inside their band so that rounding in
// `cos`/`acos` can never move a sample into a neighbouring cell.
const EDGE_MARGIN: f64 = 1e-11;

/// A colatitude band (or, on `S^1`, a longitude sector) holding `cells`
/// consecutive cell indices starting at `first`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub first: usize,
    pub cells: usize,
}

/// An equal-area partition of `S^d` into `N` cells.
///
/// `nested[k]` is the partition of `S^(d-1)` splitting band `k`; `None`
/// means the band is a single cell (polar caps, one-cell collars, and all
/// sectors of `S^1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub bands: Vec<Band>,
    pub nested: Vec<Option<Box<Partition>>>,
}

/// Two-sided information on the diameter of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiameterCertificate {
    /// Largest pairwise Euclidean distance among sampled cell points.
    pub sampled: f64,
    /// Upper bound derived from the band widths.
    pub analytic: f64,
}

impl Partition {
    /// Builds the partition of `S^d` (`d >= 2`) into `n >= 1` cells.
    pub fn build(d: usize, n: usize) -> Result<Self> {
        if d < 2 {
            return Err(invalid("d", "partitions are built for d >= 2"));
        }
        if n < 1 {
            return Err(invalid("N", "need at least one cell"));
        }
        Ok(build_any(d, n))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(invalid(
                "cell",
                alloc::format!("cell index {i} out of range 0..{}", self.n),
            ));
        }
        Ok(())
    }

    fn band_of_cell(&self, i: usize) -> usize {
        self.bands.partition_point(|b| b.first <= i) - 1
    }

    fn band_of_angle(&self, angle: f64) -> usize {
        self.bands.partition_point(|b| b.lo <= angle).max(1) - 1
    }

    /// A uniform random point of cell `i`.
    pub fn cell_sample<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> Result<Point> {
        self.check_index(i)?;
        let mut out = vec![0.0; self.d + 1];
        self.sample_into(i, rng, &mut out);
        Point::normalize(out)
    }

    pub(crate) fn sample_into<R: Rng + ?Sized>(&self, i: usize, rng: &mut R, out: &mut [f64]) {
        let band = &self.bands[self.band_of_cell(i)];
        if self.d == 1 {
            let u: f64 = rng.random();
            let theta = clamp_inside(band.lo + u * (band.hi - band.lo), band.lo, band.hi);
            out[0] = theta.cos();
            out[1] = theta.sin();
            return;
        }
        if self.n == 1 {
            sphere::uniform_into(out, rng);
            return;
        }
        let k = self.band_of_cell(i);
        let ratio = sphere::omega_ratio(self.d).expect("d >= 1");
        let f_lo = polar_cap_measure_with(band.lo, self.d, ratio);
        let f_hi = polar_cap_measure_with(band.hi, self.d, ratio);
        let u: f64 = rng.random();
        let phi = invert_cap_measure(f_lo + u * (f_hi - f_lo), self.d, ratio, band.lo, band.hi);
        let phi = clamp_inside(phi, band.lo, band.hi);
        let (s, c) = (phi.sin(), phi.cos());
        let rest = &mut out[1..];
        match &self.nested[k] {
            Some(sub) => sub.sample_into(i - band.first, rng, rest),
            None => sphere::uniform_into(rest, rng),
        }
        rest.iter_mut().for_each(|r| *r *= s);
        out[0] = c;
    }

    /// Index of the cell containing `x`. Bands are half-open `[lo, hi)`,
    /// except the last, which is closed.
    pub fn cell_locate(&self, x: &Point) -> Result<usize> {
        if x.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d + 1,
                found: x.dim() + 1,
            });
        }
        Ok(self.locate_slice(x.coords()))
    }

    pub(crate) fn locate_slice(&self, x: &[f64]) -> usize {
        if self.d == 1 {
            let mut theta = x[1].atan2(x[0]);
            if theta < 0.0 {
                theta += 2.0 * PI;
            }
            return self.bands[self.band_of_angle(theta)].first;
        }
        if self.n == 1 {
            return 0;
        }
        let phi = x[0].clamp(-1.0, 1.0).acos();
        let k = self.band_of_angle(phi);
        let band = &self.bands[k];
        match &self.nested[k] {
            None => band.first,
            Some(sub) => {
                let rest = &x[1..];
                let r = sphere::norm(rest);
                let w: Vec<f64> = if r > 0.0 {
                    rest.iter().map(|c| c / r).collect()
                } else {
                    let mut e = vec![0.0; rest.len()];
                    e[0] = 1.0;
                    e
                };
                band.first + sub.locate_slice(&w)
            }
        }
    }

    /// A deterministic point inside cell `i`.
    pub fn cell_center(&self, i: usize) -> Result<Point> {
        self.check_index(i)?;
        let mut out = vec![0.0; self.d + 1];
        self.center_into(i, &mut out);
        Point::normalize(out)
    }

    fn center_into(&self, i: usize, out: &mut [f64]) {
        let band = &self.bands[self.band_of_cell(i)];
        if self.d == 1 {
            let theta = 0.5 * (band.lo + band.hi);
            out[0] = theta.cos();
            out[1] = theta.sin();
            return;
        }
        out.iter_mut().for_each(|c| *c = 0.0);
        if self.n == 1 {
            out[0] = 1.0;
            return;
        }
        let k = self.band_of_cell(i);
        let phi = match (&self.nested[k], band.lo == 0.0, band.hi == PI) {
            (None, true, _) => 0.0,
            (None, _, true) => PI,
            _ => 0.5 * (band.lo + band.hi),
        };
        let rest = &mut out[1..];
        match &self.nested[k] {
            Some(sub) => sub.center_into(i - band.first, rest),
            None => rest[0] = 1.0,
        }
        let s = phi.sin();
        rest.iter_mut().for_each(|r| *r *= s);
        out[0] = phi.cos();
    }

    /// Upper bound on the Euclidean diameter of cell `i`.
    ///
    /// For a collar cell with colatitudes in `[lo, hi]` and angular cell `A`,
    /// `|x - y| <= 2 sin((hi - lo)/2) + max sin(phi) * diam(A)`.
    pub fn diameter_bound(&self, i: usize) -> Result<f64> {
        self.check_index(i)?;
        Ok(self.diameter_bound_unchecked(i))
    }

    fn diameter_bound_unchecked(&self, i: usize) -> f64 {
        let band = &self.bands[self.band_of_cell(i)];
        if self.d == 1 {
            return chord(band.hi - band.lo);
        }
        if self.n == 1 {
            return 2.0;
        }
        let k = self.band_of_cell(i);
        let sub = match &self.nested[k] {
            None if band.lo == 0.0 => return chord(2.0 * band.hi),
            None if band.hi == PI => return chord(2.0 * (PI - band.lo)),
            None => 2.0,
            Some(sub) => sub.diameter_bound_unchecked(i - band.first),
        };
        let s_max = if band.lo <= PI / 2.0 && band.hi >= PI / 2.0 {
            1.0
        } else {
            band.lo.sin().max(band.hi.sin())
        };
        (chord(band.hi - band.lo) + s_max * sub).min(2.0)
    }

    /// Largest analytic diameter bound over all cells.
    pub fn max_diameter_bound(&self) -> f64 {
        (0..self.n)
            .map(|i| self.diameter_bound_unchecked(i))
            .fold(0.0, f64::max)
    }

    /// Sampled (lower) and analytic (upper) diameter estimates for cell `i`.
    pub fn diameter_certificate<R: Rng + ?Sized>(
        &self,
        i: usize,
        samples: usize,
        rng: &mut R,
    ) -> Result<DiameterCertificate> {
        self.check_index(i)?;
        if samples < 2 {
            return Err(invalid("samples", "need at least two samples"));
        }
        let dim = self.d + 1;
        let mut pts = vec![0.0; samples * dim];
        for chunk in pts.chunks_mut(dim) {
            self.sample_into(i, rng, chunk);
        }
        let mut best2: f64 = 0.0;
        for a in 0..samples {
            let pa = &pts[a * dim..(a + 1) * dim];
            for b in (a + 1)..samples {
                let pb = &pts[b * dim..(b + 1) * dim];
                let d2: f64 = pa.iter().zip(pb).map(|(u, v)| (u - v) * (u - v)).sum();
                best2 = best2.max(d2);
            }
        }
        Ok(DiameterCertificate {
            sampled: best2.sqrt(),
            analytic: self.diameter_bound_unchecked(i),
        })
    }
}

/// Chord length subtended by a central angle (2 for angles >= pi).
fn chord(angle: f64) -> f64 {
    if angle >= PI {
        2.0
    } else {
        2.0 * (0.5 * angle).sin()
    }
}

fn clamp_inside(x: f64, lo: f64, hi: f64) -> f64 {
    if hi - lo > 4.0 * EDGE_MARGIN {
        x.max(lo + EDGE_MARGIN).min(hi - EDGE_MARGIN)
    } else {
        0.5 * (lo + hi)
    }
}

fn build_any(d: usize, n: usize) -> Partition {
    if d == 1 {
        let width = 2.0 * PI / n as f64;
        let bands = (0..n)
            .map(|k| Band {
                lo: k as f64 * width,
                hi: if k + 1 == n { 2.0 * PI } else { (k + 1) as f64 * width },
                first: k,
                cells: 1,
            })
            .collect();
        return Partition {
            d,
            n,
            bands,
            nested: vec![None; n],
        };
    }
    if n == 1 {
        return Partition {
            d,
            n,
            bands: vec![Band {
                lo: 0.0,
                hi: PI,
                first: 0,
                cells: 1,
            }],
            nested: vec![None],
        };
    }

    let ratio = sphere::omega_ratio(d).expect("d >= 2");
    let area = sphere::surface_area(d).expect("d >= 2");
    let nf = n as f64;
    let polar = invert_cap_measure(1.0 / nf, d, ratio, 0.0, PI);
    let ideal_angle = (area / nf).powf(1.0 / d as f64);

    let collars = if n > 2 {
        (((PI - 2.0 * polar) / ideal_angle).round() as usize).max(1)
    } else {
        0
    };

    let mut ideal = Vec::with_capacity(collars + 2);
    ideal.push(1.0);
    if collars > 0 {
        let fitting = (PI - 2.0 * polar) / collars as f64;
        for k in 1..=collars {
            let a = polar + (k - 1) as f64 * fitting;
            let b = polar + k as f64 * fitting;
            ideal.push(nf * (polar_cap_measure_with(b, d, ratio) - polar_cap_measure_with(a, d, ratio)));
        }
    }
    ideal.push(1.0);
    let counts = round_to_naturals(&ideal);
    debug_assert_eq!(counts.iter().sum::<usize>(), n);

    let zones = counts.len();
    let mut colats = Vec::with_capacity(zones + 1);
    colats.push(0.0);
    colats.push(polar);
    let mut subtotal = counts[0];
    for &c in &counts[1..zones - 1] {
        subtotal += c;
        let target = subtotal as f64 / nf;
        colats.push(invert_cap_measure(target, d, ratio, 0.0, PI));
    }
    colats.push(PI);

    let mut bands = Vec::with_capacity(zones);
    let mut nested = Vec::with_capacity(zones);
    let mut first = 0;
    for (z, &cells) in counts.iter().enumerate() {
        if cells == 0 {
            continue;
        }
        bands.push(Band {
            lo: colats[z],
            hi: colats[z + 1],
            first,
            cells,
        });
        nested.push(if cells > 1 {
            Some(Box::new(build_any(d - 1, cells)))
        } else {
            None
        });
        first += cells;
    }
    Partition { d, n, bands, nested }
}

/// Rounds ideal zone counts to integers, carrying the rounding error forward
/// so the total is preserved.
fn round_to_naturals(ideal: &[f64]) -> Vec<usize> {
    let mut carry = 0.0;
    ideal
        .iter()
        .map(|&r| {
            let k = (r + carry).round().max(0.0);
            carry += r - k;
            k as usize
        })
        .collect()
}
