//! Points on `S^d`, the normalized geodesic metric, and sphere constants.

use alloc::vec::Vec;
use core::f64::consts::PI;

// Unused only when a std build of the crate provides inherent float math.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::quad;
use crate::{Error, Result};

/// Maximum deviation of `|v|` from 1 accepted by [`Point::new`].
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Absolute tolerance used for the moment integrals.
pub const MOMENT_TOLERANCE: f64 = 1e-12;

/// A unit vector in `R^(d+1)`, i.e. a point of `S^d` with `d >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    /// Wraps `coords` after checking that it is (nearly) unit length; the
    /// stored vector is renormalized unless its norm is 1 to rounding, so
    /// stored points read back bit-for-bit.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(invalid("coords", "need at least 2 coordinates (d >= 1)"));
        }
        let norm = norm(&coords);
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotUnit { norm });
        }
        Ok(Self::scaled(coords, norm))
    }

    /// Projects an arbitrary nonzero vector onto the sphere.
    pub fn normalize(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(invalid("coords", "need at least 2 coordinates (d >= 1)"));
        }
        let norm = norm(&coords);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotUnit { norm });
        }
        Ok(Self::scaled(coords, norm))
    }

    fn scaled(mut coords: Vec<f64>, norm: f64) -> Self {
        if (norm - 1.0).abs() > 4.0 * f64::EPSILON {
            coords.iter_mut().for_each(|c| *c /= norm);
        }
        Point(coords)
    }

    /// The `k`-th standard basis vector of `R^(d+1)`.
    pub fn basis(d: usize, k: usize) -> Self {
        assert!(d >= 1 && k <= d, "basis vector e_{k} does not exist in R^{}", d + 1);
        let mut v = alloc::vec![0.0; d + 1];
        v[k] = 1.0;
        Point(v)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    /// Sphere dimension `d` (the ambient space is `R^(d+1)`).
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn dot(&self, other: &Point) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn antipode(&self) -> Point {
        Point(self.0.iter().map(|c| -c).collect())
    }

    pub(crate) fn check_same_dim(&self, other: &Point) -> Result<()> {
        if self.0.len() != other.0.len() {
            return Err(Error::DimensionMismatch {
                expected: self.0.len(),
                found: other.0.len(),
            });
        }
        Ok(())
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `arccos(t) / pi` with `t` clamped to `[-1, 1]`.
#[inline]
pub fn distance_from_dot(t: f64) -> f64 {
    t.clamp(-1.0, 1.0).acos() / PI
}

/// Normalized geodesic distance: antipodal points are at distance 1.
pub fn geodesic_distance(x: &Point, y: &Point) -> Result<f64> {
    x.check_same_dim(y)?;
    Ok(distance_from_dot(x.dot(y)))
}

fn check_dim(d: usize, min: usize) -> Result<()> {
    if d < min {
        return Err(invalid("d", alloc::format!("sphere dimension must be >= {min}, got {d}")));
    }
    Ok(())
}

/// Unnormalized surface measure `Omega = 2 pi^((d+1)/2) / Gamma((d+1)/2)` of `S^d`.
pub fn surface_area(d: usize) -> Result<f64> {
    check_dim(d, 1)?;
    let a = (d as f64 + 1.0) / 2.0;
    Ok(2.0 * (a * PI.ln() - libm::lgamma(a)).exp())
}

/// `omega / Omega = Gamma((d+1)/2) / (Gamma(d/2) sqrt(pi))`, where `omega` is
/// the measure of `S^(d-1)`.
pub fn omega_ratio(d: usize) -> Result<f64> {
    check_dim(d, 1)?;
    let a = (d as f64 + 1.0) / 2.0;
    let b = d as f64 / 2.0;
    let ratio = if d <= 150 {
        libm::tgamma(a) / libm::tgamma(b)
    } else {
        (libm::lgamma(a) - libm::lgamma(b)).exp()
    };
    Ok(ratio / PI.sqrt())
}

/// `V_d`: second moment of the geodesic distance between independent
/// uniform points, `(1/pi^2)(omega/Omega) int_0^pi phi^2 sin^(d-1) phi dphi`.
pub fn second_moment(d: usize) -> Result<f64> {
    check_dim(d, 2)?;
    let ratio = omega_ratio(d)?;
    let k = (d - 1) as i32;
    let tol = MOMENT_TOLERANCE * PI * PI / ratio;
    let r = quad::integrate(|phi| phi * phi * phi.sin().powi(k), 0.0, PI, tol)?;
    Ok(ratio * r.value / (PI * PI))
}

/// `U_d`: mean Euclidean distance between independent uniform points,
/// `(omega/Omega) int_0^pi 2 sin(phi/2) sin^(d-1) phi dphi`.
pub fn mean_distance(d: usize) -> Result<f64> {
    check_dim(d, 2)?;
    let ratio = omega_ratio(d)?;
    let k = (d - 1) as i32;
    let tol = MOMENT_TOLERANCE / ratio;
    let r = quad::integrate(|phi| 2.0 * (0.5 * phi).sin() * phi.sin().powi(k), 0.0, PI, tol)?;
    Ok(ratio * r.value)
}

/// `int_0^theta sin^n(phi) dphi` via the reduction formula.
fn sin_power_integral(n: usize, theta: f64) -> f64 {
    let (s, c) = (theta.sin(), theta.cos());
    let mut even = theta; // I_0
    let mut odd = 1.0 - c; // I_1
    if n == 0 {
        return even;
    }
    if n == 1 {
        return odd;
    }
    let mut result = 0.0;
    for m in 2..=n {
        let mf = m as f64;
        let prev = if m % 2 == 0 { even } else { odd };
        let next = -c * s.powi(m as i32 - 1) / mf + (mf - 1.0) / mf * prev;
        if m % 2 == 0 {
            even = next;
        } else {
            odd = next;
        }
        result = next;
    }
    result
}

/// Normalized measure of the polar cap `{phi < theta}` of `S^d`, where `phi`
/// is the colatitude. Takes the precomputed `omega_ratio(d)`.
pub(crate) fn polar_cap_measure_with(theta: f64, d: usize, ratio: f64) -> f64 {
    if theta <= 0.0 {
        return 0.0;
    }
    if theta >= PI {
        return 1.0;
    }
    (ratio * sin_power_integral(d - 1, theta)).clamp(0.0, 1.0)
}

/// Normalized measure of the polar cap of colatitude radius `theta`.
pub fn polar_cap_measure(theta: f64, d: usize) -> Result<f64> {
    let ratio = omega_ratio(d)?;
    Ok(polar_cap_measure_with(theta, d, ratio))
}

/// Colatitude `theta` in `[lo, hi]` with `polar_cap_measure(theta) = target`,
/// by bisection to `1e-13`.
pub(crate) fn invert_cap_measure(target: f64, d: usize, ratio: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        if hi - lo <= 1e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if polar_cap_measure_with(mid, d, ratio) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `sigma(C(x, t))` for the cap `{y : y . x >= t}`; independent of `x`.
pub fn cap_measure(t: f64, d: usize) -> Result<f64> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(invalid("t", alloc::format!("cap height must lie in [-1, 1], got {t}")));
    }
    polar_cap_measure(t.acos(), d)
}

/// Fills `out` (length `d+1`) with a uniform point of `S^d`.
pub fn uniform_into<R: Rng + ?Sized>(out: &mut [f64], rng: &mut R) {
    loop {
        for c in out.iter_mut() {
            *c = rng.sample(StandardNormal);
        }
        let n = norm(out);
        if n > 1e-100 {
            out.iter_mut().for_each(|c| *c /= n);
            return;
        }
    }
}

/// A point drawn from the normalized surface measure of `S^d`.
pub fn uniform_point<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Point> {
    check_dim(d, 1)?;
    let mut v = alloc::vec![0.0; d + 1];
    uniform_into(&mut v, rng);
    Ok(Point(v))
}

/// Constants of `S^d` used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereConstants {
    pub d: usize,
    /// Surface measure of `S^d`.
    pub omega_big: f64,
    /// Surface measure of `S^(d-1)`.
    pub omega_small: f64,
    /// `omega_small / omega_big`.
    pub ratio: f64,
    /// Second moment of the geodesic distance.
    pub v_d: f64,
    /// Mean Euclidean distance.
    pub u_d: f64,
    /// Constant of the cap invariance identity, `ratio / d`.
    pub c_d: f64,
}

impl SphereConstants {
    pub fn new(d: usize) -> Result<Self> {
        check_dim(d, 2)?;
        let omega_big = surface_area(d)?;
        let omega_small = surface_area(d - 1)?;
        let ratio = omega_ratio(d)?;
        Ok(SphereConstants {
            d,
            omega_big,
            omega_small,
            ratio,
            v_d: second_moment(d)?,
            u_d: mean_distance(d)?,
            c_d: ratio / d as f64,
        })
    }
}
