//! The sign-linear one-bit map and the wedge geometry behind its error.
//!
//! For `Z = {z_1, .., z_N}` the map `x -> (sgn(z_j . x))_j` separates `x`
//! and `y` in coordinate `j` exactly when `z_j` lies in the wedge
//! `W_xy = {z : sgn(x . z) != sgn(y . z)}`, whose normalized measure is the
//! geodesic distance `d(x, y)`. The embedding error
//! `Delta_Z(x, y) = d_H(phi(x), phi(y)) - d(x, y)` is therefore the
//! discrepancy of `Z` with respect to `W_xy`.
//!
//! Throughout, `sgn(0) = +1`.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::discrepancy;
use crate::error::invalid;
use crate::sphere::{distance_from_dot, dot, Point};
use crate::{Error, Result};

/// How a point set was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Random,
    Jittered,
    File,
    Minimized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSetMeta {
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition_n: Option<usize>,
}

/// A finite set `Z` of points on `S^d` with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub d: usize,
    pub points: Vec<Point>,
    pub meta: PointSetMeta,
}

impl PointSet {
    pub fn new(points: Vec<Point>, meta: PointSetMeta) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| invalid("points", "a point set needs at least one point"))?;
        let d = first.dim();
        for p in &points {
            first.check_same_dim(p)?;
        }
        Ok(PointSet { d, points, meta })
    }

    /// A point set read from elsewhere (`method = file`).
    pub fn from_points(points: Vec<Point>) -> Result<Self> {
        Self::new(
            points,
            PointSetMeta {
                method: Method::File,
                seed: None,
                partition_n: None,
            },
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Point> {
        self.points.iter()
    }

    /// Coordinates packed row-major, `d+1` values per point.
    pub fn flat(&self) -> Vec<f64> {
        self.points.iter().flat_map(|p| p.coords().iter().copied()).collect()
    }

    pub(crate) fn check_point(&self, x: &Point) -> Result<()> {
        if x.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d + 1,
                found: x.dim() + 1,
            });
        }
        Ok(())
    }
}

/// A point of the Hamming cube `{-1, +1}^N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BitVector(Vec<i8>);

impl BitVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(invalid("signs", "entries must be exactly -1 or +1"));
        }
        Ok(BitVector(signs))
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn flipped(&self) -> BitVector {
        BitVector(self.0.iter().map(|s| -s).collect())
    }
}

#[inline]
pub(crate) fn sgn(t: f64) -> i8 {
    if t >= 0.0 {
        1
    } else {
        -1
    }
}

/// `phi_Z(x) = (sgn(z_j . x))_j`.
pub fn sign_embed(z: &PointSet, x: &Point) -> Result<BitVector> {
    z.check_point(x)?;
    Ok(BitVector(z.iter().map(|p| sgn(p.dot(x))).collect()))
}

/// Normalized Hamming distance: the fraction of differing coordinates.
pub fn hamming(a: &BitVector, b: &BitVector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(invalid(
            "b",
            alloc::format!("length {} differs from {}", b.len(), a.len()),
        ));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let diff = a.0.iter().zip(&b.0).filter(|(s, t)| s != t).count();
    Ok(diff as f64 / a.len() as f64)
}

/// The wedge `W_xy`; slices `S_xy` use the same pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wedge {
    pub x: Point,
    pub y: Point,
}

impl Wedge {
    pub fn new(x: Point, y: Point) -> Result<Self> {
        x.check_same_dim(&y)?;
        Ok(Wedge { x, y })
    }

    /// `x = y` (empty wedge) or `x = -y` (everything off `x^perp`).
    pub fn is_degenerate(&self) -> bool {
        let t = self.x.dot(&self.y);
        (t.abs() - 1.0).abs() < 1e-12
    }

    /// `sigma(W_xy) = d(x, y)`.
    pub fn measure(&self) -> f64 {
        distance_from_dot(self.x.dot(&self.y))
    }

    pub fn contains(&self, z: &Point) -> bool {
        wedge_contains_raw(self.x.coords(), self.y.coords(), z.coords())
    }
}

#[inline]
pub(crate) fn wedge_contains_raw(x: &[f64], y: &[f64], z: &[f64]) -> bool {
    sgn(dot(z, x)) != sgn(dot(z, y))
}

/// `true` iff the hyperplane `z^perp` separates `w.x` and `w.y`.
pub fn wedge_contains(w: &Wedge, z: &Point) -> Result<bool> {
    w.x.check_same_dim(z)?;
    Ok(w.contains(z))
}

/// Number of points of a flat coordinate buffer inside `W_xy`.
pub(crate) fn wedge_count_flat(flat: &[f64], dim: usize, x: &[f64], y: &[f64]) -> usize {
    flat.chunks_exact(dim)
        .filter(|z| wedge_contains_raw(x, y, z))
        .count()
}

/// `Delta_Z(x, y) = #(Z in W_xy)/N - d(x, y)`.
pub fn delta(z: &PointSet, x: &Point, y: &Point) -> Result<f64> {
    z.check_point(x)?;
    z.check_point(y)?;
    let count = z
        .iter()
        .filter(|p| wedge_contains_raw(x.coords(), y.coords(), p.coords()))
        .count();
    Ok(count as f64 / z.len() as f64 - distance_from_dot(x.dot(y)))
}

/// The same quantity computed through the embedding:
/// `d_H(phi_Z(x), phi_Z(y)) - d(x, y)`.
pub fn delta_via_hamming(z: &PointSet, x: &Point, y: &Point) -> Result<f64> {
    let a = sign_embed(z, x)?;
    let b = sign_embed(z, y)?;
    Ok(hamming(&a, &b)? - distance_from_dot(x.dot(y)))
}

/// Discrepancy of `Z` for the slice `S_xy = {z : z.x > 0, z.y < 0}`, whose
/// measure is `d(x, y)/2`.
pub fn slice_discrepancy(z: &PointSet, x: &Point, y: &Point) -> Result<f64> {
    z.check_point(x)?;
    z.check_point(y)?;
    let count = z
        .iter()
        .filter(|p| p.dot(x) > 0.0 && p.dot(y) < 0.0)
        .count();
    Ok(count as f64 / z.len() as f64 - 0.5 * distance_from_dot(x.dot(y)))
}

/// `Z* = Z u (-Z)`, with the antipodes appended after the originals.
pub fn symmetrize(z: &PointSet) -> PointSet {
    let mut points = z.points.clone();
    points.extend(z.iter().map(Point::antipode));
    PointSet {
        d: z.d,
        points,
        meta: z.meta.clone(),
    }
}

/// Outcome of [`rip_sup_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipCheck {
    pub passes: bool,
    /// Largest `|Delta_Z|` found by the search (a lower bound on the sup).
    pub found: f64,
    /// A pair with `|Delta_Z| >= delta_target`, when one was found.
    pub witness: Option<Wedge>,
}

/// Searches for a pair `(x, y)` violating `|Delta_Z(x, y)| < delta_target`.
///
/// A passing verdict is evidence only: the search lower-bounds the sup.
pub fn rip_sup_check<R: Rng + ?Sized>(
    z: &PointSet,
    delta_target: f64,
    budget: usize,
    rng: &mut R,
) -> Result<RipCheck> {
    if !(delta_target > 0.0 && delta_target <= 1.0) {
        return Err(invalid("delta_target", "must lie in (0, 1]"));
    }
    let report = discrepancy::sup_wedge_lower(z, budget, rng)?;
    let passes = report.value < delta_target;
    let witness = if passes {
        None
    } else {
        report.witness.and_then(|w| w.into_wedge())
    };
    Ok(RipCheck {
        passes,
        found: report.value,
        witness,
    })
}
