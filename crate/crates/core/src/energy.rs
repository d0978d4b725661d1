//! Discrete energies and a Riemannian descent on `(S^d)^N`.
//!
//! The wedge energy `(1/N^2) sum_{i,j} (1/2 - d(z_i, z_j))^2` differs from
//! the squared L² wedge discrepancy by the constant `V_d - 1/4`, so lowering
//! it lowers the average embedding error.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

// Unused only when a std build of the crate provides inherent float math.
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::onebit::{Method, PointSet};
use crate::sphere::{distance_from_dot, dot, Point};
use crate::Result;

/// Inner products are clamped to `|t| <= 1 - GRADIENT_CLAMP` where the
/// derivative of `arccos` is evaluated.
pub const GRADIENT_CLAMP: f64 = 1e-9;

/// Maximum number of step halvings per line search.
pub const MAX_HALVINGS: usize = 30;

/// `(1/N^2) sum_{i,j} (1/2 - d(z_i, z_j))^2`, diagonal included.
pub fn wedge_energy(z: &PointSet) -> f64 {
    let n = z.len();
    let mut off = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let e = 0.5 - distance_from_dot(z.points[i].dot(&z.points[j]));
            off += e * e;
        }
    }
    let nf = n as f64;
    (0.25 * nf + 2.0 * off) / (nf * nf)
}

/// Total frame potential `sum_{i,j} (z_i . z_j)^2`.
pub fn frame_potential(z: &PointSet) -> f64 {
    let n = z.len();
    let mut total = 0.0;
    for i in 0..n {
        let zi = &z.points[i];
        total += zi.dot(zi).powi(2);
        for j in (i + 1)..n {
            total += 2.0 * zi.dot(&z.points[j]).powi(2);
        }
    }
    total
}

/// Riemannian gradient of [`wedge_energy`]: for each `z_i` the projection
/// onto the tangent space at `z_i` of
/// `(4/N^2) sum_{j != i} (1/2 - d_ij) / (pi sqrt(1 - t_ij^2)) z_j`.
pub fn energy_gradient(z: &PointSet) -> Vec<Vec<f64>> {
    let n = z.len();
    let dim = z.d + 1;
    let scale = 4.0 / (n as f64 * n as f64);
    let mut grad = vec![vec![0.0; dim]; n];
    for i in 0..n {
        let zi = z.points[i].coords();
        for j in (i + 1)..n {
            let zj = z.points[j].coords();
            let t = dot(zi, zj);
            let tc = t.clamp(-1.0 + GRADIENT_CLAMP, 1.0 - GRADIENT_CLAMP);
            let w = scale * (0.5 - distance_from_dot(t)) / (PI * (1.0 - tc * tc).sqrt());
            // Proj_{z_i^perp} z_j = z_j - t z_i, and symmetrically for j.
            for k in 0..dim {
                grad[i][k] += w * (zj[k] - t * zi[k]);
                grad[j][k] += w * (zi[k] - t * zj[k]);
            }
        }
    }
    grad
}

fn sup_norm(grad: &[Vec<f64>]) -> f64 {
    grad.iter().map(|g| dot(g, g).sqrt()).fold(0.0, f64::max)
}

/// Moves every `z_i` to `normalize(z_i - step * g_i)`.
fn retract(z: &PointSet, grad: &[Vec<f64>], step: f64) -> Result<PointSet> {
    let points = z
        .iter()
        .zip(grad)
        .map(|(p, g)| {
            let v = p.coords().iter().zip(g).map(|(c, gk)| c - step * gk).collect();
            Point::normalize(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PointSet {
        d: z.d,
        points,
        meta: z.meta.clone(),
    })
}

/// Moves `p` along the great circle with initial velocity `v` (tangent at
/// `p`) for time `h`.
pub fn geodesic_step(p: &Point, v: &[f64], h: f64) -> Result<Point> {
    let speed = dot(v, v).sqrt();
    if speed == 0.0 {
        return Ok(p.clone());
    }
    let (s, c) = ((h * speed).sin(), (h * speed).cos());
    let coords = p
        .coords()
        .iter()
        .zip(v)
        .map(|(x, vk)| c * x + s * vk / speed)
        .collect();
    Point::normalize(coords)
}

/// Snapshot of the descent.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyState {
    pub z: PointSet,
    pub energy: f64,
    pub gradient: Vec<Vec<f64>>,
    pub step: usize,
}

impl EnergyState {
    pub fn new(z: PointSet, step: usize) -> Self {
        let energy = wedge_energy(&z);
        let gradient = energy_gradient(&z);
        EnergyState {
            z,
            energy,
            gradient,
            step,
        }
    }

    pub fn grad_norm(&self) -> f64 {
        sup_norm(&self.gradient)
    }
}

/// One row of the optimization trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub step_size: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    GradientTolerance,
    MaxSteps,
    LineSearchExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimized {
    pub z: PointSet,
    pub trace: Vec<TraceRow>,
    pub accepted_steps: usize,
    pub stop: StopReason,
}

impl Minimized {
    pub fn converged(&self) -> bool {
        self.stop != StopReason::MaxSteps
    }

    pub fn initial_energy(&self) -> f64 {
        self.trace[0].energy
    }

    pub fn final_energy(&self) -> f64 {
        self.trace[self.trace.len() - 1].energy
    }
}

/// Projected gradient descent with backtracking on [`wedge_energy`].
///
/// Each iteration starts from twice the last accepted step (initially
/// `0.1/N`) and halves until the energy strictly decreases.
pub fn minimize(z0: &PointSet, max_steps: usize, tol: f64) -> Result<Minimized> {
    if max_steps < 1 {
        return Err(invalid("max_steps", "must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    let mut state = EnergyState::new(z0.clone(), 0);
    let mut trace = vec![TraceRow {
        step: 0,
        energy: state.energy,
        grad_norm: state.grad_norm(),
        step_size: 0.0,
    }];
    let mut step_size = 0.1 / z0.len() as f64;
    let mut stop = StopReason::MaxSteps;
    for it in 1..=max_steps {
        if state.grad_norm() < tol {
            stop = StopReason::GradientTolerance;
            break;
        }
        let mut s = step_size;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let cand = retract(&state.z, &state.gradient, s)?;
            let e = wedge_energy(&cand);
            if e < state.energy {
                accepted = Some(cand);
                break;
            }
            s *= 0.5;
        }
        let Some(next) = accepted else {
            stop = StopReason::LineSearchExhausted;
            break;
        };
        state = EnergyState::new(next, it);
        trace.push(TraceRow {
            step: it,
            energy: state.energy,
            grad_norm: state.grad_norm(),
            step_size: s,
        });
        step_size = (2.0 * s).min(1.0);
    }
    if stop == StopReason::MaxSteps && state.grad_norm() < tol {
        stop = StopReason::GradientTolerance;
    }
    let accepted_steps = trace.len() - 1;
    let mut z = state.z;
    z.meta.method = Method::Minimized;
    Ok(Minimized {
        z,
        trace,
        accepted_steps,
        stop,
    })
}
