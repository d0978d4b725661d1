//! Adaptive Gauss–Kronrod (7/15) quadrature with global bisection.

use alloc::vec::Vec;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Sum of the per-panel `|K15 - G7|` estimates.
    pub error: f64,
    pub panels: usize,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, (kronrod - gauss).abs() * half)
}

/// Integrate `f` over `[a, b]`, bisecting the panel with the largest error
/// estimate until the summed estimate is below `tol` (absolute).
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Integral> {
    integrate_limited(&mut f, a, b, tol, 4000)
}

/// Like [`integrate`] but splits `[a, b]` at the given interior breakpoints first.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<Integral> {
    let mut knots: Vec<f64> = breaks.iter().copied().filter(|&t| t > a && t < b).collect();
    knots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    knots.dedup();
    let mut edges = Vec::with_capacity(knots.len() + 2);
    edges.push(a);
    edges.extend(knots);
    edges.push(b);
    let pieces = (edges.len() - 1) as f64;
    let mut total = Integral {
        value: 0.0,
        error: 0.0,
        panels: 0,
    };
    for w in edges.windows(2) {
        let part = integrate_limited(&mut f, w[0], w[1], tol / pieces, 4000)?;
        total.value += part.value;
        total.error += part.error;
        total.panels += part.panels;
    }
    Ok(total)
}

fn integrate_limited<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    tol: f64,
    max_panels: usize,
) -> Result<Integral> {
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            panels: 0,
        });
    }
    // (a, b, value, error)
    let mut panels: Vec<(f64, f64, f64, f64)> = Vec::new();
    let (v, e) = gk15(f, a, b);
    panels.push((a, b, v, e));
    let mut total_err = e;
    while total_err > tol {
        if panels.len() >= max_panels {
            return Err(Error::Quadrature {
                achieved: total_err,
                requested: tol,
            });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (pa, pb, _, pe) = panels.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            // Panel cannot be split further in double precision.
            return Err(Error::Quadrature {
                achieved: total_err,
                requested: tol,
            });
        }
        let (lv, le) = gk15(f, pa, mid);
        let (rv, re) = gk15(f, mid, pb);
        panels.push((pa, mid, lv, le));
        panels.push((mid, pb, rv, re));
        total_err += le + re - pe;
    }
    // Re-sum in a fixed order so the result does not depend on the split history.
    panels.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let value = panels.iter().map(|p| p.2).sum();
    let error = panels.iter().map(|p| p.3).sum();
    Ok(Integral {
        value,
        error,
        panels: panels.len(),
    })
}
