//! Cross-checks of the exact L² formulas against independent oracles.

use std::f64::consts::PI;

use rand::Rng;
use tessel_core::discrepancy::{
    l2_cap_exact, l2_cap_montecarlo, l2_slice_montecarlo, l2_wedge_exact, l2_wedge_montecarlo,
};
use tessel_core::energy::wedge_energy;
use tessel_core::onebit::{delta, slice_discrepancy, symmetrize, wedge_contains};
use tessel_core::quad::integrate;
use tessel_core::rng::stream;
use tessel_core::sampling::random_set;
use tessel_core::sphere::{cap_measure, second_moment, uniform_point};
use tessel_core::{Point, PointSet, Wedge};

fn rotation(dim: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    // Gram–Schmidt on a Gaussian matrix
    let mut rows: Vec<Vec<f64>> = Vec::new();
    while rows.len() < dim {
        let mut v = uniform_point(dim - 1, rng).unwrap().into_coords();
        for r in &rows {
            let t: f64 = v.iter().zip(r).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(r).for_each(|(a, b)| *a -= t * b);
        }
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-6 {
            rows.push(v.into_iter().map(|a| a / n).collect());
        }
    }
    rows
}

fn rotate(z: &PointSet, q: &[Vec<f64>]) -> PointSet {
    let pts = z
        .iter()
        .map(|p| {
            let c: Vec<f64> = q
                .iter()
                .map(|r| r.iter().zip(p.coords()).map(|(a, b)| a * b).sum())
                .collect();
            Point::normalize(c).unwrap()
        })
        .collect();
    PointSet::from_points(pts).unwrap()
}

#[test]
fn wedge_identity_matches_monte_carlo() {
    for (d, n) in [(2, 1), (2, 2), (2, 8), (2, 32), (3, 8), (4, 5)] {
        for seed in 0..3u64 {
            let z = random_set(d, n, 100 + seed).unwrap();
            let exact = l2_wedge_exact(&z).unwrap();
            let mc = l2_wedge_montecarlo(&z, 200_000, &mut stream(seed, 7)).unwrap();
            assert!(
                (mc.mean - exact).abs() <= 4.0 * mc.stderr,
                "d={d} n={n} seed={seed}: mc {} ± {} vs exact {exact}",
                mc.mean,
                mc.stderr
            );
        }
    }
}

#[test]
fn cap_identity_matches_monte_carlo() {
    for (d, n) in [(2, 1), (2, 5), (3, 10)] {
        let z = random_set(d, n, 40 + n as u64).unwrap();
        let exact = l2_cap_exact(&z).unwrap();
        let mc = l2_cap_montecarlo(&z, 200_000, &mut stream(9, n as u64)).unwrap();
        assert!((mc.mean - exact).abs() <= 4.0 * mc.stderr, "d={d} n={n}: {mc:?} vs {exact}");
    }
}

#[test]
fn cap_identity_by_double_quadrature() {
    // Z = {p, -p} on S^2: the integrand depends on x only through s = p.x,
    // which is uniform on [-1, 1].
    let inner = |s: f64| {
        let brk = s.abs();
        let f = |t: f64| {
            let count = (s >= t) as u8 + (-s >= t) as u8;
            let dl = count as f64 / 2.0 - cap_measure(t, 2).unwrap();
            dl * dl
        };
        integrate(f, -1.0, -brk, 1e-12).unwrap().value
            + integrate(f, -brk, brk, 1e-12).unwrap().value
            + integrate(f, brk, 1.0, 1e-12).unwrap().value
    };
    let outer = integrate(|s| 0.5 * inner(s), -1.0, 1.0, 1e-10).unwrap().value;
    let p = Point::basis(2, 0);
    let z = PointSet::from_points(vec![p.clone(), p.antipode()]).unwrap();
    assert!((outer - 1.0 / 12.0).abs() < 1e-6, "{outer}");
    assert!((outer - l2_cap_exact(&z).unwrap()).abs() < 1e-6);
}

#[test]
fn exact_values_are_nonnegative_and_bound_the_energy() {
    let mut rng = stream(11, 0);
    for k in 0..2000u64 {
        let d = 2 + (k % 3) as usize;
        let n = rng.random_range(1..40);
        let z = random_set(d, n, k).unwrap();
        let w = l2_wedge_exact(&z).unwrap();
        assert!(w >= -1e-12, "k={k}: {w}");
        assert!(wedge_energy(&z) >= second_moment(d).unwrap() - 0.25 - 1e-12);
        assert!(l2_cap_exact(&z).unwrap() >= -1e-12);
    }
}

#[test]
fn exact_wedge_is_rotation_and_reflection_invariant() {
    let mut rng = stream(12, 0);
    for d in [2, 3, 5] {
        let z = random_set(d, 17, d as u64).unwrap();
        let base = l2_wedge_exact(&z).unwrap();
        let q = rotation(d + 1, &mut rng);
        assert!((l2_wedge_exact(&rotate(&z, &q)).unwrap() - base).abs() < 1e-10);
        let mut flipped = z.clone();
        for k in [0, 3, 16] {
            flipped.points[k] = flipped.points[k].antipode();
        }
        assert!((l2_wedge_exact(&flipped).unwrap() - base).abs() < 1e-10);
        assert!((wedge_energy(&flipped) - wedge_energy(&z)).abs() < 1e-10);
    }
}

#[test]
fn crofton_wedge_frequency_is_the_distance() {
    let mut rng = stream(13, 0);
    for d in [2, 3] {
        let x = uniform_point(d, &mut rng).unwrap();
        let y = uniform_point(d, &mut rng).unwrap();
        let w = Wedge::new(x, y).unwrap();
        let trials = 200_000;
        let hits = (0..trials)
            .filter(|_| wedge_contains(&w, &uniform_point(d, &mut rng).unwrap()).unwrap())
            .count();
        let f = hits as f64 / trials as f64;
        let m = w.measure();
        let se = (m * (1.0 - m) / trials as f64).sqrt();
        assert!((f - m).abs() < 4.0 * se, "d={d}: {f} vs {m}");
    }
}

#[test]
fn symmetrized_slices_give_half_the_wedge_error() {
    let mut rng = stream(14, 0);
    let z = random_set(2, 25, 3).unwrap();
    let zs = symmetrize(&z);
    for _ in 0..200 {
        let x = uniform_point(2, &mut rng).unwrap();
        let y = uniform_point(2, &mut rng).unwrap();
        let w = delta(&z, &x, &y).unwrap();
        let s = slice_discrepancy(&zs, &x, &y).unwrap();
        assert!((w - 2.0 * s).abs() < 1e-12);
    }
    // the slice L² of the symmetrized set is a quarter of the wedge L²
    let mc = l2_slice_montecarlo(&zs, 200_000, &mut stream(15, 0)).unwrap();
    let target = l2_wedge_exact(&z).unwrap() / 4.0;
    assert!((mc.mean - target).abs() <= 4.0 * mc.stderr, "{mc:?} vs {target}");
}

#[test]
fn random_expectation_small_scale() {
    // E ||Delta_Z||² = (1/N)(1/2 - V_d); E D²_cap = c_d U_d / N
    let (d, n, sets) = (2, 8, 400u64);
    let w: Vec<f64> = (0..sets).map(|s| l2_wedge_exact(&random_set(d, n, s).unwrap()).unwrap()).collect();
    let c: Vec<f64> = (0..sets).map(|s| l2_cap_exact(&random_set(d, n, s).unwrap()).unwrap()).collect();
    for (vals, target) in [(w, 2.0 / (PI * PI) / 8.0), (c, 1.0 / 24.0)] {
        let mean = vals.iter().sum::<f64>() / sets as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (sets - 1) as f64;
        let se = (var / sets as f64).sqrt();
        assert!((mean - target).abs() < 4.0 * se, "{mean} vs {target} (se {se})");
    }
}
