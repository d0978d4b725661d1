use rand::Rng;
use rand_distr::StandardNormal;
use tessel_core::energy::{energy_gradient, geodesic_step, minimize, wedge_energy};
use tessel_core::rng::stream;
use tessel_core::sampling::random_set;
use tessel_core::PointSet;

fn tangent(p: &[f64], rng: &mut impl Rng) -> Vec<f64> {
    let mut v: Vec<f64> = p.iter().map(|_| rng.sample(StandardNormal)).collect();
    let t: f64 = v.iter().zip(p).map(|(a, b)| a * b).sum();
    v.iter_mut().zip(p).for_each(|(a, b)| *a -= t * b);
    v
}

fn moved(z: &PointSet, dirs: &[Vec<f64>], h: f64) -> PointSet {
    let mut out = z.clone();
    for (p, v) in out.points.iter_mut().zip(dirs) {
        *p = geodesic_step(p, v, h).unwrap();
    }
    out
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = stream(21, 0);
    let h = 1e-6;
    for k in 0..100u64 {
        let d = 2 + (k % 2) as usize;
        let n = rng.random_range(2..=16);
        let z = random_set(d, n, 1000 + k).unwrap();
        let g = energy_gradient(&z);
        let dirs: Vec<Vec<f64>> = z.iter().map(|p| tangent(p.coords(), &mut rng)).collect();
        let analytic: f64 = g
            .iter()
            .zip(&dirs)
            .map(|(gi, vi)| gi.iter().zip(vi).map(|(a, b)| a * b).sum::<f64>())
            .sum();
        let numeric = (wedge_energy(&moved(&z, &dirs, h)) - wedge_energy(&moved(&z, &dirs, -h))) / (2.0 * h);
        let rel = (analytic - numeric).abs() / numeric.abs().max(1e-12);
        assert!(rel < 1e-5, "k={k} d={d} n={n}: {analytic} vs {numeric} (rel {rel})");
        for (gi, p) in g.iter().zip(z.iter()) {
            let t: f64 = gi.iter().zip(p.coords()).map(|(a, b)| a * b).sum();
            assert!(t.abs() < 1e-10);
        }
    }
}

#[test]
fn descent_lowers_the_discrepancy_below_the_random_average() {
    use std::f64::consts::PI;
    use tessel_core::discrepancy::l2_wedge_exact;
    let n = 12;
    let z0 = random_set(2, n, 5).unwrap();
    let out = minimize(&z0, 500, 1e-9).unwrap();
    assert!(out.final_energy() <= out.initial_energy());
    for w in out.trace.windows(2) {
        assert!(w[1].energy <= w[0].energy);
    }
    let before = l2_wedge_exact(&z0).unwrap();
    let after = l2_wedge_exact(&out.z).unwrap();
    assert!(after <= before);
    assert!(after <= (2.0 / (PI * PI)) / n as f64);
}
