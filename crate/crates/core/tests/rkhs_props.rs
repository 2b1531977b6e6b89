mod common;

use ballspace_core::ball::random_automorphism;
use ballspace_core::kernels::{gram_matrix, self_condition_holds, tail_bound};
use ballspace_core::linalg::{hermitian_eigenvalues, is_psd};
use ballspace_core::rkhs::{
    distortion, n0_from_mult_bound, rk_bm_distance, rk_bound_from_sets, set_bound_from_rk,
    RescalingCandidate,
};
use ballspace_core::set_metrics::invariant_symmetric;
use ballspace_core::{Certificate, Error, OptimizerConfig, PointSet, C64};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn cfg(seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        seed,
        random_restarts: 8,
        ..Default::default()
    }
}

fn reals(xs: &[f64]) -> PointSet {
    PointSet::from_reals(xs).unwrap()
}

/// Extreme roots of `det(P - μ A) = 0` for real symmetric 2×2 `P`, `A`.
fn pencil_2x2(p: [[f64; 2]; 2], a: [[f64; 2]; 2]) -> (f64, f64) {
    let qa = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let qb = -(p[0][0] * a[1][1] + p[1][1] * a[0][0] - p[0][1] * a[1][0] - p[1][0] * a[0][1]);
    let qc = p[0][0] * p[1][1] - p[0][1] * p[1][0];
    let disc = (qb * qb - 4.0 * qa * qc).sqrt();
    ((-qb - disc) / (2.0 * qa), (-qb + disc) / (2.0 * qa))
}

/// Best distortion over a grid of `λ_2` (magnitude × phase) and both bijections.
fn two_point_scan(x: &PointSet, y: &PointSet) -> f64 {
    let mut best = f64::INFINITY;
    for s in [vec![0, 1], vec![1, 0]] {
        for a in 0..4000 {
            for ph in 0..8 {
                let m = (-8.0 + 16.0 * a as f64 / 4000.0f64).exp();
                let l = C64::from_polar(m, std::f64::consts::TAU * ph as f64 / 8.0);
                let c = RescalingCandidate::new(s.clone(), vec![C64::new(1.0, 0.0), l]).unwrap();
                best = best.min(distortion(x, y, &c).unwrap());
            }
        }
    }
    best
}

#[test]
fn distortion_of_diagonal_rescaling() {
    let x = reals(&[0.0, 0.5]);
    let c = RescalingCandidate::new(vec![0, 1], vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)]).unwrap();
    let a = [[1.0, 1.0], [1.0, 4.0 / 3.0]];
    let p = [[1.0, 2.0], [2.0, 16.0 / 3.0]];
    let (lo, hi) = pencil_2x2(p, a);
    let d = distortion(&x, &x, &c).unwrap();
    assert!(d > 1.0);
    assert!((d - (hi / lo).sqrt()).abs() < 1e-9 * d);
}

#[test]
fn identical_and_congruent_sets() {
    let x = reals(&[0.0, 0.4, -0.3]);
    let r = rk_bm_distance(&x, &x, &cfg(0)).unwrap();
    assert!((r.delta - 1.0).abs() < 1e-12);
    assert_eq!(r.certificate, Certificate::UpperBound);
    assert!(r.normalized_x.point(0).norm() < 1e-15);
    let mut g = rng(80);
    for d in 1..=3 {
        for _ in 0..4 {
            let x = random_set(4, d, &mut g);
            let y = random_automorphism(d, 0.8, &mut g).apply_set(&x).unwrap();
            assert!(rk_bm_distance(&x, &y, &cfg(1)).unwrap().delta <= 1.0 + 1e-5);
        }
    }
}

#[test]
fn report_matches_witness() {
    let mut g = rng(81);
    for _ in 0..5 {
        let x = random_set(3, 2, &mut g);
        let y = random_set(3, 2, &mut g);
        let r = rk_bm_distance(&x, &y, &cfg(2)).unwrap();
        let w = &r.witness;
        assert!(w.lambda()[0].im == 0.0 && w.lambda()[0].re >= 0.0);
        let big = w.lambda().iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!((big - 1.0).abs() < 1e-12);
        assert!((distortion(&x, &y, w).unwrap() - r.delta).abs() <= 1e-9 * r.delta);
        assert!((r.rho - r.delta.ln()).abs() < 1e-15);
    }
}

#[test]
fn symmetric_in_arguments() {
    let mut g = rng(82);
    for _ in 0..8 {
        let n = g.random_range(2..=4);
        let d = g.random_range(1..=2);
        let x = random_set(n, d, &mut g);
        let y = random_set(n, d, &mut g);
        let a = rk_bm_distance(&x, &y, &cfg(3)).unwrap().delta;
        let b = rk_bm_distance(&y, &x, &cfg(3)).unwrap().delta;
        assert!((a - b).abs() <= 2e-5 * a.max(1.0), "{a} vs {b}");
    }
}

#[test]
fn set_bound_dominates_measured_distance() {
    let mut g = rng(83);
    for _ in 0..40 {
        let n = g.random_range(1..=5);
        let d = g.random_range(1..=3);
        let x = random_set(n, d, &mut g);
        let y = perturb(&x, g.random_range(1e-4..0.05), &mut g);
        let delta = rk_bm_distance(&x, &y, &cfg(4)).unwrap().delta;
        assert!(delta <= rk_bound_from_sets(&x, &y).unwrap() + 1e-6);
    }
}

#[test]
fn bound_from_sets_example() {
    let x = reals(&[0.0, 0.5]);
    let y = reals(&[0.0, 0.501]);
    let la = {
        let (t, det): (f64, f64) = (1.0 + 4.0 / 3.0, 4.0 / 3.0 - 1.0);
        (t - (t * t - 4.0 * det).sqrt()) / 2.0
    };
    let lb = {
        let b11 = 1.0 / (1.0 - 0.501f64 * 0.501);
        let (t, det) = (1.0 + b11, b11 - 1.0);
        (t - (t * t - 4.0 * det).sqrt()) / 2.0
    };
    let r = 0.501f64;
    let expect = (1.0 + 4.0 * 2.0 * r / (1.0 - r * r).powi(2) * 1e-3 / la.min(lb)).powi(2);
    let got = rk_bound_from_sets(&x, &y).unwrap();
    assert!((got - expect).abs() < 1e-9 * expect);
    assert!(got >= rk_bm_distance(&x, &y, &cfg(5)).unwrap().delta);
    assert_eq!(rk_bound_from_sets(&x, &x).unwrap(), 1.0);
}

#[test]
fn geometry_bound_from_kernel_distance() {
    let mut g = rng(84);
    let c = cfg(6);
    for _ in 0..6 {
        let n = g.random_range(2..=3);
        let d = g.random_range(1..=2);
        let x = random_set(n, d, &mut g);
        let y = perturb(&x, 1e-3, &mut g);
        let delta = rk_bm_distance(&x, &y, &c).unwrap().delta;
        let alpha = delta + 1e-6;
        if alpha < 2.0 {
            let bound = set_bound_from_rk(&x, alpha, d, n).unwrap();
            assert!(invariant_symmetric(&x, &y, &c).unwrap().value <= bound);
        }
    }
    let x = reals(&[0.0, 0.5]);
    let near = set_bound_from_rk(&x, 1.0 + 1e-12, 1, 2).unwrap();
    assert!(near < 0.05 && near < set_bound_from_rk(&x, 1.0 + 1e-4, 1, 2).unwrap() / 10.0);
    assert!(matches!(set_bound_from_rk(&x, 2.5, 1, 2), Err(Error::Range { .. })));
}

#[test]
fn n0_rechecks() {
    let x1 = reals(&[0.0, 0.3]);
    let (big_r, eps) = (0.5, 0.5);
    let t = n0_from_mult_bound(&x1, big_r, eps).unwrap();
    assert_eq!(t.n0, t.self_order.max(t.tail_order));
    assert!(self_condition_holds(&x1, eps, t.self_order).unwrap());
    let g = gram_matrix(&x1);
    let floor = tail_bound(2, big_r, t.tail_order);
    assert!(is_psd(&g.scale(eps).shift(-floor), 0.0));
    if t.tail_order > 0 {
        let lmin = hermitian_eigenvalues(&g).unwrap()[0];
        assert!(tail_bound(2, big_r, t.tail_order - 1) > eps * lmin);
    }
    let orders: Vec<usize> = [0.5, 0.1, 0.01, 0.001]
        .iter()
        .map(|&e| n0_from_mult_bound(&x1, big_r, e).unwrap().n0)
        .collect();
    assert!(orders.windows(2).all(|w| w[0] <= w[1]), "{orders:?}");
    // A set without the origin is moved first.
    let shifted = n0_from_mult_bound(&reals(&[0.2, 0.45]), big_r, eps).unwrap();
    assert!(shifted.normalized.point(0).norm() < 1e-15);
}

#[test]
fn nonuniform_family_diverges() {
    let x = reals(&[0.0, 0.1]);
    let deltas: Vec<f64> = [0.05, 0.01, 0.002]
        .iter()
        .map(|&y| {
            let ys = reals(&[0.0, y]);
            let d = rk_bm_distance(&x, &ys, &cfg(7)).unwrap().delta;
            let scan = two_point_scan(&x, &ys);
            assert!(d <= scan + 1e-9);
            assert!(d >= scan * (1.0 - 1e-3));
            // The invariant symmetric distance stays small while delta passes 1.01.
            assert!(invariant_symmetric(&x, &ys, &cfg(7)).unwrap().value <= 0.2);
            assert!(d >= 1.01);
            d
        })
        .collect();
    assert!(deltas.windows(2).all(|w| w[0] < w[1]), "{deltas:?}");
    assert!(deltas[2] > 10.0 * deltas[0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distortion_at_least_one_and_gauge_free(seed in any::<u64>(), n in 1usize..6, d in 1usize..4, c in 0.01f64..100.0, phase in 0.0f64..6.3) {
        let mut g = rng(seed);
        let x = random_set(n, d, &mut g);
        let y = random_set(n, d, &mut g);
        let sigma = all_permutations(n)[g.random_range(0..(1..=n).product::<usize>())].clone();
        let lambda: Vec<C64> = (0..n).map(|_| C64::from_polar(g.random_range(0.2..2.0), g.random_range(0.0..6.3))).collect();
        let scaled: Vec<C64> = lambda.iter().map(|z| z * C64::from_polar(c, phase)).collect();
        let a = distortion(&x, &y, &RescalingCandidate::new(sigma.clone(), lambda).unwrap()).unwrap();
        let b = distortion(&x, &y, &RescalingCandidate::new(sigma, scaled).unwrap()).unwrap();
        prop_assert!(a >= 1.0);
        prop_assert!((a - b).abs() <= 1e-9 * a);
        prop_assert!((distortion(&x, &x, &RescalingCandidate::identity(n)).unwrap() - 1.0).abs() < 1e-9);
    }
}
