mod common;

use ballspace_core::ball::random_ball_vector;
use ballspace_core::kernels::{
    gram, gram_matrix, inner_product_matrix, kernel_domination, schur_power_sum, tail_bound,
    truncation_order_self, truncation_order_tail,
};
use ballspace_core::linalg::{hermitian_eigenvalues, is_psd};
use ballspace_core::{Error, HermitianMatrix, PointSet, C64};
use common::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

/// `sum_{k<=N} <v_i, v_j>^k` by direct powering, independent of the library.
fn partial_sum(v: &PointSet, order: usize) -> HermitianMatrix {
    let n = v.len();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let a = v.point(j).coords().dotc(v.point(i).coords());
        (0..=order).map(|k| a.powu(k as u32)).sum::<C64>()
    });
    HermitianMatrix::new(m).unwrap()
}

/// `sum_{k>N} <u_i, u_j>^k`, summed until the terms vanish.
fn tail(u: &[DVector<C64>], order: usize) -> HermitianMatrix {
    let n = u.len();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let a = u[j].dotc(&u[i]);
        let mut term = a.powu(order as u32 + 1);
        let mut s = C64::new(0.0, 0.0);
        while term.norm() > 1e-18 {
            s += term;
            term *= a;
        }
        s
    });
    HermitianMatrix::new(m).unwrap()
}

fn tail_oracle(v: &PointSet, r: f64, eps: f64, order: usize) -> bool {
    let s = partial_sum(v, order);
    let t = tail_bound(v.len(), r, order);
    is_psd(&s.scale(eps).shift(-t), 0.0)
}

fn self_oracle(v: &PointSet, eps: f64, order: usize) -> bool {
    let s = partial_sum(v, order);
    let g = gram_matrix(v).scale(1.0 / (1.0 + eps));
    is_psd(&s.sub(&g).unwrap(), 1e-12)
}

#[test]
fn truncation_orders_are_minimal() {
    let mut r = rng(70);
    for _ in 0..50 {
        let n = r.random_range(1..=5);
        let d = r.random_range(1..=3);
        let v = random_set(n, d, &mut r);
        let rad: f64 = r.random_range(0.3..0.8);
        for eps in [0.5, 0.1, 0.01] {
            let nt = truncation_order_tail(&v, rad, eps).unwrap();
            assert!(tail_oracle(&v, rad, eps, nt));
            if nt > 0 {
                assert!(!tail_oracle(&v, rad, eps, nt - 1));
            }
            let s = partial_sum(&v, nt).scale(eps);
            for _ in 0..100 {
                let u: Vec<DVector<C64>> = (0..n).map(|_| random_ball_vector(d, rad, &mut r)).collect();
                assert!(is_psd(&s.sub(&tail(&u, nt)).unwrap(), 1e-12));
            }
            let ns = truncation_order_self(&v, eps).unwrap();
            assert!(self_oracle(&v, eps, ns));
            if ns > 0 {
                assert!(!self_oracle(&v, eps, ns - 1));
            }
        }
    }
}

#[test]
fn scalar_tail_example() {
    let v = PointSet::from_reals(&[0.0]).unwrap();
    let n = truncation_order_tail(&v, 0.5, 0.1).unwrap();
    let direct = (0..).find(|&k| 0.5f64.powi(2 * k + 2) / 0.75 <= 0.1).unwrap();
    assert_eq!(n, direct as usize);
    assert_eq!(n, 1);
    assert_eq!(truncation_order_self(&v, 0.1).unwrap(), 0);
}

#[test]
fn self_order_monotone_in_eps() {
    let mut r = rng(71);
    for _ in 0..20 {
        let v = random_set(r.random_range(1..=4), r.random_range(1..=3), &mut r);
        let orders: Vec<usize> = [0.5, 0.2, 0.1, 0.05, 0.01, 0.001]
            .iter()
            .map(|&e| truncation_order_self(&v, e).unwrap())
            .collect();
        assert!(orders.windows(2).all(|w| w[0] <= w[1]), "{orders:?}");
    }
}

#[test]
fn gram_examples_and_definiteness() {
    let g = gram(&PointSet::from_reals(&[0.0, 0.5]).unwrap());
    let m = g.entries().as_matrix();
    assert_eq!(m[(0, 0)].re, 1.0);
    assert!((m[(1, 1)].re - 4.0 / 3.0).abs() < 1e-15);
    let mut r = rng(72);
    for _ in 0..50 {
        let x = random_set(r.random_range(1..=6), r.random_range(1..=3), &mut r);
        let vals = hermitian_eigenvalues(&gram_matrix(&x)).unwrap();
        assert!(vals[0] > 1e-12 * vals[vals.len() - 1]);
        let g = gram_matrix(&x);
        for i in 0..x.len() {
            let diag = g.as_matrix()[(i, i)].re;
            assert!(diag >= 1.0);
            assert!((diag - 1.0 / (1.0 - x.point(i).norm().powi(2))).abs() < 1e-12 * diag);
        }
    }
}

#[test]
fn domination_examples() {
    let x = PointSet::from_reals(&[0.0, 0.5, -0.3]).unwrap();
    assert!(kernel_domination(&x, &x, 1.0).unwrap());
    assert!(kernel_domination(&x, &x, 2.0).unwrap());
    let y = PointSet::from_reals(&[0.0, 0.9]).unwrap();
    assert!(matches!(kernel_domination(&y, &y, 0.9), Err(Error::Scale { .. })));
    let mut r = rng(73);
    for _ in 0..20 {
        let a = random_set(4, 2, &mut r);
        let b = random_set(4, 3, &mut r);
        // K_{G/C} tends to the all-ones matrix, which the kernel dominates.
        assert!(kernel_domination(&a, &b, 1e6).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tail_of_geometric_series_is_bounded(seed in any::<u64>(), n in 1usize..6, d in 1usize..4, order in 0usize..30) {
        let mut r = rng(seed);
        let x = random_set(n, d, &mut r);
        let rad = x.max_norm();
        let s = schur_power_sum(&inner_product_matrix(&x), order);
        let diff = gram_matrix(&x).sub(&s).unwrap();
        let vals = hermitian_eigenvalues(&diff).unwrap();
        prop_assert!(vals[n - 1] <= tail_bound(n, rad, order) * (1.0 + 1e-9) + 1e-12);
        prop_assert!(vals[0] >= -1e-10);
        let direct = partial_sum(&x, order);
        prop_assert!(direct.sub(&s).unwrap().frobenius_norm() < 1e-10 * direct.frobenius_norm());
    }

    #[test]
    fn schur_powers_stay_psd(seed in any::<u64>(), n in 1usize..6, k in 1u32..6) {
        let mut r = rng(seed);
        let g = random_matrix(n, 3, &mut r);
        let a = HermitianMatrix::new(&g * g.adjoint()).unwrap();
        let mut p = a.clone();
        for _ in 1..k {
            p = p.schur(&a).unwrap();
        }
        let vals = hermitian_eigenvalues(&p).unwrap();
        prop_assert!(vals[0] >= -1e-9 * vals[n - 1].max(1.0));
    }
}
