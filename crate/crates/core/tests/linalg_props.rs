mod common;

use ballspace_core::ball::random_unitary;
use ballspace_core::linalg::{
    bottleneck_assignment, hermitian_eigen, hermitian_eigenvalues, is_psd, pencil_extremes,
    singular_values,
};
use ballspace_core::{CostMatrix, Error, HermitianMatrix, C64};
use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shift_moves_every_eigenvalue(seed in any::<u64>(), n in 1usize..7, c in -5.0f64..5.0) {
        let mut r = rng(seed);
        let m = random_hermitian(n, &mut r);
        let a = hermitian_eigenvalues(&m).unwrap();
        let b = hermitian_eigenvalues(&m.shift(c)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x + c - y).abs() < 1e-10);
        }
    }

    #[test]
    fn eigen_reconstruction(seed in any::<u64>(), n in 1usize..9) {
        let mut r = rng(seed);
        let m = random_hermitian(n, &mut r);
        let (vals, vecs) = hermitian_eigen(&m).unwrap();
        let lam = DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(vals[i], 0.0) } else { C64::new(0.0, 0.0) });
        let res = (m.as_matrix() - &vecs * lam * vecs.adjoint()).norm();
        prop_assert!(res <= 1e-10 * (1.0 + m.frobenius_norm()));
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn identity_pencil_matches_eigenvalues(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let p = random_hermitian(n, &mut r);
        let v = hermitian_eigenvalues(&p).unwrap();
        let (lo, hi) = pencil_extremes(&p, &HermitianMatrix::identity(n)).unwrap();
        prop_assert!((lo - v[0]).abs() < 1e-10);
        prop_assert!((hi - v[n - 1]).abs() < 1e-10);
    }

    #[test]
    fn scalar_pencil(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let q = random_pd(n, &mut r);
        let (lo, hi) = pencil_extremes(&q.scale(2.0), &q).unwrap();
        prop_assert!((lo - 2.0).abs() < 1e-9 && (hi - 2.0).abs() < 1e-9);
    }

    #[test]
    fn singular_values_are_unitarily_invariant(seed in any::<u64>(), d in 1usize..5, n in 1usize..7) {
        let mut r = rng(seed);
        let m = random_matrix(d, n, &mut r);
        let u = random_unitary(d, &mut r);
        let v = random_unitary(n, &mut r);
        let s1 = singular_values(&m).unwrap();
        let s2 = singular_values(&(&u * &m * &v)).unwrap();
        prop_assert_eq!(s1.len(), d.min(n));
        for (a, b) in s1.iter().zip(&s2) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        let fro2: f64 = m.iter().map(|z| z.norm_sqr()).sum();
        let ss: f64 = s1.iter().map(|s| s * s).sum();
        prop_assert!((fro2 - ss).abs() <= 1e-10 * fro2.max(1.0));
    }

    #[test]
    fn bottleneck_matches_brute_force(seed in any::<u64>(), n in 4usize..6, levels in 2u32..40) {
        let mut r = rng(seed);
        // Coarse integer levels force plenty of ties.
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| r.random_range(0..levels) as f64 / 7.0).collect())
            .collect();
        let c = CostMatrix::new(rows.clone()).unwrap();
        let mut best = f64::INFINITY;
        let mut best_perm = Vec::new();
        for p in all_permutations(n) {
            let v = (0..n).map(|i| rows[i][p[i]]).fold(0.0, f64::max);
            if v < best {
                best = v;
                best_perm = p;
            }
        }
        let (v, perm) = bottleneck_assignment(&c);
        prop_assert_eq!(v, best);
        // Enumeration is lexicographic, so the first strict improvement is the lexicographic minimizer.
        prop_assert_eq!(perm, best_perm);
    }
}

#[test]
fn psd_examples() {
    assert!(is_psd(&HermitianMatrix::identity(3), 0.0));
    let m = HermitianMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
    assert!(!is_psd(&m, 1e-9));
    let m = HermitianMatrix::from_real_rows(&[&[0.25, 0.25], &[0.25, 0.25]]).unwrap();
    assert!(is_psd(&m, 0.0));
}

#[test]
fn singular_value_examples() {
    let z = DMatrix::<C64>::zeros(2, 3);
    assert_eq!(singular_values(&z).unwrap(), vec![0.0, 0.0]);
    let m = DMatrix::from_row_slice(2, 2, &[C64::new(3.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(4.0, 0.0)]);
    let s = singular_values(&m).unwrap();
    assert!((s[0] - 4.0).abs() < 1e-14 && (s[1] - 3.0).abs() < 1e-14);
    let mut r = rng(9);
    let u = random_unitary(4, &mut r);
    assert!(singular_values(&u).unwrap().iter().all(|s| (s - 1.0).abs() < 1e-12));
}

#[test]
fn rejects_bad_input() {
    let m = DMatrix::from_element(2, 2, C64::new(f64::NAN, 0.0));
    assert!(matches!(HermitianMatrix::new(m), Err(Error::InvalidMatrix(_))));
    let m = DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, 1.0), C64::new(1.0, 0.0)]);
    assert!(matches!(HermitianMatrix::new(m), Err(Error::InvalidMatrix(_))));
    assert!(CostMatrix::new(vec![vec![-1.0]]).is_err());
    assert!(CostMatrix::new(vec![vec![f64::INFINITY]]).is_err());
    let singular = HermitianMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
    assert!(matches!(
        pencil_extremes(&HermitianMatrix::identity(2), &singular),
        Err(Error::SingularPencil(_))
    ));
}
