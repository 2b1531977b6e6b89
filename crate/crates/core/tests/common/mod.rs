#![allow(dead_code)]

use ballspace_core::ball::random_point_set;
use ballspace_core::{HermitianMatrix, PointSet, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let g = random_matrix(n, n, rng);
    let h = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    HermitianMatrix::new(h).unwrap()
}

pub fn random_pd(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let g = random_matrix(n, n, rng);
    HermitianMatrix::new(&g * g.adjoint()).unwrap().shift(0.1)
}

/// Random set of `n` points in `radius·B_d`, well separated.
pub fn random_set(n: usize, d: usize, rng: &mut ChaCha8Rng) -> PointSet {
    random_point_set(n, d, 0.85, 0.05, rng)
}

/// `X` with each coordinate moved by a complex Gaussian of scale `s`,
/// pulled back inside `0.95·B_d` if needed.
pub fn perturb(x: &PointSet, s: f64, rng: &mut ChaCha8Rng) -> PointSet {
    loop {
        let coords: Vec<Vec<C64>> = x
            .coords()
            .map(|c| {
                let mut v: Vec<C64> = c.iter().map(|z| z + gaussian(rng) * s).collect();
                let r = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if r > 0.95 {
                    v.iter_mut().for_each(|z| *z *= 0.95 / r);
                }
                v
            })
            .collect();
        if let Ok(y) = PointSet::from_coords(coords) {
            if y.ph_separation() > 1e-6 {
                return y;
            }
        }
    }
}

pub fn random_size(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    rng.random_range(lo..=hi)
}

/// All permutations of `0..n` in lexicographic order, by recursion.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                prefix.push(j);
                go(prefix, used, out);
                prefix.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}
