//! The reproducing-kernel Banach–Mazur distance between the spaces `H_X`
//! spanned by kernel functions at finite point sets, and the a-priori bounds
//! tying it to point-set geometry.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::ball::{BallAutomorphism, PointSet};
use crate::error::{Error, Result};
use crate::kernels::{gram_matrix, truncation_order_self};
use crate::linalg::{
    hermitian_eigen, hermitian_eigenvalues, invert_permutation, is_permutation, next_permutation,
    HermitianMatrix, Pencil, C64,
};
use crate::optimize::{NelderMead, OptimizerConfig};
use crate::set_metrics::{symmetric, BaseMetric};
use crate::Certificate;

/// Rescalings with some `|λ_i|` at or below this are rejected.
pub const MIN_RESCALING: f64 = 1e-12;
/// Largest `n` for which every permutation is screened.
pub const EXHAUSTIVE_LIMIT: usize = 8;
/// Permutations that survive screening and get a full `λ` search.
const REFINED_PERMUTATIONS: usize = 4;
const MULTISTARTS: usize = 8;
const EXACT_SLACK: f64 = 1e-12;

/// The operator `k_{x_i} ↦ λ_i k_{y_σ(i)}`.
///
/// `λ` is stored in a fixed gauge: `λ_1` real and nonnegative, `max |λ_i| = 1`.
/// Neither change affects the distortion.
#[derive(Debug, Clone, PartialEq)]
pub struct RescalingCandidate {
    sigma: Vec<usize>,
    lambda: Vec<C64>,
}

impl RescalingCandidate {
    pub fn new(sigma: Vec<usize>, lambda: Vec<C64>) -> Result<Self> {
        if !is_permutation(&sigma) {
            return Err(Error::Precondition(format!("{sigma:?} is not a permutation")));
        }
        if lambda.len() != sigma.len() {
            return Err(Error::CardinalityMismatch {
                left: sigma.len(),
                right: lambda.len(),
            });
        }
        let big = lambda.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if let Some(i) = lambda
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite() || z.norm() <= MIN_RESCALING * big.max(1.0))
        {
            return Err(Error::Precondition(format!(
                "rescaling factor {i} is zero or not finite: {}",
                lambda[i]
            )));
        }
        let phase = lambda[0].conj() / lambda[0].norm();
        let mut lambda: Vec<C64> = lambda.iter().map(|z| z * phase / big).collect();
        lambda[0] = C64::new(lambda[0].norm(), 0.0);
        Ok(RescalingCandidate { sigma, lambda })
    }

    /// `σ = id`, `λ = 1`.
    pub fn identity(n: usize) -> Self {
        RescalingCandidate {
            sigma: (0..n).collect(),
            lambda: vec![C64::new(1.0, 0.0); n],
        }
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn lambda(&self) -> &[C64] {
        &self.lambda
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// The candidate for `T^{-1}`: `k_{y_j} ↦ λ_{σ^{-1}(j)}^{-1} k_{x_{σ^{-1}(j)}}`.
    pub fn inverse(&self) -> Result<Self> {
        let inv = invert_permutation(&self.sigma);
        let lambda = inv.iter().map(|&i| C64::new(1.0, 0.0) / self.lambda[i]).collect();
        Self::new(inv, lambda)
    }
}

#[derive(Debug, Clone)]
pub struct RkBmReport {
    /// Upper bound for `δ_RK(H_X, H_Y)`, the distortion of `witness`.
    pub delta: f64,
    /// `log(delta)`.
    pub rho: f64,
    pub certificate: Certificate,
    pub witness: RescalingCandidate,
    /// Elementary automorphisms sending the first point of `X`, resp. `Y`, to the origin.
    pub normalizing_automorphisms: (BallAutomorphism, BallAutomorphism),
    pub normalized_x: PointSet,
    pub normalized_y: PointSet,
    /// Whether every permutation was screened.
    pub exhaustive: bool,
}

/// `‖T‖ ‖T^{-1}‖` for `T: k_{x_i} ↦ λ_i k_{y_σ(i)}`.
pub fn distortion(x: &PointSet, y: &PointSet, cand: &RescalingCandidate) -> Result<f64> {
    x.check_same_len(y)?;
    if cand.len() != x.len() {
        return Err(Error::CardinalityMismatch {
            left: x.len(),
            right: cand.len(),
        });
    }
    let pencil = Pencil::new(&gram_matrix(x))?;
    let b = gram_matrix(y).permuted(&cand.sigma);
    pencil_distortion(&pencil, &b, &cand.lambda)
}

/// `sqrt(max/min)` of the pencil `(D^* B_σ D, A)`, with `B_σ` already permuted.
fn pencil_distortion(pencil: &Pencil, b_sigma: &HermitianMatrix, lambda: &[C64]) -> Result<f64> {
    let p = b_sigma.diag_congruence(lambda)?;
    let (lo, hi) = pencil.extremes(&p)?;
    if !(lo > 0.0) {
        return Err(Error::SingularPencil(format!(
            "rescaled Gram matrix is not positive definite (lambda_min = {lo:e})"
        )));
    }
    Ok((hi / lo).sqrt().max(1.0))
}

/// Rescaling that makes `D^* B_σ D` closest to `A` in the rank-one sense:
/// `conj(λ_i) λ_j ≈ A_ij / B_ij`. Exact when `T` can be an isometry.
fn rank_one_rescaling(a: &HermitianMatrix, b_sigma: &HermitianMatrix) -> Vec<C64> {
    let n = a.dim();
    let ones = vec![C64::new(1.0, 0.0); n];
    let r = DMatrix::from_fn(n, n, |i, j| a.as_matrix()[(i, j)] / b_sigma.as_matrix()[(i, j)]);
    let Ok(r) = HermitianMatrix::new(r) else {
        return ones;
    };
    let Ok((vals, vecs)) = hermitian_eigen(&r) else {
        return ones;
    };
    let mu = vals[n - 1];
    if !(mu > 0.0) {
        return ones;
    }
    let lambda: Vec<C64> = (0..n).map(|i| (vecs[(i, n - 1)] * mu.sqrt()).conj()).collect();
    let big = lambda.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if lambda.iter().any(|z| z.norm() <= 1e-6 * big) {
        return ones;
    }
    lambda
}

/// Distortion minimized over `λ` for fixed `σ`.
struct LambdaSearch<'a> {
    pencil: &'a Pencil,
    b_sigma: HermitianMatrix,
}

impl LambdaSearch<'_> {
    fn eval(&self, lambda: &[C64]) -> f64 {
        pencil_distortion(self.pencil, &self.b_sigma, lambda).unwrap_or(f64::INFINITY)
    }

    /// `λ_1 = base_1`, `λ_i = base_i exp(p_a + i p_b)` for `i >= 2`.
    fn expand(base: &[C64], p: &[f64]) -> Vec<C64> {
        let n = base.len();
        let mut out = base.to_vec();
        for i in 1..n {
            let k = i - 1;
            out[i] = base[i] * C64::new(p[k], p[n - 1 + k]).exp();
        }
        out
    }

    fn minimize(&self, starts: &[Vec<C64>], iters: usize) -> (Vec<C64>, f64) {
        let n = self.b_sigma.dim();
        let dim = 2 * (n - 1);
        let mut best = (starts[0].clone(), self.eval(&starts[0]));
        for s in starts {
            let v0 = self.eval(s);
            if v0 < best.1 {
                best = (s.clone(), v0);
            }
            if best.1 <= 1.0 + EXACT_SLACK || dim == 0 {
                break;
            }
            let mut base = s.clone();
            // A second pass from the first result re-expands a collapsed simplex.
            for step in [0.3, 0.05] {
                let nm = NelderMead::new(iters, 1e-15, step);
                let m = nm.minimize(|p| self.eval(&Self::expand(&base, p)).ln(), &vec![0.0; dim]);
                base = Self::expand(&base, &m.x);
            }
            let v = self.eval(&base);
            if v < best.1 {
                best = (base, v);
            }
        }
        best
    }
}

fn normal(rng: &mut ChaCha8Rng, sd: f64) -> f64 {
    Normal::new(0.0, sd).expect("positive sd").sample(rng)
}

/// Upper bound for `δ_RK(H_X, H_Y)`, the infimum of `‖T‖ ‖T^{-1}‖` over
/// isomorphisms `H_X → H_Y` mapping kernel functions to multiples of kernel
/// functions.
pub fn rk_bm_distance(x: &PointSet, y: &PointSet, cfg: &OptimizerConfig) -> Result<RkBmReport> {
    x.check_same_dim(y)?;
    x.check_same_len(y)?;
    let (witness, exhaustive) = if x.canonical_cmp(y).is_gt() {
        let (w, e) = rk_search(y, x, cfg)?;
        (w.inverse()?, e)
    } else {
        rk_search(x, y, cfg)?
    };
    let delta = distortion(x, y, &witness)?;
    let psi_x = BallAutomorphism::elementary(x.point(0));
    let psi_y = BallAutomorphism::elementary(y.point(0));
    Ok(RkBmReport {
        delta,
        rho: delta.ln(),
        certificate: Certificate::UpperBound,
        witness,
        normalized_x: psi_x.apply_set(x)?,
        normalized_y: psi_y.apply_set(y)?,
        normalizing_automorphisms: (psi_x, psi_y),
        exhaustive,
    })
}

/// Candidate permutations: all of them for small `n`, otherwise the
/// bottleneck permutation, the identity and random transposition walks.
fn permutation_candidates(n: usize, seed: &[usize], cfg: &OptimizerConfig, rng: &mut ChaCha8Rng) -> (Vec<Vec<usize>>, bool) {
    if n <= EXHAUSTIVE_LIMIT {
        let mut p: Vec<usize> = (0..n).collect();
        let mut all = vec![p.clone()];
        while next_permutation(&mut p) {
            all.push(p.clone());
        }
        return (all, true);
    }
    let mut out = vec![seed.to_vec(), (0..n).collect()];
    for _ in 0..cfg.random_restarts {
        let mut p = seed.to_vec();
        let steps = rng.random_range(1..=n);
        for _ in 0..steps {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            p.swap(i, j);
        }
        out.push(p);
    }
    out.sort();
    out.dedup();
    (out, false)
}

fn rk_search(x: &PointSet, y: &PointSet, cfg: &OptimizerConfig) -> Result<(RescalingCandidate, bool)> {
    let n = x.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let psi_x = BallAutomorphism::elementary(x.point(0));
    let psi_y = BallAutomorphism::elementary(y.point(0));
    let xn = psi_x.apply_set(x)?;
    let yn = psi_y.apply_set(y)?;
    // k_{x_i} ↦ c_i k_{x'_i} and k_{y_j} ↦ e_j k_{y'_j} are isometries.
    let c = psi_x.kernel_factors(x);
    let e = psi_y.kernel_factors(y);
    let a = gram_matrix(&xn);
    let b = gram_matrix(&yn);
    let pencil = Pencil::new(&a)?;
    Pencil::new(&b)?;

    let (_, sigma_b) = symmetric(x, y, BaseMetric::Euclidean)?;
    // The rescaling λ = 1 in the original coordinates, written in normalized ones.
    let unit_in_normalized = |sigma: &[usize]| -> Vec<C64> { (0..n).map(|i| e[sigma[i]] / c[i]).collect() };

    let (perms, exhaustive) = permutation_candidates(n, &sigma_b, cfg, &mut rng);
    let mut screened: Vec<(f64, Vec<usize>)> = perms
        .into_iter()
        .map(|p| {
            let bs = b.permuted(&p);
            let lam = rank_one_rescaling(&a, &bs);
            let v = pencil_distortion(&pencil, &bs, &lam).unwrap_or(f64::INFINITY);
            (v, p)
        })
        .collect();
    screened.sort_by(|u, v| u.0.total_cmp(&v.0).then_with(|| u.1.cmp(&v.1)));
    let mut chosen: Vec<Vec<usize>> = screened.iter().take(REFINED_PERMUTATIONS).map(|s| s.1.clone()).collect();
    if !chosen.contains(&sigma_b) {
        chosen.push(sigma_b.clone());
    }

    let iters = cfg.local_search_iters.max(1) * n.max(1);
    let mut best: Option<(f64, Vec<usize>, Vec<C64>)> = None;
    for sigma in chosen {
        let bs = b.permuted(&sigma);
        let search = LambdaSearch {
            pencil: &pencil,
            b_sigma: bs.clone(),
        };
        let r1 = rank_one_rescaling(&a, &bs);
        let mut starts = vec![r1.clone(), vec![C64::new(1.0, 0.0); n], unit_in_normalized(&sigma)];
        while starts.len() < MULTISTARTS {
            let p: Vec<C64> = r1
                .iter()
                .map(|z| z * C64::new(normal(&mut rng, 0.3), normal(&mut rng, 0.3)).exp())
                .collect();
            starts.push(p);
        }
        let (lam, v) = search.minimize(&starts, iters);
        let better = match &best {
            None => true,
            Some((bv, bsig, _)) => v < *bv || (v == *bv && sigma < *bsig),
        };
        if better {
            best = Some((v, sigma, lam));
        }
        if best.as_ref().is_some_and(|b| b.0 <= 1.0 + EXACT_SLACK) {
            break;
        }
    }
    let (_, sigma, lam_n) = best.expect("at least one permutation");
    // Back to original coordinates: λ_i = c_i λ'_i / e_σ(i).
    let lambda: Vec<C64> = (0..n).map(|i| c[i] * lam_n[i] / e[sigma[i]]).collect();
    Ok((RescalingCandidate::new(sigma, lambda)?, exhaustive))
}

/// A-priori bound
/// `(1 + 4 n r (1 - r²)^{-2} ρ_s(X, Y) / min(λ_min(A), λ_min(B)))²`
/// on `δ_RK(H_X, H_Y)`, with `ρ_s` Euclidean, `r` the largest norm in `X ∪ Y`
/// and `A`, `B` the Gram matrices.
pub fn rk_bound_from_sets(x: &PointSet, y: &PointSet) -> Result<f64> {
    x.check_same_dim(y)?;
    x.check_same_len(y)?;
    let n = x.len() as f64;
    let r = x.max_norm().max(y.max_norm());
    let (rho_s, _) = symmetric(x, y, BaseMetric::Euclidean)?;
    let la = hermitian_eigenvalues(&gram_matrix(x))?[0];
    let lb = hermitian_eigenvalues(&gram_matrix(y))?[0];
    let t = 1.0 + 4.0 * n * r / (1.0 - r * r).powi(2) * rho_s / la.min(lb);
    Ok(t * t)
}

/// `C̃ (α - 1)^{1/4}` with `C = 30 α n/(1 - r²)²`, `C̃ = 2 (C d n^{1/2})^{1/2}` and
/// `r` the pseudohyperbolic diameter of `X`: an upper bound for the invariant
/// symmetric distance from `X` to any `Y` with `δ_RK(H_X, H_Y) < α`.
pub fn set_bound_from_rk(x: &PointSet, alpha: f64, d: usize, n: usize) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::Range {
            name: "alpha",
            value: alpha,
            range: "(1, 2)",
        });
    }
    let r = x.ph_diameter();
    let nf = n as f64;
    let c = 30.0 * alpha * nf / (1.0 - r * r).powi(2);
    let c_tilde = 2.0 * (c * d as f64 * nf.sqrt()).sqrt();
    Ok(c_tilde * (alpha - 1.0).powf(0.25))
}

/// Orders produced by [`n0_from_mult_bound`].
#[derive(Debug, Clone)]
pub struct MultTruncation {
    /// `max(self_order, tail_order)`.
    pub n0: usize,
    /// Self-truncation order of the normalized set.
    pub self_order: usize,
    /// Smallest `M` with `n R^{2(M+1)}/(1 - R²) <= eps λ_min(gram)`.
    pub tail_order: usize,
    /// The set actually used, moved so that it contains the origin.
    pub normalized: PointSet,
    /// Pseudohyperbolic diameter of the set.
    pub r: f64,
}

/// Truncation order `N_0` that turns a multiplier-distance bound below `R/r`
/// into a kernel comparison with factor `1 + eps`.
pub fn n0_from_mult_bound(x1: &PointSet, big_r: f64, eps: f64) -> Result<MultTruncation> {
    if !(big_r > 0.0 && big_r < 1.0) {
        return Err(Error::Range {
            name: "R",
            value: big_r,
            range: "(0, 1)",
        });
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Range {
            name: "eps",
            value: eps,
            range: "(0, inf)",
        });
    }
    let has_origin = x1.coords().any(|z| z.iter().all(|c| *c == C64::new(0.0, 0.0)));
    let normalized = if has_origin {
        x1.clone()
    } else {
        BallAutomorphism::elementary(x1.point(0)).apply_set(x1)?
    };
    let self_order = truncation_order_self(&normalized, eps)?;
    let n = normalized.len();
    let floor = eps * hermitian_eigenvalues(&gram_matrix(&normalized))?[0];
    let mut tail_order = 0;
    while crate::kernels::tail_bound(n, big_r, tail_order) > floor {
        tail_order += 1;
        if tail_order > crate::kernels::TRUNCATION_CAP {
            return Err(Error::NoConvergence(format!(
                "no tail order up to {} for R = {big_r}, eps = {eps}",
                crate::kernels::TRUNCATION_CAP
            )));
        }
    }
    Ok(MultTruncation {
        n0: self_order.max(tail_order),
        self_order,
        tail_order,
        r: normalized.ph_diameter(),
        normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{random_automorphism, random_point_set};

    fn reals(xs: &[f64]) -> PointSet {
        PointSet::from_reals(xs).unwrap()
    }

    #[test]
    fn identity_distortion_is_one() {
        let x = reals(&[0.0, 0.5, -0.2]);
        let d = distortion(&x, &x, &RescalingCandidate::identity(3)).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distortion_scale_invariant() {
        let x = reals(&[0.0, 0.5]);
        let c1 = RescalingCandidate::new(vec![0, 1], vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)]).unwrap();
        let c2 = RescalingCandidate::new(vec![0, 1], vec![C64::new(0.0, 3.0), C64::new(0.0, 6.0)]).unwrap();
        let d1 = distortion(&x, &x, &c1).unwrap();
        assert!(d1 > 1.0);
        assert!((d1 - distortion(&x, &x, &c2).unwrap()).abs() < 1e-12);
        assert_eq!(c1.lambda()[0], C64::new(0.5, 0.0));
    }

    #[test]
    fn rejects_bad_candidates() {
        assert!(RescalingCandidate::new(vec![0, 0], vec![C64::new(1.0, 0.0); 2]).is_err());
        assert!(RescalingCandidate::new(vec![0, 1], vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn congruent_sets_have_unit_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let cfg = OptimizerConfig::default();
        for d in 1..=3 {
            let x = random_point_set(4, d, 0.8, 0.05, &mut rng);
            let y = random_automorphism(d, 0.6, &mut rng).apply_set(&x).unwrap().permuted(&[1, 3, 0, 2]);
            let r = rk_bm_distance(&x, &y, &cfg).unwrap();
            assert!(r.delta <= 1.0 + 1e-9, "d = {d}: {}", r.delta);
        }
    }

    #[test]
    fn set_bound_example() {
        let x = reals(&[0.0, 0.5]);
        let alpha = 1.0001;
        let c = 60.0 * alpha / 0.5625;
        let ct = 2.0 * (c * 2f64.sqrt()).sqrt();
        let b = set_bound_from_rk(&x, alpha, 1, 2).unwrap();
        assert!((b - ct * 0.1).abs() < 1e-10 * b);
        assert!(set_bound_from_rk(&x, 2.0, 1, 2).is_err());
        assert!(set_bound_from_rk(&x, 1.0, 1, 2).is_err());
    }

    #[test]
    fn n0_single_point() {
        let t = n0_from_mult_bound(&reals(&[0.4]), 0.5, 0.5).unwrap();
        assert_eq!(t.self_order, 0);
        assert_eq!(t.n0, t.tail_order);
    }
}
