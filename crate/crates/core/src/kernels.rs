//! Gram matrices of the kernel `k(z, w) = 1/(1 - <z, w>)`, Schur power sums
//! and truncation orders for the geometric series behind them.

use nalgebra::DMatrix;

use crate::ball::{inner, PointSet};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, is_psd, HermitianMatrix, C64};

/// Truncation searches give up past this order.
pub const TRUNCATION_CAP: usize = 10_000;
/// Relative floor on `lambda_min` used to detect when the partial sums become definite.
pub const STABILIZATION_TOL: f64 = 1e-10;
/// PSD tolerance for the direct self-truncation inequality.
pub const SELF_CHECK_TOL: f64 = 1e-12;
/// PSD tolerance for the kernel domination test.
pub const DOMINATION_TOL: f64 = 1e-10;

/// `[k(x_i, x_j)]` for a point set.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    base: PointSet,
    entries: HermitianMatrix,
}

impl GramMatrix {
    pub fn base(&self) -> &PointSet {
        &self.base
    }

    pub fn entries(&self) -> &HermitianMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> HermitianMatrix {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }
}

/// `[<x_i, x_j>]` for a point set.
#[derive(Debug, Clone)]
pub struct InnerProductMatrix {
    base: PointSet,
    entries: HermitianMatrix,
}

impl InnerProductMatrix {
    pub fn base(&self) -> &PointSet {
        &self.base
    }

    pub fn entries(&self) -> &HermitianMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }
}

pub fn gram(x: &PointSet) -> GramMatrix {
    GramMatrix {
        base: x.clone(),
        entries: gram_matrix(x),
    }
}

/// Just the Hermitian entries of [`gram`].
pub fn gram_matrix(x: &PointSet) -> HermitianMatrix {
    let n = x.len();
    let one = C64::new(1.0, 0.0);
    let m = DMatrix::from_fn(n, n, |i, j| {
        one / (one - inner(x.point(i).coords(), x.point(j).coords()))
    });
    HermitianMatrix::symmetrized(m)
}

pub fn inner_product_matrix(x: &PointSet) -> InnerProductMatrix {
    let n = x.len();
    let m = DMatrix::from_fn(n, n, |i, j| {
        inner(x.point(i).coords(), x.point(j).coords())
    });
    InnerProductMatrix {
        base: x.clone(),
        entries: HermitianMatrix::symmetrized(m),
    }
}

/// Entrywise `sum_{k=0}^{N} a_ij^k`.
pub fn schur_power_sum(g: &InnerProductMatrix, n_terms: usize) -> HermitianMatrix {
    let mut sums = PartialSums::new(g);
    for _ in 0..n_terms {
        sums.advance();
    }
    sums.current()
}

/// Incrementally maintained `S_N = sum_{k<=N} A^{∘k}`.
struct PartialSums {
    a: DMatrix<C64>,
    power: DMatrix<C64>,
    sum: DMatrix<C64>,
    order: usize,
}

impl PartialSums {
    fn new(g: &InnerProductMatrix) -> Self {
        let n = g.dim();
        let ones = DMatrix::from_element(n, n, C64::new(1.0, 0.0));
        PartialSums {
            a: g.entries.as_matrix().clone(),
            power: ones.clone(),
            sum: ones,
            order: 0,
        }
    }

    fn advance(&mut self) {
        self.power.component_mul_assign(&self.a);
        self.sum += &self.power;
        self.order += 1;
    }

    fn current(&self) -> HermitianMatrix {
        HermitianMatrix::symmetrized(self.sum.clone())
    }
}

/// Operator-norm bound `n r^{2(N+1)} / (1 - r^2)` on `sum_{k>N} B^{∘k}` for any
/// inner-product matrix `B` of `n` vectors in `r B_d`.
pub fn tail_bound(n: usize, r: f64, order: usize) -> f64 {
    n as f64 * r.powi(2 * (order as i32 + 1)) / (1.0 - r * r)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Range {
            name: "eps",
            value: eps,
            range: "(0, inf)",
        });
    }
    Ok(())
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Range {
            name: "r",
            value: r,
            range: "(0, 1)",
        });
    }
    Ok(())
}

fn tail_condition(s: &HermitianMatrix, n: usize, r: f64, eps: f64, order: usize) -> Result<bool> {
    let vals = hermitian_eigenvalues(s)?;
    let (lo, hi) = (vals[0], vals[vals.len() - 1]);
    if !(lo > STABILIZATION_TOL * hi) {
        return Ok(false);
    }
    Ok(eps * lo >= tail_bound(n, r, order))
}

/// Whether `eps S_N ⪰ (n r^{2(N+1)}/(1 - r^2)) I` with `S_N` definite, the
/// sufficient condition used by [`truncation_order_tail`].
pub fn tail_condition_holds(v: &PointSet, r: f64, eps: f64, order: usize) -> Result<bool> {
    check_radius(r)?;
    check_eps(eps)?;
    let s = schur_power_sum(&inner_product_matrix(v), order);
    tail_condition(&s, v.len(), r, eps, order)
}

/// Smallest `N` with `eps sum_{k<=N} A^{∘k} ⪰ (n r^{2(N+1)}/(1 - r^2)) I`,
/// where `A = [<v_i, v_j>]`. Then
/// `eps [sum_{k<=N} <v_i,v_j>^k] ⪰ [sum_{k>N} <u_i,u_j>^k]` for every
/// `u_1, ..., u_n` in `r B_d`.
pub fn truncation_order_tail(v: &PointSet, r: f64, eps: f64) -> Result<usize> {
    check_radius(r)?;
    check_eps(eps)?;
    let n = v.len();
    let mut sums = PartialSums::new(&inner_product_matrix(v));
    loop {
        if tail_condition(&sums.current(), n, r, eps, sums.order)? {
            return Ok(sums.order);
        }
        if sums.order >= TRUNCATION_CAP {
            return Err(Error::NoConvergence(format!(
                "no truncation order up to {TRUNCATION_CAP} for r = {r}, eps = {eps}"
            )));
        }
        sums.advance();
    }
}

/// Whether `[sum_{k<=N} <v_i,v_j>^k] ⪰ gram(V)/(1 + eps)`.
pub fn self_condition_holds(v: &PointSet, eps: f64, order: usize) -> Result<bool> {
    check_eps(eps)?;
    let s = schur_power_sum(&inner_product_matrix(v), order);
    self_condition(&s, &gram_matrix(v), eps)
}

fn self_condition(s: &HermitianMatrix, g: &HermitianMatrix, eps: f64) -> Result<bool> {
    let diff = s.sub(&g.scale(1.0 / (1.0 + eps)))?;
    Ok(is_psd(&diff, SELF_CHECK_TOL))
}

/// Smallest `N` with `[sum_{k<=N} <v_i,v_j>^k] ⪰ gram(V)/(1 + eps)`.
///
/// The tail search with `r = max ‖v_i‖` gives an order at which the
/// inequality is guaranteed; it is then lowered while the inequality still
/// holds when checked directly.
pub fn truncation_order_self(v: &PointSet, eps: f64) -> Result<usize> {
    check_eps(eps)?;
    let r = v.max_norm();
    if r == 0.0 {
        return Ok(0);
    }
    let mut order = truncation_order_tail(v, r, eps)?;
    let g = gram_matrix(v);
    let ip = inner_product_matrix(v);
    if !self_condition(&schur_power_sum(&ip, order), &g, eps)? {
        return Err(Error::NoConvergence(format!(
            "order {order} from the tail bound fails the direct check"
        )));
    }
    while order > 0 && self_condition(&schur_power_sum(&ip, order - 1), &g, eps)? {
        order -= 1;
    }
    Ok(order)
}

/// Whether `[k(x_i, x_j) - 1/(1 - C^{-2} <G x_i, G x_j>)] ⪰ 0`, i.e. the
/// kernel of `X2` dominates the kernel pulled back through `G/C`.
pub fn kernel_domination(x2: &PointSet, mapped: &PointSet, c: f64) -> Result<bool> {
    x2.check_same_len(mapped)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Range {
            name: "C",
            value: c,
            range: "(0, inf)",
        });
    }
    for (index, p) in mapped.points().iter().enumerate() {
        let norm = p.norm();
        if norm >= c {
            return Err(Error::Scale {
                index,
                norm,
                scale: c,
            });
        }
    }
    let n = x2.len();
    let one = C64::new(1.0, 0.0);
    let c2 = c * c;
    let k2 = gram_matrix(x2);
    let kg = DMatrix::from_fn(n, n, |i, j| {
        one / (one - inner(mapped.point(i).coords(), mapped.point(j).coords()) / c2)
    });
    let diff = k2.sub(&HermitianMatrix::symmetrized(kg))?;
    Ok(is_psd(&diff, DOMINATION_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_set(xs: &[f64]) -> PointSet {
        PointSet::from_reals(xs).unwrap()
    }

    #[test]
    fn gram_examples() {
        let g = gram_matrix(&real_set(&[0.0]));
        assert_eq!(g.as_matrix()[(0, 0)], C64::new(1.0, 0.0));
        let g = gram_matrix(&real_set(&[0.0, 0.5]));
        let m = g.as_matrix();
        assert!((m[(0, 1)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((m[(1, 1)] - C64::new(4.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn schur_sum_examples() {
        let ip = inner_product_matrix(&real_set(&[0.0, 0.5]));
        let s0 = schur_power_sum(&ip, 0);
        assert!(s0.as_matrix().iter().all(|z| (*z - C64::new(1.0, 0.0)).norm() < 1e-15));
        let s2 = schur_power_sum(&ip, 2);
        assert!((s2.as_matrix()[(1, 1)].re - 1.3125).abs() < 1e-15);
        assert!((s2.as_matrix()[(0, 1)].re - 1.0).abs() < 1e-15);
        let origin = inner_product_matrix(&real_set(&[0.0]));
        assert_eq!(schur_power_sum(&origin, 7).as_matrix()[(0, 0)].re, 1.0);
    }

    #[test]
    fn scalar_tail_order() {
        assert_eq!(truncation_order_tail(&real_set(&[0.0]), 0.5, 0.1).unwrap(), 1);
    }

    #[test]
    fn self_order_for_origin_is_zero() {
        assert_eq!(truncation_order_self(&real_set(&[0.0]), 0.3).unwrap(), 0);
    }

    #[test]
    fn tail_search_caps_out() {
        let v = real_set(&[0.0, 0.5]);
        assert!(matches!(
            truncation_order_tail(&v, 0.999999, 1e-12),
            Err(Error::NoConvergence(_))
        ));
        assert!(truncation_order_tail(&v, 1.0, 0.1).is_err());
    }

    #[test]
    fn domination_examples() {
        let x = real_set(&[0.0, 0.5, -0.3]);
        assert!(kernel_domination(&x, &x, 1.0).unwrap());
        assert!(kernel_domination(&x, &x, 2.0).unwrap());
        let y = real_set(&[0.0, 0.9]);
        match kernel_domination(&y, &y, 0.95) {
            Err(Error::Scale { index: 1, .. }) => {}
            Ok(false) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
