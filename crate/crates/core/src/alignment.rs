//! Unitary Procrustes alignment of point configurations.

use nalgebra::DMatrix;

use crate::ball::{BallAutomorphism, PointSet};
use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, polar_unitary, singular_values, C64};

/// The `d × n` matrix whose columns are the coordinates of a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigurationMatrix {
    m: DMatrix<C64>,
}

impl ConfigurationMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        for (j, col) in m.column_iter().enumerate() {
            let r = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if !(r < 1.0) {
                return Err(Error::InvalidPoint {
                    index: j,
                    reason: format!("column norm {r} is not below 1"),
                });
            }
        }
        Ok(ConfigurationMatrix { m })
    }

    pub fn from_point_set(x: &PointSet) -> Self {
        let m = DMatrix::from_fn(x.dim(), x.len(), |i, j| x.point(j).coords()[i]);
        ConfigurationMatrix { m }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn d(&self) -> usize {
        self.m.nrows()
    }

    pub fn n(&self) -> usize {
        self.m.ncols()
    }
}

#[derive(Debug, Clone)]
pub struct ProcrustesSolution {
    /// Minimizer of `‖A - W B‖_F` over unitary `W`.
    pub unitary: DMatrix<C64>,
    /// `‖A - W B‖_F`.
    pub residual: f64,
    /// `Σ_{i ≤ d} σ_i(A)² + σ_i(B)² - 2 σ_i(A B^*)`, the closed-form optimum of `residual²`.
    pub singular_value_optimum: f64,
}

fn padded(mut s: Vec<f64>, d: usize) -> Vec<f64> {
    s.resize(d, 0.0);
    s
}

/// Solves `min_W ‖A - W B‖_F` over `U(d)` via the polar factor of `A B^*`.
pub fn procrustes(a: &ConfigurationMatrix, b: &ConfigurationMatrix) -> Result<ProcrustesSolution> {
    if a.d() != b.d() {
        return Err(Error::DimMismatch {
            expected: a.d(),
            found: b.d(),
        });
    }
    if a.n() != b.n() {
        return Err(Error::CardinalityMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    let d = a.d();
    let ab = &a.m * b.m.adjoint();
    let w = polar_unitary(&ab)?;
    let residual = frobenius_norm(&(&a.m - &w * &b.m));
    let sa = padded(singular_values(&a.m)?, d);
    let sb = padded(singular_values(&b.m)?, d);
    let sab = padded(singular_values(&ab)?, d);
    let singular_value_optimum = (0..d)
        .map(|i| sa[i] * sa[i] + sb[i] * sb[i] - 2.0 * sab[i])
        .sum();
    Ok(ProcrustesSolution {
        unitary: w,
        residual,
        singular_value_optimum,
    })
}

/// Checks `min_W ‖A - W B‖² <= d (2 ‖A‖_F ε^{1/2} + ε)` under the hypothesis
/// `‖A^*A - B^*B‖_F < ε`. A `false` result means a numerical fault.
pub fn procrustes_bound_check(
    a: &ConfigurationMatrix,
    b: &ConfigurationMatrix,
    eps: f64,
) -> Result<bool> {
    let sol = procrustes(a, b)?;
    let gap = frobenius_norm(&(a.m.adjoint() * &a.m - b.m.adjoint() * &b.m));
    if !(gap < eps) {
        return Err(Error::Precondition(format!(
            "‖A*A - B*B‖_F = {gap:e} is not below eps = {eps:e}"
        )));
    }
    let d = a.d() as f64;
    let bound = d * (2.0 * frobenius_norm(&a.m) * eps.sqrt() + eps);
    Ok(sol.residual * sol.residual <= bound)
}

/// Automorphism `Ψ_{x_a} ∘ W ∘ Ψ_{y_b}` carrying `y_{perm[i]}` approximately
/// onto `x_i`, where `W` solves the Procrustes problem for the configurations
/// normalized so that `x_a` and `y_b` sit at the origin.
pub fn align_with_anchors(
    x: &PointSet,
    y: &PointSet,
    anchor_x: usize,
    anchor_y: usize,
    perm: &[usize],
) -> Result<BallAutomorphism> {
    x.check_same_dim(y)?;
    x.check_same_len(y)?;
    if perm.len() != x.len() {
        return Err(Error::CardinalityMismatch {
            left: x.len(),
            right: perm.len(),
        });
    }
    let psi_x = BallAutomorphism::elementary(x.point(anchor_x));
    let psi_y = BallAutomorphism::elementary(y.point(anchor_y));
    let a = DMatrix::from_fn(x.dim(), x.len(), |i, j| {
        psi_x.apply_raw(x.point(j).coords())[i]
    });
    let b = DMatrix::from_fn(y.dim(), y.len(), |i, j| {
        psi_y.apply_raw(y.point(perm[j]).coords())[i]
    });
    let sol = procrustes(&ConfigurationMatrix { m: a }, &ConfigurationMatrix { m: b })?;
    let w = BallAutomorphism::unitary(sol.unitary)?;
    psi_x.compose(&w)?.compose(&psi_y)
}

/// Aligns `Y` onto `X` anchoring the first points of each set and pairing
/// points in order.
pub fn align_configurations(x: &PointSet, y: &PointSet) -> Result<BallAutomorphism> {
    let perm: Vec<usize> = (0..x.len()).collect();
    align_with_anchors(x, y, 0, 0, &perm)
}
