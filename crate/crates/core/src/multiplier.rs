//! Minimal-norm (row) multiplier interpolation on finite sets, the multiplier
//! discrepancy, and brackets for the multiplier Banach–Mazur distance.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ball::{pseudohyperbolic_raw, PointSet};
use crate::error::{Error, Result};
use crate::kernels::gram_matrix;
use crate::linalg::{bottleneck_assignment, next_permutation, HermitianMatrix, Pencil, C64};
use crate::optimize::OptimizerConfig;
use crate::rkhs::{rk_bm_distance, RkBmReport, EXHAUSTIVE_LIMIT};
use crate::set_metrics::{cost_matrix, BaseMetric};
use crate::Certificate;

/// Interpolation data `x_i ↦ t_i` with `t_i ∈ C^m`.
#[derive(Debug, Clone)]
pub struct PickInstance {
    nodes: PointSet,
    targets: Vec<DVector<C64>>,
}

impl PickInstance {
    pub fn new(nodes: PointSet, targets: Vec<DVector<C64>>) -> Result<Self> {
        if targets.len() != nodes.len() {
            return Err(Error::CardinalityMismatch {
                left: nodes.len(),
                right: targets.len(),
            });
        }
        let m = targets[0].len();
        if m == 0 {
            return Err(Error::Precondition("targets must have length at least 1".into()));
        }
        if let Some(t) = targets.iter().find(|t| t.len() != m) {
            return Err(Error::DimMismatch {
                expected: m,
                found: t.len(),
            });
        }
        if targets.iter().flat_map(|t| t.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Precondition("targets must be finite".into()));
        }
        Ok(PickInstance { nodes, targets })
    }

    /// Scalar targets.
    pub fn scalar(nodes: PointSet, targets: &[C64]) -> Result<Self> {
        Self::new(nodes, targets.iter().map(|&t| DVector::from_element(1, t)).collect())
    }

    pub fn nodes(&self) -> &PointSet {
        &self.nodes
    }

    pub fn targets(&self) -> &[DVector<C64>] {
        &self.targets
    }

    /// `[<t_i, t_j>]`.
    pub fn target_gram(&self) -> HermitianMatrix {
        target_gram(&self.targets.iter().collect::<Vec<_>>())
    }

    /// `[(C² - <t_i, t_j>) k(x_i, x_j)]`.
    pub fn pick_matrix(&self, c: f64) -> HermitianMatrix {
        let k = gram_matrix(&self.nodes);
        let t = self.target_gram();
        let n = k.dim();
        let m = DMatrix::from_fn(n, n, |i, j| {
            (C64::new(c * c, 0.0) - t.as_matrix()[(i, j)]) * k.as_matrix()[(i, j)]
        });
        HermitianMatrix::new(m).expect("product of Hermitian matrices entrywise")
    }
}

fn target_gram(t: &[&DVector<C64>]) -> HermitianMatrix {
    let n = t.len();
    let m = DMatrix::from_fn(n, n, |i, j| t[j].dotc(t[i]));
    HermitianMatrix::new(m).expect("Gram matrix of vectors")
}

/// Smallest `C` with `[(C² - <t_i, t_j>) k(x_i, x_j)] ⪰ 0`, i.e. the least
/// norm of a row multiplier of the Drury–Arveson space interpolating the data.
pub fn min_multiplier_norm(inst: &PickInstance) -> Result<f64> {
    let k = gram_matrix(&inst.nodes);
    let pencil = Pencil::new(&k)?;
    norm_with_pencil(&pencil, &k, &inst.target_gram())
}

fn norm_with_pencil(pencil: &Pencil, k: &HermitianMatrix, t: &HermitianMatrix) -> Result<f64> {
    let q = t.schur(k)?;
    let (_, hi) = pencil.extremes(&q)?;
    Ok(hi.max(0.0).sqrt())
}

#[derive(Debug, Clone)]
pub struct MultDiscrepancy {
    pub value: f64,
    /// `x_i` is paired with `y_σ(i)`.
    pub sigma: Vec<usize>,
    /// Least norm of a multiplier sending `x_i ↦ y_σ(i)`.
    pub forward_norm: f64,
    /// Least norm of a multiplier sending `y_σ(i) ↦ x_i`.
    pub backward_norm: f64,
    /// `Exact` when every bijection was checked.
    pub certificate: Certificate,
}

struct Sides {
    x: Vec<DVector<C64>>,
    y: Vec<DVector<C64>>,
    kx: HermitianMatrix,
    ky: HermitianMatrix,
    px: Pencil,
    py: Pencil,
}

impl Sides {
    fn new(x: &PointSet, y: &PointSet) -> Result<Self> {
        let kx = gram_matrix(x);
        let ky = gram_matrix(y);
        Ok(Sides {
            px: Pencil::new(&kx)?,
            py: Pencil::new(&ky)?,
            kx,
            ky,
            x: x.coords().cloned().collect(),
            y: y.coords().cloned().collect(),
        })
    }

    fn norms(&self, sigma: &[usize]) -> Result<(f64, f64)> {
        let n = sigma.len();
        let mut tau = vec![0; n];
        for (i, &s) in sigma.iter().enumerate() {
            tau[s] = i;
        }
        let fwd = target_gram(&sigma.iter().map(|&s| &self.y[s]).collect::<Vec<_>>());
        let bwd = target_gram(&tau.iter().map(|&i| &self.x[i]).collect::<Vec<_>>());
        Ok((
            norm_with_pencil(&self.px, &self.kx, &fwd)?,
            norm_with_pencil(&self.py, &self.ky, &bwd)?,
        ))
    }
}

type Best = (f64, Vec<usize>, f64, f64);

/// `min_σ max(‖x_i ↦ y_σ(i)‖, ‖y_σ(i) ↦ x_i‖)` over bijections, with the
/// coordinate maps as row-multiplier targets. All bijections are checked for
/// `n <= 8`; beyond that the search is a seeded local search and the value is
/// an upper bound.
pub fn mult_discrepancy(x: &PointSet, y: &PointSet) -> Result<MultDiscrepancy> {
    x.check_same_dim(y)?;
    x.check_same_len(y)?;
    let n = x.len();
    let sides = Sides::new(x, y)?;
    let mut best: Option<Best> = None;
    let consider = |best: &mut Option<Best>, sigma: &[usize]| -> Result<()> {
        let (f, b) = sides.norms(sigma)?;
        let v = f.max(b);
        let better = match best {
            None => true,
            Some((bv, bs, _, _)) => v < *bv || (v == *bv && sigma < bs.as_slice()),
        };
        if better {
            *best = Some((v, sigma.to_vec(), f, b));
        }
        Ok(())
    };
    let certificate = if n <= EXHAUSTIVE_LIMIT {
        let mut p: Vec<usize> = (0..n).collect();
        consider(&mut best, &p)?;
        while next_permutation(&mut p) {
            consider(&mut best, &p)?;
        }
        Certificate::Exact
    } else {
        let (_, seed) = bottleneck_assignment(&cost_matrix(x, y, BaseMetric::Pseudohyperbolic)?);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut starts = vec![seed.clone(), (0..n).collect()];
        for _ in 0..64 {
            let mut p = seed.clone();
            for _ in 0..rng.random_range(1..=n) {
                let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
                p.swap(i, j);
            }
            starts.push(p);
        }
        for p in starts {
            consider(&mut best, &p)?;
        }
        // Pairwise-swap descent from the incumbent.
        loop {
            let (v0, p0) = {
                let b = best.as_ref().expect("nonempty");
                (b.0, b.1.clone())
            };
            for i in 0..n {
                for j in (i + 1)..n {
                    let mut p = p0.clone();
                    p.swap(i, j);
                    consider(&mut best, &p)?;
                }
            }
            if best.as_ref().expect("nonempty").0 >= v0 {
                break;
            }
        }
        Certificate::UpperBound
    };
    let (value, sigma, forward_norm, backward_norm) = best.expect("at least one bijection");
    Ok(MultDiscrepancy {
        value,
        sigma,
        forward_norm,
        backward_norm,
        certificate,
    })
}

/// Certified bracket `lower <= δ_M(Mult(H_X), Mult(H_Y)) <= upper`.
#[derive(Debug, Clone)]
pub struct MultBmBracket {
    /// The multiplier discrepancy.
    pub lower: f64,
    /// `δ_RK²` from the kernel search.
    pub upper: f64,
    pub lower_witness: MultDiscrepancy,
    pub upper_source: RkBmReport,
    pub certificate: Certificate,
}

/// Brackets the multiplier Banach–Mazur distance between the multiplier
/// algebras of `H_X` and `H_Y`: from below by the multiplier discrepancy, from
/// above by the square of the kernel Banach–Mazur bound.
pub fn mult_bm_bracket(x: &PointSet, y: &PointSet, cfg: &OptimizerConfig) -> Result<MultBmBracket> {
    let lower_witness = mult_discrepancy(x, y)?;
    let upper_source = rk_bm_distance(x, y, cfg)?;
    let upper = upper_source.delta * upper_source.delta;
    Ok(MultBmBracket {
        lower: lower_witness.value,
        upper,
        lower_witness,
        upper_source,
        certificate: Certificate::Bracket,
    })
}

/// `max(1, ρ(y_1, y_2)/(2 ρ(x_1, x_2)), ρ(x_1, x_2)/(2 ρ(y_1, y_2)))`, a lower
/// bound for the multiplier Banach–Mazur distance of two-point sets.
pub fn two_point_mult_lower(x: &PointSet, y: &PointSet) -> Result<f64> {
    for s in [x, y] {
        if s.len() != 2 {
            return Err(Error::Cardinality {
                expected: 2,
                found: s.len(),
            });
        }
    }
    x.check_same_dim(y)?;
    let dx = pseudohyperbolic_raw(x.point(0).coords(), x.point(1).coords());
    let dy = pseudohyperbolic_raw(y.point(0).coords(), y.point(1).coords());
    Ok(1f64.max(dy / (2.0 * dx)).max(dx / (2.0 * dy)))
}
