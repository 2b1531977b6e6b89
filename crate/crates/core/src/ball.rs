//! Points of the open unit ball in `C^d`, the pseudohyperbolic metric, and
//! ball automorphisms written as `U ∘ Ψ_w`.
//!
//! Inner products are linear in the first argument: `<z, w> = Σ z_i conj(w_i)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, polar_unitary, C64};

/// Points with `‖z‖ >= 1 - BOUNDARY_MARGIN` are rejected.
pub const BOUNDARY_MARGIN: f64 = 1e-12;
/// Minimum Euclidean separation between points of a [`PointSet`].
pub const DISTINCT_TOL: f64 = 1e-12;
/// Allowed `‖U^*U - I‖_F` for the linear part of an automorphism.
pub const UNITARY_TOL: f64 = 1e-10;

/// `<z, w> = Σ z_i conj(w_i)`.
#[inline]
pub fn inner(z: &DVector<C64>, w: &DVector<C64>) -> C64 {
    w.dotc(z)
}

#[inline]
pub fn norm(z: &DVector<C64>) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn euclidean(z: &DVector<C64>, w: &DVector<C64>) -> f64 {
    z.iter()
        .zip(w.iter())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// The elementary involution `Ψ_w(z) = (w - P_w z - s_w Q_w z) / (1 - <z, w>)`
/// with `s_w = (1 - ‖w‖²)^{1/2}` and `Q_w = I - P_w`.
pub fn psi(w: &DVector<C64>, z: &DVector<C64>) -> DVector<C64> {
    let ww = w.norm_squared();
    let zw = inner(z, w);
    let s = (1.0 - ww).sqrt();
    let denom = C64::new(1.0, 0.0) - zw;
    let coef = if ww > 0.0 { zw / ww } else { C64::new(0.0, 0.0) };
    DVector::from_fn(w.len(), |i, _| {
        let p = w[i] * coef;
        (w[i] - p - (z[i] - p) * s) / denom
    })
}

/// `‖Ψ_w(z)‖` without allocating.
pub fn pseudohyperbolic_raw(z: &DVector<C64>, w: &DVector<C64>) -> f64 {
    let ww = w.norm_squared();
    let zw = inner(z, w);
    let s = (1.0 - ww).sqrt();
    let coef = if ww > 0.0 { zw / ww } else { C64::new(0.0, 0.0) };
    let mut acc = 0.0;
    for i in 0..w.len() {
        let p = w[i] * coef;
        acc += (w[i] - p - (z[i] - p) * s).norm_sqr();
    }
    acc.sqrt() / (C64::new(1.0, 0.0) - zw).norm()
}

/// A point of the open unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    coords: DVector<C64>,
}

impl BallPoint {
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(coords))
    }

    pub fn from_vector(coords: DVector<C64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidPoint {
                index: 0,
                reason: "zero-dimensional point".into(),
            });
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidPoint {
                index: 0,
                reason: "non-finite coordinate".into(),
            });
        }
        let r = norm(&coords);
        if r >= 1.0 - BOUNDARY_MARGIN {
            return Err(Error::InvalidPoint {
                index: 0,
                reason: format!("norm {r} is not inside the open unit ball"),
            });
        }
        Ok(BallPoint { coords })
    }

    /// A point of the disc (`d = 1`).
    pub fn scalar(z: C64) -> Result<Self> {
        Self::new(vec![z])
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::scalar(C64::new(x, 0.0))
    }

    pub fn origin(d: usize) -> Self {
        BallPoint {
            coords: DVector::zeros(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &DVector<C64> {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }

    /// `<self, other>`.
    pub fn inner(&self, other: &BallPoint) -> C64 {
        inner(&self.coords, &other.coords)
    }

    fn check_dim(&self, other: &BallPoint) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

/// Pseudohyperbolic distance `‖Ψ_w(z)‖`.
pub fn pseudohyperbolic(z: &BallPoint, w: &BallPoint) -> Result<f64> {
    z.check_dim(w)?;
    Ok(pseudohyperbolic_raw(&z.coords, &w.coords))
}

/// An ordered list of distinct points of the ball, all of the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    points: Vec<BallPoint>,
}

impl PointSet {
    pub fn new(points: Vec<BallPoint>) -> Result<Self> {
        let first = points.first().ok_or(Error::Cardinality {
            expected: 1,
            found: 0,
        })?;
        let dim = first.dim();
        for (i, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            for (j, q) in points.iter().enumerate().take(i) {
                if euclidean(&p.coords, &q.coords) <= DISTINCT_TOL {
                    return Err(Error::InvalidPoint {
                        index: i,
                        reason: format!("duplicates point {j}"),
                    });
                }
            }
        }
        Ok(PointSet { dim, points })
    }

    /// Validates raw coordinate vectors, reporting the offending index.
    pub fn from_coords(coords: Vec<Vec<C64>>) -> Result<Self> {
        let points = coords
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                BallPoint::new(c).map_err(|e| match e {
                    Error::InvalidPoint { reason, .. } => Error::InvalidPoint { index: i, reason },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    /// Points of the disc given as complex numbers.
    pub fn from_scalars(zs: &[C64]) -> Result<Self> {
        Self::from_coords(zs.iter().map(|&z| vec![z]).collect())
    }

    pub fn from_reals(xs: &[f64]) -> Result<Self> {
        Self::from_coords(xs.iter().map(|&x| vec![C64::new(x, 0.0)]).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[BallPoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &BallPoint {
        &self.points[i]
    }

    pub fn coords(&self) -> impl Iterator<Item = &DVector<C64>> {
        self.points.iter().map(|p| &p.coords)
    }

    /// Largest Euclidean norm over the set.
    pub fn max_norm(&self) -> f64 {
        self.points.iter().map(BallPoint::norm).fold(0.0, f64::max)
    }

    /// The set reordered so that entry `i` is `self[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> PointSet {
        PointSet {
            dim: self.dim,
            points: perm.iter().map(|&k| self.points[k].clone()).collect(),
        }
    }

    pub fn check_same_dim(&self, other: &PointSet) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn check_same_len(&self, other: &PointSet) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::CardinalityMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    /// Largest pseudohyperbolic distance between two points of the set.
    pub fn ph_diameter(&self) -> f64 {
        let mut r: f64 = 0.0;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[..i] {
                r = r.max(pseudohyperbolic_raw(&p.coords, &q.coords));
            }
        }
        r
    }

    /// Smallest pseudohyperbolic distance between two distinct points
    /// (`+inf` for a single point).
    pub fn ph_separation(&self) -> f64 {
        let mut r = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[..i] {
                r = r.min(pseudohyperbolic_raw(&p.coords, &q.coords));
            }
        }
        r
    }

    /// Total order on sets used to canonicalize symmetric computations.
    pub fn canonical_cmp(&self, other: &PointSet) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then(self.dim.cmp(&other.dim))
            .then_with(|| {
                let a = self.coords().flat_map(|c| c.iter().flat_map(|z| [z.re, z.im]));
                let b = other.coords().flat_map(|c| c.iter().flat_map(|z| [z.re, z.im]));
                for (x, y) in a.zip(b) {
                    match x.total_cmp(&y) {
                        std::cmp::Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                std::cmp::Ordering::Equal
            })
    }
}

/// The automorphism `z ↦ U Ψ_w(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallAutomorphism {
    w: BallPoint,
    u: DMatrix<C64>,
}

impl BallAutomorphism {
    pub fn new(w: BallPoint, u: DMatrix<C64>) -> Result<Self> {
        let d = w.dim();
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::DimMismatch {
                expected: d,
                found: u.nrows().max(u.ncols()),
            });
        }
        let defect = frobenius_norm(&(u.adjoint() * &u - DMatrix::identity(d, d)));
        if !(defect <= UNITARY_TOL) {
            return Err(Error::InvalidMatrix(format!(
                "linear part is not unitary: ‖U*U - I‖_F = {defect:e}"
            )));
        }
        Ok(BallAutomorphism { w, u })
    }

    /// `Ψ_w` itself.
    pub fn elementary(w: &BallPoint) -> Self {
        let d = w.dim();
        BallAutomorphism {
            w: w.clone(),
            u: DMatrix::identity(d, d),
        }
    }

    /// The identity map, `(0, -I)`, since `Ψ_0(z) = -z`.
    pub fn identity(d: usize) -> Self {
        BallAutomorphism {
            w: BallPoint::origin(d),
            u: -DMatrix::<C64>::identity(d, d),
        }
    }

    /// The linear automorphism `z ↦ V z`.
    pub fn unitary(v: DMatrix<C64>) -> Result<Self> {
        let d = v.nrows();
        Self::new(BallPoint::origin(d), -v)
    }

    pub fn dim(&self) -> usize {
        self.w.dim()
    }

    pub fn w(&self) -> &BallPoint {
        &self.w
    }

    pub fn u(&self) -> &DMatrix<C64> {
        &self.u
    }

    /// Applies the map to a raw vector, without validating the image.
    pub fn apply_raw(&self, z: &DVector<C64>) -> DVector<C64> {
        &self.u * psi(&self.w.coords, z)
    }

    pub fn apply(&self, z: &BallPoint) -> Result<BallPoint> {
        self.w.check_dim(z)?;
        BallPoint::from_vector(self.apply_raw(&z.coords))
    }

    pub fn apply_set(&self, x: &PointSet) -> Result<PointSet> {
        if x.dim() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        let pts = x
            .points()
            .iter()
            .map(|p| self.apply(p))
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(pts)
    }

    /// Preimage of `z` under the map: `Ψ_w(U^* z)`.
    pub fn apply_inverse_raw(&self, z: &DVector<C64>) -> DVector<C64> {
        psi(&self.w.coords, &(self.u.adjoint() * z))
    }

    /// Writes an automorphism `F` given as a closure in `U' ∘ Ψ_{w'}` form,
    /// where `w' = F^{-1}(0)` is supplied by the caller. `U'` is sampled from
    /// the linear map `F ∘ Ψ_{w'}` and projected onto the unitary group.
    fn from_map(w_new: DVector<C64>, f: impl Fn(&DVector<C64>) -> DVector<C64>) -> Result<Self> {
        let d = w_new.len();
        let w_new = BallPoint::from_vector(w_new)?;
        let t = 0.5;
        let mut cols = DMatrix::<C64>::zeros(d, d);
        for k in 0..d {
            let mut e = DVector::<C64>::zeros(d);
            e[k] = C64::new(t, 0.0);
            let img = f(&psi(&w_new.coords, &e)) / C64::new(t, 0.0);
            cols.set_column(k, &img);
        }
        let u = polar_unitary(&cols)?;
        Self::new(w_new, u)
    }

    /// `Φ^{-1} = Ψ_w ∘ U^*`, rewritten as `U' ∘ Ψ_{U w}`.
    pub fn invert(&self) -> Result<Self> {
        let w_new = &self.u * &self.w.coords;
        Self::from_map(w_new, |z| self.apply_inverse_raw(z))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &BallAutomorphism) -> Result<Self> {
        if inner.dim() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: inner.dim(),
            });
        }
        let w_new = inner.apply_inverse_raw(&self.w.coords);
        Self::from_map(w_new, |z| self.apply_raw(&inner.apply_raw(z)))
    }

    /// Multipliers `c_i` with `k(x_i, x_j) = conj(c_i) c_j k(Φ x_i, Φ x_j)`, so
    /// that `k_{x_i} ↦ c_i k_{Φ(x_i)}` is an isometry `H_X → H_{Φ(X)}`.
    pub fn kernel_factors(&self, x: &PointSet) -> Vec<C64> {
        let a = &self.w.coords;
        let s = (1.0 - a.norm_squared()).sqrt();
        x.coords()
            .map(|z| C64::new(s, 0.0) / (C64::new(1.0, 0.0) - inner(a, z)))
            .collect()
    }
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..d {
        let rk = r[(k, k)];
        let phase = if rk.norm() > 0.0 { rk / rk.norm() } else { C64::new(1.0, 0.0) };
        let col = q.column(k) * phase;
        q.set_column(k, &col);
    }
    q
}

/// A point drawn uniformly from the ball of radius `radius` in `C^d`.
pub fn random_ball_vector<R: Rng + ?Sized>(d: usize, radius: f64, rng: &mut R) -> DVector<C64> {
    let g = DVector::from_fn(d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let n = norm(&g).max(f64::MIN_POSITIVE);
    let u: f64 = rng.random();
    let rad = radius * u.powf(1.0 / (2.0 * d as f64));
    g * C64::new(rad / n, 0.0)
}

pub fn random_point<R: Rng + ?Sized>(d: usize, radius: f64, rng: &mut R) -> BallPoint {
    BallPoint::from_vector(random_ball_vector(d, radius.min(1.0 - 1e-9), rng))
        .expect("radius keeps the sample inside the ball")
}

/// `U ∘ Ψ_w` with `w` uniform in `radius·B_d` and Haar `U`.
pub fn random_automorphism<R: Rng + ?Sized>(d: usize, radius: f64, rng: &mut R) -> BallAutomorphism {
    let w = random_point(d, radius, rng);
    let u = random_unitary(d, rng);
    BallAutomorphism::new(w, u).expect("Haar sample is unitary")
}

/// `n` points uniform in `radius·B_d`, resampled until pairwise separated by `min_sep`.
pub fn random_point_set<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    radius: f64,
    min_sep: f64,
    rng: &mut R,
) -> PointSet {
    let mut pts: Vec<BallPoint> = Vec::with_capacity(n);
    while pts.len() < n {
        let p = random_point(d, radius, rng);
        if pts.iter().all(|q| euclidean(p.coords(), q.coords()) > min_sep) {
            pts.push(p);
        }
    }
    PointSet::new(pts).expect("separated sample")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64) -> BallPoint {
        BallPoint::real(x).unwrap()
    }

    #[test]
    fn distance_from_origin_is_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..4 {
            for _ in 0..20 {
                let w = random_point(d, 0.95, &mut rng);
                let r = pseudohyperbolic(&BallPoint::origin(d), &w).unwrap();
                assert!((r - w.norm()).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn disc_formula() {
        let r = pseudohyperbolic(&p(0.5), &p(0.25)).unwrap();
        assert!((r - 2.0 / 7.0).abs() < 1e-15);
        assert_eq!(pseudohyperbolic(&p(0.3), &p(0.3)).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let z = BallPoint::origin(2);
        assert!(matches!(
            pseudohyperbolic(&z, &p(0.1)),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn elementary_swaps_origin_and_w() {
        let w = BallPoint::new(vec![C64::new(0.3, -0.2), C64::new(0.1, 0.4)]).unwrap();
        let psi_w = BallAutomorphism::elementary(&w);
        assert!(psi_w.apply(&w).unwrap().norm() <= 1e-12);
        let img = psi_w.apply(&BallPoint::origin(2)).unwrap();
        assert!(euclidean(img.coords(), w.coords()) <= 1e-12);
        let half = BallAutomorphism::elementary(&p(0.5));
        let v = half.apply(&p(0.25)).unwrap();
        assert!((v.coords()[0] - C64::new(2.0 / 7.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn psi_zero_is_negation_and_involution() {
        let z = BallPoint::new(vec![C64::new(0.2, 0.1), C64::new(-0.3, 0.0)]).unwrap();
        let psi0 = BallAutomorphism::elementary(&BallPoint::origin(2));
        let once = psi0.apply(&z).unwrap();
        assert!(euclidean(once.coords(), &(-z.coords())) < 1e-15);
        let twice = psi0.apply(&once).unwrap();
        assert!(euclidean(twice.coords(), z.coords()) < 1e-15);
        let id = BallAutomorphism::identity(2);
        assert!(euclidean(id.apply(&z).unwrap().coords(), z.coords()) < 1e-15);
    }

    #[test]
    fn rejects_boundary_and_duplicates() {
        assert!(BallPoint::real(1.0).is_err());
        assert!(BallPoint::real(1.0 - 1e-13).is_err());
        assert!(BallPoint::real(0.999).is_ok());
        let err = PointSet::from_reals(&[0.1, 0.2, 0.1]).unwrap_err();
        assert!(matches!(err, Error::InvalidPoint { index: 2, .. }));
        let err = PointSet::from_reals(&[0.1, 1.5]).unwrap_err();
        assert!(matches!(err, Error::InvalidPoint { index: 1, .. }));
    }

    #[test]
    fn involution_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = random_point(3, 0.9, &mut rng);
        let psi_w = BallAutomorphism::elementary(&w);
        let inv = psi_w.invert().unwrap();
        for _ in 0..20 {
            let z = random_point(3, 0.95, &mut rng);
            let back = inv.apply(&psi_w.apply(&z).unwrap()).unwrap();
            assert!(euclidean(back.coords(), z.coords()) < 1e-10);
            let twice = psi_w.apply(&psi_w.apply(&z).unwrap()).unwrap();
            assert!(euclidean(twice.coords(), z.coords()) < 1e-10);
        }
    }

    #[test]
    fn invert_linear_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(2, &mut rng);
        let phi = BallAutomorphism::new(BallPoint::origin(2), u.clone()).unwrap();
        let inv = phi.invert().unwrap();
        assert!(inv.w().norm() < 1e-15);
        assert!(frobenius_norm(&(inv.u() - u.adjoint())) < 1e-12);
    }

    #[test]
    fn compose_matches_sequential_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in 1..4 {
            let f = random_automorphism(d, 0.8, &mut rng);
            let g = random_automorphism(d, 0.8, &mut rng);
            let fg = f.compose(&g).unwrap();
            for _ in 0..10 {
                let z = random_point(d, 0.9, &mut rng);
                let a = fg.apply(&z).unwrap();
                let b = f.apply(&g.apply(&z).unwrap()).unwrap();
                assert!(euclidean(a.coords(), b.coords()) < 1e-10);
            }
        }
    }

    #[test]
    fn kernel_factors_match_gram_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_point_set(4, 2, 0.9, 0.05, &mut rng);
        let phi = random_automorphism(2, 0.7, &mut rng);
        let y = phi.apply_set(&x).unwrap();
        let c = phi.kernel_factors(&x);
        let k = |a: &BallPoint, b: &BallPoint| C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - a.inner(b));
        for i in 0..4 {
            for j in 0..4 {
                let lhs = k(x.point(i), x.point(j));
                let rhs = c[i].conj() * c[j] * k(y.point(i), y.point(j));
                assert!((lhs - rhs).norm() < 1e-10 * lhs.norm());
            }
        }
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let u = random_unitary(4, &mut rng);
        assert!(frobenius_norm(&(u.adjoint() * &u - DMatrix::identity(4, 4))) < 1e-12);
    }
}
