//! Hausdorff and symmetric distances between point sets, and their versions
//! minimized over automorphisms of the ball.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alignment::align_with_anchors;
use crate::ball::{
    euclidean, norm, pseudohyperbolic_raw, psi, random_ball_vector, random_unitary, BallAutomorphism,
    BallPoint, PointSet,
};
use crate::error::{Error, Result};
use crate::linalg::{bottleneck_assignment, bottleneck_value, polar_unitary, CostMatrix, C64};
use crate::optimize::{NelderMead, OptimizerConfig};
use crate::Certificate;

/// Largest norm allowed for the `w` parameter during automorphism searches.
pub const MAX_SEARCH_RADIUS: f64 = 1.0 - 1e-6;
/// Number of pool candidates per objective handed to local refinement.
const REFINE_TOP: usize = 4;
const POOL_STEP: f64 = 0.05;
const RANDOM_STEP: f64 = 0.1;
const RANDOM_SEED_RADIUS: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BaseMetric {
    Euclidean,
    Pseudohyperbolic,
}

impl BaseMetric {
    pub fn distance(self, z: &DVector<C64>, w: &DVector<C64>) -> f64 {
        match self {
            BaseMetric::Euclidean => euclidean(z, w),
            BaseMetric::Pseudohyperbolic => pseudohyperbolic_raw(z, w),
        }
    }
}

/// Row-major `|X| × |Y|` table of base distances.
struct Table {
    rows: usize,
    cols: usize,
    d: Vec<f64>,
}

impl Table {
    fn new(x: &[DVector<C64>], y: &[DVector<C64>], m: BaseMetric) -> Self {
        let mut d = Vec::with_capacity(x.len() * y.len());
        for a in x {
            for b in y {
                d.push(m.distance(a, b));
            }
        }
        Table {
            rows: x.len(),
            cols: y.len(),
            d,
        }
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.cols + j]
    }

    fn hausdorff(&self) -> f64 {
        let mut h = 0.0f64;
        for i in 0..self.rows {
            let m = (0..self.cols).map(|j| self.get(i, j)).fold(f64::INFINITY, f64::min);
            h = h.max(m);
        }
        for j in 0..self.cols {
            let m = (0..self.rows).map(|i| self.get(i, j)).fold(f64::INFINITY, f64::min);
            h = h.max(m);
        }
        h
    }

    fn cost(&self) -> Result<CostMatrix> {
        CostMatrix::from_fn(self.rows, |i, j| self.get(i, j))
    }
}

fn coords(x: &PointSet) -> Vec<DVector<C64>> {
    x.coords().cloned().collect()
}

/// `max(max_x min_y ρ(x, y), max_y min_x ρ(x, y))`. Cardinalities may differ.
pub fn hausdorff(x: &PointSet, y: &PointSet, m: BaseMetric) -> Result<f64> {
    x.check_same_dim(y)?;
    Ok(Table::new(&coords(x), &coords(y), m).hausdorff())
}

/// Table of `ρ(x_i, y_j)`.
pub fn cost_matrix(x: &PointSet, y: &PointSet, m: BaseMetric) -> Result<CostMatrix> {
    x.check_same_dim(y)?;
    x.check_same_len(y)?;
    Table::new(&coords(x), &coords(y), m).cost()
}

/// `min_σ max_i ρ(x_i, y_σ(i))` together with the lexicographically smallest
/// optimal `σ`.
pub fn symmetric(x: &PointSet, y: &PointSet, m: BaseMetric) -> Result<(f64, Vec<usize>)> {
    Ok(bottleneck_assignment(&cost_matrix(x, y, m)?))
}

/// Result of an automorphism search. `value` is the distance between `X` and
/// `witness(Y)`; for the symmetric distance, `x_i` is paired with
/// `witness(y_σ(i))` where `σ = witness_permutation`.
#[derive(Debug, Clone)]
pub struct InvariantDistanceReport {
    pub value: f64,
    pub certificate: Certificate,
    pub witness: BallAutomorphism,
    pub witness_permutation: Option<Vec<usize>>,
}

/// Both invariant distances computed on one shared candidate pool. The
/// symmetric distance is present only for sets of equal size.
#[derive(Debug, Clone)]
pub struct InvariantDistances {
    pub hausdorff: InvariantDistanceReport,
    pub symmetric: Option<InvariantDistanceReport>,
}

/// Automorphism-invariant Hausdorff distance `inf_Φ ρ_H(X, Φ(Y))` for the
/// pseudohyperbolic metric (an upper bound from a finite search).
pub fn invariant_hausdorff(
    x: &PointSet,
    y: &PointSet,
    cfg: &OptimizerConfig,
) -> Result<InvariantDistanceReport> {
    Ok(search(x, y, cfg, Want::Hausdorff)?.hausdorff)
}

/// Automorphism-invariant symmetric distance `inf_Φ ρ_s(X, Φ(Y))` for the
/// pseudohyperbolic metric (an upper bound from a finite search).
pub fn invariant_symmetric(
    x: &PointSet,
    y: &PointSet,
    cfg: &OptimizerConfig,
) -> Result<InvariantDistanceReport> {
    x.check_same_len(y)?;
    let both = search(x, y, cfg, Want::Symmetric)?;
    Ok(both.symmetric.expect("equal cardinalities"))
}

/// Both invariant distances from the same pool of automorphisms, so that
/// `hausdorff.value <= symmetric.value` holds candidate by candidate.
pub fn invariant_distances(
    x: &PointSet,
    y: &PointSet,
    cfg: &OptimizerConfig,
) -> Result<InvariantDistances> {
    search(x, y, cfg, Want::Both)
}

/// `|ρ(x_1, x_2) - ρ(y_1, y_2)| / 2`, a lower bound for the invariant
/// symmetric distance of two-point sets.
pub fn two_point_lower_bound(x: &PointSet, y: &PointSet) -> Result<f64> {
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
    Ok((dx - dy).abs() / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Want {
    Hausdorff,
    Symmetric,
    Both,
}

impl Want {
    fn hausdorff(self) -> bool {
        self != Want::Symmetric
    }

    fn symmetric(self) -> bool {
        self != Want::Hausdorff
    }
}

/// An automorphism in raw form, `z ↦ U Ψ_w(z)`.
#[derive(Debug, Clone)]
struct Candidate {
    w: DVector<C64>,
    u: DMatrix<C64>,
}

impl Candidate {
    fn from_automorphism(a: &BallAutomorphism) -> Self {
        Candidate {
            w: a.w().coords().clone(),
            u: a.u().clone(),
        }
    }

    fn apply(&self, z: &DVector<C64>) -> DVector<C64> {
        &self.u * psi(&self.w, z)
    }

    fn to_automorphism(&self) -> Result<BallAutomorphism> {
        BallAutomorphism::new(BallPoint::from_vector(self.w.clone())?, self.u.clone())
    }

    /// Local coordinates `(Re δw, Im δw, Re Δ, Im Δ)` around this candidate.
    fn perturbed(&self, p: &[f64]) -> Option<Candidate> {
        let d = self.w.len();
        let mut w = DVector::from_fn(d, |i, _| self.w[i] + C64::new(p[i], p[d + i]));
        let r = norm(&w);
        if r > MAX_SEARCH_RADIUS {
            w *= C64::new(MAX_SEARCH_RADIUS / r, 0.0);
        }
        let off = 2 * d;
        let m = DMatrix::from_fn(d, d, |i, j| {
            let k = i * d + j;
            self.u[(i, j)] + C64::new(p[off + k], p[off + d * d + k])
        });
        let u = polar_unitary(&m).ok()?;
        Some(Candidate { w, u })
    }
}

struct Problem {
    x: Vec<DVector<C64>>,
    y: Vec<DVector<C64>>,
}

#[derive(Debug, Clone, Copy)]
struct Scores {
    h: f64,
    s: f64,
}

impl Problem {
    fn table(&self, c: &Candidate) -> Table {
        let img: Vec<DVector<C64>> = self.y.iter().map(|z| c.apply(z)).collect();
        Table::new(&self.x, &img, BaseMetric::Pseudohyperbolic)
    }

    fn scores(&self, c: &Candidate, want: Want) -> Scores {
        let t = self.table(c);
        let h = if want.hausdorff() { t.hausdorff() } else { f64::NAN };
        let s = if want.symmetric() {
            t.cost().map(|c| bottleneck_value(&c)).unwrap_or(f64::INFINITY)
        } else {
            f64::NAN
        };
        Scores { h, s }
    }

    fn objective(&self, c: &Candidate, symmetric: bool) -> f64 {
        let t = self.table(c);
        if symmetric {
            t.cost().map(|c| bottleneck_value(&c)).unwrap_or(f64::INFINITY)
        } else {
            t.hausdorff()
        }
    }
}

fn unitary_grid(d: usize, rng: &mut ChaCha8Rng) -> Vec<DMatrix<C64>> {
    if d == 1 {
        (0..16)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / 16.0;
                DMatrix::from_element(1, 1, C64::from_polar(1.0, theta))
            })
            .collect()
    } else {
        (0..32).map(|_| random_unitary(d, rng)).collect()
    }
}

fn candidate_pool(x: &PointSet, y: &PointSet, rng: &mut ChaCha8Rng) -> Result<Vec<Candidate>> {
    let d = x.dim();
    let mut pool = vec![Candidate::from_automorphism(&BallAutomorphism::identity(d))];
    let grid = unitary_grid(d, rng);
    for i in 0..x.len() {
        let psi_x = BallAutomorphism::elementary(x.point(i));
        for j in 0..y.len() {
            let psi_y = BallAutomorphism::elementary(y.point(j));
            for u in &grid {
                let inner = BallAutomorphism::unitary(u.clone())?.compose(&psi_y)?;
                pool.push(Candidate::from_automorphism(&psi_x.compose(&inner)?));
            }
        }
    }
    if x.len() == y.len() {
        for i in 0..x.len() {
            let psi_x = BallAutomorphism::elementary(x.point(i));
            let nx: Vec<f64> = x.coords().map(|z| norm(&psi_x.apply_raw(z))).collect();
            for j in 0..y.len() {
                let psi_y = BallAutomorphism::elementary(y.point(j));
                let ny: Vec<f64> = y.coords().map(|z| norm(&psi_y.apply_raw(z))).collect();
                let c = CostMatrix::from_fn(x.len(), |a, b| (nx[a] - ny[b]).abs())?;
                let (_, perm) = bottleneck_assignment(&c);
                let a = align_with_anchors(x, y, i, j, &perm)?;
                pool.push(Candidate::from_automorphism(&a));
            }
        }
    }
    Ok(pool)
}

/// Index of the smallest value, earliest index on ties.
fn argmin(vals: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in vals.iter().enumerate() {
        if v.total_cmp(&vals[best]).is_lt() {
            best = k;
        }
    }
    best
}

fn refine(
    problem: &Problem,
    pool: &[Candidate],
    vals: &[f64],
    symmetric: bool,
    cfg: &OptimizerConfig,
    rng: &mut ChaCha8Rng,
) -> (Candidate, f64) {
    let best = argmin(vals);
    let mut winner = (pool[best].clone(), vals[best]);
    if winner.1 <= cfg.tolerance {
        return winner;
    }
    let d = problem.x[0].len();
    let dim = 2 * d + 2 * d * d;
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    let mut starts: Vec<(Candidate, f64)> = order
        .iter()
        .take(REFINE_TOP)
        .map(|&k| (pool[k].clone(), POOL_STEP))
        .collect();
    for _ in 0..cfg.random_restarts {
        let w = random_ball_vector(d, RANDOM_SEED_RADIUS, rng);
        let u = random_unitary(d, rng);
        starts.push((Candidate { w, u }, RANDOM_STEP));
    }
    for (base, step) in starts {
        let nm = NelderMead::new(cfg.local_search_iters, 1e-14, step);
        let m = nm.minimize(
            |p| match base.perturbed(p) {
                Some(c) => problem.objective(&c, symmetric),
                None => f64::INFINITY,
            },
            &vec![0.0; dim],
        );
        if m.f < winner.1 {
            if let Some(c) = base.perturbed(&m.x) {
                // Re-evaluate so the reported value is exactly that of the witness.
                let v = problem.objective(&c, symmetric);
                if v < winner.1 {
                    winner = (c, v);
                }
            }
        }
        if winner.1 <= cfg.tolerance {
            break;
        }
    }
    winner
}

fn search(x: &PointSet, y: &PointSet, cfg: &OptimizerConfig, want: Want) -> Result<InvariantDistances> {
    x.check_same_dim(y)?;
    let want = if x.len() == y.len() {
        want
    } else {
        Want::Hausdorff
    };
    // Work in a canonical order so the result does not depend on argument order.
    if x.canonical_cmp(y).is_gt() {
        let r = search_ordered(y, x, cfg, want)?;
        return Ok(InvariantDistances {
            hausdorff: swap_report(r.hausdorff)?,
            symmetric: r.symmetric.map(swap_report).transpose()?,
        });
    }
    search_ordered(x, y, cfg, want)
}

/// Turns a report for `(Y, X)` into one for `(X, Y)`: `ρ(Y, Φ X) = ρ(Φ^{-1} Y, X)`.
fn swap_report(r: InvariantDistanceReport) -> Result<InvariantDistanceReport> {
    let witness_permutation = r.witness_permutation.map(|tau| {
        let mut sigma = vec![0; tau.len()];
        for (i, &t) in tau.iter().enumerate() {
            sigma[t] = i;
        }
        sigma
    });
    Ok(InvariantDistanceReport {
        value: r.value,
        certificate: r.certificate,
        witness: r.witness.invert()?,
        witness_permutation,
    })
}

fn search_ordered(
    x: &PointSet,
    y: &PointSet,
    cfg: &OptimizerConfig,
    want: Want,
) -> Result<InvariantDistances> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let problem = Problem {
        x: coords(x),
        y: coords(y),
    };
    let pool = candidate_pool(x, y, &mut rng)?;
    let scores: Vec<Scores> = pool.iter().map(|c| problem.scores(c, want)).collect();

    let mut finals: Vec<(Candidate, Scores)> = Vec::new();
    if want.hausdorff() {
        let vals: Vec<f64> = scores.iter().map(|s| s.h).collect();
        let (c, _) = refine(&problem, &pool, &vals, false, cfg, &mut rng);
        let sc = problem.scores(&c, want);
        finals.push((c, sc));
    }
    if want.symmetric() {
        let vals: Vec<f64> = scores.iter().map(|s| s.s).collect();
        let (c, _) = refine(&problem, &pool, &vals, true, cfg, &mut rng);
        let sc = problem.scores(&c, want);
        finals.push((c, sc));
    }

    // Cross-evaluate the winners under both objectives.
    let pick = |key: fn(&Scores) -> f64| -> &(Candidate, Scores) {
        let vals: Vec<f64> = finals.iter().map(|(_, s)| key(s)).collect();
        &finals[argmin(&vals)]
    };
    let hausdorff = if want.hausdorff() {
        let (c, s) = pick(|s| s.h);
        Some(InvariantDistanceReport {
            value: s.h,
            certificate: Certificate::UpperBound,
            witness: c.to_automorphism()?,
            witness_permutation: None,
        })
    } else {
        None
    };
    let symmetric = if want.symmetric() {
        let (c, s) = pick(|s| s.s);
        let (_, perm) = bottleneck_assignment(&problem.table(c).cost()?);
        Some(InvariantDistanceReport {
            value: s.s,
            certificate: Certificate::UpperBound,
            witness: c.to_automorphism()?,
            witness_permutation: Some(perm),
        })
    } else {
        None
    };
    let hausdorff = match hausdorff {
        Some(h) => h,
        None => {
            // Only the symmetric distance was requested; report the Hausdorff
            // distance at its witness, which never exceeds it.
            let s = symmetric.as_ref().expect("one objective is requested");
            let img = s.witness.apply_set(y)?;
            InvariantDistanceReport {
                value: crate::set_metrics::hausdorff(x, &img, BaseMetric::Pseudohyperbolic)?,
                certificate: Certificate::UpperBound,
                witness: s.witness.clone(),
                witness_permutation: None,
            }
        }
    };
    Ok(InvariantDistances {
        hausdorff,
        symmetric,
    })
}
