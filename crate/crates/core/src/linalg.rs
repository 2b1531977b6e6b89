//! Dense kernels for small complex matrices.
//!
//! Everything here is sized for the problems in this crate (n <= 12, d <= 8),
//! and all tolerance policy for eigenvalue, PSD and pencil computations lives
//! in this module.

use nalgebra::{Complex, DMatrix, SymmetricEigen, SVD};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Absolute Hermitian-symmetry tolerance applied at construction, scaled by
/// the entry magnitude once entries exceed one.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A pencil `(P, Q)` is rejected when `lambda_min(Q) <= PENCIL_COND_LIMIT * lambda_max(Q)`.
pub const PENCIL_COND_LIMIT: f64 = 1e-12;

/// A validated Hermitian matrix. Entries are symmetrized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: DMatrix<C64>,
}

impl HermitianMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidMatrix(format!(
                "not square: {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        check_finite(&m)?;
        let n = m.nrows();
        for i in 0..n {
            for j in i..n {
                let a = m[(i, j)];
                let b = m[(j, i)].conj();
                let scale = a.norm().max(b.norm()).max(1.0);
                if (a - b).norm() > HERMITIAN_TOL * scale {
                    return Err(Error::InvalidMatrix(format!(
                        "not Hermitian at ({i}, {j}): {a} vs conj {b}"
                    )));
                }
            }
        }
        Ok(Self::symmetrized(m))
    }

    /// Builds from a matrix that is Hermitian by construction, averaging out
    /// rounding asymmetry.
    pub(crate) fn symmetrized(mut m: DMatrix<C64>) -> Self {
        let n = m.nrows();
        for i in 0..n {
            m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        HermitianMatrix { m }
    }

    /// Real symmetric matrix from row-major data.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let m = DMatrix::from_fn(n, n, |i, j| {
            C64::new(rows[i].get(j).copied().unwrap_or(f64::NAN), 0.0)
        });
        Self::new(m)
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn scale(&self, c: f64) -> Self {
        HermitianMatrix { m: &self.m * C64::new(c, 0.0) }
    }

    pub fn add(&self, other: &HermitianMatrix) -> Result<Self> {
        self.same_dim(other)?;
        Ok(HermitianMatrix {
            m: &self.m + &other.m,
        })
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Result<Self> {
        self.same_dim(other)?;
        Ok(HermitianMatrix {
            m: &self.m - &other.m,
        })
    }

    /// `self + c I`.
    pub fn shift(&self, c: f64) -> Self {
        let mut m = self.m.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += C64::new(c, 0.0);
        }
        HermitianMatrix { m }
    }

    /// Entrywise (Schur) product.
    pub fn schur(&self, other: &HermitianMatrix) -> Result<Self> {
        self.same_dim(other)?;
        Ok(HermitianMatrix {
            m: self.m.component_mul(&other.m),
        })
    }

    /// Congruence `D^* self D` with `D = diag(d)`.
    pub fn diag_congruence(&self, d: &[C64]) -> Result<Self> {
        if d.len() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: d.len(),
            });
        }
        let n = self.dim();
        let m = DMatrix::from_fn(n, n, |i, j| d[i].conj() * self.m[(i, j)] * d[j]);
        Ok(HermitianMatrix::symmetrized(m))
    }

    /// Principal submatrix permuted by `perm`: entry `(i, j)` is `self[(perm[i], perm[j])]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = perm.len();
        HermitianMatrix {
            m: DMatrix::from_fn(n, n, |i, j| self.m[(perm[i], perm[j])]),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius_norm(&self.m)
    }

    fn same_dim(&self, other: &HermitianMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

fn check_finite(m: &DMatrix<C64>) -> Result<()> {
    if let Some((k, z)) = m
        .iter()
        .enumerate()
        .find(|(_, z)| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::InvalidMatrix(format!(
            "non-finite entry {z} at linear index {k}"
        )));
    }
    Ok(())
}

pub fn frobenius_norm(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues in ascending order.
pub fn hermitian_eigenvalues(m: &HermitianMatrix) -> Result<Vec<f64>> {
    check_finite(&m.m)?;
    let mut vals: Vec<f64> = m.m.clone().symmetric_eigenvalues().iter().copied().collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidMatrix("eigenvalue iteration diverged".into()));
    }
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Eigen-decomposition with eigenvalues ascending and eigenvectors as the
/// matching columns.
pub fn hermitian_eigen(m: &HermitianMatrix) -> Result<(Vec<f64>, DMatrix<C64>)> {
    check_finite(&m.m)?;
    let eig = SymmetricEigen::new(m.m.clone());
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidMatrix("eigenvalue iteration diverged".into()));
    }
    let vecs = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((vals, vecs))
}

fn extremes(vals: &[f64]) -> (f64, f64) {
    (vals[0], vals[vals.len() - 1])
}

/// `lambda_min(M) >= -tol * max(1, lambda_max(M))`.
pub fn is_psd(m: &HermitianMatrix, tol: f64) -> bool {
    match hermitian_eigenvalues(m) {
        Ok(vals) => {
            let (lo, hi) = extremes(&vals);
            lo >= -tol * hi.max(1.0)
        }
        Err(_) => false,
    }
}

/// A Hermitian-definite pencil with a fixed positive definite right-hand side,
/// reduced to standard form through the Cholesky factor of `Q`.
#[derive(Debug, Clone)]
pub struct Pencil {
    l_inv: DMatrix<C64>,
}

impl Pencil {
    pub fn new(q: &HermitianMatrix) -> Result<Self> {
        let vals = hermitian_eigenvalues(q)?;
        let (lo, hi) = extremes(&vals);
        if !(hi > 0.0) || lo <= PENCIL_COND_LIMIT * hi {
            return Err(Error::SingularPencil(format!(
                "right-hand matrix not positive definite: lambda_min = {lo:e}, lambda_max = {hi:e}"
            )));
        }
        let chol = q
            .m
            .clone()
            .cholesky()
            .ok_or_else(|| Error::SingularPencil("Cholesky factorization failed".into()))?;
        let n = q.dim();
        let l_inv = chol
            .l()
            .solve_lower_triangular(&DMatrix::identity(n, n))
            .ok_or_else(|| Error::SingularPencil("triangular solve failed".into()))?;
        Ok(Pencil { l_inv })
    }

    pub fn dim(&self) -> usize {
        self.l_inv.nrows()
    }

    /// The standard-form matrix `L^{-1} P L^{-*}`.
    pub fn reduce(&self, p: &HermitianMatrix) -> Result<HermitianMatrix> {
        if p.dim() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: p.dim(),
            });
        }
        let m = &self.l_inv * &p.m * self.l_inv.adjoint();
        Ok(HermitianMatrix::symmetrized(m))
    }

    /// Generalized eigenvalues of `(P, Q)`, ascending.
    pub fn eigenvalues(&self, p: &HermitianMatrix) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.reduce(p)?)
    }

    /// Extremes of `a^* P a / a^* Q a` over nonzero `a`.
    pub fn extremes(&self, p: &HermitianMatrix) -> Result<(f64, f64)> {
        Ok(extremes(&self.eigenvalues(p)?))
    }
}

/// Extreme generalized eigenvalues of the pencil `(P, Q)`, `Q` positive definite.
pub fn pencil_extremes(p: &HermitianMatrix, q: &HermitianMatrix) -> Result<(f64, f64)> {
    Pencil::new(q)?.extremes(p)
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    check_finite(m)?;
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let svd = SVD::new(m.clone(), false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().map(|v| v.max(0.0)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// The unitary polar factor of a square matrix (nearest unitary in Frobenius norm).
pub fn polar_unitary(m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    check_finite(m)?;
    let svd = SVD::new(m.clone(), true, true);
    let u = svd.u.ok_or_else(|| Error::InvalidMatrix("SVD failed".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::InvalidMatrix("SVD failed".into()))?;
    Ok(u * v_t)
}

/// Square cost table with finite nonnegative entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("empty cost matrix".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        Self::from_flat(n, entries)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self::from_flat(n, entries)
    }

    fn from_flat(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMatrix("empty cost matrix".into()));
        }
        if let Some(k) = entries.iter().position(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidMatrix(format!(
                "cost ({}, {}) = {} must be finite and nonnegative",
                k / n,
                k % n,
                entries[k]
            )));
        }
        Ok(CostMatrix { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    fn distinct_sorted(&self) -> Vec<f64> {
        let mut v = self.entries.clone();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

/// Hopcroft–Karp maximum matching on a bipartite graph given by adjacency lists.
struct HopcroftKarp<'a> {
    adj: &'a [Vec<usize>],
    match_l: Vec<Option<usize>>,
    match_r: Vec<Option<usize>>,
    dist: Vec<usize>,
}

impl<'a> HopcroftKarp<'a> {
    const INF: usize = usize::MAX;

    fn new(adj: &'a [Vec<usize>], n_right: usize) -> Self {
        HopcroftKarp {
            adj,
            match_l: vec![None; adj.len()],
            match_r: vec![None; n_right],
            dist: vec![0; adj.len()],
        }
    }

    fn bfs(&mut self) -> bool {
        let mut queue = std::collections::VecDeque::new();
        for u in 0..self.adj.len() {
            if self.match_l[u].is_none() {
                self.dist[u] = 0;
                queue.push_back(u);
            } else {
                self.dist[u] = Self::INF;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                match self.match_r[v] {
                    None => found = true,
                    Some(w) if self.dist[w] == Self::INF => {
                        self.dist[w] = self.dist[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        found
    }

    fn dfs(&mut self, u: usize) -> bool {
        for k in 0..self.adj[u].len() {
            let v = self.adj[u][k];
            let ok = match self.match_r[v] {
                None => true,
                Some(w) => self.dist[w] == self.dist[u] + 1 && self.dfs(w),
            };
            if ok {
                self.match_l[u] = Some(v);
                self.match_r[v] = Some(u);
                return true;
            }
        }
        self.dist[u] = Self::INF;
        false
    }

    fn max_matching(mut self) -> usize {
        let mut size = 0;
        while self.bfs() {
            for u in 0..self.adj.len() {
                if self.match_l[u].is_none() && self.dfs(u) {
                    size += 1;
                }
            }
        }
        size
    }
}

fn perfect_matching_exists(adj: &[Vec<usize>], n_right: usize) -> bool {
    adj.len() == n_right && HopcroftKarp::new(adj, n_right).max_matching() == adj.len()
}

fn threshold_adjacency(c: &CostMatrix, t: f64) -> Vec<Vec<usize>> {
    (0..c.n)
        .map(|i| (0..c.n).filter(|&j| c.get(i, j) <= t).collect())
        .collect()
}

/// `min over permutations s of max_i C[i][s(i)]`, without producing a permutation.
pub fn bottleneck_value(c: &CostMatrix) -> f64 {
    let values = c.distinct_sorted();
    // The largest entry always admits a perfect matching.
    let (mut lo, mut hi) = (0usize, values.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching_exists(&threshold_adjacency(c, values[mid]), c.n) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    values[lo]
}

/// Exact bottleneck assignment: the optimal value and the lexicographically
/// smallest permutation achieving it.
pub fn bottleneck_assignment(c: &CostMatrix) -> (f64, Vec<usize>) {
    let value = bottleneck_value(c);
    let n = c.n;
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for i in 0..n {
        let choice = (0..n)
            .filter(|&j| !used[j] && c.get(i, j) <= value)
            .find(|&j| {
                // Rows i+1.. must still be perfectly matchable into the unused columns.
                let free: Vec<usize> = (0..n).filter(|&k| !used[k] && k != j).collect();
                let adj: Vec<Vec<usize>> = ((i + 1)..n)
                    .map(|r| {
                        free.iter()
                            .enumerate()
                            .filter(|(_, &col)| c.get(r, col) <= value)
                            .map(|(pos, _)| pos)
                            .collect()
                    })
                    .collect();
                perfect_matching_exists(&adj, free.len())
            })
            .expect("a perfect matching exists at the bottleneck value");
        used[choice] = true;
        perm.push(choice);
    }
    (value, perm)
}

/// Advances `p` to the next permutation in lexicographic order; returns
/// `false` (leaving `p` sorted ascending) after the last one.
pub fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        p.reverse();
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Inverse of a permutation given as `i -> p[i]`.
pub fn invert_permutation(p: &[usize]) -> Vec<usize> {
    let mut q = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        q[j] = i;
    }
    q
}

/// Whether `p` is a permutation of `0..p.len()`.
pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&j| j < seen.len() && !std::mem::replace(&mut seen[j], true))
}
