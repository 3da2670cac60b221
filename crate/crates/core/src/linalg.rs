//! Small dense complex linear algebra: Hermitian eigensolver (cyclic
//! Jacobi), pivoted Cholesky, triangular solves and determinants.

use alloc::vec;
use alloc::vec::Vec;

use crate::real::{cabs, sqrt};
use crate::{Error, Result, C64};

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(rows * cols, data.len());
        Self { rows, cols, data }
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Leading `r × c` block starting at `(i0, j0)`.
    pub fn block(&self, i0: usize, j0: usize, r: usize, c: usize) -> Self {
        Self::from_fn(r, c, |i, j| self[(i0 + i, j0 + j)])
    }

    /// Largest `|a_ij - conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max(cabs(self[(i, j)] - self[(j, i)].conj()));
            }
        }
        worst
    }

    /// Replaces the matrix with its Hermitian part.
    pub fn symmetrize(&mut self) {
        for i in 0..self.rows {
            for j in i..self.cols {
                let m = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                self[(i, j)] = m;
                self[(j, i)] = m.conj();
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| cabs(*z)).fold(0.0, f64::max)
    }

    /// `Jᵀ H J̄`: a Hermitian form `Σ H_ij v_i v̄_j` pulled back by `v = J y`.
    pub fn pullback_hermitian(&self, j: &Self) -> Self {
        j.transpose().matmul(self).matmul(&j.conj())
    }

    /// `Jᵀ Q J`: a symmetric bilinear form `Σ Q_ij v_i v_j` pulled back by `v = J y`.
    pub fn pullback_bilinear(&self, j: &Self) -> Self {
        j.transpose().matmul(self).matmul(j)
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CMatrix,
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
pub fn hermitian_eigen(a: &CMatrix) -> HermitianEigen {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut m = a.clone();
    m.symmetrize();
    let mut v = CMatrix::identity(n);
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if sqrt(off) <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = m[(p, q)];
                let bn = cabs(b);
                if bn <= 1e-300 {
                    continue;
                }
                let phase = b / bn;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * bn);
                let t = if tau >= 0.0 { 1.0 / (tau + sqrt(1.0 + tau * tau)) } else { -1.0 / (-tau + sqrt(1.0 + tau * tau)) };
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = t * c;
                // G = D R with D = diag(1, e^{-iθ}) on (p, q); A <- Gᴴ A G.
                let ph_c = phase.conj();
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp * c - akq * ph_c * s;
                    m[(k, q)] = akp * s + akq * ph_c * c;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = apk * c - aqk * phase * s;
                    m[(q, k)] = apk * s + aqk * phase * c;
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * ph_c * s;
                    v[(k, q)] = vkp * s + vkq * ph_c * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    HermitianEigen { values, vectors }
}

/// `P ᵀ A P = L Lᴴ` for a Hermitian positive definite `A`.
#[derive(Debug, Clone)]
pub struct PivotedCholesky {
    /// Lower-triangular factor in pivoted order.
    pub l: CMatrix,
    /// `perm[i]` is the original index placed at position `i`.
    pub perm: Vec<usize>,
    /// Pivots `L_ii²` in elimination order.
    pub pivots: Vec<f64>,
}

impl PivotedCholesky {
    /// Ratio of the largest to the smallest pivot, a cheap lower bound on
    /// the spectral condition number.
    pub fn condition_estimate(&self) -> f64 {
        let max = self.pivots.iter().copied().fold(0.0, f64::max);
        let min = self.pivots.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// Solves `L y = Pᵀ b`.
    pub fn forward(&self, b: &[C64]) -> Vec<C64> {
        let n = self.perm.len();
        let mut y: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.l.row(i);
            let mut acc = y[i];
            for j in 0..i {
                acc -= row[j] * y[j];
            }
            y[i] = acc / row[i].re;
        }
        y
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.perm.len();
        let mut y = self.forward(b);
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= self.l[(j, i)].conj() * y[j];
            }
            y[i] = acc / self.l[(i, i)].re;
        }
        let mut x = vec![C64::new(0.0, 0.0); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }
}

/// Pivoted Cholesky with relative pivot tolerance `rel_tol` against the
/// largest diagonal entry.
pub fn cholesky_pivoted(a: &CMatrix, rel_tol: f64) -> Result<PivotedCholesky> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let dmax = (0..n).map(|i| w[(i, i)].re).fold(0.0, f64::max);
    let mut pivots = Vec::with_capacity(n);
    for j in 0..n {
        let (mut best, mut bv) = (j, f64::NEG_INFINITY);
        for i in j..n {
            if w[(i, i)].re > bv {
                bv = w[(i, i)].re;
                best = i;
            }
        }
        if !(bv > rel_tol * dmax) || !bv.is_finite() {
            return Err(Error::NotPositiveDefinite { step: j, pivot: bv / dmax.max(f64::MIN_POSITIVE) });
        }
        if best != j {
            perm.swap(j, best);
            for c in 0..n {
                let t = w[(j, c)];
                w[(j, c)] = w[(best, c)];
                w[(best, c)] = t;
            }
            for r in 0..n {
                let t = w[(r, j)];
                w[(r, j)] = w[(r, best)];
                w[(r, best)] = t;
            }
        }
        let d = sqrt(bv);
        pivots.push(bv);
        w[(j, j)] = C64::new(d, 0.0);
        for i in j + 1..n {
            w[(i, j)] /= d;
        }
        for c in j + 1..n {
            let lcj = w[(c, j)].conj();
            for r in j + 1..n {
                let v = w[(r, j)] * lcj;
                w[(r, c)] -= v;
            }
        }
        for c in j + 1..n {
            w[(j, c)] = C64::new(0.0, 0.0);
        }
    }
    for r in 0..n {
        for c in r + 1..n {
            w[(r, c)] = C64::new(0.0, 0.0);
        }
    }
    Ok(PivotedCholesky { l: w, perm, pivots })
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(a: &CMatrix) -> C64 {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut m = a.clone();
    let mut acc = C64::new(1.0, 0.0);
    for j in 0..n {
        let mut p = j;
        for i in j + 1..n {
            if cabs(m[(i, j)]) > cabs(m[(p, j)]) {
                p = i;
            }
        }
        if m[(p, j)] == C64::new(0.0, 0.0) {
            return C64::new(0.0, 0.0);
        }
        if p != j {
            for c in 0..n {
                let t = m[(j, c)];
                m[(j, c)] = m[(p, c)];
                m[(p, c)] = t;
            }
            acc = -acc;
        }
        let piv = m[(j, j)];
        acc *= piv;
        for i in j + 1..n {
            let f = m[(i, j)] / piv;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for c in j..n {
                let v = m[(j, c)] * f;
                m[(i, c)] -= v;
            }
        }
    }
    acc
}

/// Eigenvalues of the pencil `(A, B)` with `B` positive definite, i.e. of
/// `B^{-1/2} A B^{-1/2}`, ascending.
pub fn generalized_eigenvalues(a: &CMatrix, b: &CMatrix) -> Result<Vec<f64>> {
    let eb = hermitian_eigen(b);
    if eb.values[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite { step: 0, pivot: eb.values[0] });
    }
    let n = a.rows();
    let inv_sqrt = CMatrix::from_fn(n, n, |i, j| (0..n).map(|l| eb.vectors[(i, l)] * eb.vectors[(j, l)].conj() / sqrt(eb.values[l])).sum());
    let c = inv_sqrt.matmul(a).matmul(&inv_sqrt);
    Ok(hermitian_eigen(&c).values)
}

/// Orthonormal basis (columns) of the complement of `g` in `C^n` for the
/// inner product `Σ x_i ȳ_i`.
pub fn orthogonal_complement(g: &[C64]) -> CMatrix {
    let n = g.len();
    let gn = sqrt(g.iter().map(|z| z.norm_sqr()).sum::<f64>());
    let mut basis: Vec<Vec<C64>> = vec![g.iter().map(|z| z / gn).collect()];
    // Gram-Schmidt over the standard basis, largest residual first.
    let mut cands: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[i] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    while basis.len() < n {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for c in &cands {
            let mut r = c.clone();
            for b in &basis {
                let p: C64 = r.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= p * bi;
                }
            }
            let rn = sqrt(r.iter().map(|z| z.norm_sqr()).sum::<f64>());
            if best.as_ref().is_none_or(|(bn, _)| rn > *bn) {
                best = Some((rn, r.iter().map(|z| z / rn).collect()));
            }
        }
        let (_, v) = best.expect("candidate");
        basis.push(v);
        cands.retain(|_| true);
    }
    CMatrix::from_fn(n, n - 1, |i, j| basis[j + 1][i])
}
