//! Small dense complex matrices: one-sided Jacobi SVD, determinants and
//! minimum-norm least-squares solves.
//!
//! Everything here is sized for Jacobians of desk-scale maps (a handful of
//! rows and columns), so the algorithms favour accuracy over speed.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// Row-major complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// # Panics
    /// If the rows have unequal lengths.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<Complex64>> =
            rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Appends a row at the bottom.
    pub fn push_row(&mut self, row: &[Complex64]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * other[(k, j)]).sum()
        })
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    ///
    /// # Panics
    /// If the matrix is not square.
    pub fn determinant(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
                .expect("nonempty range");
            if a[(p, k)].is_zero() {
                return Complex64::zero();
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(p * n + j, k * n + j);
                }
                det = -det;
            }
            let pivot = a[(k, k)];
            det *= pivot;
            for i in k + 1..n {
                let factor = a[(i, k)] / pivot;
                if factor.is_zero() {
                    continue;
                }
                for j in k..n {
                    let sub = factor * a[(k, j)];
                    a[(i, j)] -= sub;
                }
            }
        }
        det
    }

    pub fn svd(&self) -> Svd {
        Svd::new(self)
    }

    /// Singular values in decreasing order; `min(rows, cols)` of them.
    pub fn singular_values(&self) -> Vec<f64> {
        self.svd().s
    }

    /// Minimum-norm least-squares solution of `A x = b`, discarding
    /// singular values below `rcond · σ_max`.
    pub fn solve_min_norm(&self, b: &[Complex64], rcond: f64) -> Vec<Complex64> {
        self.svd().solve(b, rcond)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Thin SVD `A = U Σ Vᴴ` with `k = min(rows, cols)` singular triplets.
#[derive(Clone, Debug)]
pub struct Svd {
    /// `rows × k`
    pub u: ComplexMatrix,
    /// decreasing
    pub s: Vec<f64>,
    /// `cols × k`
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn new(a: &ComplexMatrix) -> Self {
        if a.rows >= a.cols {
            let (u, s, v) = hestenes(a);
            Self { u, s, v }
        } else {
            let (u, s, v) = hestenes(&a.conj_transpose());
            Self { u: v, s, v: u }
        }
    }

    pub fn max(&self) -> f64 {
        self.s.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.s.last().copied().unwrap_or(0.0)
    }

    pub fn solve(&self, b: &[Complex64], rcond: f64) -> Vec<Complex64> {
        let cutoff = rcond * self.max();
        let ncols = self.v.rows();
        let mut x = vec![Complex64::zero(); ncols];
        for (k, &sigma) in self.s.iter().enumerate() {
            if sigma <= cutoff || sigma == 0.0 {
                continue;
            }
            let coeff: Complex64 =
                (0..self.u.rows()).map(|i| self.u[(i, k)].conj() * b[i]).sum::<Complex64>() / sigma;
            for (i, xi) in x.iter_mut().enumerate() {
                *xi += self.v[(i, k)] * coeff;
            }
        }
        x
    }
}

/// One-sided (Hestenes) Jacobi on the columns of a tall matrix.
fn hestenes(a: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let (p, q) = (a.rows, a.cols);
    // work column-major for cache-friendly column rotations
    let mut cols: Vec<Vec<Complex64>> = (0..q).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..q)
        .map(|j| (0..q).map(|i| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::zero() }).collect())
        .collect();
    let eps = f64::EPSILON;
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..q {
            for j in i + 1..q {
                let alpha: f64 = cols[i].iter().map(Complex64::norm_sqr).sum();
                let beta: f64 = cols[j].iter().map(Complex64::norm_sqr).sum();
                let gamma: Complex64 = cols[i].iter().zip(&cols[j]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // b_j~ = conj(phase)·b_j makes b_iᴴ b_j~ real and positive
                rotate(&mut cols, i, j, c, s, phase);
                rotate(&mut v, i, j, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..q).collect();
    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));
    let s: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let u = ComplexMatrix::from_fn(p, q, |i, k| {
        let src = order[k];
        if norms[src] > 0.0 {
            cols[src][i] / norms[src]
        } else {
            Complex64::zero()
        }
    });
    let vm = ComplexMatrix::from_fn(q, q, |i, k| v[order[k]][i]);
    (u, s, vm)
}

fn rotate(cols: &mut [Vec<Complex64>], i: usize, j: usize, c: f64, s: f64, phase: Complex64) {
    let pc = phase.conj();
    let (left, right) = cols.split_at_mut(j);
    let (ci, cj) = (&mut left[i], &mut right[0]);
    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
        let yt = *y * pc;
        let nx = *x * c - yt * s;
        let ny = *x * s + yt * c;
        *x = nx;
        *y = ny;
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Every `k × k` minor of `a`, rows and columns in lexicographic order
/// (row subsets outermost).
pub fn minors(a: &ComplexMatrix, k: usize) -> Vec<Complex64> {
    if k == 0 {
        return vec![Complex64::new(1.0, 0.0)];
    }
    let mut out = Vec::new();
    for rows in combinations(a.rows(), k) {
        for cols in combinations(a.cols(), k) {
            out.push(a.select(&rows, &cols).determinant());
        }
    }
    out
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// Hermitian inner product `⟨u, w⟩ = Σ u_k · conj(w_k)`.
pub fn hermitian_dot(u: &[Complex64], w: &[Complex64]) -> Complex64 {
    u.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}
