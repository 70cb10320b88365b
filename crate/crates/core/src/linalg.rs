//! Small dense real linear algebra.
//!
//! Everything here works on `f64` and is sized for the truncated basis
//! problems of this crate (a few hundred rows at most): 2x2 block arithmetic
//! for the continued-fraction tail, LU with partial pivoting, determinants in
//! sign/log form, and inverse iteration for the null direction of a
//! near-singular matrix.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Pivots below this fraction of the largest absolute entry count as zero.
pub const PIVOT_TOL: f64 = 1e-13;

/// Iteration cap for [`null_direction`].
pub const NULL_MAX_ITER: usize = 50;

/// Real 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Block2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Block2 {
    pub const ZERO: Block2 = Block2::new(0.0, 0.0, 0.0, 0.0);
    pub const IDENTITY: Block2 = Block2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub const fn diag(d1: f64, d2: f64) -> Self {
        Self::new(d1, 0.0, 0.0, d2)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn transpose(self) -> Self {
        Self::new(self.a11, self.a21, self.a12, self.a22)
    }

    /// Largest absolute entry.
    pub fn max_norm(&self) -> f64 {
        self.a11
            .abs()
            .max(self.a12.abs())
            .max(self.a21.abs())
            .max(self.a22.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a21.is_finite() && self.a22.is_finite()
    }

    /// Adjugate over determinant. Fails when `|det| <= PIVOT_TOL * max_norm^2`.
    pub fn inverse(&self) -> Result<Block2> {
        let det = self.det();
        let scale = self.max_norm();
        if !det.is_finite() || det.abs() <= PIVOT_TOL * scale * scale || scale == 0.0 {
            return Err(Error::SingularBlock { det });
        }
        let r = 1.0 / det;
        Ok(Block2::new(
            self.a22 * r,
            -self.a12 * r,
            -self.a21 * r,
            self.a11 * r,
        ))
    }
}

impl Add for Block2 {
    type Output = Block2;
    fn add(self, o: Block2) -> Block2 {
        Block2::new(
            self.a11 + o.a11,
            self.a12 + o.a12,
            self.a21 + o.a21,
            self.a22 + o.a22,
        )
    }
}

impl Sub for Block2 {
    type Output = Block2;
    fn sub(self, o: Block2) -> Block2 {
        Block2::new(
            self.a11 - o.a11,
            self.a12 - o.a12,
            self.a21 - o.a21,
            self.a22 - o.a22,
        )
    }
}

impl Neg for Block2 {
    type Output = Block2;
    fn neg(self) -> Block2 {
        self.scale(-1.0)
    }
}

impl Mul for Block2 {
    type Output = Block2;
    fn mul(self, o: Block2) -> Block2 {
        Block2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl Mul<Block2> for f64 {
    type Output = Block2;
    fn mul(self, b: Block2) -> Block2 {
        b.scale(self)
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Leading `rows x cols` sub-block.
    pub fn top_left(&self, rows: usize, cols: usize) -> Self {
        assert!(rows <= self.rows && cols <= self.cols);
        Self::from_fn(rows, cols, |i, j| self[(i, j)])
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> DenseMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// Largest `|a_ij - a_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        assert!(self.is_square());
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst / scale
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, o: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, o: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Determinant as `sign * exp(log_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignLogDet {
    /// One of -1, 0, +1. Zero iff the matrix is numerically singular.
    pub sign: i8,
    pub log_abs: f64,
}

impl SignLogDet {
    pub const SINGULAR: SignLogDet = SignLogDet {
        sign: 0,
        log_abs: f64::NEG_INFINITY,
    };

    pub fn value(&self) -> f64 {
        f64::from(self.sign) * self.log_abs.exp()
    }
}

/// LU factorization `P A = L U` with partial pivoting, stored in place.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    perm_sign: i8,
    /// Column of the first pivot that fell below tolerance, if any.
    singular_at: Option<(usize, f64)>,
    scale: f64,
}

impl Lu {
    /// Factors `m`. Never fails; singularity is recorded and reported by the
    /// consumers that care.
    pub fn new(m: &DenseMatrix) -> Self {
        Self::factor(m, false)
    }

    /// Like [`Lu::new`] but replaces tiny pivots with `PIVOT_TOL * scale`,
    /// which keeps the factors usable for inverse iteration.
    fn new_regularized(m: &DenseMatrix) -> Self {
        Self::factor(m, true)
    }

    fn factor(m: &DenseMatrix, regularize: bool) -> Self {
        assert!(m.is_square(), "LU of a non-square matrix");
        let n = m.rows();
        let mut lu = m.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut perm_sign = 1_i8;
        let scale = m.max_abs();
        let tol = PIVOT_TOL * scale;
        let mut singular_at = None;

        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                perm_sign = -perm_sign;
            }
            if pmax <= tol || scale == 0.0 {
                if singular_at.is_none() {
                    singular_at = Some((k, lu[k * n + k]));
                }
                if !regularize {
                    continue;
                }
                let floor = if scale == 0.0 { PIVOT_TOL } else { tol };
                lu[k * n + k] = if lu[k * n + k] < 0.0 { -floor } else { floor };
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu[i * n + j] -= f * lu[k * n + j];
                    }
                }
            }
        }
        Self {
            n,
            lu,
            perm,
            perm_sign,
            singular_at,
            scale,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular_at.is_some()
    }

    pub fn sign_log_det(&self) -> SignLogDet {
        if self.is_singular() {
            return SignLogDet::SINGULAR;
        }
        let mut sign = self.perm_sign;
        let mut log_abs = 0.0;
        for k in 0..self.n {
            let d = self.lu[k * self.n + k];
            if d < 0.0 {
                sign = -sign;
            }
            log_abs += d.abs().ln();
        }
        SignLogDet { sign, log_abs }
    }

    /// Smallest and largest pivot magnitude.
    pub fn pivot_range(&self) -> (f64, f64) {
        (0..self.n)
            .map(|k| self.lu[k * self.n + k].abs())
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), d| (lo.min(d), hi.max(d)))
    }

    fn solve_unchecked(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s: f64 = row.iter().zip(&x[i + 1..]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(rhs.len(), self.n);
        if let Some((column, pivot)) = self.singular_at {
            return Err(Error::SingularMatrix { column, pivot });
        }
        Ok(self.solve_unchecked(rhs))
    }

    pub fn inverse(&self) -> Result<DenseMatrix> {
        if let Some((column, pivot)) = self.singular_at {
            return Err(Error::SingularMatrix { column, pivot });
        }
        let n = self.n;
        let mut inv = DenseMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            let col = self.solve_unchecked(&e);
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        Ok(inv)
    }

    /// Max-abs entry of the factored matrix.
    pub fn scale(&self) -> f64 {
        self.scale
    }
}

pub fn lu_sign_log_det(m: &DenseMatrix) -> SignLogDet {
    Lu::new(m).sign_log_det()
}

pub fn solve(m: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    Lu::new(m).solve(rhs)
}

pub fn inverse(m: &DenseMatrix) -> Result<DenseMatrix> {
    Lu::new(m).inverse()
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Unit vector minimizing `|M v|`, with the attained residual `|M v|`.
#[derive(Debug, Clone, PartialEq)]
pub struct NullDirection {
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Inverse iteration on a near-singular square matrix.
///
/// Tiny pivots are lifted to `PIVOT_TOL * max|M|` so an exactly singular
/// matrix still yields its null vector.
pub fn null_direction(m: &DenseMatrix) -> Result<NullDirection> {
    assert!(m.is_square());
    let n = m.rows();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let lu = Lu::new_regularized(m);
    // A start vector with no special symmetry.
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * ((i * 7 + 3) % 11) as f64).collect();
    normalize(&mut x);

    let mut last_residual = f64::INFINITY;
    for it in 1..=NULL_MAX_ITER {
        let mut y = lu.solve_unchecked(&x);
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::NoConvergence {
                iterations: it,
                residual: f64::INFINITY,
            });
        }
        normalize(&mut y);
        // Fix the overall sign so successive iterates are comparable.
        let dot: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        if dot < 0.0 {
            y.iter_mut().for_each(|v| *v = -*v);
        }
        let change = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        x = y;
        last_residual = norm2(&m.mul_vec(&x));
        if change <= 1e-13 {
            canonical_sign(&mut x);
            return Ok(NullDirection {
                vector: x,
                residual: last_residual,
                iterations: it,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: NULL_MAX_ITER,
        residual: last_residual,
    })
}

fn normalize(x: &mut [f64]) {
    let s = norm2(x);
    if s > 0.0 {
        x.iter_mut().for_each(|v| *v /= s);
    }
}

/// Makes the largest-magnitude component positive.
fn canonical_sign(x: &mut [f64]) {
    let big = x
        .iter()
        .copied()
        .fold(0.0_f64, |m, v| if v.abs() > m.abs() { v } else { m });
    if big < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns the eigenvalues and a matrix whose columns are the matching unit
/// eigenvectors. Only the lower triangle's symmetry is assumed, not checked.
pub fn symmetric_eigen(m: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    assert!(m.is_square());
    let n = m.rows();
    let mut a = m.clone();
    let mut v = DenseMatrix::identity(n);
    let scale = m.max_abs();
    if scale == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let mut off = 0.0;
    let mut prev_off = f64::INFINITY;
    for sweep in 0..100 {
        off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        // Either tiny, or a full sweep no longer reduces it: rounding level.
        let stalled = sweep > 5 && off >= prev_off && off.sqrt() <= 1e-14 * scale;
        prev_off = off;
        if off.sqrt() <= 1e-17 * scale || stalled {
            let values = (0..n).map(|i| a[(i, i)]).collect();
            return Ok((values, v));
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                // Negligible next to both diagonal entries, or next to the
                // whole matrix: drop it.
                let small = (f64::EPSILON * 0.5 * a[(p, p)].abs().min(a[(q, q)].abs()))
                    .max(1e-3 * f64::EPSILON * scale);
                if sweep > 3 && apq.abs() <= small {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                if apq.abs() <= 1e-300 {
                    continue;
                }
                rotated = true;
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + theta.hypot(1.0))
                };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            let values = (0..n).map(|i| a[(i, i)]).collect();
            return Ok((values, v));
        }
    }
    Err(Error::NoConvergence {
        iterations: 100,
        residual: off.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut impl Rng, n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0))
    }

    /// Laplace expansion along the first row.
    fn cofactor_det(m: &DenseMatrix) -> f64 {
        let n = m.rows();
        if n == 1 {
            return m[(0, 0)];
        }
        let mut det = 0.0;
        for j in 0..n {
            let minor = DenseMatrix::from_fn(n - 1, n - 1, |r, c| {
                m[(r + 1, if c < j { c } else { c + 1 })]
            });
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            det += sign * m[(0, j)] * cofactor_det(&minor);
        }
        det
    }

    /// Cyclic Jacobi rotations; returns the eigenvalues of a symmetric matrix.
    fn jacobi_eigenvalues(m: &DenseMatrix) -> Vec<f64> {
        let n = m.rows();
        let mut a = m.clone();
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)] * a[(i, j)])
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[(p, q)].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        (0..n).map(|i| a[(i, i)]).collect()
    }

    fn assert_block_close(a: Block2, b: Block2, tol: f64) {
        assert!((a - b).max_norm() <= tol, "{a:?} vs {b:?}");
    }

    #[test]
    fn block_inverse_diagonal() {
        let inv = Block2::diag(2.0, 4.0).inverse().unwrap();
        assert_block_close(inv, Block2::diag(0.5, 0.25), 0.0);
    }

    #[test]
    fn block_inverse_kinetic_coupling_is_singular() {
        let a = Block2::new(1.0, 1.0, -1.0, -1.0);
        assert!(matches!(a.inverse(), Err(Error::SingularBlock { .. })));
    }

    #[test]
    fn block_inverse_general() {
        let b = Block2::new(1.0, 2.0, 3.0, 4.0);
        let inv = b.inverse().unwrap();
        assert_block_close(inv, Block2::new(-2.0, 1.0, 1.5, -0.5), 1e-15);
        assert_block_close(b * inv, Block2::IDENTITY, 1e-15);
    }

    #[test]
    fn det_identity_and_diagonal() {
        let d = lu_sign_log_det(&DenseMatrix::identity(4));
        assert_eq!(d.sign, 1);
        assert_eq!(d.log_abs, 0.0);

        let d = lu_sign_log_det(&DenseMatrix::from_diag(&[2.0, 3.0, -1.0]));
        assert_eq!(d.sign, -1);
        assert!((d.log_abs - 6.0_f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = random_matrix(&mut rng, 6);
        let oracle = cofactor_det(&m);
        let d = lu_sign_log_det(&m).value();
        assert!((d - oracle).abs() <= 1e-10 * oracle.abs(), "{d} vs {oracle}");
    }

    #[test]
    fn det_singular_has_zero_sign() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert_eq!(lu_sign_log_det(&m), SignLogDet::SINGULAR);
        assert!(matches!(solve(&m, &[1.0, 1.0]), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn det_is_product_of_jacobi_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 1..=8 {
            let a = random_matrix(&mut rng, n);
            let s = &a + &a.transpose();
            let prod: f64 = jacobi_eigenvalues(&s).iter().product();
            let d = lu_sign_log_det(&s).value();
            assert!((d - prod).abs() <= 1e-9 * prod.abs(), "n={n}: {d} vs {prod}");
        }
    }

    #[test]
    fn solve_small_systems() {
        let b = [1.5, -2.0, 0.25];
        assert_eq!(solve(&DenseMatrix::identity(3), &b).unwrap(), b.to_vec());
        let x = solve(&DenseMatrix::from_diag(&[2.0, 4.0]), &[2.0, 8.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0]);
    }

    fn check_residual(m: &DenseMatrix, rhs: &[f64]) {
        let x = solve(m, rhs).unwrap();
        let r: Vec<f64> = m.mul_vec(&x).iter().zip(rhs).map(|(a, b)| a - b).collect();
        let frob = norm2(m.as_slice());
        let bound = 1e-10 * (frob * norm2(&x) + norm2(rhs));
        assert!(norm2(&r) <= bound, "residual {} > {bound}", norm2(&r));
    }

    #[test]
    fn solve_seeded_8x8_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = random_matrix(&mut rng, 8);
        let rhs: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        check_residual(&m, &rhs);
    }

    #[test]
    fn solve_many_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(1000);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=16);
            let m = random_matrix(&mut rng, n);
            let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if Lu::new(&m).is_singular() {
                continue;
            }
            check_residual(&m, &rhs);
        }
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_matrix(&mut rng, 7);
        let p = m.matmul(&inverse(&m).unwrap());
        let err = (&p - &DenseMatrix::identity(7)).max_abs();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn null_direction_of_exactly_singular_diagonal() {
        let nd = null_direction(&DenseMatrix::from_diag(&[1.0, 0.0])).unwrap();
        assert!((nd.vector[0]).abs() < 1e-12);
        assert!((nd.vector[1] - 1.0).abs() < 1e-12);
        assert!(nd.residual < 1e-12);
    }

    #[test]
    fn null_direction_of_nearly_singular_diagonal() {
        let nd = null_direction(&DenseMatrix::from_diag(&[1e-14, 1.0])).unwrap();
        assert!((nd.vector[0].abs() - 1.0).abs() < 1e-12);
        assert!(nd.vector[1].abs() < 1e-12);
    }

    #[test]
    fn null_direction_of_rank_deficient_dense() {
        // Rows orthogonal to (1, -2, 1).
        let m = DenseMatrix::from_rows(&[&[1.0, 1.0, 1.0], &[2.0, 1.0, 0.0], &[3.0, 2.0, 1.0]]);
        let nd = null_direction(&m).unwrap();
        let expect = [1.0 / 6f64.sqrt(), -2.0 / 6f64.sqrt(), 1.0 / 6f64.sqrt()];
        let s = nd.vector[0].signum();
        for (a, b) in nd.vector.iter().zip(expect) {
            assert!((a * s - b).abs() < 1e-12);
        }
        assert!(nd.residual < 1e-12);
    }

    #[test]
    fn symmetric_eigen_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let a = random_matrix(&mut rng, 9);
        let s = &a + &a.transpose();
        let (w, v) = symmetric_eigen(&s).unwrap();
        let rebuilt = v.matmul(&DenseMatrix::from_diag(&w)).matmul(&v.transpose());
        assert!((&rebuilt - &s).max_abs() < 1e-12);
        let gram = v.transpose().matmul(&v);
        assert!((&gram - &DenseMatrix::identity(9)).max_abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn block_double_inverse(a in -10.0..10.0f64, b in -10.0..10.0f64, c in -10.0..10.0f64, d in -10.0..10.0f64) {
            let m = Block2::new(a, b, c, d);
            prop_assume!(m.det().abs() > 1e-3 * m.max_norm().powi(2));
            let back = m.inverse().unwrap().inverse().unwrap();
            prop_assert!((back - m).max_norm() <= 1e-10 * m.max_norm());
        }

        #[test]
        fn block_inverse_is_accurate(a in -10.0..10.0f64, b in -10.0..10.0f64, c in -10.0..10.0f64, d in -10.0..10.0f64) {
            let m = Block2::new(a, b, c, d);
            if let Ok(inv) = m.inverse() {
                let err = (m * inv - Block2::IDENTITY).max_norm();
                prop_assert!(err <= 1e-12 * (m.max_norm() * inv.max_norm()).max(1.0));
            }
        }
    }
}
