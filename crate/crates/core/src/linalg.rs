//! Dense vectors and small square matrices.
//!
//! Everything in this crate runs at desk scale (dimensions in the tens), so
//! vectors are plain `Vec<f64>` and matrices are row-major with a
//! partial-pivot LU solve. No BLAS, no sparsity: every numeric path stays
//! short enough to audit by hand.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix rows have inconsistent lengths")]
    RaggedRows,
    #[error("matrix must be nonempty")]
    Empty,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is singular to working precision")]
    Singular,
}

/// Column vector in `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    pub fn new(data: Vec<f64>) -> Self {
        Vector { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Vector { data: vec![0.0; dim] }
    }

    pub fn ones(dim: usize) -> Self {
        Vector { data: vec![1.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dot: dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        (self - other).norm()
    }

    pub fn scale(&self, c: f64) -> Vector {
        Vector::new(self.data.iter().map(|v| c * v).collect())
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim(), "axpy: dimension mismatch");
        Vector::new(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + c * b)
                .collect(),
        )
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, c: f64) -> Vector {
        self.scale(c)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(rows * cols, data.len(), "matrix data length mismatch");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, LinalgError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(LinalgError::Empty);
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::RaggedRows);
        }
        let nrows = rows.len();
        Ok(Matrix::new(nrows, cols, rows.into_iter().flatten().collect()))
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::new(n, n, vec![0.0; n * n]);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn matvec(&self, x: &Vector) -> Vector {
        assert_eq!(self.cols, x.dim(), "matvec: dimension mismatch");
        let mut out = vec![0.0; self.rows];
        for (i, slot) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            *slot = row.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        }
        Vector::new(out)
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.at(i, j);
            }
        }
        Matrix::new(self.cols, self.rows, data)
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul: dimension mismatch");
        let mut data = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    data[i * other.cols + j] += a * other.at(k, j);
                }
            }
        }
        Matrix::new(self.rows, other.cols, data)
    }

    pub fn scaled(&self, c: f64) -> Matrix {
        Matrix::new(self.rows, self.cols, self.data.iter().map(|v| c * v).collect())
    }

    /// `self + c * I`; square matrices only.
    pub fn plus_scaled_identity(&self, c: f64) -> Matrix {
        assert_eq!(self.rows, self.cols, "plus_scaled_identity: square only");
        let mut out = self.clone();
        for i in 0..self.rows {
            out.data[i * self.cols + i] += c;
        }
        out
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self.at(i, j) - self.at(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Solve `self * u = rhs` by LU with partial pivoting (square only).
    pub fn solve(&self, rhs: &Vector) -> Result<Vector, LinalgError> {
        assert_eq!(self.rows, self.cols, "solve: square only");
        if rhs.dim() != self.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                got: rhs.dim(),
            });
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut b: Vec<f64> = rhs.as_slice().to_vec();
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let pivot_floor = f64::EPSILON * scale * n as f64;

        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_mag = a[col * n + col].abs();
            for row in (col + 1)..n {
                let mag = a[row * n + col].abs();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = row;
                }
            }
            if pivot_mag <= pivot_floor {
                return Err(LinalgError::Singular);
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                }
                b.swap(col, pivot_row);
            }
            let pivot = a[col * n + col];
            for row in (col + 1)..n {
                let factor = a[row * n + col] / pivot;
                if factor == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[row * n + j] -= factor * a[col * n + j];
                }
                b[row] -= factor * b[col];
            }
        }
        for col in (0..n).rev() {
            let mut sum = b[col];
            for j in (col + 1)..n {
                sum -= a[col * n + j] * b[j];
            }
            b[col] = sum / a[col * n + col];
        }
        Ok(Vector::new(b))
    }

    /// Spectral norm via power iteration on `MᵀM`.
    ///
    /// Deterministic start vector; enough iterations that the Rayleigh
    /// quotient has converged to machine precision for the small matrices
    /// this crate works with.
    pub fn operator_norm(&self) -> f64 {
        let gram = self.transpose().matmul(self);
        let n = gram.rows();
        // Tilted start avoids being orthogonal to the dominant eigenvector.
        let mut v = Vector::new((0..n).map(|i| 1.0 + 0.01 * i as f64).collect());
        let mut lambda = 0.0f64;
        for _ in 0..500 {
            let w = gram.matvec(&v);
            let norm = w.norm();
            if norm == 0.0 {
                return 0.0;
            }
            v = w.scale(1.0 / norm);
            lambda = v.dot(&gram.matvec(&v));
        }
        lambda.max(0.0).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(data: &[f64]) -> Vector {
        Vector::new(data.to_vec())
    }

    #[test]
    fn vector_arithmetic() {
        let a = v(&[1.0, 2.0, 3.0]);
        let b = v(&[4.0, -1.0, 0.5]);
        assert_eq!((&a + &b).as_slice(), &[5.0, 1.0, 3.5]);
        assert_eq!((&a - &b).as_slice(), &[-3.0, 3.0, 2.5]);
        assert_eq!((&a * 2.0).as_slice(), &[2.0, 4.0, 6.0]);
        assert_eq!(a.axpy(2.0, &b).as_slice(), &[9.0, 0.0, 4.0]);
        assert_eq!(a.dot(&b), 4.0 - 2.0 + 1.5);
        assert_eq!(v(&[3.0, 4.0]).norm(), 5.0);
    }

    #[test]
    fn matvec_and_transpose() {
        let m = Matrix::from_rows(vec![vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        assert_eq!(m.matvec(&v(&[1.0, 0.0])).as_slice(), &[0.0, -1.0]);
        let mt = m.transpose();
        assert_eq!(mt.at(0, 1), -1.0);
        assert_eq!(mt.at(1, 0), 1.0);
    }

    #[test]
    fn matmul_gram() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![0.0, 1.0], vec![3.0, -1.0]]).unwrap();
        let gram = m.transpose().matmul(&m);
        assert_eq!(gram.at(0, 0), 10.0);
        assert_eq!(gram.at(0, 1), -1.0);
        assert_eq!(gram.at(1, 0), -1.0);
        assert_eq!(gram.at(1, 1), 6.0);
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert_eq!(err, LinalgError::RaggedRows);
    }

    #[test]
    fn solve_matches_hand_inverse() {
        // (I + M) with M the quarter-turn matrix; inverse is [[1,-1],[1,1]]/2.
        let a = Matrix::from_rows(vec![vec![1.0, 1.0], vec![-1.0, 1.0]]).unwrap();
        let u = a.solve(&v(&[3.0, 1.0])).unwrap();
        assert!((u[0] - 1.0).abs() < 1e-14);
        assert!((u[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn solve_requires_pivoting() {
        let a = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let u = a.solve(&v(&[2.0, 5.0])).unwrap();
        assert_eq!(u.as_slice(), &[5.0, 2.0]);
    }

    #[test]
    fn solve_detects_singular() {
        let a = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(a.solve(&v(&[1.0, 1.0])).unwrap_err(), LinalgError::Singular);
    }

    #[test]
    fn solve_three_by_three() {
        let a = Matrix::from_rows(vec![
            vec![2.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.0, 1.0, 2.0],
        ])
        .unwrap();
        let x = v(&[1.0, -2.0, 0.5]);
        let rhs = a.matvec(&x);
        let sol = a.solve(&rhs).unwrap();
        for i in 0..3 {
            assert!((sol[i] - x[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn operator_norm_known_cases() {
        let rot = Matrix::from_rows(vec![vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        assert!((rot.operator_norm() - 1.0).abs() < 1e-12);

        // Eigenvalues of [[2,1],[1,2]] are 1 and 3.
        let sym = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!((sym.operator_norm() - 3.0).abs() < 1e-12);

        let diag = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!((diag.operator_norm() - 1.0).abs() < 1e-12);
    }
}
