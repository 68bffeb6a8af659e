//! Small dense real-matrix kernel: spectral norm, eigendecomposition,
//! controllability matrix, rank with tolerance and eigenvector condition
//! number. Targets state dimensions up to 8; everything is a pure function
//! over immutable matrices.

mod eigen;

use std::fmt;
use std::ops::Index;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use eigen::{determinant, Spectrum, DISTINCT_GAP_REL};
pub(crate) use eigen::Lu;

/// Default relative tolerance for the rank test.
pub const RANK_TOL_REL: f64 = 1e-10;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is singular: {0}")]
    Singular(String),
    #[error("eigenvalue iteration failed to converge")]
    IterationFailure,
    #[error("repeated eigenvalues: no well-conditioned diagonalization")]
    RepeatedEigenvalues,
}

/// Dense real matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must equal rows*cols");
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(LinalgError::DimensionMismatch("empty matrix".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix::from_vec(rows.len(), cols, rows.iter().flatten().copied().collect()))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Matrix::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
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

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} - {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if self.cols != x.len() {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} * vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.data[i * self.cols + j] * x[j]).sum())
            .collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

// Matrices serialize as nested row arrays.
impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> =
            (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j)).collect()).collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        Matrix::from_rows(&rows).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Spectral norm `sqrt(lambda_max(A^T A))`.
///
/// The symmetric eigenproblem is solved in closed form for orders up to 3
/// and by cyclic Jacobi iteration above that.
pub fn spectral_norm(a: &Matrix) -> Result<f64, LinalgError> {
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    // Work with the smaller Gram matrix.
    let g = if a.rows >= a.cols {
        a.transpose().mul(a).expect("dims")
    } else {
        a.mul(&a.transpose()).expect("dims")
    };
    let eigs = eigen::sym_eigenvalues(&g)?;
    Ok(eigs.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Eigenvalues (ascending) of a symmetric matrix.
pub fn sym_eigenvalues(s: &Matrix) -> Result<Vec<f64>, LinalgError> {
    eigen::sym_eigenvalues(s)
}

/// Full eigendecomposition of a square matrix. Eigenvectors are reported
/// only when the eigenvalues are pairwise distinct (gap above
/// `1e-8 * ||A||`).
pub fn eigen(a: &Matrix) -> Result<Spectrum, LinalgError> {
    eigen::eigen(a)
}

/// Controllability matrix `[B, AB, ..., A^(n-1)B]`.
pub fn controllability_matrix(a: &Matrix, b: &Matrix) -> Result<Matrix, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::DimensionMismatch("A must be square".into()));
    }
    if b.rows != a.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "B has {} rows but A is {}x{}",
            b.rows, a.rows, a.cols
        )));
    }
    let n = a.rows;
    let m = b.cols;
    let mut out = Matrix::zeros(n, n * m);
    let mut block = b.clone();
    for k in 0..n {
        for i in 0..n {
            for j in 0..m {
                out.set(i, k * m + j, block.get(i, j));
            }
        }
        if k + 1 < n {
            block = a.mul(&block).expect("dims");
        }
    }
    Ok(out)
}

/// Numerical rank: the number of singular values above
/// `tol_rel * sigma_max * max(rows, cols)`.
pub fn rank(m: &Matrix, tol_rel: f64) -> Result<usize, LinalgError> {
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let g = if m.rows >= m.cols {
        m.transpose().mul(m).expect("dims")
    } else {
        m.mul(&m.transpose()).expect("dims")
    };
    let eigs = eigen::sym_eigenvalues(&g)?;
    let sigma: Vec<f64> = eigs.iter().map(|l| l.max(0.0).sqrt()).collect();
    let sigma_max = sigma.last().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return Ok(0);
    }
    let threshold = tol_rel * sigma_max * m.rows.max(m.cols) as f64;
    Ok(sigma.iter().filter(|s| **s > threshold).count())
}

/// Condition number of the eigenvector matrix, `||P|| ||P^-1||` in the
/// spectral norm; this is the transient-growth constant of the closed loop
/// and is never below 1.
pub fn eigvec_condition(s: &Spectrum) -> Result<f64, LinalgError> {
    if !s.distinct {
        return Err(LinalgError::RepeatedEigenvalues);
    }
    let p = s.vectors.as_ref().ok_or(LinalgError::RepeatedEigenvalues)?;
    eigen::complex_condition(p)
}

/// Condition number of an explicit complex matrix (spectral norm).
pub fn complex_condition(p: &CMatrix) -> Result<f64, LinalgError> {
    eigen::complex_condition(p)
}

/// Dense complex matrix, row-major; used for eigenvector matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0);
        CMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn from_real(m: &Matrix) -> Self {
        CMatrix {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|v| Complex64::new(*v, 0.0)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &CMatrix) -> Result<CMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Hermitian Gram matrix `P* P`.
    pub fn gram(&self) -> CMatrix {
        let mut g = CMatrix::zeros(self.cols, self.cols);
        for i in 0..self.cols {
            for j in 0..self.cols {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..self.rows {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                g.set(i, j, acc);
            }
        }
        g
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
}

#[cfg(test)]
mod tests;
