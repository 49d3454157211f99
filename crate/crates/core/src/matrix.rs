//! Dense real matrices.
//!
//! Everything in the crate is carried by [`Matrix`]: a row-major `f64`
//! buffer with at least one row and one column and only finite entries.
//! The handful of operations here (max-norm, Kronecker product, orthogonality
//! residual, first-column deletion) are the ones the constructions need; this
//! is not a general linear algebra library.

use std::fmt;
use std::ops::{Index, IndexMut};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major real matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Largest absolute entry of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct NormValue(f64);

impl NormValue {
    pub fn value(self) -> f64 {
        self.0
    }

    /// Edge length of the simplex obtained from an `Ô` matrix with this norm,
    /// `1 / (√2 · norm)`.
    pub fn edge_length(self) -> f64 {
        1.0 / (std::f64::consts::SQRT_2 * self.0)
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Matrix {
    /// Builds a matrix from a row-major buffer.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dim(format!("empty matrix ({rows}x{cols})")));
        }
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::dim(format!("{rows}x{cols} overflows")))?;
        if data.len() != len {
            return Err(Error::dim(format!(
                "{rows}x{cols} matrix needs {len} entries, got {}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::Invariant(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Construction from trusted arithmetic; skips the finiteness scan.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert!(rows > 0 && cols > 0 && data.len() == rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::dim("ragged rows"));
        }
        Matrix::new(rows.len(), cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::dim(format!("{rows}x{cols} overflows")))?;
        Matrix::new(rows, cols, vec![0.0; len])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Matrix::zeros(n, n)?;
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        Ok(m)
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

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.row_iter().map(<[f64]>::to_vec).collect()
    }

    pub fn scaled(&self, factor: f64) -> Matrix {
        Matrix::from_raw(
            self.rows,
            self.cols,
            self.data.iter().map(|x| x * factor).collect(),
        )
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            data.extend((0..self.rows).map(|i| self[(i, j)]));
        }
        Matrix::from_raw(self.cols, self.rows, data)
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = vec![0.0; self.rows * rhs.cols];
        for (i, out_row) in out.chunks_exact_mut(rhs.cols).enumerate() {
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(Matrix::from_raw(self.rows, rhs.cols, out))
    }

    /// `max_{ij} |a_ij|`, compared exactly.
    pub fn max_norm(&self) -> NormValue {
        NormValue(self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs())))
    }

    /// Kronecker product `self ⊗ rhs`: entry `(i·r_B + k, j·c_B + l)` is
    /// `a_ij · b_kl`.
    pub fn kronecker(&self, rhs: &Matrix) -> Result<Matrix> {
        let rows = self
            .rows
            .checked_mul(rhs.rows)
            .ok_or_else(|| Error::dim("kronecker row count overflows"))?;
        let cols = self
            .cols
            .checked_mul(rhs.cols)
            .ok_or_else(|| Error::dim("kronecker column count overflows"))?;
        rows.checked_mul(cols)
            .ok_or_else(|| Error::dim("kronecker entry count overflows"))?;
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..self.rows {
            for k in 0..rhs.rows {
                let b_row = rhs.row(k);
                for &a in self.row(i) {
                    data.extend(b_row.iter().map(|&b| a * b));
                }
            }
        }
        Ok(Matrix::from_raw(rows, cols, data))
    }

    /// Max-norm of `AᵀA − I`; zero for an exactly orthogonal matrix.
    pub fn orthogonality_residual(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::dim(format!(
                "orthogonality residual needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        // Rows of Aᵀ are the columns of A; AᵀA is symmetric so the upper
        // triangle is enough.
        let cols = self.transpose();
        let n = self.rows;
        let worst = (0..n)
            .into_par_iter()
            .map(|i| {
                let ci = cols.row(i);
                (i..n)
                    .map(|j| {
                        let dot: f64 = ci.iter().zip(cols.row(j)).map(|(a, b)| a * b).sum();
                        let target = if i == j { 1.0 } else { 0.0 };
                        (dot - target).abs()
                    })
                    .fold(0.0_f64, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        Ok(worst)
    }

    /// `A₁`: the matrix with its first column removed.
    pub fn delete_first_column(&self) -> Result<Matrix> {
        if self.cols < 2 {
            return Err(Error::dim(format!(
                "cannot delete the only column of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let data = self
            .row_iter()
            .flat_map(|r| r[1..].iter().copied())
            .collect();
        Ok(Matrix::from_raw(self.rows, self.cols - 1, data))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for row in self.row_iter().take(8) {
            writeln!(f, "  {row:?}")?;
        }
        if self.rows > 8 {
            writeln!(f, "  ...")?;
        }
        Ok(())
    }
}

/// `B₂ = (1/√2)·[[1, 1], [1, −1]]`.
pub fn b2() -> Matrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Matrix::from_raw(2, 2, vec![h, h, h, -h])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn sylvester4() -> Matrix {
        Matrix::from_rows(&[
            vec![1.0, 1.0, 1.0, 1.0],
            vec![1.0, -1.0, 1.0, -1.0],
            vec![1.0, 1.0, -1.0, -1.0],
            vec![1.0, -1.0, -1.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn empty_matrix_is_a_dimension_error() {
        assert!(matches!(
            Matrix::new(0, 0, vec![]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            Matrix::new(2, 2, vec![1.0]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            Matrix::new(1, 1, vec![f64::NAN]),
            Err(Error::Invariant(_))
        ));
    }

    #[test]
    fn max_norm_examples() {
        assert_eq!(Matrix::identity(2).unwrap().max_norm().value(), 1.0);
        let h8 = sylvester4()
            .kronecker(&Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap())
            .unwrap()
            .scaled(1.0 / 8f64.sqrt());
        assert!((h8.max_norm().value() - 0.353553).abs() < 1e-6);
        let m = Matrix::from_rows(&[vec![0.5, -3.0], vec![2.0, 2.5]]).unwrap();
        assert_eq!(m.max_norm().value(), 3.0);
    }

    #[test]
    fn kronecker_examples() {
        let one = Matrix::identity(1).unwrap();
        assert_eq!(b2().kronecker(&one).unwrap(), b2());

        // B₂ ⊗ B₂ = H₄ / 2 with H₄ the Sylvester matrix.
        let prod = b2().kronecker(&b2()).unwrap();
        let expect = sylvester4().scaled(0.5);
        for (a, b) in prod.as_slice().iter().zip(expect.as_slice()) {
            assert!((a - b).abs() < 1e-15);
        }

        let a = Matrix::from_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        let b = Matrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap();
        let k = a.kronecker(&b).unwrap();
        assert_eq!((k.rows(), k.cols()), (2, 3));
        assert_eq!(k.as_slice(), &[1.0, 2.0, 3.0, -1.0, -2.0, -3.0]);
    }

    #[test]
    fn doubling_scales_the_norm() {
        let a = Matrix::from_rows(&[vec![0.3, -0.7], vec![0.1, 0.2]]).unwrap();
        let d = b2().kronecker(&a).unwrap();
        assert_eq!(d.max_norm().value(), 0.7 * FRAC_1_SQRT_2);
    }

    #[test]
    fn residual_examples() {
        assert_eq!(
            Matrix::identity(3)
                .unwrap()
                .orthogonality_residual()
                .unwrap(),
            0.0
        );
        assert!(sylvester4().scaled(0.5).orthogonality_residual().unwrap() <= 1e-15);
        let halves = Matrix::new(2, 2, vec![0.5; 4]).unwrap();
        assert_eq!(halves.orthogonality_residual().unwrap(), 0.5);
        let rect = Matrix::zeros(2, 3).unwrap();
        assert!(matches!(
            rect.orthogonality_residual(),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn delete_first_column_examples() {
        let d = b2().delete_first_column().unwrap();
        assert_eq!(d.as_slice(), &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]);

        let i3 = Matrix::identity(3).unwrap().delete_first_column().unwrap();
        assert_eq!(
            i3.to_rows(),
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]
        );

        let col = Matrix::identity(1).unwrap();
        assert!(matches!(
            col.delete_first_column(),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn transpose_and_matmul() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let ata = a.transpose().matmul(&a).unwrap();
        assert_eq!(ata.to_rows(), vec![vec![35.0, 44.0], vec![44.0, 56.0]]);
        assert!(a.matmul(&a).is_err());
    }
}
