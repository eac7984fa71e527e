//! Dense Hermitian matrices, stored real-symmetric when every entry is real.

use alloc::vec::Vec;

use faer::Mat;
#[allow(unused_imports)]
use num_traits::Float;

use crate::c64;

#[derive(Debug, Clone)]
pub enum HermitianMatrix {
    Real(Mat<f64>),
    Complex(Mat<c64>),
}

impl HermitianMatrix {
    /// Wraps a complex matrix, switching to real storage when possible.
    pub fn from_complex(m: Mat<c64>) -> Self {
        let real = (0..m.ncols()).all(|j| (0..m.nrows()).all(|i| m[(i, j)].im == 0.0));
        if real {
            HermitianMatrix::Real(Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re))
        } else {
            HermitianMatrix::Complex(m)
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            HermitianMatrix::Real(m) => m.nrows(),
            HermitianMatrix::Complex(m) => m.nrows(),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, HermitianMatrix::Real(_))
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        match self {
            HermitianMatrix::Real(m) => c64::new(m[(i, j)], 0.0),
            HermitianMatrix::Complex(m) => m[(i, j)],
        }
    }

    pub fn to_complex(&self) -> Mat<c64> {
        match self {
            HermitianMatrix::Real(m) => Mat::from_fn(m.nrows(), m.ncols(), |i, j| c64::new(m[(i, j)], 0.0)),
            HermitianMatrix::Complex(m) => m.clone(),
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        let n = self.dim();
        let mut best: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                best = best.max(self.get(i, j).norm());
            }
        }
        best
    }

    /// `max |H_ij − conj(H_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut d: f64 = 0.0;
        for j in 0..n {
            for i in 0..=j {
                d = d.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        d
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i).re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// `Σ_{j≠i} |H_ij|` for every row.
    pub fn offdiag_row_sums(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).filter(|&j| j != i).map(|j| self.get(i, j).norm()).sum())
            .collect()
    }
}
