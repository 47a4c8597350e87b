use nalgebra::DMatrix;

use super::{OutputPattern, Pattern};
use crate::error::{Error, Result};

/// Real-valued instantiation of a structured matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedMatrix {
    matrix: DMatrix<f64>,
}

impl WeightedMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        Self { matrix }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(DMatrix::zeros(rows, cols))
    }

    /// Places `values[i]` at the `i`-th entry of `pattern` (row-major order).
    pub fn from_pattern(pattern: &Pattern, values: &[f64]) -> Result<Self> {
        if values.len() != pattern.nnz() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} nonzeros",
                values.len(),
                pattern.nnz()
            )));
        }
        let mut m = DMatrix::zeros(pattern.n(), pattern.n());
        for ((r, c), &w) in pattern.entries().zip(values) {
            m[(r, c)] = w;
        }
        Ok(Self::new(m))
    }

    /// Output matrix with unit weight on every structural nonzero.
    pub fn from_output_pattern(h: &OutputPattern) -> Self {
        let mut m = DMatrix::zeros(h.rows(), h.n());
        for (r, c) in h.entries() {
            m[(r, c)] = 1.0;
        }
        Self::new(m)
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.matrix[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.matrix[(row, col)] = value;
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(&self.matrix * factor)
    }

    pub fn kronecker(&self, other: &WeightedMatrix) -> Self {
        Self::new(self.matrix.kronecker(&other.matrix))
    }

    /// True when every nonzero entry lies on the support of `pattern`.
    pub fn supported_by(&self, pattern: &Pattern) -> bool {
        self.rows() == pattern.n()
            && self.cols() == pattern.n()
            && self
                .matrix
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                // column-major storage
                .all(|(idx, _)| pattern.contains(idx % pattern.n(), idx / pattern.n()))
    }
}
