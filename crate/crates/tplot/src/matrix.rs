//! Dense nonnegative traffic matrices.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// An `n x n` nonnegative demand matrix. Entry `(i, j)` is the traffic rate
/// from node `i` to node `j`, in normalized rate units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficMatrix {
    n: usize,
    data: Vec<f64>,
}

impl TrafficMatrix {
    pub fn zeros(n: usize) -> Self {
        TrafficMatrix { n, data: vec![0.0; n * n] }
    }

    /// Constant matrix with every entry equal to `value`.
    pub fn uniform(n: usize, value: f64) -> Self {
        TrafficMatrix { n, data: vec![value; n * n] }
    }

    /// Build from a row-major vector of length `n * n`; entries must be nonnegative.
    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Structural(format!(
                "matrix data length {} does not match n={}",
                data.len(),
                n
            )));
        }
        if data.iter().any(|&x| x.is_nan() || x < 0.0) {
            return Err(Error::Structural("matrix entries must be nonnegative".into()));
        }
        Ok(TrafficMatrix { n, data })
    }

    /// The 0-1 matrix of the permutation `perm` (entry `(i, perm[i])` is 1).
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(n);
        for (i, &j) in perm.iter().enumerate() {
            m.data[i * n + j] = 1.0;
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, dv: f64) {
        self.data[i * self.n + j] += dv;
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.data[i * self.n..(i + 1) * self.n].iter().sum()
    }

    pub fn col_sum(&self, j: usize) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + j]).sum()
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.data[j * n + i] = self.data[i * n + j];
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_vec_rejects_bad_input() {
        assert!(TrafficMatrix::from_vec(2, vec![0.0; 3]).is_err());
        assert!(TrafficMatrix::from_vec(2, vec![1.0, 0.0, -0.5, 0.0]).is_err());
        assert!(TrafficMatrix::from_vec(2, vec![f64::NAN, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn permutation_matrix_sums() {
        let m = TrafficMatrix::permutation(&[2, 0, 1]);
        for i in 0..3 {
            assert_eq!(m.row_sum(i), 1.0);
            assert_eq!(m.col_sum(i), 1.0);
        }
        assert_eq!(m.get(0, 2), 1.0);
        assert_eq!(m.total(), 3.0);
    }
}
