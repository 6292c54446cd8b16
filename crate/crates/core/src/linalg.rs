//! Small dense complex matrices.
//!
//! Subcarrier workloads are K x K with K <= 64, so a plain row-major buffer
//! and an O(K^3) LU solve with partial pivoting are all that is needed.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};
use num_complex::Complex64;

use crate::{Error, Result};

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMat::zeros(n);
        for r in 0..n {
            for c in 0..n {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Matrix order (rows == columns).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.n..(r + 1) * self.n]
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> CMat {
        CMat::from_fn(self.n, |r, c| self[(c, r)].conj())
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for r in 0..n {
            let lhs_row = self.row(r);
            let out_row = &mut out.data[r * n..(r + 1) * n];
            for (i, &a) in lhs_row.iter().enumerate() {
                let rhs_row = &rhs.data[i * n..(i + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(self.n, x.len());
        let n = self.n;
        (0..n)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(Complex64::new(0.0, 0.0), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// `diag(d) * self` (scales row `r` by `d[r]`).
    pub fn scale_rows(&self, d: &[Complex64]) -> CMat {
        debug_assert_eq!(self.n, d.len());
        CMat::from_fn(self.n, |r, c| d[r] * self[(r, c)])
    }

    /// Solve `self * X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &CMat) -> Result<CMat> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: rhs.n,
            });
        }
        let n = self.n;
        let mut a = self.clone();
        let mut x = rhs.clone();
        for col in 0..n {
            let mut pivot = col;
            let mut best = a[(col, col)].norm_sqr();
            for r in col + 1..n {
                let mag = a[(r, col)].norm_sqr();
                if mag > best {
                    best = mag;
                    pivot = r;
                }
            }
            if best == 0.0 {
                return Err(Error::SingularMatrix);
            }
            if pivot != col {
                for c in 0..n {
                    a.data.swap(col * n + c, pivot * n + c);
                    x.data.swap(col * n + c, pivot * n + c);
                }
            }
            let inv = Complex64::new(1.0, 0.0) / a[(col, col)];
            for r in col + 1..n {
                let factor = a[(r, col)] * inv;
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                let (pivot_rows, rest) = a.data.split_at_mut((col + 1) * n);
                let pivot_row = &pivot_rows[col * n..];
                let row = &mut rest[(r - col - 1) * n..(r - col) * n];
                for c in col..n {
                    row[c] -= factor * pivot_row[c];
                }
                let (pivot_rows, rest) = x.data.split_at_mut((col + 1) * n);
                let pivot_row = &pivot_rows[col * n..(col + 1) * n];
                let row = &mut rest[(r - col - 1) * n..(r - col) * n];
                for (xe, &pe) in row.iter_mut().zip(pivot_row) {
                    *xe -= factor * pe;
                }
            }
        }
        // Back substitution.
        for col in (0..n).rev() {
            let inv = Complex64::new(1.0, 0.0) / a[(col, col)];
            for c in 0..n {
                x[(col, c)] *= inv;
            }
            let (above, below) = x.data.split_at_mut(col * n);
            let pivot_row = &below[..n];
            for r in 0..col {
                let factor = a[(r, col)];
                let row = &mut above[r * n..(r + 1) * n];
                for (xe, &pe) in row.iter_mut().zip(pivot_row) {
                    *xe -= factor * pe;
                }
            }
        }
        Ok(x)
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.n + c]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.n + c]
    }
}
