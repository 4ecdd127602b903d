//! Dense complex matrices: determinant, inverse and Hermitian spectra.

use std::ops::{Index, IndexMut, Mul};

use super::C64;
use crate::error::{Error, Result};

/// Largest 1-norm condition estimate accepted by [`ComplexMatrix::invert`].
pub const MAX_CONDITION: f64 = 1e12;

/// Dense row-major matrix of complex scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
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

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
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

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn one_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NonSquare { rows: self.rows, cols: self.cols })
        }
    }

    /// Determinant by row-pivoted LU factorization. The 0x0 determinant is 1.
    pub fn det(&self) -> Result<C64> {
        self.require_square()?;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = C64::new(1.0, 0.0);
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&p, &q| a[p * n + k].norm().total_cmp(&a[q * n + k].norm()))
                .unwrap_or(k);
            if a[pivot * n + k].norm() == 0.0 {
                return Ok(C64::new(0.0, 0.0));
            }
            if pivot != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot * n + j);
                }
                det = -det;
            }
            let akk = a[k * n + k];
            det *= akk;
            for i in k + 1..n {
                let factor = a[i * n + k] / akk;
                if factor.norm() == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= factor * t;
                }
            }
        }
        if !(det.re.is_finite() && det.im.is_finite()) {
            return Err(Error::NonFinite("determinant".into()));
        }
        Ok(det)
    }

    /// Inverse by LU with partial pivoting.
    ///
    /// Fails with [`Error::Singular`] on an exactly zero pivot and with
    /// [`Error::IllConditioned`] when the 1-norm condition estimate exceeds
    /// [`MAX_CONDITION`].
    pub fn invert(&self) -> Result<Self> {
        self.require_square()?;
        let n = self.rows;
        let mut lu = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&p, &q| lu[p * n + k].norm().total_cmp(&lu[q * n + k].norm()))
                .unwrap_or(k);
            if lu[pivot * n + k].norm() == 0.0 {
                return Err(Error::Singular);
            }
            if pivot != k {
                for j in 0..n {
                    lu.swap(k * n + j, pivot * n + j);
                }
                perm.swap(k, pivot);
            }
            let akk = lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] / akk;
                lu[i * n + k] = factor;
                for j in k + 1..n {
                    let t = lu[k * n + j];
                    lu[i * n + j] -= factor * t;
                }
            }
        }

        let mut inv = Self::zeros(n, n);
        let mut col = vec![C64::new(0.0, 0.0); n];
        for c in 0..n {
            // P·A = L·U, so solve L·U·x = P·e_c.
            for (i, slot) in col.iter_mut().enumerate() {
                *slot = if perm[i] == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            }
            for i in 0..n {
                let mut s = col[i];
                for j in 0..i {
                    s -= lu[i * n + j] * col[j];
                }
                col[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = col[i];
                for j in i + 1..n {
                    s -= lu[i * n + j] * col[j];
                }
                col[i] = s / lu[i * n + i];
            }
            for i in 0..n {
                inv[(i, c)] = col[i];
            }
        }

        let cond = self.one_norm() * inv.one_norm();
        if !cond.is_finite() || cond > MAX_CONDITION {
            return Err(Error::IllConditioned(cond));
        }
        Ok(inv)
    }

    /// Ascending eigenvalues of a Hermitian matrix.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        self.require_square()?;
        let n = self.rows;
        let scale = self.max_norm().max(1.0);
        let mut deviation: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                deviation = deviation.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        if deviation > 1e-12 * scale {
            return Err(Error::NotHermitian(deviation));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let m = nalgebra::DMatrix::from_row_slice(n, n, &self.data);
        let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        Ok(eig)
    }

    pub fn trace(&self) -> Result<C64> {
        self.require_square()?;
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "incompatible shapes for product");
        ComplexMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * rhs[(k, j)]).sum()
        })
    }
}

/// Determinant of a square matrix given by an entry function.
pub fn det_from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Result<C64> {
    ComplexMatrix::from_fn(n, n, f).det()
}
