//! Dense Hermitian linear algebra.
//!
//! Everything in this crate operates on small (n <= 64) dense complex
//! Hermitian matrices. The eigensolver is a cyclic complex Jacobi method;
//! matrix functions are evaluated through the spectral decomposition.

mod calculus;
mod dense;
mod io;
mod jacobi;
mod random;

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use calculus::{abs_matrix, apply_fn, positive_part, DOMAIN_CLAMP};
pub use dense::CMatrix;
pub use io::{parse_matrix, serialize_matrix, MatrixJson};
pub use jacobi::{eigh, SpectralDecomposition, MAX_SWEEPS};
pub use random::{
    random_codiagonal_pair, random_hermitian, random_matrix, random_psd, random_psd_degenerate,
    random_unitary, rng_from_seed, split_seed, MatrixKind, Sample,
};

pub const MAX_DIM: usize = 64;

/// Relative tolerance on `max|M - M*| / max|M|` accepted at construction.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Dense n x n complex Hermitian matrix stored row-major.
///
/// Construction averages `M` and `M*`, so the stored entries are exactly
/// Hermitian and the diagonal is exactly real.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Builds a Hermitian matrix from row-major complex entries.
    pub fn from_complex(n: usize, data: Vec<Complex64>) -> Result<Self> {
        check_dim(n)?;
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        let scale = data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut asym = 0.0f64;
        for i in 0..n {
            for j in i..n {
                asym = asym.max((data[i * n + j] - data[j * n + i].conj()).norm());
            }
        }
        if asym > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { residual: asym });
        }
        Ok(Self::symmetrized(n, data))
    }

    /// Builds a real symmetric matrix from row-major entries.
    pub fn from_real(n: usize, data: &[f64]) -> Result<Self> {
        Self::from_complex(n, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Builds from real and imaginary row-major parts.
    pub fn from_parts(n: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::LengthMismatch(re.len(), im.len()));
        }
        Self::from_complex(
            n,
            re.iter()
                .zip(im)
                .map(|(&r, &i)| Complex64::new(r, i))
                .collect(),
        )
    }

    /// Averages with the adjoint without any tolerance check. Used for
    /// results of operations that are Hermitian in exact arithmetic.
    pub(crate) fn symmetrized(n: usize, mut data: Vec<Complex64>) -> Self {
        for i in 0..n {
            data[i * n + i] = Complex64::new(data[i * n + i].re, 0.0);
            for j in (i + 1)..n {
                let avg = (data[i * n + j] + data[j * n + i].conj()) * 0.5;
                data[i * n + j] = avg;
                data[j * n + i] = avg.conj();
            }
        }
        HermitianMatrix { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = Complex64::new(v, 0.0);
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.data[i * self.n + i].re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `self + s * I`.
    pub fn shift(&self, s: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.data[i * self.n + i].re += s;
        }
        out
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        HermitianMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b * s)
                .collect(),
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        CMatrix::from_vec(self.n, self.n, self.data.clone())
    }

    /// Ordinary matrix product (not Hermitian in general).
    pub fn mul(&self, other: &Self) -> CMatrix {
        self.to_dense().mul(&other.to_dense())
    }

    /// `max |AB - BA|`.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        let ab = self.mul(other);
        let ba = other.mul(self);
        ab.sub(&ba).max_abs()
    }

    /// `U * self * U^*` for a square `U`.
    pub fn conjugate(&self, u: &CMatrix) -> Self {
        let m = u.mul(&self.to_dense()).mul(&u.adjoint());
        Self::symmetrized(m.rows(), m.into_vec())
    }

    /// Compression `V^* * self * V` onto the span of the columns of `V`.
    pub fn compress(&self, v: &CMatrix) -> Self {
        let m = v.adjoint().mul(&self.to_dense()).mul(v);
        Self::symmetrized(m.rows(), m.into_vec())
    }

    /// Block diagonal `self (+) other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.n + other.n;
        let mut out = Self::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.data[i * n + j] = self.get(i, j);
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                out.data[(i + self.n) * n + (j + self.n)] = other.get(i, j);
            }
        }
        out
    }

    /// Largest entrywise difference to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn eigh(&self) -> Result<SpectralDecomposition> {
        eigh(self)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eigh(self)?.eigenvalues)
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*eigh(self)?.eigenvalues.last().expect("n >= 1"))
    }

    /// Spectral norm (largest eigenvalue modulus).
    pub fn op_norm(&self) -> Result<f64> {
        let ev = eigh(self)?.eigenvalues;
        Ok(ev[0].abs().max(ev[ev.len() - 1].abs()))
    }

    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= -tol)
    }
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::DimensionOutOfRange { n });
    }
    Ok(())
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "HermitianMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| {
                    let z = self.get(i, j);
                    if z.im == 0.0 {
                        format!("{:>12.6}", z.re)
                    } else {
                        format!("{:>12.6}{:+.6}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        self.add_scaled(1.0, rhs)
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        self.add_scaled(-1.0, rhs)
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}

impl Add for HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: HermitianMatrix) -> HermitianMatrix {
        &self + &rhs
    }
}

impl Sub for HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: HermitianMatrix) -> HermitianMatrix {
        &self - &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_symmetrizes_within_tolerance() {
        let m = HermitianMatrix::from_real(2, &[1.0, 0.5, 0.5 + 1e-12, 2.0]).unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0).conj());
    }

    #[test]
    fn construction_rejects_asymmetry() {
        let err = HermitianMatrix::from_real(2, &[1.0, 0.5, 0.501, 2.0]).unwrap_err();
        assert_eq!(err.code(), "E_NOT_HERMITIAN");
    }

    #[test]
    fn diagonal_imaginary_part_dropped() {
        let m = HermitianMatrix::from_complex(
            2,
            vec![
                Complex64::new(1.0, 1e-12),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(3.0, 0.0),
            ],
        )
        .unwrap();
        assert_eq!(m.get(0, 0).im, 0.0);
        assert_eq!(m.trace(), 4.0);
    }

    #[test]
    fn dimension_limits() {
        assert!(HermitianMatrix::from_real(0, &[]).is_err());
        assert!(HermitianMatrix::from_real(65, &vec![0.0; 65 * 65]).is_err());
        assert!(HermitianMatrix::from_real(2, &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn direct_sum_places_blocks() {
        let a = HermitianMatrix::diag(&[1.0, 2.0]);
        let b = HermitianMatrix::diag(&[3.0]);
        let s = a.direct_sum(&b);
        assert_eq!(s.diagonal(), vec![1.0, 2.0, 3.0]);
        assert_eq!(s.get(0, 2), Complex64::new(0.0, 0.0));
    }
}
