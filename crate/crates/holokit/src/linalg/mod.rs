//! Dense complex linear algebra kernels sized for small logical ranks
//! (typically 1–8) and moderate ambient dimensions.
//!
//! Everything here is a pure function on value-semantic matrices; RNG
//! streams are explicit parameters.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, ToPrimitive};

use crate::error::{Error, Result};

mod eig;
mod qr;
mod svd;

pub use eig::{eig_hermitian, eigenphases, expm_antihermitian};
pub use qr::{haar_unitary, orthonormalize};
pub use svd::svd;

/// Scalar types usable as the real base field of the library.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

/// Shorthand for converting an `f64` literal into the working scalar type.
pub(crate) fn real<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant must convert into the scalar type")
}

/// Dense complex matrix in row-major order. The universal carrier for
/// frames, overlaps, transports, holonomies, and gates.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: fmt::Debug> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = &self.data[i * self.cols + j];
                write!(f, "{:?}{:+?}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> ComplexMatrix<T> {
    /// Builds a matrix from row-major entries, checking shape and finiteness.
    pub fn from_entries(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries for {}x{}", rows * cols, rows, cols),
                got: format!("{}", data.len()),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex<T>,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested `[re, im]` pairs in row-major order.
    pub fn from_rows(rows_data: &[Vec<Complex<T>>]) -> Result<Self> {
        let rows = rows_data.len();
        let cols = rows_data.first().map_or(0, |r| r.len());
        if rows_data.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: format!("uniform row length {cols}"),
                got: "ragged rows".into(),
            });
        }
        let data: Vec<_> = rows_data.iter().flatten().copied().collect();
        Self::from_entries(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[T]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(values[i], T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
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

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex<T>) {
        self.data[i * self.cols + j] = value;
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).conj())
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * factor)
    }

    pub fn scale_real(&self, factor: T) -> Self {
        self.scale(Complex::new(factor, T::zero()))
    }

    pub fn trace(&self) -> Complex<T> {
        debug_assert!(self.is_square());
        let mut t = Complex::new(T::zero(), T::zero());
        for i in 0..self.rows {
            t = t + self.get(i, i);
        }
        t
    }

    pub fn frobenius_norm(&self) -> T {
        let mut s = T::zero();
        for z in &self.data {
            s = s + z.norm_sqr();
        }
        s.sqrt()
    }

    /// Largest singular value, computed through the SVD.
    pub fn spectral_norm(&self) -> T {
        if self.data.iter().all(|z| z.norm_sqr() == T::zero()) {
            return T::zero();
        }
        let s = svd(self).expect("SVD of a finite matrix");
        s.singular_values[0]
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Matrix-vector product on a column coefficient vector.
    pub fn matvec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = Complex::new(T::zero(), T::zero());
                for j in 0..self.cols {
                    s = s + self.get(i, j) * v[j];
                }
                s
            })
            .collect()
    }

    /// `‖U†U − I‖_F`; zero for exactly unitary (or isometric) input.
    pub fn unitarity_residual(&self) -> T {
        let g = self.adjoint().matmul(self);
        (&g - &Self::identity(self.cols)).frobenius_norm()
    }

    /// Hermitian part deviation `‖A + A†‖_F`.
    pub fn antihermiticity_residual(&self) -> T {
        debug_assert!(self.is_square());
        (self + &self.adjoint()).frobenius_norm()
    }

    /// Converts the entries to `f64` precision (for reports).
    pub fn to_f64(&self) -> ComplexMatrix<f64> {
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            let z = self.get(i, j);
            Complex::new(z.re.to_f64().unwrap(), z.im.to_f64().unwrap())
        })
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Scalar> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + rhs.get(i, j))
    }
}

impl<T: Scalar> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - rhs.get(i, j))
    }
}

/// Full SVD `M = L · diag(σ) · R†` with `L` rows×rows and `R` cols×cols
/// unitary and `σ` sorted descending.
#[derive(Clone, Debug)]
pub struct SvdResult<T> {
    pub left: ComplexMatrix<T>,
    pub singular_values: Vec<T>,
    pub right: ComplexMatrix<T>,
}

impl<T: Scalar> SvdResult<T> {
    /// `L · diag(σ) · R†`, for round-trip checks.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let rows = self.left.rows();
        let cols = self.right.rows();
        let mut sigma = ComplexMatrix::zeros(rows, cols);
        for (k, s) in self.singular_values.iter().enumerate() {
            sigma.set(k, k, Complex::new(*s, T::zero()));
        }
        &(&self.left * &sigma) * &self.right.adjoint()
    }
}

/// Polar decomposition `M = W · H` with `W` unitary and `H` positive
/// Hermitian.
#[derive(Clone, Debug)]
pub struct PolarResult<T> {
    pub unitary: ComplexMatrix<T>,
    pub positive: ComplexMatrix<T>,
    pub min_singular_value: T,
}

/// Polar decomposition of a square matrix through the SVD:
/// `W = L·R†`, `H = R·diag(σ)·R†`.
///
/// Fails with a singular-overlap error when `σ_min(M) < tol`, signalling
/// an ill-conditioned frame comparison.
pub fn polar<T: Scalar>(m: &ComplexMatrix<T>, tol: T) -> Result<PolarResult<T>> {
    if !m.is_square() {
        return Err(Error::Domain(format!(
            "polar decomposition requires a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let s = svd(m)?;
    let min_sv = *s.singular_values.last().expect("non-empty matrix");
    if min_sv < tol {
        return Err(Error::SingularOverlap {
            index: None,
            sigma_min: min_sv.to_f64().unwrap(),
            tol: tol.to_f64().unwrap(),
        });
    }
    let unitary = &s.left * &s.right.adjoint();
    let sigma = ComplexMatrix::diagonal(&s.singular_values);
    let positive = &(&s.right * &sigma) * &s.right.adjoint();
    Ok(PolarResult {
        unitary,
        positive,
        min_singular_value: min_sv,
    })
}

/// Default tolerance below which an overlap is treated as singular.
pub fn default_singularity_tol<T: Scalar>() -> T {
    real(1e-12)
}
