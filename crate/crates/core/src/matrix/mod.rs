//! Dense complex matrices of small order and the two structured wrappers the
//! rest of the crate works with: [`UnitaryMatrix`] (points of the group) and
//! [`SkewHermitian`] (tangent vectors and logarithms).

mod eigen;
mod io;
mod norms;
pub(crate) mod random;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use eigen::{herm_eig, skew_exp, unitary_eig, unitary_log, EigenSystem, LogResult, UnitaryEigen};
pub use io::MatrixJson;
pub use norms::{schatten_norm, singular_values, NormOrder};
pub use random::{child_rng, haar_sample, haar_sample_with, random_unit_direction, rng_from_seed, uniform, FinslerRng};

pub type C64 = Complex64;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    /// Builds a matrix from row-major entries, rejecting wrong sizes and
    /// non-finite values.
    pub fn from_vec(n: usize, data: Vec<C64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::Shape(format!("expected {} entries for n = {}, got {}", n * n, n, data.len())));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("rows have unequal length".into()));
        }
        Self::from_vec(n, rows.iter().flatten().copied().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn diag(&self) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest imaginary part in absolute value.
    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Real inner product `Re Tr(a* b)`.
    pub fn inner(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Operator norm, computed from singular values.
    pub fn op_norm(&self) -> f64 {
        schatten_norm(self, NormOrder::Inf).unwrap_or(f64::NAN)
    }

    /// Defect `max |(a - a*)_ij|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n;
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    /// Symmetrized copy `(a + a*)/2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> C64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = C64::new(1.0, 0.0);
        for k in 0..n {
            let (piv, best) = (k..n)
                .map(|r| (r, a[r * n + k].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if piv != k {
                for c in 0..n {
                    a.swap(k * n + c, piv * n + c);
                }
                det = -det;
            }
            let p = a[k * n + k];
            det *= p;
            for r in (k + 1)..n {
                let f = a[r * n + k] / p;
                if f.norm() == 0.0 {
                    continue;
                }
                for c in k..n {
                    let v = a[k * n + c];
                    a[r * n + c] -= f * v;
                }
            }
        }
        det
    }

    /// `a · diag(d) · a*` for a diagonal given by its entries.
    pub fn conjugate_diag(&self, d: &[C64]) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..n {
                    s += self[(i, k)] * d[k] * self[(j, k)].conj();
                }
                out[(i, j)] = s;
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[C64]) {
        for (i, v) in col.iter().enumerate() {
            self[(i, j)] = *v;
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn entrywise_dist(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in product");
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in sum");
        ComplexMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in difference");
        ComplexMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix { n: self.n, data: self.data.iter().map(|a| -a).collect() }
    }
}

/// Unitarity tolerance `n · 1e-12` on `‖u*u − 1‖_∞`.
pub fn unitary_tolerance(n: usize) -> f64 {
    n as f64 * 1e-12
}

/// An element of the unitary group `U_n`.
#[derive(Clone, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let n = m.n();
        let defect = (&(&m.adjoint() * &m) - &ComplexMatrix::identity(n)).op_norm();
        if !(defect <= unitary_tolerance(n)) {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix known to be unitary by construction.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        debug_assert!(m.is_finite());
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    /// `diag(e^{iθ_1}, …, e^{iθ_n})`.
    pub fn from_angles(angles: &[f64]) -> Self {
        let d: Vec<C64> = angles.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        Self(ComplexMatrix::from_diag(&d))
    }

    /// Scalar unitary `e^{iθ}·1`.
    pub fn scalar(n: usize, theta: f64) -> Self {
        Self::from_angles(&vec![theta; n])
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    /// `self⁻¹ · other`.
    pub fn left_div(&self, other: &Self) -> Self {
        Self(&self.0.adjoint() * &other.0)
    }

    /// `self · x · self⁻¹`.
    pub fn conjugate(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &(&self.0 * x) * &self.0.adjoint()
    }

    pub fn det(&self) -> C64 {
        self.0.det()
    }
}

impl fmt::Debug for UnitaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Unitary {:?}", self.0)
    }
}

/// An element of the Lie algebra `𝔲_n`: `x* = −x`.
#[derive(Clone, PartialEq)]
pub struct SkewHermitian(ComplexMatrix);

impl SkewHermitian {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let n = m.n();
        let defect = (&m + &m.adjoint()).max_abs();
        if !(defect <= unitary_tolerance(n)) {
            return Err(Error::NotSkewHermitian(defect));
        }
        Ok(Self(m))
    }

    /// Projects an arbitrary matrix onto the skew-Hermitian part `(m − m*)/2`.
    pub fn skew_part(m: &ComplexMatrix) -> Self {
        Self((m - &m.adjoint()).scale_real(0.5))
    }

    /// `i·h` for Hermitian `h`.
    pub fn from_hermitian(h: &ComplexMatrix) -> Self {
        Self::skew_part(&h.scale(I))
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n))
    }

    /// `diag(iθ_1, …, iθ_n)`.
    pub fn from_angles(angles: &[f64]) -> Self {
        let d: Vec<C64> = angles.iter().map(|&t| C64::new(0.0, t)).collect();
        Self(ComplexMatrix::from_diag(&d))
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn scale(&self, t: f64) -> Self {
        Self(self.0.scale_real(t))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    /// The Hermitian matrix `−i·x`, whose eigenvalues are the rotation angles.
    pub fn to_hermitian(&self) -> ComplexMatrix {
        self.0.scale(-I).hermitian_part()
    }

    pub fn norm(&self, p: NormOrder) -> f64 {
        schatten_norm(&self.0, p).expect("validated norm order")
    }
}

impl fmt::Debug for SkewHermitian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SkewHermitian {:?}", self.0)
    }
}
