//! Dense complex linear algebra for register operators.
//!
//! Everything here works on [`SquareMatrix`], a row-major dense complex
//! matrix. Register operators never exceed 2^6 rows, so plain loops beat
//! anything fancier; the Hermitian eigensolver and the determinant are
//! delegated to `nalgebra`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest operator dimension accepted by [`kron`] (six qubits).
pub const MAX_DIM: usize = 1 << 6;

/// Default truncation order of the short-time Taylor exponential.
pub const DEFAULT_TAYLOR_ORDER: usize = 6;

/// Admissible Taylor truncation orders.
pub const TAYLOR_ORDERS: std::ops::RangeInclusive<usize> = 3..=12;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense complex `dim × dim` matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.data[r * dim + c] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a perfect square.
    pub fn from_row_major(entries: Vec<Complex64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != entries.len() {
            return Err(Error::Argument(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        Ok(Self { dim, data: entries })
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m.data[i * m.dim + i] = v;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |r, c| self.data[c * n + r].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: Complex64, other: &Self) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// `out = self * rhs`, reusing `out`'s storage.
    pub fn mul_into(&self, rhs: &Self, out: &mut Self) {
        let n = self.dim;
        assert_eq!(n, rhs.dim, "dimension mismatch");
        assert_eq!(n, out.dim, "dimension mismatch");
        out.data.fill(ZERO);
        for r in 0..n {
            let row = &self.data[r * n..(r + 1) * n];
            let dst = &mut out.data[r * n..(r + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let src = &rhs.data[k * n..(k + 1) * n];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.dim);
        self.mul_into(rhs, &mut out);
        out
    }

    /// `A·B − B·A`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius_norm(self)
    }

    /// `‖A − A†‖_F`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for r in 0..n {
            for c in 0..n {
                acc += (self.data[r * n + c] - self.data[c * n + r].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_residual() < 1e-12 * self.frobenius_norm().max(1.0)
    }

    /// `‖A†A − I‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        let mut g = self.dagger().matmul(self);
        for i in 0..self.dim {
            g.data[i * self.dim + i] -= ONE;
        }
        g.frobenius_norm()
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_residual() < 1e-10 * self.dim as f64
    }

    pub fn determinant(&self) -> Complex64 {
        let n = self.dim;
        DMatrix::from_row_slice(n, n, &self.data).determinant()
    }

    /// Largest entry-wise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Mul for &SquareMatrix {
    type Output = SquareMatrix;

    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        self.matmul(rhs)
    }
}

impl Add for &SquareMatrix {
    type Output = SquareMatrix;

    fn add(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        SquareMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &SquareMatrix {
    type Output = SquareMatrix;

    fn sub(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        SquareMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let v = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i  ", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub fn matrix(self) -> SquareMatrix {
        let e = match self {
            PauliAxis::X => [ZERO, ONE, ONE, ZERO],
            PauliAxis::Y => [ZERO, -I, I, ZERO],
            PauliAxis::Z => [ONE, ZERO, ZERO, -ONE],
        };
        SquareMatrix {
            dim: 2,
            data: e.to_vec(),
        }
    }
}

/// Kronecker product `a ⊗ b`, limited to [`MAX_DIM`].
pub fn kron(a: &SquareMatrix, b: &SquareMatrix) -> Result<SquareMatrix> {
    kron_with_limit(a, b, MAX_DIM)
}

pub fn kron_with_limit(a: &SquareMatrix, b: &SquareMatrix, max_dim: usize) -> Result<SquareMatrix> {
    let (na, nb) = (a.dim, b.dim);
    let dim = na.checked_mul(nb).ok_or(Error::SizeLimit {
        dim: usize::MAX,
        max: max_dim,
    })?;
    if dim > max_dim {
        return Err(Error::SizeLimit { dim, max: max_dim });
    }
    let mut out = SquareMatrix::zeros(dim);
    for ar in 0..na {
        for ac in 0..na {
            let x = a.data[ar * na + ac];
            if x == ZERO {
                continue;
            }
            for br in 0..nb {
                let row = (ar * nb + br) * dim + ac * nb;
                for bc in 0..nb {
                    out.data[row + bc] = x * b.data[br * nb + bc];
                }
            }
        }
    }
    Ok(out)
}

/// `I^{⊗(site−1)} ⊗ σ_axis ⊗ I^{⊗(n−site)}` with 1-based `site`.
pub fn embed_pauli(axis: PauliAxis, site: usize, n: usize) -> Result<SquareMatrix> {
    if site == 0 || site > n {
        return Err(Error::Argument(format!(
            "qubit site {site} outside 1..={n}"
        )));
    }
    let mut acc = SquareMatrix::identity(1);
    for k in 1..=n {
        let factor = if k == site {
            axis.matrix()
        } else {
            SquareMatrix::identity(2)
        };
        acc = kron(&acc, &factor)?;
    }
    Ok(acc)
}

/// `√Tr(A†A)`.
pub fn frobenius_norm(a: &SquareMatrix) -> f64 {
    a.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Truncated Taylor series `Σ_{k=0}^{order} A^k / k!`.
///
/// Refuses inputs with `‖A‖_F > 1`, where the truncation is no longer
/// trustworthy; shrink the time step instead.
pub fn expm_taylor(a: &SquareMatrix, order: usize) -> Result<SquareMatrix> {
    let mut ws = TaylorWorkspace::new(a.dim);
    let mut out = SquareMatrix::zeros(a.dim);
    ws.expm_into(a, order, &mut out)?;
    Ok(out)
}

/// Scratch storage for repeated Taylor exponentials of one dimension.
#[derive(Debug, Clone)]
pub(crate) struct TaylorWorkspace {
    tmp: SquareMatrix,
}

impl TaylorWorkspace {
    pub(crate) fn new(dim: usize) -> Self {
        Self {
            tmp: SquareMatrix::zeros(dim),
        }
    }

    /// Horner evaluation: `I + A(I + A/2(I + … (I + A/order)))`.
    pub(crate) fn expm_into(
        &mut self,
        a: &SquareMatrix,
        order: usize,
        out: &mut SquareMatrix,
    ) -> Result<()> {
        if !TAYLOR_ORDERS.contains(&order) {
            return Err(Error::Argument(format!(
                "Taylor order {order} outside {}..={}",
                TAYLOR_ORDERS.start(),
                TAYLOR_ORDERS.end()
            )));
        }
        let norm = frobenius_norm(a);
        if norm > 1.0 {
            return Err(Error::TaylorGuard { norm });
        }
        let n = a.dim;
        // out = I + A/order
        for (o, &v) in out.data.iter_mut().zip(&a.data) {
            *o = v / order as f64;
        }
        for i in 0..n {
            out.data[i * n + i] += ONE;
        }
        for k in (1..order).rev() {
            a.mul_into(out, &mut self.tmp);
            let inv = 1.0 / k as f64;
            for (o, &t) in out.data.iter_mut().zip(&self.tmp.data) {
                *o = t * inv;
            }
            for i in 0..n {
                out.data[i * n + i] += ONE;
            }
        }
        Ok(())
    }
}

/// `exp(−i·h·t)` through the eigendecomposition `h = V Λ V†`.
pub fn expm_spectral(h: &SquareMatrix, t: f64) -> Result<SquareMatrix> {
    if !h.is_hermitian() {
        return Err(Error::Argument(format!(
            "matrix is not Hermitian (residual {:.3e})",
            h.hermiticity_residual()
        )));
    }
    Ok(expm_hermitian_unchecked(h, t))
}

pub(crate) fn expm_hermitian_unchecked(h: &SquareMatrix, t: f64) -> SquareMatrix {
    let n = h.dim;
    let eig = DMatrix::from_row_slice(n, n, &h.data).symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&lambda| Complex64::from_polar(1.0, -lambda * t))
        .collect();
    SquareMatrix::from_fn(n, |r, c| {
        (0..n)
            .map(|k| v[(r, k)] * phases[k] * v[(c, k)].conj())
            .sum()
    })
}
