//! Dense complex linear algebra for small operators.
//!
//! Matrices here never exceed a few hundred rows: single-qubit operators,
//! moment operators on up to three copies (8×8), process matrices (4×4) and
//! cluster-state density matrices (at most 256×256). Everything is row-major
//! and allocation-light; no BLAS.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use thiserror::Error;

use crate::Real;

/// Numerical tolerances used across the crate.
///
/// The defaults are the crate-wide constants; callers that run noiseless
/// pipelines can tighten them via the `*_with` variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max elementwise |A − A†| accepted as Hermitian.
    pub hermitian: f64,
    /// Eigenvalues above `-clip_floor` are silently clipped to zero.
    pub clip_floor: f64,
    /// Eigenvalues below `-too_negative` are rejected as non-physical.
    pub too_negative: f64,
    /// Relative eigenvalue cutoff defining the support of a PSD operator.
    pub support: f64,
    /// Absolute weight outside a support beyond which it counts as leakage.
    pub leakage: f64,
}

impl Tolerances {
    pub const DEFAULT: Self = Self {
        hermitian: 1e-10,
        clip_floor: 1e-9,
        too_negative: 1e-6,
        support: 1e-9,
        leakage: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("matrix is not Hermitian (max |A - A^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("eigenvalue {eigenvalue:e} is too negative for a physical operator")]
    TooNegative { eigenvalue: f64 },
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::new(T::zero(), T::zero()); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    ///
    /// # Panics
    /// If `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        Self { rows, cols, data }
    }

    /// Builds a square matrix from nested rows of `(re, im)` pairs given as `f64`.
    pub fn from_rows_f64(rows: &[&[(f64, f64)]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        Self::from_fn(n, m, |i, j| {
            let (re, im) = rows[i][j];
            Complex::new(T::lit(re), T::lit(im))
        })
    }

    pub fn from_diagonal(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(*d, T::zero());
        }
        m
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &[Complex<T>], b: &[Complex<T>]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| *z * s).collect() }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| *z * s).collect() }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &Self, s: T) {
        assert_eq!(self.shape(), other.shape());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + *b * s;
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(row) {
                    *o = *o + a * *b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    /// Largest elementwise modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.shape(), other.shape());
        self.data.iter().zip(&other.data).map(|(a, b)| (*a - *b).norm()).fold(T::zero(), T::max)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Max elementwise |A − A†|.
    pub fn hermitian_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut dev = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= T::tol(tol)
    }

    /// (A + A†)/2.
    pub fn hermitize(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    /// Unitarity defect max|U†U − I|.
    pub fn unitarity_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.rows))
    }

    /// Operator (spectral) norm, computed from the eigenvalues of A†A.
    pub fn operator_norm(&self) -> T {
        let gram = self.adjoint().matmul(self).hermitize();
        let (vals, _) = jacobi_eigen(&gram);
        vals.last().copied().unwrap_or_else(T::zero).max(T::zero()).sqrt()
    }

    /// Converts every entry to another scalar type.
    pub fn cast<U: Real>(&self) -> ComplexMatrix<U> {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64()))).collect(),
        }
    }
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.shape(), rhs.shape());
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.shape(), rhs.shape());
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = &self.data[i * self.cols + j];
                write!(f, "{:+.6?}{:+.6?}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Single-qubit and two-qubit gates used throughout.
pub mod gates {
    use super::ComplexMatrix;
    use crate::Real;
    use num_complex::Complex;

    fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
        Complex::new(T::lit(re), T::lit(im))
    }

    pub fn identity2<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::identity(2)
    }

    pub fn pauli_x<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_vec(2, 2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
    }

    pub fn pauli_y<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_vec(2, 2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
    }

    pub fn pauli_z<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_vec(2, 2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
    }

    pub fn hadamard<T: Real>() -> ComplexMatrix<T> {
        let h = T::FRAC_1_SQRT_2();
        let z = T::zero();
        ComplexMatrix::from_vec(
            2,
            2,
            vec![Complex::new(h, z), Complex::new(h, z), Complex::new(h, z), Complex::new(-h, z)],
        )
    }

    /// Phase gate S = diag(1, i).
    pub fn phase_s<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_vec(2, 2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(0., 1.)])
    }

    /// R_z(φ) = exp(−iZφ/2).
    pub fn rz<T: Real>(phi: T) -> ComplexMatrix<T> {
        let half = phi * T::lit(0.5);
        let z = Complex::new(T::zero(), T::zero());
        ComplexMatrix::from_vec(2, 2, vec![Complex::from_polar(T::one(), -half), z, z, Complex::from_polar(T::one(), half)])
    }

    /// CZ = diag(1, 1, 1, −1).
    pub fn cz<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_real_diagonal(&[T::one(), T::one(), T::one(), -T::one()])
    }

    /// CNOT with the control on the left tensor factor (basis |ab⟩, index 2a+b).
    pub fn cx<T: Real>() -> ComplexMatrix<T> {
        let mut m = ComplexMatrix::zeros(4, 4);
        let one = Complex::new(T::one(), T::zero());
        m[(0, 0)] = one;
        m[(1, 1)] = one;
        m[(2, 3)] = one;
        m[(3, 2)] = one;
        m
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `a^{⊗t}`; `t = 0` yields the 1×1 identity.
pub fn tensor_power<T: Real>(a: &ComplexMatrix<T>, t: usize) -> ComplexMatrix<T> {
    let mut out = ComplexMatrix::identity(1);
    for _ in 0..t {
        out = kron(&out, a);
    }
    out
}

fn check_hermitian<T: Real>(h: &ComplexMatrix<T>, tol: f64) -> Result<(), NumericsError> {
    if !h.is_square() {
        return Err(NumericsError::NotSquare { rows: h.rows(), cols: h.cols() });
    }
    let dev = h.hermitian_deviation();
    if dev > T::tol(tol) {
        return Err(NumericsError::NotHermitian { deviation: dev.as_f64() });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as columns.
pub fn hermitian_eig<T: Real>(h: &ComplexMatrix<T>) -> Result<(Vec<T>, ComplexMatrix<T>), NumericsError> {
    hermitian_eig_with(h, &Tolerances::DEFAULT)
}

pub fn hermitian_eig_with<T: Real>(
    h: &ComplexMatrix<T>,
    tol: &Tolerances,
) -> Result<(Vec<T>, ComplexMatrix<T>), NumericsError> {
    check_hermitian(h, tol.hermitian)?;
    Ok(jacobi_eigen(&h.hermitize()))
}

/// Cyclic complex Jacobi. Input must be exactly Hermitian.
fn jacobi_eigen<T: Real>(h: &ComplexMatrix<T>) -> (Vec<T>, ComplexMatrix<T>) {
    let n = h.rows();
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    let zero = T::zero();
    let one = T::one();
    let scale = a.frobenius_norm();
    if n <= 1 || scale == zero {
        let vals = (0..n).map(|i| a[(i, i)].re).collect();
        return (vals, v);
    }
    let threshold = T::epsilon() * scale * T::lit(1e-2);

    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<T>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= threshold * T::lit(1e-3) {
                    continue;
                }
                // Phase e^{iα} of a_pq; rotating column q by e^{-iα} makes a_pq real.
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (T::lit(2.0) * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + one).sqrt());
                let c = one / (t * t + one).sqrt();
                let s = t * c;
                // G = diag-phase · real rotation on (p, q):
                // G_pp = c, G_pq = s, G_qp = -s e^{-iα}, G_qq = c e^{-iα}.
                let e_m = phase.conj();
                let g_pp = Complex::new(c, zero);
                let g_pq = Complex::new(s, zero);
                let g_qp = e_m * (-s);
                let g_qq = e_m * c;
                // A ← A G (columns p, q).
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                // A ← G† A (rows p, q).
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = Complex::new(zero, zero);
                a[(q, p)] = Complex::new(zero, zero);
                a[(p, p)] = Complex::new(a[(p, p)].re, zero);
                a[(q, q)] = Complex::new(a[(q, q)].re, zero);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let vals = order.iter().map(|&i| a[(i, i)].re).collect();
    let vecs = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (vals, vecs)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue<T: Real>(h: &ComplexMatrix<T>) -> Result<T, NumericsError> {
    let (vals, _) = hermitian_eig(h)?;
    Ok(vals.first().copied().unwrap_or_else(T::zero))
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn max_eigenvalue<T: Real>(h: &ComplexMatrix<T>) -> Result<T, NumericsError> {
    let (vals, _) = hermitian_eig(h)?;
    Ok(vals.last().copied().unwrap_or_else(T::zero))
}

/// Rebuilds `V · diag(f(λ)) · V†`.
pub fn spectral_map<T: Real>(vals: &[T], vecs: &ComplexMatrix<T>, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
    let n = vals.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lam) in vals.iter().enumerate() {
        let w = f(lam);
        if w == T::zero() {
            continue;
        }
        for i in 0..n {
            let vik = vecs[(i, k)] * w;
            for j in 0..n {
                out[(i, j)] = out[(i, j)] + vik * vecs[(j, k)].conj();
            }
        }
    }
    out
}

/// Principal square root of a Hermitian PSD matrix; negative eigenvalues are clipped to zero.
pub fn psd_sqrt<T: Real>(h: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>, NumericsError> {
    psd_sqrt_with(h, &Tolerances::DEFAULT)
}

pub fn psd_sqrt_with<T: Real>(h: &ComplexMatrix<T>, tol: &Tolerances) -> Result<ComplexMatrix<T>, NumericsError> {
    let (vals, vecs) = hermitian_eig_with(h, tol)?;
    if let Some(&lo) = vals.first() {
        if lo < -T::lit(tol.too_negative) {
            return Err(NumericsError::TooNegative { eigenvalue: lo.as_f64() });
        }
    }
    Ok(spectral_map(&vals, &vecs, |l| l.max(T::zero()).sqrt()))
}

/// Clips negative eigenvalues of a Hermitian matrix to zero.
///
/// Returns the repaired matrix and the total negative weight removed.
pub fn clip_to_psd<T: Real>(h: &ComplexMatrix<T>) -> Result<(ComplexMatrix<T>, T), NumericsError> {
    let (vals, vecs) = hermitian_eig(h)?;
    let removed = vals.iter().filter(|l| **l < T::zero()).map(|l| -*l).sum::<T>();
    Ok((spectral_map(&vals, &vecs, |l| l.max(T::zero())), removed))
}

/// Inverse of a real square matrix (row-major) by Gauss–Jordan with partial pivoting.
pub fn invert_real<T: Real>(a: &[T], n: usize) -> Result<Vec<T>, NumericsError> {
    if a.len() != n * n {
        return Err(NumericsError::DimensionMismatch { left: (n, n), right: (a.len(), 1) });
    }
    let mut m = a.to_vec();
    let mut inv = vec![T::zero(); n * n];
    for i in 0..n {
        inv[i * n + i] = T::one();
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().partial_cmp(&m[j * n + col].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty range");
        if m[pivot * n + col].abs() <= T::min_positive_value() {
            return Err(NumericsError::Singular);
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
        }
        let d = m[col * n + col];
        for k in 0..n {
            m[col * n + k] = m[col * n + k] / d;
            inv[col * n + k] = inv[col * n + k] / d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r * n + col];
            if f == T::zero() {
                continue;
            }
            for k in 0..n {
                m[r * n + k] = m[r * n + k] - f * m[col * n + k];
                inv[r * n + k] = inv[r * n + k] - f * inv[col * n + k];
            }
        }
    }
    Ok(inv)
}

/// Induced 1-norm (max absolute column sum) of a real row-major matrix.
pub fn norm_1<T: Real>(a: &[T], n: usize) -> T {
    (0..n).map(|j| (0..n).map(|i| a[i * n + j].abs()).sum::<T>()).fold(T::zero(), T::max)
}

/// Real matrix–vector product.
pub fn real_matvec<T: Real>(a: &[T], n: usize, v: &[T]) -> Vec<T> {
    (0..n).map(|i| (0..n).map(|j| a[i * n + j] * v[j]).sum()).collect()
}
