//! Single-qubit state and process tomography.
//!
//! Process matrices use the operator basis E₀ = I, E₁ = X, E₂ = −iY,
//! E₃ = Z, so that ε(ρ) = Σₘₙ Eₘ ρ Eₙ† χₘₙ.

use num_complex::Complex;
use thiserror::Error;

use crate::cluster::Counts;
use crate::numerics::{self, gates, ComplexMatrix, NumericsError};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TomographyError {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("empty counts for the {0} basis")]
    EmptyCounts(&'static str),
    #[error("operator is not unitary (defect {0:e})")]
    NotUnitary(f64),
    #[error("non-physical process matrix: {0}")]
    NonPhysicalChi(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Density operator on one or more qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    m: ComplexMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity (min eigenvalue ≥ −1e-9).
    pub fn new(m: ComplexMatrix<T>) -> Result<Self, TomographyError> {
        if !m.is_square() || !m.rows().is_power_of_two() {
            return Err(TomographyError::InvalidState(format!("shape {:?} is not 2^n x 2^n", m.shape())));
        }
        if !m.is_hermitian(1e-10) {
            return Err(TomographyError::InvalidState("not Hermitian".into()));
        }
        let tr = m.trace();
        if (tr.re - T::one()).abs() > T::tol(1e-10) || tr.im.abs() > T::tol(1e-10) {
            return Err(TomographyError::InvalidState(format!("trace {} != 1", tr.re)));
        }
        let lo = numerics::min_eigenvalue(&m)?;
        if lo < -T::tol(1e-9) {
            return Err(TomographyError::InvalidState(format!("negative eigenvalue {lo}")));
        }
        Ok(Self { m: m.hermitize() })
    }

    /// Wraps a matrix already known to be a state (internal pipelines).
    pub(crate) fn from_matrix_unchecked(m: ComplexMatrix<T>) -> Self {
        Self { m }
    }

    /// |ψ⟩⟨ψ| for a normalised vector.
    pub fn from_pure(amps: &[Complex<T>]) -> Result<Self, TomographyError> {
        let norm: T = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm - T::one()).abs() > T::tol(1e-10) {
            return Err(TomographyError::InvalidState(format!("vector norm^2 {norm} != 1")));
        }
        Ok(Self { m: ComplexMatrix::outer(amps, amps) })
    }

    /// ρ = (I + xX + yY + zZ)/2 without any physicality check.
    pub fn from_bloch(x: T, y: T, z: T) -> Self {
        let h = T::lit(0.5);
        let zero = T::zero();
        let m = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                Complex::new(h * (T::one() + z), zero),
                Complex::new(h * x, -h * y),
                Complex::new(h * x, h * y),
                Complex::new(h * (T::one() - z), zero),
            ],
        );
        Self { m }
    }

    pub fn maximally_mixed(qubits: usize) -> Self {
        let d = 1usize << qubits;
        Self { m: ComplexMatrix::identity(d).scale_real(T::one() / T::from_count(d)) }
    }

    pub fn zero() -> Self {
        Self::from_bloch(T::zero(), T::zero(), T::one())
    }

    pub fn one() -> Self {
        Self::from_bloch(T::zero(), T::zero(), -T::one())
    }

    pub fn plus() -> Self {
        Self::from_bloch(T::one(), T::zero(), T::zero())
    }

    pub fn plus_y() -> Self {
        Self::from_bloch(T::zero(), T::one(), T::zero())
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    /// Bloch vector (⟨X⟩, ⟨Y⟩, ⟨Z⟩) of a single-qubit state.
    pub fn bloch_vector(&self) -> [T; 3] {
        debug_assert_eq!(self.dim(), 2);
        let two = T::lit(2.0);
        let off = self.m[(1, 0)];
        [two * off.re, two * off.im, self.m[(0, 0)].re - self.m[(1, 1)].re]
    }

    pub fn bloch_radius(&self) -> T {
        let [x, y, z] = self.bloch_vector();
        (x * x + y * y + z * z).sqrt()
    }

    pub fn purity(&self) -> T {
        self.m.matmul(&self.m).trace().re
    }

    /// U ρ U†.
    pub fn evolve(&self, u: &ComplexMatrix<T>) -> Self {
        Self { m: self.m.conjugate_by(u) }
    }

    /// Trace distance ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &Self) -> T {
        let diff = (&self.m - &other.m).hermitize();
        let (vals, _) = numerics::hermitian_eig(&diff).expect("difference of states is Hermitian");
        vals.iter().map(|v| v.abs()).sum::<T>() * T::lit(0.5)
    }

    /// Partial trace keeping a single qubit (1-based, qubit 1 least significant).
    pub fn reduced_qubit(&self, qubit: usize) -> Self {
        let d = self.dim();
        let bit = 1usize << (qubit - 1);
        let mut out = ComplexMatrix::zeros(2, 2);
        for i in 0..d {
            for j in 0..d {
                if (i & !bit) != (j & !bit) {
                    continue;
                }
                let a = usize::from(i & bit != 0);
                let b = usize::from(j & bit != 0);
                out[(a, b)] = out[(a, b)] + self.m[(i, j)];
            }
        }
        Self { m: out }
    }
}

/// Operator basis {I, X, −iY, Z}.
pub fn chi_basis<T: Real>() -> [ComplexMatrix<T>; 4] {
    let minus_i = Complex::new(T::zero(), -T::one());
    [gates::identity2(), gates::pauli_x(), gates::pauli_y().scale(minus_i), gates::pauli_z()]
}

/// Process matrix of a single-qubit channel in the {I, X, −iY, Z} basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiMatrix<T> {
    m: ComplexMatrix<T>,
}

impl<T: Real> ChiMatrix<T> {
    /// Strict validation: 4×4, Hermitian within 1e-9, min eigenvalue ≥ −1e-6.
    pub fn new(m: ComplexMatrix<T>) -> Result<Self, TomographyError> {
        if m.shape() != (4, 4) {
            return Err(TomographyError::NonPhysicalChi(format!("shape {:?}", m.shape())));
        }
        if !m.is_hermitian(1e-9) {
            return Err(TomographyError::NonPhysicalChi("not Hermitian".into()));
        }
        let lo = numerics::min_eigenvalue(&m.hermitize())?;
        if lo < -T::lit(1e-6) {
            return Err(TomographyError::NonPhysicalChi(format!("eigenvalue {lo}")));
        }
        Ok(Self { m: m.hermitize() })
    }

    #[cfg(test)]
    pub(crate) fn from_matrix_unchecked(m: ComplexMatrix<T>) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(0, 0)] = Complex::new(T::one(), T::zero());
        Self { m }
    }

    /// χ of the depolarising channel ρ ↦ pI/2 + (1−p)ρ: diag(1−3p/4, p/4, p/4, p/4).
    pub fn depolarising(p: T) -> Self {
        let q = p * T::lit(0.25);
        Self { m: ComplexMatrix::from_real_diagonal(&[T::one() - T::lit(3.0) * q, q, q, q]) }
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.m
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex<T> {
        self.m[(m, n)]
    }

    pub fn trace(&self) -> T {
        self.m.trace().re
    }

    /// Weighted average of process matrices.
    pub fn weighted_mean<'a>(items: impl IntoIterator<Item = (T, &'a ChiMatrix<T>)>) -> Self {
        let mut acc = ComplexMatrix::zeros(4, 4);
        let mut total = T::zero();
        for (w, chi) in items {
            acc.add_scaled(&chi.m, w);
            total = total + w;
        }
        Self { m: acc.scale_real(T::one() / total) }
    }
}

/// Result of a reconstruction that may have needed a physicality repair.
#[derive(Debug, Clone)]
pub struct ChiEstimate<T> {
    pub chi: ChiMatrix<T>,
    /// Total negative eigenvalue weight removed by clipping (0 for exact data).
    pub clipped: T,
}

/// Outcome of turning measured expectations into a state.
#[derive(Debug, Clone)]
pub struct StateEstimate<T> {
    pub state: DensityMatrix<T>,
    /// Set when the raw Bloch vector was longer than 1 and had to be rescaled.
    pub rescaled: bool,
}

/// ρ = (I + xX + yY + zZ)/2, projecting |r| > 1 onto the unit sphere.
pub fn state_from_expectations<T: Real>(x: T, y: T, z: T) -> StateEstimate<T> {
    let r = (x * x + y * y + z * z).sqrt();
    if r > T::one() {
        StateEstimate { state: DensityMatrix::from_bloch(x / r, y / r, z / r), rescaled: true }
    } else {
        StateEstimate { state: DensityMatrix::from_bloch(x, y, z), rescaled: false }
    }
}

/// Relative frequencies (f₀, f₁) of the two outcomes in one measurement basis.
pub type BasisFrequencies<T> = [T; 2];

/// Linear-inversion state tomography from per-basis outcome weights.
///
/// Weights need not be normalised (counts or mitigated frequencies both work).
pub fn state_from_frequencies<T: Real>(
    fx: BasisFrequencies<T>,
    fy: BasisFrequencies<T>,
    fz: BasisFrequencies<T>,
) -> Result<StateEstimate<T>, TomographyError> {
    let expect = |f: BasisFrequencies<T>, name: &'static str| {
        let total = f[0] + f[1];
        if total <= T::zero() {
            Err(TomographyError::EmptyCounts(name))
        } else {
            Ok((f[0] - f[1]) / total)
        }
    };
    let x = expect(fx, "X")?;
    let y = expect(fy, "Y")?;
    let z = expect(fz, "Z")?;
    Ok(state_from_expectations(x, y, z))
}

/// State tomography from single-qubit counts in the X, Y and Z bases.
///
/// Outcome 0 is the +1 eigenstate of the measured Pauli.
pub fn state_tomography<T: Real>(
    counts_x: &Counts,
    counts_y: &Counts,
    counts_z: &Counts,
) -> Result<StateEstimate<T>, TomographyError> {
    let pair = |c: &Counts, name: &'static str| -> Result<BasisFrequencies<T>, TomographyError> {
        if c.width() != 1 {
            return Err(TomographyError::InvalidState(format!("{name} counts have width {}", c.width())));
        }
        if c.total() == 0 {
            return Err(TomographyError::EmptyCounts(name));
        }
        Ok([T::lit(c.get(0) as f64), T::lit(c.get(1) as f64)])
    };
    state_from_frequencies(pair(counts_x, "X")?, pair(counts_y, "Y")?, pair(counts_z, "Z")?)
}

/// Outcome-0 probabilities of a single-qubit state measured in X, Y and Z.
pub fn basis_probabilities<T: Real>(rho: &DensityMatrix<T>) -> [T; 3] {
    let h = T::lit(0.5);
    let [x, y, z] = rho.bloch_vector();
    [h * (T::one() + x), h * (T::one() + y), h * (T::one() + z)]
}

/// Probe inputs |0⟩, |1⟩, |+⟩, |+_y⟩, in that order.
pub fn probe_states<T: Real>() -> [DensityMatrix<T>; 4] {
    [DensityMatrix::zero(), DensityMatrix::one(), DensityMatrix::plus(), DensityMatrix::plus_y()]
}

/// Block-formula reconstruction of χ from the images of the four probes, without repair.
pub fn chi_raw_from_probe_outputs<T: Real>(outputs: [&ComplexMatrix<T>; 4]) -> ComplexMatrix<T> {
    let [r0, r1, rp, ry] = outputs;
    let i = Complex::new(T::zero(), T::one());
    let half = T::lit(0.5);
    let s = r0 + r1;
    let one_plus_i = Complex::new(half, half);
    let one_minus_i = Complex::new(half, -half);
    let rho1 = r0.clone();
    let rho4 = r1.clone();
    let rho2 = &(rp + &ry.scale(i)) - &s.scale(one_plus_i);
    let rho3 = &(rp - &ry.scale(i)) - &s.scale(one_minus_i);

    let mut mid = ComplexMatrix::zeros(4, 4);
    for (bi, bj, blk) in [(0, 0, &rho1), (0, 1, &rho2), (1, 0, &rho3), (1, 1, &rho4)] {
        for a in 0..2 {
            for b in 0..2 {
                mid[(2 * bi + a, 2 * bj + b)] = blk[(a, b)];
            }
        }
    }
    // Λ = ½ [[I, X], [X, −I]]
    let lam = ComplexMatrix::from_rows_f64(&[
        &[(0.5, 0.), (0., 0.), (0., 0.), (0.5, 0.)],
        &[(0., 0.), (0.5, 0.), (0.5, 0.), (0., 0.)],
        &[(0., 0.), (0.5, 0.), (-0.5, 0.), (0., 0.)],
        &[(0.5, 0.), (0., 0.), (0., 0.), (-0.5, 0.)],
    ]);
    lam.matmul(&mid).matmul(&lam)
}

/// χ from the channel outputs for the probes |0⟩, |1⟩, |+⟩, |+_y⟩.
///
/// The result is Hermitised, negative eigenvalues are clipped and the trace
/// renormalised to one; the clipped weight is reported.
pub fn chi_from_probe_outputs<T: Real>(
    rho0: &DensityMatrix<T>,
    rho1: &DensityMatrix<T>,
    rho_plus: &DensityMatrix<T>,
    rho_plus_y: &DensityMatrix<T>,
) -> Result<ChiEstimate<T>, TomographyError> {
    for rho in [rho0, rho1, rho_plus, rho_plus_y] {
        if rho.dim() != 2 {
            return Err(TomographyError::InvalidState("probe outputs must be single-qubit".into()));
        }
        let tr = rho.matrix().trace().re;
        if (tr - T::one()).abs() > T::lit(1e-6) || !rho.matrix().is_hermitian(1e-9) {
            return Err(TomographyError::InvalidState(format!("probe output trace {tr}")));
        }
    }
    let raw = chi_raw_from_probe_outputs([rho0.matrix(), rho1.matrix(), rho_plus.matrix(), rho_plus_y.matrix()]);
    repair_chi(raw)
}

fn repair_chi<T: Real>(raw: ComplexMatrix<T>) -> Result<ChiEstimate<T>, TomographyError> {
    let herm = raw.hermitize();
    let (vals, _) = numerics::hermitian_eig(&herm)?;
    if vals[0] >= T::zero() {
        return Ok(ChiEstimate { chi: ChiMatrix { m: herm }, clipped: T::zero() });
    }
    let (clipped, removed) = numerics::clip_to_psd(&herm)?;
    let tr = clipped.trace().re;
    if tr <= T::zero() {
        return Err(TomographyError::NonPhysicalChi("zero trace after clipping".into()));
    }
    Ok(ChiEstimate { chi: ChiMatrix { m: clipped.scale_real(T::one() / tr) }, clipped: removed })
}

/// χ of an arbitrary linear single-qubit map, obtained from its probe images.
pub fn chi_of_map<T: Real>(map: impl Fn(&DensityMatrix<T>) -> DensityMatrix<T>) -> ChiMatrix<T> {
    let outs = probe_states::<T>().map(|p| map(&p));
    let raw = chi_raw_from_probe_outputs([outs[0].matrix(), outs[1].matrix(), outs[2].matrix(), outs[3].matrix()]);
    ChiMatrix { m: raw.hermitize() }
}

/// Coefficients c_k of U = Σ c_k E_k.
pub fn basis_coefficients<T: Real>(u: &ComplexMatrix<T>) -> [Complex<T>; 4] {
    let half = T::lit(0.5);
    chi_basis::<T>().map(|e| e.adjoint().matmul(u).trace() * half)
}

/// χ of the unitary channel ρ ↦ UρU†; rank one with unit trace.
pub fn chi_of_unitary<T: Real>(u: &ComplexMatrix<T>) -> Result<ChiMatrix<T>, TomographyError> {
    if u.shape() != (2, 2) {
        return Err(TomographyError::NotUnitary(f64::INFINITY));
    }
    let defect = u.unitarity_defect();
    if defect > T::tol(1e-10) {
        return Err(TomographyError::NotUnitary(defect.as_f64()));
    }
    let c = basis_coefficients(u);
    Ok(ChiMatrix { m: ComplexMatrix::outer(&c, &c) })
}

/// ε(ρ) = Σ Eₘ ρ Eₙ† χₘₙ, Hermitised and renormalised to unit trace.
pub fn apply_chi<T: Real>(chi: &ChiMatrix<T>, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>, TomographyError> {
    let tr = chi.trace();
    if (tr - T::one()).abs() > T::lit(0.05) {
        return Err(TomographyError::NonPhysicalChi(format!("trace {tr} deviates from 1")));
    }
    let out = apply_chi_raw(chi.matrix(), rho.matrix()).hermitize();
    let t = out.trace().re;
    Ok(DensityMatrix { m: out.scale_real(T::one() / t) })
}

pub(crate) fn apply_chi_raw<T: Real>(chi: &ComplexMatrix<T>, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let basis = chi_basis::<T>();
    let left: Vec<ComplexMatrix<T>> = basis.iter().map(|e| e.matmul(rho)).collect();
    let mut out = ComplexMatrix::zeros(2, 2);
    for (m, lm) in left.iter().enumerate() {
        for (n, en) in basis.iter().enumerate() {
            let w = chi[(m, n)];
            if w.norm() == T::zero() {
                continue;
            }
            let term = lm.matmul(&en.adjoint()).scale(w);
            out = &out + &term;
        }
    }
    out
}

/// Channel fidelity Tr√(√χₑ χ_c √χₑ), clamped to [0, 1].
pub fn channel_fidelity<T: Real>(chi_e: &ChiMatrix<T>, chi_c: &ChiMatrix<T>) -> Result<T, TomographyError> {
    for chi in [chi_e, chi_c] {
        if (chi.trace() - T::one()).abs() > T::lit(0.05) {
            return Err(TomographyError::NonPhysicalChi(format!("trace {}", chi.trace())));
        }
    }
    let root = numerics::psd_sqrt(chi_e.matrix()).map_err(|e| TomographyError::NonPhysicalChi(e.to_string()))?;
    let inner = root.matmul(chi_c.matrix()).matmul(&root).hermitize();
    let (vals, _) = numerics::hermitian_eig(&inner)?;
    if vals[0] < -T::lit(1e-6) {
        return Err(TomographyError::NonPhysicalChi(format!("eigenvalue {}", vals[0])));
    }
    let f: T = vals.iter().map(|v| v.max(T::zero()).sqrt()).sum();
    Ok(f.max(T::zero()).min(T::one()))
}
