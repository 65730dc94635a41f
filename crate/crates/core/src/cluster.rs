//! Linear cluster states and single-qubit measurement chains.
//!
//! Qubit 1 is the least significant bit of an amplitude index. A chain of
//! `n` qubits has `n − 1` measured qubits; the outcome of measuring qubit
//! `k` is bit `k − 1` of [`Outcome::index`], so the printed bitstring reads
//! qubit `n − 1` on the left and qubit 1 on the right.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use thiserror::Error;

use crate::numerics::{gates, ComplexMatrix};
use crate::tomography::DensityMatrix;
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClusterError {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("a linear cluster needs at least 2 qubits, got {0}")]
    TooFewQubits(usize),
    #[error("expected {expected} measurement angles, got {got}")]
    AngleCountMismatch { expected: usize, got: usize },
    #[error("outcome has {outcome} bits but {angles} angles were given")]
    LengthMismatch { outcome: usize, angles: usize },
    #[error("invalid probability distribution: {0}")]
    BadDistribution(String),
    #[error("invalid outcome string {0:?}")]
    BadOutcome(String),
}

/// Outcomes of the measured qubits of one chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Outcome {
    index: usize,
    width: usize,
}

impl Outcome {
    pub fn from_index(index: usize, width: usize) -> Self {
        assert!(width < usize::BITS as usize && index < (1usize << width), "outcome index out of range");
        Self { index, width }
    }

    /// Outcome from per-qubit bits `m₁, m₂, …` in measurement order.
    pub fn from_bits(bits: &[u8]) -> Self {
        let index = bits.iter().enumerate().fold(0, |acc, (k, &b)| acc | (usize::from(b & 1) << k));
        Self { index, width: bits.len() }
    }

    pub fn all(width: usize) -> impl Iterator<Item = Outcome> {
        (0..1usize << width).map(move |i| Outcome::from_index(i, width))
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Outcome of the measurement on qubit `k` (1-based).
    pub fn bit(&self, k: usize) -> u8 {
        ((self.index >> (k - 1)) & 1) as u8
    }

    /// Bits in measurement order `m₁, m₂, …`.
    pub fn bits(&self) -> Vec<u8> {
        (1..=self.width).map(|k| self.bit(k)).collect()
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in (1..=self.width).rev() {
            write!(f, "{}", self.bit(k))?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Outcome {
    type Err = ClusterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = Vec::with_capacity(s.len());
        for ch in s.chars().rev() {
            match ch {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => return Err(ClusterError::BadOutcome(s.to_string())),
            }
        }
        Ok(Outcome::from_bits(&bits))
    }
}

/// Normalised n-qubit state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    pub fn new(amps: Vec<Complex<T>>) -> Result<Self, ClusterError> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(ClusterError::InvalidState(format!("length {} is not a power of two", amps.len())));
        }
        let norm: T = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - T::one()).abs() > T::tol(1e-10) {
            return Err(ClusterError::InvalidState(format!("norm^2 {norm} != 1")));
        }
        Ok(Self { qubits: amps.len().trailing_zeros() as usize, amps })
    }

    pub fn zero() -> Self {
        Self::single(T::one(), T::zero(), T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Self::single(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn plus() -> Self {
        let h = T::FRAC_1_SQRT_2();
        Self::single(h, T::zero(), h, T::zero())
    }

    pub fn plus_y() -> Self {
        let h = T::FRAC_1_SQRT_2();
        Self::single(h, T::zero(), T::zero(), h)
    }

    fn single(a_re: T, a_im: T, b_re: T, b_im: T) -> Self {
        Self { qubits: 1, amps: vec![Complex::new(a_re, a_im), Complex::new(b_re, b_im)] }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn density(&self) -> DensityMatrix<T> {
        DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(&self.amps, &self.amps))
    }

    /// Reduced state of qubit `k` (1-based).
    pub fn reduced_qubit(&self, k: usize) -> DensityMatrix<T> {
        let bit = 1usize << (k - 1);
        let mut m = ComplexMatrix::zeros(2, 2);
        for (i, ai) in self.amps.iter().enumerate() {
            if i & bit != 0 {
                continue;
            }
            let a0 = *ai;
            let a1 = self.amps[i | bit];
            m[(0, 0)] = m[(0, 0)] + a0 * a0.conj();
            m[(0, 1)] = m[(0, 1)] + a0 * a1.conj();
            m[(1, 0)] = m[(1, 0)] + a1 * a0.conj();
            m[(1, 1)] = m[(1, 1)] + a1 * a1.conj();
        }
        DensityMatrix::from_matrix_unchecked(m)
    }

    /// Applies a 2×2 gate to qubit `k` (1-based) in place.
    pub fn apply_single(&mut self, k: usize, g: &ComplexMatrix<T>) {
        let bit = 1usize << (k - 1);
        for i in 0..self.amps.len() {
            if i & bit != 0 {
                continue;
            }
            let a0 = self.amps[i];
            let a1 = self.amps[i | bit];
            self.amps[i] = g[(0, 0)] * a0 + g[(0, 1)] * a1;
            self.amps[i | bit] = g[(1, 0)] * a0 + g[(1, 1)] * a1;
        }
    }
}

/// Sign (−1)^{Σ b_k b_{k+1}} picked up by basis state `i` under the chain of CZ gates.
fn cz_chain_sign(i: usize) -> bool {
    (i & (i >> 1)).count_ones() % 2 == 1
}

fn check_size(n: usize) -> Result<(), ClusterError> {
    if n < 2 {
        Err(ClusterError::TooFewQubits(n))
    } else {
        Ok(())
    }
}

/// Linear cluster with `input` on qubit 1 and |+⟩ on qubits 2..n.
pub fn build_linear_cluster<T: Real>(n: usize, input: &PureState<T>) -> Result<PureState<T>, ClusterError> {
    check_size(n)?;
    if input.qubits() != 1 {
        return Err(ClusterError::InvalidState("input must be a single qubit".into()));
    }
    let norm = T::lit(0.5).powi(n as i32 - 1).sqrt();
    let amps = (0..1usize << n)
        .map(|i| {
            let a = input.amps[i & 1] * norm;
            if cz_chain_sign(i) {
                -a
            } else {
                a
            }
        })
        .collect();
    Ok(PureState { qubits: n, amps })
}

/// Density-matrix version of [`build_linear_cluster`] for mixed inputs.
pub fn build_linear_cluster_mixed<T: Real>(n: usize, input: &DensityMatrix<T>) -> Result<ComplexMatrix<T>, ClusterError> {
    check_size(n)?;
    if input.dim() != 2 {
        return Err(ClusterError::InvalidState("input must be a single qubit".into()));
    }
    let rho = input.matrix();
    let w = T::lit(0.5).powi(n as i32 - 1);
    let d = 1usize << n;
    Ok(ComplexMatrix::from_fn(d, d, |i, j| {
        let v = rho[(i & 1, j & 1)] * w;
        if cz_chain_sign(i) != cz_chain_sign(j) {
            -v
        } else {
            v
        }
    }))
}

/// One measurement branch: outcome, its probability and the normalised state left on qubit n.
#[derive(Debug, Clone)]
pub struct Branch<T> {
    pub outcome: Outcome,
    pub probability: T,
    pub output_state: DensityMatrix<T>,
}

fn reduce_angles<T: Real>(angles: &[T]) -> Vec<T> {
    angles
        .iter()
        .map(|&phi| {
            let x = phi.as_f64();
            if (0.0..=PI).contains(&x) {
                phi
            } else {
                let r = x.rem_euclid(TAU);
                log::warn!("measurement angle {x} outside [0, pi], reduced to {r}");
                T::lit(r)
            }
        })
        .collect()
}

/// Basis change H·R_z(φ): afterwards a computational-basis measurement is a φ-direction measurement.
pub fn measurement_rotation<T: Real>(phi: T) -> ComplexMatrix<T> {
    gates::hadamard::<T>().matmul(&gates::rz(phi))
}

/// Exact enumeration of all 2^{n−1} branches of a pure chain.
pub fn measure_chain<T: Real>(state: &PureState<T>, angles: &[T]) -> Result<Vec<Branch<T>>, ClusterError> {
    let n = state.qubits();
    check_size(n)?;
    if angles.len() != n - 1 {
        return Err(ClusterError::AngleCountMismatch { expected: n - 1, got: angles.len() });
    }
    let mut rotated = state.clone();
    for (k, phi) in reduce_angles(angles).into_iter().enumerate() {
        rotated.apply_single(k + 1, &measurement_rotation(phi));
    }
    let w = n - 1;
    let top = 1usize << w;
    Ok(Outcome::all(w)
        .map(|o| {
            let a0 = rotated.amps[o.index()];
            let a1 = rotated.amps[top | o.index()];
            let p = a0.norm_sqr() + a1.norm_sqr();
            let output_state = if p > T::lit(1e-300) {
                let s = T::one() / p.sqrt();
                DensityMatrix::from_matrix_unchecked(ComplexMatrix::outer(&[a0 * s, a1 * s], &[a0 * s, a1 * s]))
            } else {
                DensityMatrix::maximally_mixed(1)
            };
            Branch { outcome: o, probability: p, output_state }
        })
        .collect())
}

fn conjugate_single_qubit<T: Real>(rho: &mut ComplexMatrix<T>, k: usize, g: &ComplexMatrix<T>) {
    let d = rho.rows();
    let bit = 1usize << (k - 1);
    // rows: ρ ← Gρ
    for j in 0..d {
        for i in 0..d {
            if i & bit != 0 {
                continue;
            }
            let a0 = rho[(i, j)];
            let a1 = rho[(i | bit, j)];
            rho[(i, j)] = g[(0, 0)] * a0 + g[(0, 1)] * a1;
            rho[(i | bit, j)] = g[(1, 0)] * a0 + g[(1, 1)] * a1;
        }
    }
    // columns: ρ ← ρG†
    for i in 0..d {
        for j in 0..d {
            if j & bit != 0 {
                continue;
            }
            let a0 = rho[(i, j)];
            let a1 = rho[(i, j | bit)];
            rho[(i, j)] = a0 * g[(0, 0)].conj() + a1 * g[(0, 1)].conj();
            rho[(i, j | bit)] = a0 * g[(1, 0)].conj() + a1 * g[(1, 1)].conj();
        }
    }
}

/// Branch enumeration for a chain given as a 2^n×2^n density matrix.
pub fn measure_chain_mixed<T: Real>(state: &ComplexMatrix<T>, angles: &[T]) -> Result<Vec<Branch<T>>, ClusterError> {
    let d = state.rows();
    if !state.is_square() || !d.is_power_of_two() {
        return Err(ClusterError::InvalidState(format!("shape {:?}", state.shape())));
    }
    let n = d.trailing_zeros() as usize;
    check_size(n)?;
    if angles.len() != n - 1 {
        return Err(ClusterError::AngleCountMismatch { expected: n - 1, got: angles.len() });
    }
    let mut rho = state.clone();
    for (k, phi) in reduce_angles(angles).into_iter().enumerate() {
        conjugate_single_qubit(&mut rho, k + 1, &measurement_rotation(phi));
    }
    let w = n - 1;
    let top = 1usize << w;
    Ok(Outcome::all(w)
        .map(|o| {
            let idx = [o.index(), top | o.index()];
            let block = ComplexMatrix::from_fn(2, 2, |a, b| rho[(idx[a], idx[b])]);
            let p = block.trace().re;
            let output_state = if p > T::lit(1e-300) {
                DensityMatrix::from_matrix_unchecked(block.scale_real(T::one() / p).hermitize())
            } else {
                DensityMatrix::maximally_mixed(1)
            };
            Branch { outcome: o, probability: p, output_state }
        })
        .collect())
}

/// U_m(φ) = H·Z^m·R_z(φ).
pub fn link_unitary<T: Real>(m: u8, phi: T) -> ComplexMatrix<T> {
    let rz = gates::rz(phi);
    let zr = if m & 1 == 1 { gates::pauli_z::<T>().matmul(&rz) } else { rz };
    gates::hadamard::<T>().matmul(&zr)
}

/// U_𝒎(𝝓) = U_{m_{n−1}}(φ_{n−1}) ··· U_{m₁}(φ₁).
pub fn logical_unitary<T: Real>(outcome: &Outcome, angles: &[T]) -> Result<ComplexMatrix<T>, ClusterError> {
    if outcome.width() != angles.len() {
        return Err(ClusterError::LengthMismatch { outcome: outcome.width(), angles: angles.len() });
    }
    Ok(angles
        .iter()
        .enumerate()
        .fold(ComplexMatrix::identity(2), |u, (k, &phi)| link_unitary(outcome.bit(k + 1), phi).matmul(&u)))
}

/// |Tr(A†B)|/2 for 2×2 unitaries: 1 iff equal up to a global phase.
pub fn phase_insensitive_overlap<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> T {
    a.adjoint().matmul(b).trace().norm() / T::from_count(a.rows())
}

/// Shot counts indexed by outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    width: usize,
    values: Vec<u64>,
}

impl Counts {
    pub fn new(width: usize) -> Self {
        Self { width, values: vec![0; 1usize << width] }
    }

    pub fn from_values(width: usize, values: Vec<u64>) -> Self {
        assert_eq!(values.len(), 1usize << width, "counts length must be 2^width");
        Self { width, values }
    }

    /// Parses a bitstring-keyed map; missing outcomes count zero.
    pub fn from_map(width: usize, map: &BTreeMap<String, u64>) -> Result<Self, ClusterError> {
        let mut c = Self::new(width);
        for (k, &v) in map {
            let o: Outcome = k.parse()?;
            if k.len() != width {
                return Err(ClusterError::BadOutcome(k.clone()));
            }
            c.values[o.index()] += v;
        }
        Ok(c)
    }

    pub fn to_map(&self) -> BTreeMap<String, u64> {
        Outcome::all(self.width).map(|o| (o.to_string(), self.values[o.index()])).collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, index: usize) -> u64 {
        self.values[index]
    }

    pub fn add(&mut self, index: usize, n: u64) {
        self.values[index] += n;
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn total(&self) -> u64 {
        self.values.iter().sum()
    }

    /// Relative frequencies; all zeros when empty.
    pub fn frequencies<T: Real>(&self) -> Vec<T> {
        let total = self.total();
        if total == 0 {
            return vec![T::zero(); self.values.len()];
        }
        let t = T::lit(total as f64);
        self.values.iter().map(|&v| T::lit(v as f64) / t).collect()
    }

    /// Counts of a single bit (1-based qubit) of the outcome.
    pub fn marginal(&self, k: usize) -> Counts {
        let mut out = Counts::new(1);
        for (i, &v) in self.values.iter().enumerate() {
            out.values[(i >> (k - 1)) & 1] += v;
        }
        out
    }
}

/// Multinomial sample of `shots` draws from `probs`, indexed by outcome.
///
/// Tiny negative entries (≥ −1e-12) are treated as zero.
pub fn sample_counts<T: Real>(probs: &[T], width: usize, shots: u64, seed: u64) -> Result<Counts, ClusterError> {
    if probs.len() != 1usize << width {
        return Err(ClusterError::BadDistribution(format!("{} probabilities for width {width}", probs.len())));
    }
    let p: Vec<f64> = probs.iter().map(|x| x.as_f64()).collect();
    if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < -1e-12) {
        return Err(ClusterError::BadDistribution(format!("entry {bad}")));
    }
    let total: f64 = p.iter().map(|x| x.max(0.0)).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(ClusterError::BadDistribution(format!("sum {total} != 1")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Counts::new(width);
    let mut remaining = shots;
    let mut mass = total;
    for (i, &pi) in p.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let pi = pi.max(0.0);
        let q = if mass > 0.0 { (pi / mass).min(1.0) } else { 0.0 };
        let k = if i + 1 == p.len() || q >= 1.0 {
            remaining
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(remaining, q).expect("valid binomial").sample(&mut rng)
        };
        counts.values[i] = k;
        remaining -= k;
        mass -= pi;
    }
    Ok(counts)
}

/// Samples outcome counts from an enumerated set of branches.
pub fn sample_branches<T: Real>(branches: &[Branch<T>], shots: u64, seed: u64) -> Result<Counts, ClusterError> {
    let width = branches.first().map(|b| b.outcome.width()).unwrap_or(0);
    let mut probs = vec![T::zero(); 1usize << width];
    for b in branches {
        probs[b.outcome.index()] = probs[b.outcome.index()] + b.probability;
    }
    sample_counts(&probs, width, shots, seed)
}
