//! Depolarising noise on ensembles, classical readout noise, calibration
//! matrices and readout-error mitigation.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::{link_unitary, sample_counts, ClusterError, Counts, Outcome};
use crate::design::{truncated_test, Channel, DesignError, Member, Order, SphericalGrid, UnitaryEnsemble};
use crate::numerics::{self, ComplexMatrix, NumericsError};
use crate::tomography::{chi_of_map, DensityMatrix};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("invalid distribution: {0}")]
    BadDistribution(String),
    #[error("invalid calibration matrix: {0}")]
    BadCalibration(String),
    #[error("no counts for prepared basis state {0}")]
    MissingColumn(usize),
    #[error("calibration matrix is singular or ill-conditioned (condition number {condition:e})")]
    SingularCalibration { condition: f64 },
    #[error("epsilon {target} is not reached on the p grid (max {max})")]
    Unreachable { target: f64, max: f64 },
    #[error("empty grid")]
    EmptyGrid,
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

fn check_probability(p: f64) -> Result<(), NoiseError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(NoiseError::BadProbability(p))
    }
}

/// p·Tr(ρ)·I/2 + (1−p)ρ on any 2×2 operator.
pub fn depolarise_operator<T: Real>(rho: &ComplexMatrix<T>, p: T) -> ComplexMatrix<T> {
    let mut out = rho.scale_real(T::one() - p);
    let tr = rho.trace();
    let half = T::lit(0.5);
    for i in 0..rho.rows() {
        out[(i, i)] = out[(i, i)] + tr * (p * half);
    }
    out
}

/// ρ ↦ pI/2 + (1−p)ρ.
pub fn depolarise<T: Real>(rho: &DensityMatrix<T>, p: T) -> Result<DensityMatrix<T>, NoiseError> {
    check_probability(p.as_f64())?;
    if rho.dim() != 2 {
        return Err(NoiseError::BadDistribution("depolarise acts on a single qubit".into()));
    }
    Ok(DensityMatrix::from_matrix_unchecked(depolarise_operator(rho.matrix(), p)))
}

/// Where depolarising noise enters a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DepolarisingKind {
    /// One depolarisation after the ideal logical unitary.
    Terminal,
    /// One depolarisation per cluster qubit: on the input and after every link.
    Stepwise,
}

impl fmt::Display for DepolarisingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DepolarisingKind::Terminal => "terminal",
            DepolarisingKind::Stepwise => "stepwise",
        })
    }
}

impl std::str::FromStr for DepolarisingKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "terminal" => Ok(DepolarisingKind::Terminal),
            "stepwise" => Ok(DepolarisingKind::Stepwise),
            other => Err(format!("unknown noise model {other:?} (expected terminal or stepwise)")),
        }
    }
}

/// Each member followed by one depolarisation, in process-matrix form.
pub fn noisy_ensemble_terminal<T: Real>(ensemble: &UnitaryEnsemble<T>, p: T) -> Result<UnitaryEnsemble<T>, NoiseError> {
    check_probability(p.as_f64())?;
    let members = ensemble
        .members()
        .iter()
        .map(|m| {
            let chi = chi_of_map(|rho: &DensityMatrix<T>| {
                DensityMatrix::from_matrix_unchecked(depolarise_operator(&m.channel.apply(rho.matrix()), p))
            });
            Member { outcome: m.outcome, probability: m.probability, channel: Channel::Chi(chi) }
        })
        .collect();
    Ok(UnitaryEnsemble::new(members)?)
}

/// Chain ensemble with D_p on the input and after each of the k links (k + 1 applications).
pub fn noisy_ensemble_stepwise<T: Real>(angles: &[T], p: T) -> Result<UnitaryEnsemble<T>, NoiseError> {
    check_probability(p.as_f64())?;
    let k = angles.len();
    let prob = T::one() / T::from_count(1usize << k);
    let members = Outcome::all(k)
        .map(|o| {
            let links: Vec<ComplexMatrix<T>> = (0..k).map(|i| link_unitary(o.bit(i + 1), angles[i])).collect();
            let chi = chi_of_map(|rho: &DensityMatrix<T>| {
                let mut m = depolarise_operator(rho.matrix(), p);
                for u in &links {
                    m = depolarise_operator(&m.conjugate_by(u), p);
                }
                DensityMatrix::from_matrix_unchecked(m)
            });
            Member { outcome: o, probability: prob, channel: Channel::Chi(chi) }
        })
        .collect();
    Ok(UnitaryEnsemble::new(members)?)
}

/// Noisy chain ensemble for either model.
pub fn noisy_ensemble<T: Real>(kind: DepolarisingKind, angles: &[T], p: T) -> Result<UnitaryEnsemble<T>, NoiseError> {
    match kind {
        DepolarisingKind::Terminal => noisy_ensemble_terminal(&UnitaryEnsemble::from_angles(angles), p),
        DepolarisingKind::Stepwise => noisy_ensemble_stepwise(angles, p),
    }
}

/// One cell of an ε-versus-p sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub model: DepolarisingKind,
    pub t: usize,
    pub radius: f64,
    pub p: f64,
    #[serde(with = "crate::io::extended_f64")]
    pub epsilon: f64,
}

/// 200 evenly spaced values on [0, 1].
pub fn default_p_grid() -> Vec<f64> {
    (0..200).map(|k| k as f64 / 199.0).collect()
}

/// Truncation radii covering the tabulated cases.
pub const DEFAULT_SWEEP_RADII: [f64; 6] = [0.66, 0.68, 0.69, 0.75, 0.81, 1.0];

/// ε of the truncated test for one (radius, p) cell.
pub fn epsilon_at<T: Real>(
    kind: DepolarisingKind,
    angles: &[T],
    t: Order,
    radius: f64,
    p: f64,
    grid: &SphericalGrid,
) -> Result<f64, NoiseError> {
    let ensemble = noisy_ensemble(kind, angles, T::lit(p))?;
    Ok(truncated_test(&ensemble, t, grid, radius)?.epsilon)
}

/// ε for every (radius, p) pair, rows ordered by radius then p.
pub fn epsilon_vs_p_sweep<T: Real>(
    kind: DepolarisingKind,
    angles: &[T],
    t: Order,
    radii: &[f64],
    p_grid: &[f64],
    grid: &SphericalGrid,
) -> Result<Vec<SweepRow>, NoiseError> {
    if radii.is_empty() || p_grid.is_empty() {
        return Err(NoiseError::EmptyGrid);
    }
    for &p in p_grid {
        check_probability(p)?;
    }
    let samples: Vec<_> = radii.iter().map(|&r| grid.sample::<T>(r)).collect();
    let per_p: Vec<Vec<f64>> = p_grid
        .par_iter()
        .map(|&p| {
            let ensemble = noisy_ensemble(kind, angles, T::lit(p))?;
            radii
                .iter()
                .zip(&samples)
                .map(|(&r, s)| Ok(crate::design::design_test(&ensemble, t, s, r)?.epsilon))
                .collect::<Result<Vec<f64>, NoiseError>>()
        })
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::with_capacity(radii.len() * p_grid.len());
    for (ri, &radius) in radii.iter().enumerate() {
        for (pi, &p) in p_grid.iter().enumerate() {
            rows.push(SweepRow { model: kind, t: t.get(), radius, p, epsilon: per_p[pi][ri] });
        }
    }
    Ok(rows)
}

/// Smallest p on `p_grid` whose ε reaches `epsilon_target`, linearly interpolated
/// between the bracketing grid points.
pub fn infer_p_from_test<T: Real>(
    kind: DepolarisingKind,
    angles: &[T],
    t: Order,
    radius: f64,
    epsilon_target: f64,
    p_grid: &[f64],
    grid: &SphericalGrid,
) -> Result<f64, NoiseError> {
    if p_grid.is_empty() {
        return Err(NoiseError::EmptyGrid);
    }
    if !(epsilon_target >= 0.0) {
        return Err(NoiseError::BadDistribution(format!("epsilon target {epsilon_target}")));
    }
    let mut prev: Option<(f64, f64)> = None;
    let mut max = f64::NEG_INFINITY;
    for &p in p_grid {
        let eps = epsilon_at(kind, angles, t, radius, p, grid)?;
        if eps >= epsilon_target {
            return Ok(match prev {
                Some((p0, e0)) if eps.is_finite() && eps > e0 => p0 + (p - p0) * (epsilon_target - e0) / (eps - e0),
                _ => p,
            });
        }
        max = max.max(eps);
        prev = Some((p, eps));
    }
    Err(NoiseError::Unreachable { target: epsilon_target, max })
}

/// Independent per-qubit readout flips.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionModel {
    /// (p01, p10) per qubit, qubit 1 first: P(read 1 | 0) and P(read 0 | 1).
    pub per_qubit: Vec<(f64, f64)>,
}

impl ConfusionModel {
    pub fn new(per_qubit: Vec<(f64, f64)>) -> Result<Self, NoiseError> {
        for &(a, b) in &per_qubit {
            check_probability(a)?;
            check_probability(b)?;
        }
        Ok(Self { per_qubit })
    }

    pub fn uniform(n: usize, p01: f64, p10: f64) -> Result<Self, NoiseError> {
        Self::new(vec![(p01, p10); n])
    }

    pub fn noiseless(n: usize) -> Self {
        Self { per_qubit: vec![(0.0, 0.0); n] }
    }

    pub fn qubits(&self) -> usize {
        self.per_qubit.len()
    }
}

/// Column-stochastic 2^n × 2^n readout matrix; entry (i, j) is P(read i | prepared j).
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationMatrix<T> {
    n: usize,
    lambda: Vec<T>,
}

impl<T: Real> CalibrationMatrix<T> {
    /// Validates entries in [0, 1] and unit column sums (1e-9).
    pub fn new(n: usize, lambda: Vec<T>) -> Result<Self, NoiseError> {
        let d = 1usize << n;
        if lambda.len() != d * d {
            return Err(NoiseError::BadCalibration(format!("{} entries for n = {n}", lambda.len())));
        }
        if let Some(x) = lambda.iter().find(|x| !(**x >= -T::tol(1e-12) && **x <= T::one() + T::tol(1e-12))) {
            return Err(NoiseError::BadCalibration(format!("entry {x} outside [0, 1]")));
        }
        for j in 0..d {
            let s: T = (0..d).map(|i| lambda[i * d + j]).sum();
            if (s - T::one()).abs() > T::tol(1e-9) {
                return Err(NoiseError::BadCalibration(format!("column {j} sums to {s}")));
            }
        }
        Ok(Self { n, lambda })
    }

    pub fn identity(n: usize) -> Self {
        let d = 1usize << n;
        let mut lambda = vec![T::zero(); d * d];
        for i in 0..d {
            lambda[i * d + i] = T::one();
        }
        Self { n, lambda }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[T] {
        &self.lambda
    }

    pub fn get(&self, read: usize, prepared: usize) -> T {
        self.lambda[read * self.dim() + prepared]
    }

    /// Λ·p.
    pub fn apply(&self, p: &[T]) -> Vec<T> {
        numerics::real_matvec(&self.lambda, self.dim(), p)
    }

    /// Λ⁻¹ and the 1-norm condition number.
    pub fn inverse(&self) -> Result<(Vec<T>, f64), NoiseError> {
        let d = self.dim();
        let inv = numerics::invert_real(&self.lambda, d).map_err(|e| match e {
            NumericsError::Singular => NoiseError::SingularCalibration { condition: f64::INFINITY },
            other => NoiseError::BadCalibration(other.to_string()),
        })?;
        let cond = (numerics::norm_1(&self.lambda, d) * numerics::norm_1(&inv, d)).as_f64();
        Ok((inv, cond))
    }

    pub fn condition_number(&self) -> Result<f64, NoiseError> {
        Ok(self.inverse()?.1)
    }
}

/// Λ = ⊗_q [[1−p01, p10], [p01, 1−p10]] with qubit 1 on the least significant bit.
pub fn calibration_matrix<T: Real>(model: &ConfusionModel) -> CalibrationMatrix<T> {
    let n = model.qubits();
    let d = 1usize << n;
    let mut lambda = vec![T::zero(); d * d];
    for i in 0..d {
        for j in 0..d {
            let mut v = 1.0;
            for (q, &(p01, p10)) in model.per_qubit.iter().enumerate() {
                let (r, s) = ((i >> q) & 1, (j >> q) & 1);
                v *= match (r, s) {
                    (0, 0) => 1.0 - p01,
                    (1, 0) => p01,
                    (0, 1) => p10,
                    _ => 1.0 - p10,
                };
            }
            lambda[i * d + j] = T::lit(v);
        }
    }
    CalibrationMatrix { n, lambda }
}

/// Empirical Λ from counts taken with each basis state prepared in turn (index order).
pub fn calibration_from_counts<T: Real>(prepared: &[Counts]) -> Result<CalibrationMatrix<T>, NoiseError> {
    let d = prepared.len();
    if d == 0 || !d.is_power_of_two() {
        return Err(NoiseError::BadCalibration(format!("{d} prepared states is not a power of two")));
    }
    let n = d.trailing_zeros() as usize;
    let mut lambda = vec![T::zero(); d * d];
    for (j, c) in prepared.iter().enumerate() {
        if c.width() != n {
            return Err(NoiseError::BadCalibration(format!("counts for state {j} have width {}", c.width())));
        }
        if c.total() == 0 {
            return Err(NoiseError::MissingColumn(j));
        }
        for (i, f) in c.frequencies::<T>().into_iter().enumerate() {
            lambda[i * d + j] = f;
        }
    }
    CalibrationMatrix::new(n, lambda)
}

/// Samples counts from Λ·p.
pub fn apply_readout_noise<T: Real>(distribution: &[T], model: &ConfusionModel, seed: u64, shots: u64) -> Result<Counts, NoiseError> {
    let lam = calibration_matrix::<T>(model);
    if distribution.len() != lam.dim() {
        return Err(NoiseError::BadDistribution(format!("{} entries for {} qubits", distribution.len(), model.qubits())));
    }
    let noisy = lam.apply(distribution);
    Ok(sample_counts(&noisy, model.qubits(), shots, seed)?)
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex<T: Real>(v: &[T]) -> Vec<T> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cum = T::zero();
    let mut theta = T::zero();
    for (k, &x) in u.iter().enumerate() {
        cum = cum + x;
        let cand = (cum - T::one()) / T::from_count(k + 1);
        if x - cand > T::zero() {
            theta = cand;
        }
    }
    v.iter().map(|&x| (x - theta).max(T::zero())).collect()
}

/// How mitigated frequencies are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MitigationMode {
    /// Λ⁻¹p, then the closest point of the simplex.
    #[default]
    InvertProject,
    /// argmin ‖Λx − p‖ over the simplex.
    LeastSquares,
}

/// Largest accepted 1-norm condition number of Λ.
pub const MAX_CONDITION: f64 = 1e8;

/// Mitigated probability vector for measured frequencies `p_exp`.
pub fn mitigate<T: Real>(lambda: &CalibrationMatrix<T>, p_exp: &[T]) -> Result<Vec<T>, NoiseError> {
    mitigate_with(lambda, p_exp, MitigationMode::InvertProject)
}

pub fn mitigate_with<T: Real>(lambda: &CalibrationMatrix<T>, p_exp: &[T], mode: MitigationMode) -> Result<Vec<T>, NoiseError> {
    let d = lambda.dim();
    if p_exp.len() != d {
        return Err(NoiseError::BadDistribution(format!("{} frequencies for dimension {d}", p_exp.len())));
    }
    let total: T = p_exp.iter().copied().sum();
    if (total - T::one()).abs() > T::lit(1e-6) {
        return Err(NoiseError::BadDistribution(format!("frequencies sum to {total}")));
    }
    let (inv, cond) = lambda.inverse()?;
    if !(cond <= MAX_CONDITION) {
        return Err(NoiseError::SingularCalibration { condition: cond });
    }
    let start = project_to_simplex(&numerics::real_matvec(&inv, d, p_exp));
    Ok(match mode {
        MitigationMode::InvertProject => start,
        MitigationMode::LeastSquares => least_squares_simplex(lambda, p_exp, start),
    })
}

/// Accelerated projected gradient on ½‖Λx − p‖² over the simplex.
fn least_squares_simplex<T: Real>(lambda: &CalibrationMatrix<T>, p: &[T], start: Vec<T>) -> Vec<T> {
    let d = lambda.dim();
    let a = lambda.entries();
    let norm_inf = (0..d).map(|i| (0..d).map(|j| a[i * d + j].abs()).sum::<T>()).fold(T::zero(), T::max);
    let lip = numerics::norm_1(a, d) * norm_inf;
    let step = T::one() / lip.max(T::min_positive_value());
    let grad = |x: &[T]| -> Vec<T> {
        let r: Vec<T> = lambda.apply(x).iter().zip(p).map(|(u, v)| *u - *v).collect();
        (0..d).map(|j| (0..d).map(|i| a[i * d + j] * r[i]).sum()).collect()
    };
    let mut x = start.clone();
    let mut y = start;
    let mut tk = T::one();
    for _ in 0..20_000 {
        let g = grad(&y);
        let next: Vec<T> = project_to_simplex(&y.iter().zip(&g).map(|(yi, gi)| *yi - step * *gi).collect::<Vec<_>>());
        let t_next = (T::one() + (T::one() + T::lit(4.0) * tk * tk).sqrt()) * T::lit(0.5);
        let momentum = (tk - T::one()) / t_next;
        let change = next.iter().zip(&x).map(|(u, v)| (*u - *v).abs()).fold(T::zero(), T::max);
        y = next.iter().zip(&x).map(|(u, v)| *u + momentum * (*u - *v)).collect();
        x = next;
        tk = t_next;
        if change < T::lit(1e-15) {
            break;
        }
    }
    x
}

/// ½ Σ |aᵢ − bᵢ|.
pub fn total_variation<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| (*x - *y).abs()).sum::<T>() * T::lit(0.5)
}
