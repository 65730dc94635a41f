//! Channel ensembles and the ε-approximate t-design test on tensor powers
//! of single-qubit states.

use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::fmt;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::{logical_unitary, Outcome};
use crate::numerics::{self, ComplexMatrix, NumericsError, Tolerances};
use crate::tomography::{apply_chi_raw, chi_of_unitary, ChiMatrix, DensityMatrix, TomographyError};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error("unsupported design order t = {0} (supported: 1, 2, 3)")]
    UnsupportedOrder(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("no sample state has Bloch radius <= {radius}")]
    EmptyFilteredSample { radius: f64 },
    #[error("radius {0} outside (0, 1]")]
    BadRadius(f64),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Tomography(#[from] TomographyError),
}

/// Design order t ∈ {1, 2, 3}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Order(usize);

impl Order {
    pub const ONE: Order = Order(1);
    pub const TWO: Order = Order(2);
    pub const THREE: Order = Order(3);

    pub fn new(t: usize) -> Result<Self, DesignError> {
        if (1..=3).contains(&t) {
            Ok(Order(t))
        } else {
            Err(DesignError::UnsupportedOrder(t))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for Order {
    type Error = DesignError;
    fn try_from(t: usize) -> Result<Self, Self::Error> {
        Order::new(t)
    }
}

impl From<Order> for usize {
    fn from(o: Order) -> usize {
        o.0
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A member channel, either an ideal unitary or a process matrix.
#[derive(Debug, Clone)]
pub enum Channel<T> {
    Unitary(ComplexMatrix<T>),
    Chi(ChiMatrix<T>),
}

impl<T: Real> Channel<T> {
    pub fn chi(&self) -> ChiMatrix<T> {
        match self {
            Channel::Unitary(u) => chi_of_unitary(u).expect("ensemble unitaries are validated"),
            Channel::Chi(c) => c.clone(),
        }
    }

    /// Unnormalised image of a single-qubit operator.
    pub fn apply(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        match self {
            Channel::Unitary(u) => rho.conjugate_by(u),
            Channel::Chi(c) => apply_chi_raw(c.matrix(), rho),
        }
    }

    /// Linear action on vec(ρ) (row-major 2×2), as a 4×4 matrix.
    fn superoperator(&self) -> [Complex<T>; 16] {
        let mut s = [Complex::new(T::zero(), T::zero()); 16];
        for col in 0..4 {
            let mut unit = ComplexMatrix::zeros(2, 2);
            unit[(col / 2, col % 2)] = Complex::new(T::one(), T::zero());
            let out = self.apply(&unit);
            for row in 0..4 {
                s[row * 4 + col] = out[(row / 2, row % 2)];
            }
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct Member<T> {
    pub outcome: Outcome,
    pub probability: T,
    pub channel: Channel<T>,
}

/// Weighted channels indexed by measurement outcome.
#[derive(Debug, Clone)]
pub struct UnitaryEnsemble<T> {
    members: Vec<Member<T>>,
    superops: Vec<[Complex<T>; 16]>,
}

/// Angles (0, π/4, arccos√(1/3), π/4, 0) of the five-link exact 3-design.
pub fn exact_three_design_angles<T: Real>() -> Vec<T> {
    let a = (1.0f64 / 3.0).sqrt().acos();
    [0.0, FRAC_PI_4, a, FRAC_PI_4, 0.0].into_iter().map(T::lit).collect()
}

/// Angles (0, π/4, π/4, 0) of the four-link approximate 2-design.
pub fn approx_two_design_angles<T: Real>() -> Vec<T> {
    [0.0, FRAC_PI_4, FRAC_PI_4, 0.0].into_iter().map(T::lit).collect()
}

impl<T: Real> UnitaryEnsemble<T> {
    /// Validates probabilities (≥ 0, sum 1 within 1e-9), power-of-two size and channels.
    pub fn new(members: Vec<Member<T>>) -> Result<Self, DesignError> {
        if members.is_empty() || !members.len().is_power_of_two() {
            return Err(DesignError::InvalidEnsemble(format!("{} members is not a power of two", members.len())));
        }
        let mut total = T::zero();
        for m in &members {
            if !(m.probability >= T::zero()) {
                return Err(DesignError::InvalidEnsemble(format!("probability {} for {}", m.probability, m.outcome)));
            }
            total = total + m.probability;
            match &m.channel {
                Channel::Unitary(u) => {
                    if u.shape() != (2, 2) || u.unitarity_defect() > T::tol(1e-10) {
                        return Err(DesignError::InvalidEnsemble(format!("member {} is not a 2x2 unitary", m.outcome)));
                    }
                }
                Channel::Chi(c) => {
                    if (c.trace() - T::one()).abs() > T::lit(0.05) {
                        return Err(DesignError::InvalidEnsemble(format!("member {} has chi trace {}", m.outcome, c.trace())));
                    }
                }
            }
        }
        if (total - T::one()).abs() > T::tol(1e-9) {
            return Err(DesignError::InvalidEnsemble(format!("probabilities sum to {total}")));
        }
        let superops = members.iter().map(|m| m.channel.superoperator()).collect();
        Ok(Self { members, superops })
    }

    /// Uniform ensemble {2^{−k}, U_𝒎(𝝓)} over all outcomes of a k-link chain.
    pub fn from_angles(angles: &[T]) -> Self {
        let k = angles.len();
        let p = T::one() / T::from_count(1usize << k);
        let members = Outcome::all(k)
            .map(|o| Member {
                outcome: o,
                probability: p,
                channel: Channel::Unitary(logical_unitary(&o, angles).expect("widths match")),
            })
            .collect();
        Self::new(members).expect("chain ensembles are valid")
    }

    pub fn exact_three_design() -> Self {
        Self::from_angles(&exact_three_design_angles())
    }

    pub fn approx_two_design() -> Self {
        Self::from_angles(&approx_two_design_angles())
    }

    pub fn members(&self) -> &[Member<T>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Same ensemble with every member expressed as a process matrix.
    pub fn to_chi_form(&self) -> Self {
        let members = self
            .members
            .iter()
            .map(|m| Member { outcome: m.outcome, probability: m.probability, channel: Channel::Chi(m.channel.chi()) })
            .collect();
        Self::new(members).expect("conversion keeps validity")
    }

    /// Output of each member on a single-qubit operator, trace-renormalised.
    fn outputs(&self, rho: &ComplexMatrix<T>) -> impl Iterator<Item = (T, ComplexMatrix<T>)> + '_ {
        let v = [rho[(0, 0)], rho[(0, 1)], rho[(1, 0)], rho[(1, 1)]];
        self.members.iter().zip(&self.superops).map(move |(m, s)| {
            let mut out = ComplexMatrix::zeros(2, 2);
            for row in 0..4 {
                let mut acc = Complex::new(T::zero(), T::zero());
                for col in 0..4 {
                    acc = acc + s[row * 4 + col] * v[col];
                }
                out[(row / 2, row % 2)] = acc;
            }
            let out = out.hermitize();
            let tr = out.trace().re;
            (m.probability, out.scale_real(T::one() / tr))
        })
    }
}

fn check_single_qubit<T: Real>(rho: &DensityMatrix<T>) -> Result<(), DesignError> {
    if rho.dim() != 2 {
        return Err(DesignError::DimensionMismatch { left: rho.dim(), right: 2 });
    }
    Ok(())
}

/// Σᵢ pᵢ (ρᵢ')^{⊗t} with ρᵢ' the i-th member's output.
pub fn ensemble_moment<T: Real>(ensemble: &UnitaryEnsemble<T>, rho: &DensityMatrix<T>, t: Order) -> ComplexMatrix<T> {
    assert_eq!(rho.dim(), 2, "moments are defined for single-qubit states");
    let d = 1usize << t.get();
    let mut acc = ComplexMatrix::zeros(d, d);
    for (p, out) in ensemble.outputs(rho.matrix()) {
        acc.add_scaled(&numerics::tensor_power(&out, t.get()), p);
    }
    acc.hermitize()
}

/// Haar moment E^t_H(ρ^{⊗t}), evaluated as the exact 3-design average.
#[derive(Debug, Clone)]
pub struct HaarReference<T> {
    design: UnitaryEnsemble<T>,
}

impl<T: Real> Default for HaarReference<T> {
    fn default() -> Self {
        Self { design: UnitaryEnsemble::exact_three_design() }
    }
}

impl<T: Real> HaarReference<T> {
    pub fn moment(&self, rho: &DensityMatrix<T>, t: Order) -> ComplexMatrix<T> {
        ensemble_moment(&self.design, rho, t)
    }
}

/// E^t_H(ρ^{⊗t}) for t ≤ 3.
pub fn haar_moment<T: Real>(rho: &DensityMatrix<T>, t: usize) -> Result<ComplexMatrix<T>, DesignError> {
    let t = Order::new(t)?;
    check_single_qubit(rho)?;
    Ok(HaarReference::default().moment(rho, t))
}

/// Smallest ε ≥ 0 with (1−ε)E ≤ D ≤ (1+ε)E; +∞ when D leaks outside the support of E.
pub fn epsilon_for_state<T: Real>(d: &ComplexMatrix<T>, e: &ComplexMatrix<T>) -> Result<T, DesignError> {
    epsilon_for_state_with(d, e, &Tolerances::DEFAULT)
}

pub fn epsilon_for_state_with<T: Real>(
    d: &ComplexMatrix<T>,
    e: &ComplexMatrix<T>,
    tol: &Tolerances,
) -> Result<T, DesignError> {
    if d.shape() != e.shape() || !d.is_square() {
        return Err(DesignError::DimensionMismatch { left: d.rows(), right: e.rows() });
    }
    let (vals, vecs) = numerics::hermitian_eig_with(e, tol)?;
    let lmax = vals.last().copied().unwrap_or_else(T::zero);
    let cutoff = T::lit(tol.support) * lmax.max(T::zero());
    let n = vals.len();
    let support: Vec<usize> = (0..n).filter(|&k| vals[k] > cutoff).collect();
    let null: Vec<usize> = (0..n).filter(|&k| vals[k] <= cutoff).collect();

    let dv = d.matmul(&vecs);
    let projected = vecs.adjoint().matmul(&dv);
    for &a in &null {
        for b in 0..n {
            if projected[(a, b)].norm() > T::tol(tol.leakage) {
                return Ok(T::infinity());
            }
        }
    }
    if support.is_empty() {
        return Ok(T::zero());
    }
    let inv_sqrt: Vec<T> = support.iter().map(|&k| T::one() / vals[k].sqrt()).collect();
    let m = ComplexMatrix::from_fn(support.len(), support.len(), |i, j| {
        projected[(support[i], support[j])] * (inv_sqrt[i] * inv_sqrt[j])
    })
    .hermitize();
    let (mv, _) = numerics::hermitian_eig_with(&m, tol)?;
    let hi = mv[mv.len() - 1] - T::one();
    let lo = T::one() - mv[0];
    Ok(hi.max(lo).max(T::zero()))
}

/// How the θ values of a spherical grid are spaced over [0, π].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaGrid {
    /// θ_k = kπ/n for k = 0..n (π excluded; includes the equator for even n).
    #[default]
    HalfOpen,
    /// θ_k = kπ/(n−1) for k = 0..n (both poles included).
    Inclusive,
}

/// Spherical-coordinate grid of Bloch vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalGrid {
    pub n_r: usize,
    pub n_phi: usize,
    pub n_theta: usize,
    pub theta: ThetaGrid,
}

impl Default for SphericalGrid {
    fn default() -> Self {
        Self { n_r: 10, n_phi: 10, n_theta: 10, theta: ThetaGrid::HalfOpen }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

impl SphericalGrid {
    pub fn radii(&self, radius: f64) -> Vec<f64> {
        linspace(0.0, radius, self.n_r)
    }

    pub fn phis(&self) -> Vec<f64> {
        (0..self.n_phi).map(|k| TAU * k as f64 / self.n_phi as f64).collect()
    }

    pub fn thetas(&self) -> Vec<f64> {
        match self.theta {
            ThetaGrid::HalfOpen => (0..self.n_theta).map(|k| PI * k as f64 / self.n_theta as f64).collect(),
            ThetaGrid::Inclusive => linspace(0.0, PI, self.n_theta),
        }
    }

    /// All n_r·n_phi·n_theta states with r ∈ linspace(0, radius, n_r); duplicates kept.
    pub fn sample<T: Real>(&self, radius: f64) -> BlochSample<T> {
        let (phis, thetas) = (self.phis(), self.thetas());
        let mut states = Vec::with_capacity(self.n_r * self.n_phi * self.n_theta);
        for r in self.radii(radius) {
            for &phi in &phis {
                for &theta in &thetas {
                    let (x, y, z) = (r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos());
                    states.push(DensityMatrix::from_bloch(T::lit(x), T::lit(y), T::lit(z)));
                }
            }
        }
        BlochSample { states, spec: SampleSpec::Spherical { grid: *self, radius } }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SampleSpec {
    Spherical { grid: SphericalGrid, radius: f64 },
    Cube { points_per_axis: usize },
    Custom,
}

/// A list of single-qubit states to test against.
#[derive(Debug, Clone)]
pub struct BlochSample<T> {
    pub states: Vec<DensityMatrix<T>>,
    pub spec: SampleSpec,
}

impl<T: Real> BlochSample<T> {
    pub fn custom(states: Vec<DensityMatrix<T>>) -> Self {
        Self { states, spec: SampleSpec::Custom }
    }

    /// Points of an inclusive `k`-per-axis grid on [−1, 1]³ with norm ≤ 1.
    pub fn cube(points_per_axis: usize) -> Self {
        let axis = linspace(-1.0, 1.0, points_per_axis);
        let mut states = Vec::new();
        for &x in &axis {
            for &y in &axis {
                for &z in &axis {
                    if x * x + y * y + z * z <= 1.0 + 1e-12 {
                        states.push(DensityMatrix::from_bloch(T::lit(x), T::lit(y), T::lit(z)));
                    }
                }
            }
        }
        Self { states, spec: SampleSpec::Cube { points_per_axis } }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// The 1000-state spherical sample at full radius.
pub fn bloch_sample_spherical<T: Real>() -> BlochSample<T> {
    SphericalGrid::default().sample(1.0)
}

/// Result of one design test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub t: usize,
    /// Max over states; `f64::INFINITY` when some state is unsatisfiable.
    #[serde(with = "crate::io::extended_f64")]
    pub epsilon: f64,
    pub radius: f64,
    #[serde(with = "crate::io::extended_f64_vec")]
    pub per_state_epsilon: Vec<f64>,
    pub passing: bool,
    pub n_states: usize,
}

/// Passing threshold on ε.
pub const PASSING_EPSILON: f64 = 0.5;

/// Per-state ε for every state of `states`.
pub fn epsilons<T: Real>(ensemble: &UnitaryEnsemble<T>, t: Order, states: &[&DensityMatrix<T>]) -> Result<Vec<T>, DesignError> {
    let haar = HaarReference::<T>::default();
    states
        .par_iter()
        .map(|rho| {
            check_single_qubit(rho)?;
            let d = ensemble_moment(ensemble, rho, t);
            let e = haar.moment(rho, t);
            epsilon_for_state(&d, &e)
        })
        .collect()
}

/// ε test over the sample states with Bloch radius ≤ `radius`.
pub fn design_test<T: Real>(
    ensemble: &UnitaryEnsemble<T>,
    t: Order,
    sample: &BlochSample<T>,
    radius: f64,
) -> Result<TestReport, DesignError> {
    if !(radius > 0.0 && radius <= 1.0) {
        return Err(DesignError::BadRadius(radius));
    }
    let chosen: Vec<&DensityMatrix<T>> =
        sample.states.iter().filter(|s| s.dim() == 2 && s.bloch_radius() <= T::lit(radius) + T::tol(1e-12)).collect();
    if chosen.is_empty() {
        return Err(DesignError::EmptyFilteredSample { radius });
    }
    let per_state: Vec<f64> = epsilons(ensemble, t, &chosen)?.into_iter().map(|e| e.as_f64()).collect();
    let epsilon = per_state.iter().copied().fold(0.0, f64::max);
    Ok(TestReport {
        t: t.get(),
        epsilon,
        radius,
        passing: epsilon <= PASSING_EPSILON,
        n_states: per_state.len(),
        per_state_epsilon: per_state,
    })
}

/// Design test on a grid regenerated with r ∈ linspace(0, radius, n_r).
pub fn truncated_test<T: Real>(
    ensemble: &UnitaryEnsemble<T>,
    t: Order,
    grid: &SphericalGrid,
    radius: f64,
) -> Result<TestReport, DesignError> {
    design_test(ensemble, t, &grid.sample(radius), radius)
}

/// Largest truncation radius found by a search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusSearch {
    pub radius: f64,
    #[serde(with = "crate::io::extended_f64")]
    pub epsilon: f64,
}

/// Truncation radii 1.00, 0.99, …, 0.01.
pub fn radius_grid() -> impl Iterator<Item = f64> {
    (1..=100).rev().map(|k| k as f64 / 100.0)
}

/// Largest radius on the 0.01 grid whose truncated test has ε ≤ `eps_max`; (0, ∞) if none.
pub fn truncation_radius_search<T: Real>(
    ensemble: &UnitaryEnsemble<T>,
    t: Order,
    grid: &SphericalGrid,
    eps_max: f64,
) -> Result<RadiusSearch, DesignError> {
    for radius in radius_grid() {
        let report = truncated_test(ensemble, t, grid, radius)?;
        if report.epsilon <= eps_max {
            return Ok(RadiusSearch { radius, epsilon: report.epsilon });
        }
    }
    Ok(RadiusSearch { radius: 0.0, epsilon: f64::INFINITY })
}

/// Fraction of valid cube-grid states whose ε is at most `eps_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassingFraction {
    pub fraction: f64,
    pub n_passing: usize,
    pub n_states: usize,
}

/// Cube points per axis for [`passing_fraction`] (20³ = 8000 points).
pub const CUBE_POINTS_PER_AXIS: usize = 20;

pub fn passing_fraction<T: Real>(ensemble: &UnitaryEnsemble<T>, t: Order, eps_max: f64) -> Result<PassingFraction, DesignError> {
    passing_fraction_on(ensemble, t, &BlochSample::cube(CUBE_POINTS_PER_AXIS), eps_max)
}

pub fn passing_fraction_on<T: Real>(
    ensemble: &UnitaryEnsemble<T>,
    t: Order,
    sample: &BlochSample<T>,
    eps_max: f64,
) -> Result<PassingFraction, DesignError> {
    let states: Vec<&DensityMatrix<T>> = sample.states.iter().collect();
    let eps = epsilons(ensemble, t, &states)?;
    let n_passing = eps.iter().filter(|e| e.as_f64() <= eps_max).count();
    let n_states = eps.len();
    let fraction = if n_states == 0 { 0.0 } else { n_passing as f64 / n_states as f64 };
    Ok(PassingFraction { fraction, n_passing, n_states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gates;

    type E = UnitaryEnsemble<f64>;
    type D = DensityMatrix<f64>;
    type M = ComplexMatrix<f64>;

    fn pure_state(theta: f64, phi: f64) -> D {
        D::from_bloch(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
    }

    #[test]
    fn exact_design_shape() {
        let e = E::exact_three_design();
        assert_eq!(e.len(), 32);
        assert!(e.members().iter().all(|m| m.probability == 0.03125));
        let a = exact_three_design_angles::<f64>();
        let want = a.iter().fold(M::identity(2), |u, &phi| crate::cluster::link_unitary(0, phi).matmul(&u));
        match &e.members()[0].channel {
            Channel::Unitary(u) => assert!(u.max_abs_diff(&want) < 1e-15),
            Channel::Chi(_) => unreachable!(),
        }
        assert!(E::approx_two_design().members().iter().all(|m| m.probability == 0.0625));
    }

    #[test]
    fn ensemble_validation() {
        let m = |p: f64| Member { outcome: Outcome::from_index(0, 0), probability: p, channel: Channel::Unitary(M::identity(2)) };
        assert!(E::new(vec![m(1.0)]).is_ok());
        assert!(E::new(vec![m(0.9)]).is_err());
        assert!(E::new(vec![m(0.5), m(0.25), m(0.25)]).is_err());
        let bad = Member { outcome: Outcome::from_index(0, 0), probability: 1.0, channel: Channel::Unitary(M::from_real_diagonal(&[1.0, 0.5])) };
        assert!(E::new(vec![bad]).is_err());
    }

    #[test]
    fn haar_first_moment_is_maximally_mixed() {
        for (th, ph) in [(0.0, 0.0), (1.0, 2.0), (2.5, 4.0)] {
            let m = haar_moment(&pure_state(th, ph), 1).unwrap();
            assert!(m.max_abs_diff(D::maximally_mixed(1).matrix()) < 1e-14);
        }
    }

    #[test]
    fn haar_moment_of_maximally_mixed() {
        for t in 1..=3 {
            let m = haar_moment(&D::maximally_mixed(1), t).unwrap();
            assert!(m.max_abs_diff(D::maximally_mixed(t).matrix()) < 1e-14);
        }
        assert_eq!(haar_moment(&D::zero(), 4).unwrap_err(), DesignError::UnsupportedOrder(4));
    }

    fn swap_operator() -> M {
        M::from_fn(4, 4, |i, j| {
            let (a, b) = (i >> 1, i & 1);
            if j == (b << 1 | a) {
                Complex::new(1.0, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn haar_second_moment_twirl_formula() {
        // E²(ρ⊗ρ) = α P_sym + β P_anti with α = (1 + Tr ρ²)/6 and β = (1 − Tr ρ²)/2 (per dimension of each space).
        let swap = swap_operator();
        let p_sym = (&M::identity(4) + &swap).scale_real(0.5);
        let p_anti = (&M::identity(4) - &swap).scale_real(0.5);
        for r in [0.0, 0.3, 0.8, 1.0] {
            let rho = D::from_bloch(r * 0.6, 0.0, r * 0.8);
            let pur = rho.purity();
            let want = &p_sym.scale_real((1.0 + pur) / 6.0) + &p_anti.scale_real((1.0 - pur) / 2.0);
            assert!(haar_moment(&rho, 2).unwrap().max_abs_diff(&want) < 1e-13, "r={r}");
        }
    }

    #[test]
    fn exact_design_matches_haar_at_every_order() {
        let e = E::exact_three_design();
        let rho = D::from_bloch(0.2, -0.5, 0.4);
        for t in [Order::ONE, Order::TWO, Order::THREE] {
            let d = ensemble_moment(&e, &rho, t);
            let h = haar_moment(&rho, t.get()).unwrap();
            assert!(d.max_abs_diff(&h) < 1e-12);
            assert!((d.trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_member_and_depolarising_moments() {
        let id = E::new(vec![Member { outcome: Outcome::from_index(0, 0), probability: 1.0, channel: Channel::Unitary(M::identity(2)) }]).unwrap();
        let rho = D::from_bloch(0.1, 0.2, 0.3);
        let d = ensemble_moment(&id, &rho, Order::THREE);
        assert!(d.max_abs_diff(&numerics::tensor_power(rho.matrix(), 3)) < 1e-15);

        let dep = E::new(
            Outcome::all(1)
                .map(|o| Member { outcome: o, probability: 0.5, channel: Channel::Chi(ChiMatrix::depolarising(1.0)) })
                .collect(),
        )
        .unwrap();
        let d = ensemble_moment(&dep, &rho, Order::TWO);
        assert!(d.max_abs_diff(D::maximally_mixed(2).matrix()) < 1e-15);
    }

    #[test]
    fn epsilon_examples() {
        let e = haar_moment(&D::from_bloch(0.3, 0.1, 0.2), 2).unwrap();
        assert!(epsilon_for_state(&e, &e).unwrap() < 1e-12);
        assert!((epsilon_for_state(&e.scale_real(0.8), &e).unwrap() - 0.2).abs() < 1e-12);
        assert!(matches!(epsilon_for_state(&M::identity(2), &e), Err(DesignError::DimensionMismatch { .. })));
    }

    #[test]
    fn pure_state_leakage_is_infinite() {
        let rho = pure_state(0.7, 1.3);
        let e = haar_moment(&rho, 2).unwrap();
        let dep = crate::noise::noisy_ensemble_terminal(&E::exact_three_design(), 0.05).unwrap();
        let d = ensemble_moment(&dep, &rho, Order::TWO);
        // The antisymmetric (singlet) direction carries weight in D but not in E.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = [Complex::new(0.0, 0.0), Complex::new(h, 0.0), Complex::new(-h, 0.0), Complex::new(0.0, 0.0)];
        let w_d: f64 = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| (singlet[i].conj() * d[(i, j)] * singlet[j]).re).sum();
        let w_e: f64 = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| (singlet[i].conj() * e[(i, j)] * singlet[j]).re).sum();
        assert!(w_d > 1e-3 && w_e.abs() < 1e-12);
        assert_eq!(epsilon_for_state(&d, &e).unwrap(), f64::INFINITY);
    }

    #[test]
    fn spherical_sample_contents() {
        let s = bloch_sample_spherical::<f64>();
        assert_eq!(s.len(), 1000);
        assert!(s.states.iter().any(|x| x.matrix().max_abs_diff(D::maximally_mixed(1).matrix()) < 1e-15));
        assert!(s.states.iter().any(|x| x.matrix().max_abs_diff(D::zero().matrix()) < 1e-15));
        assert!(s.states.iter().all(|x| numerics::min_eigenvalue(x.matrix()).unwrap() >= -1e-15));
    }

    #[test]
    fn theta_grids() {
        let g = SphericalGrid::default();
        let th = g.thetas();
        assert!((th[5] - PI / 2.0).abs() < 1e-15 && th.len() == 10 && th[9] < PI);
        let inc = SphericalGrid { theta: ThetaGrid::Inclusive, ..g }.thetas();
        assert!((inc[9] - PI).abs() < 1e-15 && inc.iter().all(|t| (t - PI / 2.0).abs() > 0.1));
        assert!((g.phis()[9] - 1.8 * PI).abs() < 1e-15);
    }

    #[test]
    fn approx_design_first_moment_is_exact() {
        let r = design_test(&E::approx_two_design(), Order::ONE, &bloch_sample_spherical(), 1.0).unwrap();
        assert!(r.epsilon < 1e-9 && r.passing && r.n_states == 1000);
    }

    #[test]
    fn design_test_filter_and_errors() {
        let e = E::approx_two_design();
        let s = bloch_sample_spherical::<f64>();
        let r = design_test(&e, Order::TWO, &s, 0.5).unwrap();
        // radii 0, 1/9, ..., 4/9 survive.
        assert_eq!(r.n_states, 500);
        let only_far = BlochSample::custom(vec![D::zero()]);
        assert!(matches!(design_test(&e, Order::TWO, &only_far, 0.5), Err(DesignError::EmptyFilteredSample { .. })));
        assert!(matches!(design_test(&e, Order::TWO, &s, 0.0), Err(DesignError::BadRadius(_))));
    }

    #[test]
    fn epsilon_is_monotone_in_radius_filter() {
        let e = E::approx_two_design();
        let s = bloch_sample_spherical::<f64>();
        let mut prev = 0.0;
        for radius in [0.2, 0.4, 0.6, 0.8, 1.0] {
            let eps = design_test(&e, Order::TWO, &s, radius).unwrap().epsilon;
            assert!(eps >= prev);
            prev = eps;
        }
    }

    #[test]
    fn permuting_members_keeps_epsilon() {
        let e = E::approx_two_design();
        let mut members = e.members().to_vec();
        members.reverse();
        members.swap(1, 7);
        let p = E::new(members).unwrap();
        let s = bloch_sample_spherical::<f64>();
        let a = design_test(&e, Order::TWO, &s, 1.0).unwrap();
        let b = design_test(&p, Order::TWO, &s, 1.0).unwrap();
        assert!((a.epsilon - b.epsilon).abs() < 1e-12);
    }

    #[test]
    fn haar_moment_is_covariant() {
        let v = gates::hadamard::<f64>().matmul(&gates::rz(0.7));
        let rho = D::from_bloch(0.3, -0.2, 0.5);
        for t in 1..=3 {
            let lhs = haar_moment(&rho.evolve(&v), t).unwrap();
            let rhs = haar_moment(&rho, t).unwrap().conjugate_by(&numerics::tensor_power(&v, t));
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn cube_sample_size() {
        let c = BlochSample::<f64>::cube(20);
        assert_eq!(c.len(), 3544);
    }

    #[test]
    fn f32_design_test_runs() {
        let e = UnitaryEnsemble::<f32>::exact_three_design();
        let r = design_test(&e, Order::TWO, &SphericalGrid::default().sample::<f32>(0.5), 0.5).unwrap();
        assert!(r.epsilon < 1e-3);
    }
}
