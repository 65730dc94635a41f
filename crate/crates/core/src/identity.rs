//! Identity channel from X-basis measurements on odd-length chains.
//!
//! With every angle zero a link implements U_m(0) = H·Z^m, so an even
//! number of links yields a Pauli operator; undoing it gives the identity.
//! Depolarising noise is applied once per cluster qubit.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::{logical_unitary, phase_insensitive_overlap, Outcome};
use crate::design::{Channel, DesignError, Member, UnitaryEnsemble};
use crate::experiment::{channel_tomography, Acquisition, ExperimentError};
use crate::noise::{depolarise_operator, NoiseError};
use crate::numerics::{gates, ComplexMatrix};
use crate::tomography::{channel_fidelity, chi_of_map, ChiMatrix, DensityMatrix};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IdentityError {
    #[error("the identity needs an odd chain length, got n = {0}")]
    EvenN(usize),
    #[error("chain length {0} is too short (need n >= 3)")]
    TooShort(usize),
    #[error("outcome has {0} links; a Pauli correction needs an even link count")]
    OddLinkCount(usize),
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Design(#[from] DesignError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix<T: Real>(self) -> ComplexMatrix<T> {
        match self {
            Pauli::I => gates::identity2(),
            Pauli::X => gates::pauli_x(),
            Pauli::Y => gates::pauli_y(),
            Pauli::Z => gates::pauli_z(),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// The Pauli P with P·U_𝒎(𝟎) ∝ I.
pub fn pauli_correction(outcome: &Outcome) -> Result<Pauli, IdentityError> {
    if outcome.width() % 2 == 1 {
        return Err(IdentityError::OddLinkCount(outcome.width()));
    }
    let zeros = vec![0.0f64; outcome.width()];
    let u = logical_unitary(outcome, &zeros).expect("widths match");
    Ok(Pauli::ALL
        .into_iter()
        .find(|p| phase_insensitive_overlap(&p.matrix(), &u) > 1.0 - 1e-9)
        .expect("products of H and Z over an even number of links are Paulis"))
}

/// How per-outcome process matrices are averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// By observed branch probability.
    #[default]
    Probability,
    Uniform,
}

#[derive(Debug, Clone)]
pub struct IdentityRunReport<T> {
    pub n: usize,
    pub p_injected: f64,
    pub chi_per_outcome: Vec<(Outcome, ChiMatrix<T>)>,
    pub chi_average: ChiMatrix<T>,
    /// Fidelity of each corrected branch channel with the identity.
    pub per_outcome_fidelity: Vec<T>,
    pub inferred_p: T,
}

fn check_n(n: usize) -> Result<(), IdentityError> {
    if n.is_multiple_of(2) {
        return Err(IdentityError::EvenN(n));
    }
    if n < 3 {
        return Err(IdentityError::TooShort(n));
    }
    Ok(())
}

/// Corrected branch channels P·D_p(U_{m_k}(0)···D_p(ρ)···)·P†, in process-matrix form.
pub fn corrected_ensemble<T: Real>(n: usize, p: T) -> Result<UnitaryEnsemble<T>, IdentityError> {
    check_n(n)?;
    if !(p >= T::zero() && p <= T::one()) {
        return Err(IdentityError::BadProbability(p.as_f64()));
    }
    let k = n - 1;
    let prob = T::one() / T::from_count(1usize << k);
    let members = Outcome::all(k)
        .map(|o| {
            let links: Vec<ComplexMatrix<T>> = (1..=k).map(|i| crate::cluster::link_unitary(o.bit(i), T::zero())).collect();
            let fix = pauli_correction(&o)?.matrix::<T>();
            let chi = chi_of_map(|rho: &DensityMatrix<T>| {
                let mut m = depolarise_operator(rho.matrix(), p);
                for u in &links {
                    m = depolarise_operator(&m.conjugate_by(u), p);
                }
                DensityMatrix::from_matrix_unchecked(m.conjugate_by(&fix))
            });
            Ok(Member { outcome: o, probability: prob, channel: Channel::Chi(chi) })
        })
        .collect::<Result<Vec<_>, IdentityError>>()?;
    Ok(UnitaryEnsemble::new(members)?)
}

/// Runs the identity benchmark and infers the per-step depolarising parameter.
pub fn identity_bench<T: Real>(
    n: usize,
    p: f64,
    acq: &Acquisition,
    weighting: Weighting,
) -> Result<IdentityRunReport<T>, IdentityError> {
    let ensemble = corrected_ensemble(n, T::lit(p))?;
    let branches = channel_tomography(&ensemble, acq)?;
    let weights: Vec<T> = match weighting {
        Weighting::Probability => branches.iter().map(|b| b.probability).collect(),
        Weighting::Uniform => vec![T::one(); branches.len()],
    };
    let chi_average = ChiMatrix::weighted_mean(weights.iter().copied().zip(branches.iter().map(|b| &b.chi)));
    let identity = ChiMatrix::identity();
    let per_outcome_fidelity = branches
        .iter()
        .map(|b| channel_fidelity(&identity, &b.chi))
        .collect::<Result<Vec<T>, _>>()
        .map_err(ExperimentError::from)?;
    let inferred_p = infer_p(&chi_average, n);
    Ok(IdentityRunReport {
        n,
        p_injected: p,
        chi_per_outcome: branches.into_iter().map(|b| (b.outcome, b.chi)).collect(),
        chi_average,
        per_outcome_fidelity,
        inferred_p,
    })
}

/// χ of n successive depolarisations with parameter p.
pub fn model_chi<T: Real>(p: T, n: usize) -> ChiMatrix<T> {
    let keep = (T::one() - p).powi(n as i32);
    ChiMatrix::depolarising(T::one() - keep)
}

/// Number of points of the p grid used by [`infer_p`].
pub const INFER_GRID_POINTS: usize = 10_000;

/// p on a 10000-point grid over [0, 1] maximising the fidelity between the
/// n-fold depolarising model and `chi_average`; ties go to the smaller p.
pub fn infer_p<T: Real>(chi_average: &ChiMatrix<T>, n: usize) -> T {
    let last = T::from_count(INFER_GRID_POINTS - 1);
    let mut best = (T::zero(), T::neg_infinity());
    for k in 0..INFER_GRID_POINTS {
        let p = T::from_count(k) / last;
        let f = channel_fidelity(&model_chi(p, n), chi_average).unwrap_or(T::neg_infinity());
        if f > best.1 {
            best = (p, f);
        }
    }
    best.0
}
