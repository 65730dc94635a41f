//! Simulated experiments: probe-state channel tomography on every branch of
//! a chain, and the outcome-frequency experiment, each with optional shot
//! sampling, readout noise and readout-error mitigation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::{build_linear_cluster, measure_chain, sample_counts, ClusterError, Counts, Outcome, PureState};
use crate::design::UnitaryEnsemble;
use crate::noise::{calibration_matrix, mitigate_with, ConfusionModel, MitigationMode, NoiseError};
use crate::tomography::{
    chi_from_probe_outputs, probe_states, state_from_frequencies, ChiMatrix, DensityMatrix, TomographyError,
};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("readout model covers {model} qubits but the experiment measures {measured}")]
    ReadoutWidth { model: usize, measured: usize },
    #[error("outcome {0} was never observed; cannot reconstruct its channel")]
    UnobservedOutcome(String),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Tomography(#[from] TomographyError),
}

/// Acquisition settings shared by the simulated experiments.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Acquisition {
    /// Shots per circuit, or per branch for tomography; `None` uses exact probabilities.
    pub shots: Option<u64>,
    pub seed: u64,
    /// Readout confusion on every measured qubit (qubit 1 first).
    pub readout: Option<ConfusionModel>,
    /// Mitigation applied to each circuit's full outcome distribution.
    pub mitigation: Option<MitigationMode>,
}

impl Acquisition {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn sampled(shots: u64, seed: u64) -> Self {
        Self { shots: Some(shots), seed, ..Self::default() }
    }

    /// Seed for the `k`-th circuit of a run.
    fn circuit_seed(&self, k: u64) -> u64 {
        self.seed.wrapping_add(k.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    /// Measured distribution of one circuit (frequencies or exact probabilities),
    /// after readout noise and optional mitigation. The circuit gets `shots · scale` samples.
    fn acquire<T: Real>(&self, probs: &[T], width: usize, circuit: u64, scale: u64) -> Result<Vec<T>, ExperimentError> {
        let lam = match &self.readout {
            Some(model) => {
                if model.qubits() != width {
                    return Err(ExperimentError::ReadoutWidth { model: model.qubits(), measured: width });
                }
                Some(calibration_matrix::<T>(model))
            }
            None => None,
        };
        let noisy = match &lam {
            Some(l) => l.apply(probs),
            None => probs.to_vec(),
        };
        let observed = match self.shots {
            Some(shots) => sample_counts(&noisy, width, shots.saturating_mul(scale), self.circuit_seed(circuit))?.frequencies(),
            None => noisy,
        };
        Ok(match (&lam, self.mitigation) {
            (Some(l), Some(mode)) => mitigate_with(l, &observed, mode)?,
            _ => observed,
        })
    }
}

/// Reconstructed process matrix of one branch.
#[derive(Debug, Clone)]
pub struct BranchChi<T> {
    pub outcome: Outcome,
    /// Branch weight as seen by the experiment (averaged over the 12 circuits).
    pub probability: T,
    pub chi: ChiMatrix<T>,
    /// Negative eigenvalue weight removed while repairing χ.
    pub clipped: T,
    /// Whether any probe's Bloch vector had to be rescaled into the ball.
    pub rescaled: bool,
}

/// Process tomography of every member of `ensemble`.
///
/// Each probe (|0⟩, |1⟩, |+⟩, |+_y⟩) and tomography basis (X, Y, Z) is one
/// circuit whose outcome register holds the chain outcome in the low bits and
/// the tomography qubit on top. `shots` is per branch: each circuit draws
/// `shots` times the number of branches over the joint register.
pub fn channel_tomography<T: Real>(
    ensemble: &UnitaryEnsemble<T>,
    acq: &Acquisition,
) -> Result<Vec<BranchChi<T>>, ExperimentError> {
    let members = ensemble.members();
    let w = members.first().map(|m| m.outcome.width()).unwrap_or(0);
    let width = w + 1;
    let dim = 1usize << width;
    let top = 1usize << w;
    let probes = probe_states::<T>();
    let half = T::lit(0.5);

    // freqs[probe][basis] = distribution over the width-bit register.
    let mut freqs: Vec<[Vec<T>; 3]> = Vec::with_capacity(4);
    for (j, probe) in probes.iter().enumerate() {
        let mut per_basis: [Vec<T>; 3] = Default::default();
        for (b, slot) in per_basis.iter_mut().enumerate() {
            let mut probs = vec![T::zero(); dim];
            for m in members {
                let out = m.channel.apply(probe.matrix()).hermitize();
                let tr = out.trace().re;
                let rho = DensityMatrix::from_matrix_unchecked(out.scale_real(T::one() / tr));
                let e = rho.bloch_vector()[b].max(-T::one()).min(T::one());
                let p0 = half * (T::one() + e);
                probs[m.outcome.index()] = probs[m.outcome.index()] + m.probability * p0;
                probs[top | m.outcome.index()] = probs[top | m.outcome.index()] + m.probability * (T::one() - p0);
            }
            *slot = acq.acquire(&probs, width, (j * 3 + b) as u64, members.len() as u64)?;
        }
        freqs.push(per_basis);
    }

    let mut result = Vec::with_capacity(members.len());
    for m in members {
        let o = m.outcome.index();
        let mut states = Vec::with_capacity(4);
        let mut rescaled = false;
        let mut weight = T::zero();
        for per_basis in &freqs {
            let pair = |b: usize| [per_basis[b][o], per_basis[b][top | o]];
            weight = weight + per_basis.iter().map(|f| f[o] + f[top | o]).sum::<T>();
            let est = state_from_frequencies(pair(0), pair(1), pair(2))
                .map_err(|_| ExperimentError::UnobservedOutcome(m.outcome.to_string()))?;
            rescaled |= est.rescaled;
            states.push(est.state);
        }
        let est = chi_from_probe_outputs(&states[0], &states[1], &states[2], &states[3])?;
        result.push(BranchChi {
            outcome: m.outcome,
            probability: weight / T::lit(12.0),
            chi: est.chi,
            clipped: est.clipped,
            rescaled,
        });
    }
    Ok(result)
}

/// Outcome statistics of the measured qubits of one chain.
#[derive(Debug, Clone)]
pub struct FrequencyRun<T> {
    /// Ideal branch probabilities.
    pub ideal: Vec<T>,
    /// Sampled counts, when shots were requested.
    pub counts: Option<Counts>,
    /// Measured (noisy, possibly mitigated) distribution.
    pub observed: Vec<T>,
}

/// Simulates the chain with `input` on qubit 1 and records the n − 1 measured bits.
pub fn outcome_frequencies<T: Real>(
    input: &PureState<T>,
    angles: &[T],
    acq: &Acquisition,
) -> Result<FrequencyRun<T>, ExperimentError> {
    let n = angles.len() + 1;
    let branches = measure_chain(&build_linear_cluster(n, input)?, angles)?;
    let width = n - 1;
    let mut ideal = vec![T::zero(); 1usize << width];
    for b in &branches {
        ideal[b.outcome.index()] = b.probability;
    }
    let counts = match (acq.shots, &acq.readout) {
        (Some(shots), Some(model)) => {
            if model.qubits() != width {
                return Err(ExperimentError::ReadoutWidth { model: model.qubits(), measured: width });
            }
            let noisy = calibration_matrix::<T>(model).apply(&ideal);
            Some(sample_counts(&noisy, width, shots, acq.circuit_seed(0))?)
        }
        (Some(shots), None) => Some(sample_counts(&ideal, width, shots, acq.circuit_seed(0))?),
        _ => None,
    };
    let observed = acq.acquire(&ideal, width, 0, 1)?;
    Ok(FrequencyRun { ideal, counts, observed })
}
