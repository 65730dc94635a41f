use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tdesign::noise::{ConfusionModel, DepolarisingKind, MitigationMode};
use tdesign::{SphericalGrid, ThetaGrid};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "tdesign", version, about = "Unitary design tests for measurement-based cluster-state ensembles")]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test an ensemble against Haar moments on a grid of Bloch states.
    DesignTest(DesignTestArgs),
    /// Tabulate epsilon against the depolarising parameter.
    Sweep(SweepArgs),
    /// Reconstruct the process matrix of every branch of a chain.
    Tomography(TomographyArgs),
    /// Run the identity benchmark and infer the per-qubit noise.
    Identity(IdentityArgs),
    /// Correct measured counts for readout errors.
    Mitigate(MitigateArgs),
    /// Simulate and sample the outcome statistics of one chain.
    Frequencies(FrequenciesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleName {
    /// Five-link exact 3-design.
    Exact3,
    /// Four-link approximate 2-design.
    Approx2,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EnsembleArgs {
    #[arg(long, value_enum, default_value = "exact3")]
    pub ensemble: EnsembleName,
    /// Measurement angles (radians), overriding --ensemble.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub angles: Option<Vec<f64>>,
}

impl EnsembleArgs {
    pub fn angles(&self) -> Vec<f64> {
        match (&self.angles, self.ensemble) {
            (Some(a), _) => a.clone(),
            (None, EnsembleName::Exact3) => tdesign::design::exact_three_design_angles(),
            (None, EnsembleName::Approx2) => tdesign::design::approx_two_design_angles(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    None,
    Terminal,
    Stepwise,
}

impl NoiseModel {
    pub fn kind(self) -> Option<DepolarisingKind> {
        match self {
            NoiseModel::None => None,
            NoiseModel::Terminal => Some(DepolarisingKind::Terminal),
            NoiseModel::Stepwise => Some(DepolarisingKind::Stepwise),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NoiseArgs {
    #[arg(long, value_enum, default_value = "none")]
    pub noise: NoiseModel,
    /// Depolarising parameter.
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaSpacing {
    HalfOpen,
    Inclusive,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = 10)]
    pub n_r: usize,
    #[arg(long, default_value_t = 10)]
    pub n_phi: usize,
    #[arg(long, default_value_t = 10)]
    pub n_theta: usize,
    #[arg(long, value_enum, default_value = "half-open")]
    pub theta_grid: ThetaSpacing,
}

impl GridArgs {
    pub fn grid(&self) -> Result<SphericalGrid, CliError> {
        if self.n_r == 0 || self.n_phi == 0 || self.n_theta == 0 {
            return Err(CliError::Config("grid sizes must be positive".into()));
        }
        let theta = match self.theta_grid {
            ThetaSpacing::HalfOpen => ThetaGrid::HalfOpen,
            ThetaSpacing::Inclusive => ThetaGrid::Inclusive,
        };
        Ok(SphericalGrid { n_r: self.n_r, n_phi: self.n_phi, n_theta: self.n_theta, theta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MitigationKind {
    InvertProject,
    LeastSquares,
}

impl From<MitigationKind> for MitigationMode {
    fn from(m: MitigationKind) -> Self {
        match m {
            MitigationKind::InvertProject => MitigationMode::InvertProject,
            MitigationKind::LeastSquares => MitigationMode::LeastSquares,
        }
    }
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample this many shots instead of using exact probabilities.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Apply readout-error mitigation.
    #[arg(long)]
    pub mitigate: bool,
    #[arg(long, value_enum, default_value = "invert-project")]
    pub mitigation_mode: MitigationKind,
    /// Readout flip probabilities P(1|0),P(0|1) applied to every measured qubit.
    #[arg(long, value_delimiter = ',')]
    pub readout: Option<Vec<f64>>,
}

impl Common {
    pub fn readout_model(&self, qubits: usize) -> Result<Option<ConfusionModel>, CliError> {
        match self.readout.as_deref() {
            None => Ok(None),
            Some(&[p01, p10]) => Ok(Some(ConfusionModel::uniform(qubits, p01, p10)?)),
            Some(_) => Err(CliError::Config("--readout takes two values: P(1|0),P(0|1)".into())),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DesignTestArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Design order.
    #[arg(long, default_value_t = 2)]
    pub t: usize,
    /// Truncation radius of the state grid.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Also find the largest radius passing at --eps-max.
    #[arg(long)]
    pub search_radius: bool,
    /// Also report the passing fraction on the cube grid.
    #[arg(long)]
    pub fraction: bool,
    #[arg(long, default_value_t = tdesign::design::PASSING_EPSILON)]
    pub eps_max: f64,
    #[arg(long, default_value_t = tdesign::design::CUBE_POINTS_PER_AXIS)]
    pub cube_points: usize,
    /// Test the channels reconstructed by simulated process tomography.
    #[arg(long)]
    pub tomography: bool,
    /// Write per-state epsilon as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value = "stepwise")]
    pub model: NoiseModel,
    #[arg(long, default_value_t = 2)]
    pub t: usize,
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Number of evenly spaced p values on [0, 1].
    #[arg(long, default_value_t = 200)]
    pub p_points: usize,
    /// Write the rows as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TomographyArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Write outcome, probability and fidelity as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightingKind {
    Probability,
    Uniform,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IdentityArgs {
    /// Chain length (odd, at least 3).
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Depolarising parameter applied once per qubit.
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
    #[arg(long, value_enum, default_value = "probability")]
    pub weighting: WeightingKind,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MitigateArgs {
    /// Counts JSON as written by `frequencies --counts-output`.
    #[arg(long)]
    pub counts: PathBuf,
    /// Calibration JSON; otherwise built from --readout.
    #[arg(long)]
    pub calibration: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputState {
    Zero,
    One,
    Plus,
    PlusY,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FrequenciesArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, value_enum, default_value = "plus")]
    pub input: InputState,
    /// Also write the sampled counts as a counts file.
    #[arg(long)]
    pub counts_output: Option<PathBuf>,
    /// Also write the calibration matrix of the --readout model.
    #[arg(long)]
    pub calibration_output: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}
