use thiserror::Error;

use tdesign::cluster::ClusterError;
use tdesign::design::DesignError;
use tdesign::experiment::ExperimentError;
use tdesign::identity::IdentityError;
use tdesign::io::IoError;
use tdesign::noise::NoiseError;
use tdesign::numerics::NumericsError;
use tdesign::tomography::TomographyError;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

/// Whether a library error comes from a non-physical or ill-conditioned
/// intermediate rather than from bad input.
trait Numerical {
    fn numerical(&self) -> bool;
}

impl Numerical for NumericsError {
    fn numerical(&self) -> bool {
        true
    }
}

impl Numerical for ClusterError {
    fn numerical(&self) -> bool {
        false
    }
}

impl Numerical for TomographyError {
    fn numerical(&self) -> bool {
        match self {
            TomographyError::InvalidState(_) | TomographyError::EmptyCounts(_) => false,
            TomographyError::NotUnitary(_) | TomographyError::NonPhysicalChi(_) | TomographyError::Numerics(_) => true,
        }
    }
}

impl Numerical for DesignError {
    fn numerical(&self) -> bool {
        match self {
            DesignError::Numerics(_) => true,
            DesignError::Tomography(e) => e.numerical(),
            _ => false,
        }
    }
}

impl Numerical for NoiseError {
    fn numerical(&self) -> bool {
        match self {
            NoiseError::SingularCalibration { .. } | NoiseError::Unreachable { .. } => true,
            NoiseError::Design(e) => e.numerical(),
            NoiseError::Cluster(e) => e.numerical(),
            _ => false,
        }
    }
}

impl Numerical for ExperimentError {
    fn numerical(&self) -> bool {
        match self {
            ExperimentError::ReadoutWidth { .. } => false,
            ExperimentError::UnobservedOutcome(_) => true,
            ExperimentError::Cluster(e) => e.numerical(),
            ExperimentError::Noise(e) => e.numerical(),
            ExperimentError::Tomography(e) => e.numerical(),
        }
    }
}

impl Numerical for IdentityError {
    fn numerical(&self) -> bool {
        match self {
            IdentityError::Experiment(e) => e.numerical(),
            IdentityError::Noise(e) => e.numerical(),
            IdentityError::Design(e) => e.numerical(),
            _ => false,
        }
    }
}

impl Numerical for IoError {
    fn numerical(&self) -> bool {
        match self {
            IoError::Cluster(e) => e.numerical(),
            IoError::Noise(e) => e.numerical(),
            IoError::Tomography(e) => e.numerical(),
            _ => false,
        }
    }
}

macro_rules! classify {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                if e.numerical() { CliError::Numerical(e.to_string()) } else { CliError::Config(e.to_string()) }
            }
        }
    )*};
}

classify!(NumericsError, ClusterError, TomographyError, DesignError, NoiseError, ExperimentError, IdentityError, IoError);
