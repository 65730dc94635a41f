//! JSON and CSV formats for counts, process matrices, calibration matrices
//! and run reports.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::{ClusterError, Counts};
use crate::identity::IdentityRunReport;
use crate::noise::{CalibrationMatrix, NoiseError, SweepRow};
use crate::numerics::ComplexMatrix;
use crate::tomography::{ChiMatrix, TomographyError};
use crate::Complex;

/// Version stamped into every output envelope.
pub const SCHEMA_VERSION: u32 = 1;

/// Operator basis label written alongside process matrices.
pub const CHI_BASIS: &str = "I,X,-iY,Z";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("invalid data: {0}")]
    Invalid(String),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Tomography(#[from] TomographyError),
}

/// `f64` that also round-trips ±∞ and NaN as the strings "inf", "-inf", "nan".
pub mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum Repr {
        Num(f64),
        Str(String),
    }

    pub(crate) fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(E::custom(format!("expected a number or \"inf\", got {other:?}"))),
            },
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }
}

/// Vector version of [`extended_f64`].
pub mod extended_f64_vec {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    struct Item(f64);

    impl Serialize for Item {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            super::extended_f64::serialize(&self.0, s)
        }
    }

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for &x in xs {
            seq.serialize_element(&Item(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<super::extended_f64::Repr>::deserialize(d)?.into_iter().map(super::extended_f64::from_repr).collect()
    }
}

/// Measured counts of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsFile {
    pub n: usize,
    pub shots: u64,
    pub seed: u64,
    pub angles: Vec<f64>,
    /// Little-endian bitstring → count.
    pub counts: BTreeMap<String, u64>,
}

impl CountsFile {
    pub fn new(n: usize, counts: &Counts, seed: u64, angles: &[f64]) -> Self {
        Self { n, shots: counts.total(), seed, angles: angles.to_vec(), counts: counts.to_map() }
    }

    /// Counts over the bitstring width found in the file.
    pub fn to_counts(&self) -> Result<Counts, IoError> {
        let width = self
            .counts
            .keys()
            .next()
            .map(|k| k.len())
            .ok_or_else(|| IoError::Invalid("counts map is empty".into()))?;
        if self.counts.keys().any(|k| k.len() != width) {
            return Err(IoError::Invalid("bitstrings have different lengths".into()));
        }
        Ok(Counts::from_map(width, &self.counts)?)
    }
}

/// Process matrix as separate real and imaginary 4×4 arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
    pub basis: String,
}

impl From<&ChiMatrix<f64>> for ChiJson {
    fn from(chi: &ChiMatrix<f64>) -> Self {
        let m = chi.matrix();
        Self {
            re: (0..4).map(|i| (0..4).map(|j| m[(i, j)].re).collect()).collect(),
            im: (0..4).map(|i| (0..4).map(|j| m[(i, j)].im).collect()).collect(),
            basis: CHI_BASIS.to_string(),
        }
    }
}

impl ChiJson {
    pub fn to_chi(&self) -> Result<ChiMatrix<f64>, IoError> {
        if self.basis != CHI_BASIS {
            return Err(IoError::Invalid(format!("unsupported chi basis {:?}", self.basis)));
        }
        let ok = |a: &Vec<Vec<f64>>| a.len() == 4 && a.iter().all(|r| r.len() == 4);
        if !ok(&self.re) || !ok(&self.im) {
            return Err(IoError::Invalid("chi must be 4x4".into()));
        }
        let m = ComplexMatrix::from_fn(4, 4, |i, j| Complex::new(self.re[i][j], self.im[i][j]));
        Ok(ChiMatrix::new(m)?)
    }
}

/// Calibration matrix with nested rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationJson {
    pub n: usize,
    pub lambda: Vec<Vec<f64>>,
}

impl From<&CalibrationMatrix<f64>> for CalibrationJson {
    fn from(c: &CalibrationMatrix<f64>) -> Self {
        let d = c.dim();
        Self { n: c.qubits(), lambda: c.entries().chunks(d).map(|r| r.to_vec()).collect() }
    }
}

impl CalibrationJson {
    pub fn to_matrix(&self) -> Result<CalibrationMatrix<f64>, IoError> {
        let d = 1usize << self.n;
        if self.lambda.len() != d || self.lambda.iter().any(|r| r.len() != d) {
            return Err(IoError::Invalid(format!("lambda must be {d}x{d} for n = {}", self.n)));
        }
        Ok(CalibrationMatrix::new(self.n, self.lambda.concat())?)
    }
}

/// Identity-benchmark report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityJson {
    pub n: usize,
    pub p_injected: f64,
    pub inferred_p: f64,
    pub chi_average: ChiJson,
    /// Outcome bitstring → fidelity of the corrected channel with the identity.
    pub per_outcome_fidelity: BTreeMap<String, f64>,
}

impl From<&IdentityRunReport<f64>> for IdentityJson {
    fn from(r: &IdentityRunReport<f64>) -> Self {
        Self {
            n: r.n,
            p_injected: r.p_injected,
            inferred_p: r.inferred_p,
            chi_average: ChiJson::from(&r.chi_average),
            per_outcome_fidelity: r
                .chi_per_outcome
                .iter()
                .zip(&r.per_outcome_fidelity)
                .map(|((o, _), f)| (o.to_string(), *f))
                .collect(),
        }
    }
}

/// Top-level wrapper of every file the tools write.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Envelope<R> {
    pub schema_version: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub result: R,
}

impl<R> Envelope<R> {
    pub fn new(command: &str, config: serde_json::Value, result: R) -> Self {
        Self { schema_version: SCHEMA_VERSION, command: command.to_string(), config, result }
    }
}

fn file_err(path: &Path, source: std::io::Error) -> IoError {
    IoError::File { path: path.display().to_string(), source }
}

pub fn write_json<V: Serialize>(path: &Path, value: &V) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|source| IoError::Json { path: path.display().to_string(), source })?;
    std::fs::write(path, text + "\n").map_err(|e| file_err(path, e))
}

pub fn read_json<V: for<'de> Deserialize<'de>>(path: &Path) -> Result<V, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| file_err(path, e))?;
    serde_json::from_str(&text).map_err(|source| IoError::Json { path: path.display().to_string(), source })
}

/// Shortest round-trip text for CSV cells; non-finite values as inf, -inf, nan.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else if x > 0.0 {
        "inf".into()
    } else if x < 0.0 {
        "-inf".into()
    } else {
        "nan".into()
    }
}

/// Sweep rows as CSV with header `model,t,radius,p,epsilon`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("model,t,radius,p,epsilon\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.model, r.t, format_f64(r.radius), format_f64(r.p), format_f64(r.epsilon)));
    }
    out
}

/// Generic CSV writer; fields are written verbatim.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), IoError> {
    let mut f = std::fs::File::create(path).map_err(|e| file_err(path, e))?;
    let mut body = header.join(",");
    body.push('\n');
    for r in rows {
        body.push_str(&r.join(","));
        body.push('\n');
    }
    f.write_all(body.as_bytes()).map_err(|e| file_err(path, e))
}
