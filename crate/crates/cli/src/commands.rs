use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use tdesign::design::{
    passing_fraction_on, truncated_test, truncation_radius_search, BlochSample, Channel, Member, Order, PassingFraction,
    RadiusSearch, UnitaryEnsemble,
};
use tdesign::experiment::{channel_tomography, outcome_frequencies, Acquisition, BranchChi};
use tdesign::identity::{identity_bench, Weighting};
use tdesign::io::{
    format_f64, read_json, sweep_csv, write_csv, write_json, CalibrationJson, ChiJson, CountsFile, Envelope, IdentityJson,
};
use tdesign::noise::{calibration_matrix, epsilon_vs_p_sweep, mitigate_with, noisy_ensemble, DEFAULT_SWEEP_RADII};
use tdesign::tomography::channel_fidelity;
use tdesign::{Outcome, PureState, TestReport};

use crate::args::*;
use crate::error::CliError;

fn emit<C: Serialize, R: Serialize>(command: &str, config: &C, result: R, output: Option<&Path>) -> Result<(), CliError> {
    let config = serde_json::to_value(config).map_err(|e| CliError::Config(e.to_string()))?;
    let envelope = Envelope::new(command, config, result);
    match output {
        Some(path) => Ok(write_json(path, &envelope)?),
        None => {
            let text = serde_json::to_string_pretty(&envelope).map_err(|e| CliError::Config(e.to_string()))?;
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Config(format!("stdout: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn check_angles(angles: &[f64]) -> Result<(), CliError> {
    if angles.is_empty() {
        return Err(CliError::Config("at least one measurement angle is needed".into()));
    }
    if let Some(a) = angles.iter().find(|a| !a.is_finite()) {
        return Err(CliError::Config(format!("angle {a} is not finite")));
    }
    Ok(())
}

fn acquisition(common: &Common, measured: usize) -> Result<Acquisition, CliError> {
    let readout = common.readout_model(measured)?;
    if common.mitigate && readout.is_none() {
        return Err(CliError::Config("--mitigate needs a --readout model".into()));
    }
    if common.shots == Some(0) {
        return Err(CliError::Config("--shots must be positive".into()));
    }
    Ok(Acquisition {
        shots: common.shots,
        seed: common.seed,
        readout,
        mitigation: common.mitigate.then(|| common.mitigation_mode.into()),
    })
}

fn ensemble(angles: &[f64], noise: &NoiseArgs) -> Result<UnitaryEnsemble<f64>, CliError> {
    check_angles(angles)?;
    Ok(match noise.noise.kind() {
        Some(kind) => noisy_ensemble(kind, angles, noise.p)?,
        None => {
            if noise.p != 0.0 {
                log::warn!("--p {} ignored without a --noise model", noise.p);
            }
            UnitaryEnsemble::from_angles(angles)
        }
    })
}

fn bitstring_map<V: Copy>(values: &[V], width: usize) -> BTreeMap<String, V> {
    values.iter().enumerate().map(|(i, &v)| (Outcome::from_index(i, width).to_string(), v)).collect()
}

fn branch_fidelities(ensemble: &UnitaryEnsemble<f64>, branches: &[BranchChi<f64>]) -> Result<Vec<f64>, CliError> {
    ensemble
        .members()
        .iter()
        .zip(branches)
        .map(|(m, b)| Ok(channel_fidelity(&m.channel.chi(), &b.chi)?))
        .collect()
}

#[derive(Debug, Serialize)]
struct FidelitySummary {
    min: f64,
    mean: f64,
}

impl FidelitySummary {
    fn of(f: &[f64]) -> Self {
        Self { min: f.iter().copied().fold(1.0, f64::min), mean: f.iter().sum::<f64>() / f.len().max(1) as f64 }
    }
}

#[derive(Debug, Serialize)]
struct DesignTestResult {
    angles: Vec<f64>,
    report: TestReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    search: Option<RadiusSearch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fraction: Option<PassingFraction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tomography: Option<FidelitySummary>,
}

pub fn design_test(args: &DesignTestArgs) -> Result<(), CliError> {
    let angles = args.ensemble.angles();
    let t = Order::new(args.t)?;
    let grid = args.grid.grid()?;
    let mut ens = ensemble(&angles, &args.noise)?;
    let mut tomography = None;
    if args.tomography {
        let acq = acquisition(&args.common, angles.len() + 1)?;
        let branches = channel_tomography(&ens, &acq)?;
        tomography = Some(FidelitySummary::of(&branch_fidelities(&ens, &branches)?));
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        let members = branches
            .into_iter()
            .map(|b| Member { outcome: b.outcome, probability: b.probability / total, channel: Channel::Chi(b.chi) })
            .collect();
        ens = UnitaryEnsemble::new(members)?;
    } else if args.common.shots.is_some() || args.common.readout.is_some() {
        log::warn!("--shots and --readout only take effect with --tomography");
    }

    let report = truncated_test(&ens, t, &grid, args.radius)?;
    log::info!("t = {} radius = {} epsilon = {}", args.t, args.radius, report.epsilon);
    let search = if args.search_radius { Some(truncation_radius_search(&ens, t, &grid, args.eps_max)?) } else { None };
    let fraction = if args.fraction {
        if args.cube_points < 2 {
            return Err(CliError::Config("--cube-points must be at least 2".into()));
        }
        Some(passing_fraction_on(&ens, t, &BlochSample::cube(args.cube_points), args.eps_max)?)
    } else {
        None
    };

    if let Some(path) = &args.csv {
        let rows: Vec<Vec<String>> =
            report.per_state_epsilon.iter().enumerate().map(|(i, e)| vec![i.to_string(), format_f64(*e)]).collect();
        write_csv(path, &["index", "epsilon"], &rows)?;
    }
    emit("design-test", args, DesignTestResult { angles, report, search, fraction, tomography }, args.common.output.as_deref())
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let angles = args.ensemble.angles();
    check_angles(&angles)?;
    let t = Order::new(args.t)?;
    let grid = args.grid.grid()?;
    let kind = args.model.kind().ok_or_else(|| CliError::Config("sweep needs --model terminal or stepwise".into()))?;
    if args.p_points < 2 {
        return Err(CliError::Config("--p-points must be at least 2".into()));
    }
    let p_grid: Vec<f64> = (0..args.p_points).map(|k| k as f64 / (args.p_points - 1) as f64).collect();
    let radii = args.radii.clone().unwrap_or_else(|| DEFAULT_SWEEP_RADII.to_vec());
    let rows = epsilon_vs_p_sweep(kind, &angles, t, &radii, &p_grid, &grid)?;
    if let Some(path) = &args.csv {
        write_text(path, &sweep_csv(&rows))?;
    }
    emit("sweep", args, rows, args.common.output.as_deref())
}

#[derive(Debug, Serialize)]
struct BranchResult {
    outcome: String,
    probability: f64,
    fidelity: f64,
    clipped: f64,
    rescaled: bool,
    chi: ChiJson,
}

#[derive(Debug, Serialize)]
struct TomographyResult {
    angles: Vec<f64>,
    fidelity: FidelitySummary,
    branches: Vec<BranchResult>,
}

pub fn tomography(args: &TomographyArgs) -> Result<(), CliError> {
    let angles = args.ensemble.angles();
    let ens = ensemble(&angles, &args.noise)?;
    let acq = acquisition(&args.common, angles.len() + 1)?;
    let branches = channel_tomography(&ens, &acq)?;
    let fidelities = branch_fidelities(&ens, &branches)?;
    let fidelity = FidelitySummary::of(&fidelities);
    log::info!("min fidelity {} mean {}", fidelity.min, fidelity.mean);
    let branches: Vec<BranchResult> = branches
        .iter()
        .zip(&fidelities)
        .map(|(b, &f)| BranchResult {
            outcome: b.outcome.to_string(),
            probability: b.probability,
            fidelity: f,
            clipped: b.clipped,
            rescaled: b.rescaled,
            chi: ChiJson::from(&b.chi),
        })
        .collect();
    if let Some(path) = &args.csv {
        let rows: Vec<Vec<String>> = branches
            .iter()
            .map(|b| vec![b.outcome.clone(), format_f64(b.probability), format_f64(b.fidelity)])
            .collect();
        write_csv(path, &["outcome", "probability", "fidelity"], &rows)?;
    }
    emit("tomography", args, TomographyResult { angles, fidelity, branches }, args.common.output.as_deref())
}

pub fn identity(args: &IdentityArgs) -> Result<(), CliError> {
    let acq = acquisition(&args.common, args.n)?;
    let weighting = match args.weighting {
        WeightingKind::Probability => Weighting::Probability,
        WeightingKind::Uniform => Weighting::Uniform,
    };
    let report = identity_bench::<f64>(args.n, args.p, &acq, weighting)?;
    log::info!("inferred p = {}", report.inferred_p);
    emit("identity", args, IdentityJson::from(&report), args.common.output.as_deref())
}

#[derive(Debug, Serialize)]
struct MitigateResult {
    n: usize,
    shots: u64,
    condition_number: f64,
    raw: BTreeMap<String, f64>,
    mitigated: BTreeMap<String, f64>,
}

pub fn mitigate(args: &MitigateArgs) -> Result<(), CliError> {
    let file: CountsFile = read_json(&args.counts)?;
    let counts = file.to_counts()?;
    let width = counts.width();
    if counts.total() == 0 {
        return Err(CliError::Config("counts file has no shots".into()));
    }
    let lambda = match &args.calibration {
        Some(path) => {
            let cal: CalibrationJson = read_json(path)?;
            if cal.n != width {
                return Err(CliError::Config(format!("calibration covers {} qubits, counts have {width}", cal.n)));
            }
            cal.to_matrix()?
        }
        None => match args.common.readout_model(width)? {
            Some(model) => calibration_matrix(&model),
            None => return Err(CliError::Config("mitigate needs --calibration or --readout".into())),
        },
    };
    let raw = counts.frequencies::<f64>();
    let mitigated = mitigate_with(&lambda, &raw, args.common.mitigation_mode.into())?;
    let result = MitigateResult {
        n: width,
        shots: counts.total(),
        condition_number: lambda.condition_number()?,
        raw: bitstring_map(&raw, width),
        mitigated: bitstring_map(&mitigated, width),
    };
    emit("mitigate", args, result, args.common.output.as_deref())
}

#[derive(Debug, Serialize)]
struct FrequenciesResult {
    n: usize,
    angles: Vec<f64>,
    ideal: BTreeMap<String, f64>,
    observed: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    counts: Option<BTreeMap<String, u64>>,
}

pub fn frequencies(args: &FrequenciesArgs) -> Result<(), CliError> {
    let angles = args.ensemble.angles();
    check_angles(&angles)?;
    let width = angles.len();
    let n = width + 1;
    let acq = acquisition(&args.common, width)?;
    let input = match args.input {
        InputState::Zero => PureState::zero(),
        InputState::One => PureState::one(),
        InputState::Plus => PureState::plus(),
        InputState::PlusY => PureState::plus_y(),
    };
    let run = outcome_frequencies(&input, &angles, &acq)?;

    if let Some(path) = &args.counts_output {
        let counts = run.counts.as_ref().ok_or_else(|| CliError::Config("--counts-output needs --shots".into()))?;
        write_json(path, &CountsFile::new(n, counts, args.common.seed, &angles))?;
    }
    if let Some(path) = &args.calibration_output {
        let model = acq.readout.as_ref().ok_or_else(|| CliError::Config("--calibration-output needs --readout".into()))?;
        write_json(path, &CalibrationJson::from(&calibration_matrix::<f64>(model)))?;
    }
    let result = FrequenciesResult {
        n,
        ideal: bitstring_map(&run.ideal, width),
        observed: bitstring_map(&run.observed, width),
        counts: run.counts.as_ref().map(|c| c.to_map()),
        angles,
    };
    emit("frequencies", args, result, args.common.output.as_deref())
}
