//! Acceptance checks. Each test prints one PASS/FAIL line with the measured
//! value and tolerance, then asserts.

mod common;

use std::time::Instant;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdesign::cluster::{build_linear_cluster, logical_unitary, measure_chain, PureState};
use tdesign::design::{
    design_test, ensemble_moment, exact_three_design_angles, passing_fraction, truncated_test,
    BlochSample, Order, SphericalGrid, UnitaryEnsemble,
};
use tdesign::experiment::{channel_tomography, Acquisition};
use tdesign::identity::{identity_bench, Weighting};
use tdesign::noise::{
    apply_readout_noise, calibration_matrix, epsilon_at, epsilon_vs_p_sweep, mitigate, project_to_simplex, total_variation,
    ConfusionModel, DepolarisingKind, DEFAULT_SWEEP_RADII,
};
use tdesign::tomography::{channel_fidelity, DensityMatrix};

fn report(id: u32, what: &str, ok: bool, detail: String) {
    println!("{} criterion {id:>2}: {what}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {what}: {detail}");
}

fn sample() -> BlochSample<f64> {
    SphericalGrid::default().sample(1.0)
}

#[test]
fn criterion_01_exact_design_has_zero_epsilon() {
    let start = Instant::now();
    let e = UnitaryEnsemble::<f64>::exact_three_design();
    let s = sample();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let eps: Vec<f64> = single.install(|| {
        [Order::ONE, Order::TWO, Order::THREE].iter().map(|&t| design_test(&e, t, &s, 1.0).unwrap().epsilon).collect()
    });
    let secs = start.elapsed().as_secs_f64();
    let ok = eps.iter().all(|&x| x <= 1e-9) && secs < 60.0;
    report(1, "exact 3-design, r = 1, t = 1..3", ok, format!("eps = {} (tol 1e-9), {secs:.2} s (single thread, limit 60 s)", eps.iter().map(|x| format!("{x:.1e}")).collect::<Vec<_>>().join(" ")));
}

#[test]
fn criterion_02_approx_design_full_ball() {
    let e = UnitaryEnsemble::<f64>::approx_two_design();
    let eps = design_test(&e, Order::TWO, &sample(), 1.0).unwrap().epsilon;
    report(2, "approximate 2-design, t = 2, r = 1", (eps - 0.5).abs() <= 0.01, format!("eps = {eps:.4} (0.5 ± 0.01)"));
}

#[test]
fn criterion_03_approx_design_truncated() {
    let e = UnitaryEnsemble::<f64>::approx_two_design();
    let grid = SphericalGrid::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for (r, want) in [(0.69, 0.2739), (0.81, 0.3589)] {
        let eps = truncated_test(&e, Order::TWO, &grid, r).unwrap().epsilon;
        ok &= (eps - want).abs() <= 0.005;
        parts.push(format!("r = {r}: eps = {eps:.4} ({want} ± 0.005)"));
    }
    report(3, "approximate 2-design, truncated", ok, parts.join(", "));
}

#[test]
fn criterion_04_noise_sweeps() {
    let grid = SphericalGrid::default();
    let p_grid: Vec<f64> = (0..=40).map(|k| k as f64 / 40.0).collect();
    let mut ok = true;
    let mut notes = Vec::new();

    for kind in [DepolarisingKind::Terminal, DepolarisingKind::Stepwise] {
        let one = epsilon_vs_p_sweep(kind, &exact_three_design_angles::<f64>(), Order::ONE, &DEFAULT_SWEEP_RADII, &p_grid, &grid)
            .unwrap();
        let worst = one.iter().map(|r| r.epsilon).fold(0.0, f64::max);
        ok &= worst <= 1e-9;
        notes.push(format!("{kind} t=1 max eps {worst:.1e}"));

        let two = epsilon_vs_p_sweep(kind, &exact_three_design_angles::<f64>(), Order::TWO, &DEFAULT_SWEEP_RADII, &p_grid, &grid)
            .unwrap();
        let three =
            epsilon_vs_p_sweep(kind, &exact_three_design_angles::<f64>(), Order::THREE, &DEFAULT_SWEEP_RADII, &p_grid, &grid)
                .unwrap();
        let mut gap: f64 = 0.0;
        for (a, b) in two.iter().zip(&three) {
            if a.epsilon.is_infinite() || b.epsilon.is_infinite() {
                ok &= a.epsilon == b.epsilon;
            } else {
                gap = gap.max((a.epsilon - b.epsilon).abs());
            }
        }
        ok &= gap <= 1e-6;
        let monotone = two.windows(2).filter(|w| w[0].radius == w[1].radius).all(|w| w[1].epsilon >= w[0].epsilon - 1e-9);
        ok &= monotone;
        notes.push(format!("{kind} |t2 - t3| {gap:.1e}, monotone {monotone}"));
    }
    report(4, "noise sweeps over p", ok, notes.join("; "));
}

#[test]
fn criterion_05_stepwise_tabulated_cells() {
    let grid = SphericalGrid::default();
    let angles = exact_three_design_angles::<f64>();
    let mut ok = true;
    let mut parts = Vec::new();
    for (t, r, p, want) in [(Order::TWO, 0.68, 0.06, 0.4543), (Order::THREE, 0.66, 0.07, 0.4590)] {
        let eps = epsilon_at(DepolarisingKind::Stepwise, &angles, t, r, p, &grid).unwrap();
        ok &= (eps - want).abs() <= 0.05;
        parts.push(format!("t = {}, r = {r}, p = {p}: eps = {eps:.4} ({want} ± 0.05)", t.get()));
    }
    report(5, "stepwise depolarised exact design", ok, parts.join(", "));
}

#[test]
fn criterion_06_passing_fraction() {
    let noisy = tdesign::noise::noisy_ensemble_stepwise(&exact_three_design_angles::<f64>(), 0.06).unwrap();
    let f2 = passing_fraction(&noisy, Order::TWO, 0.5).unwrap();
    let f1_exact = passing_fraction(&UnitaryEnsemble::<f64>::exact_three_design(), Order::ONE, 0.5).unwrap();
    let f1_approx = passing_fraction(&UnitaryEnsemble::<f64>::approx_two_design(), Order::ONE, 0.5).unwrap();
    let ok = (f2.fraction - 0.38).abs() <= 0.05 && f1_exact.fraction == 1.0 && f1_approx.fraction == 1.0;
    report(
        6,
        "cube passing fraction",
        ok,
        format!(
            "stepwise p = 0.06 t = 2: {:.3} of {} states (0.38 ± 0.05); t = 1 ideal: {} / {}",
            f2.fraction, f2.n_states, f1_exact.fraction, f1_approx.fraction
        ),
    );
}

#[test]
fn criterion_07_tomography() {
    let e = UnitaryEnsemble::<f64>::exact_three_design();
    let exact = channel_tomography(&e, &Acquisition::exact()).unwrap();
    let sampled = channel_tomography(&e, &Acquisition::sampled(40_000, 7)).unwrap();
    let fid = |b: &tdesign::experiment::BranchChi<f64>| {
        let m = e.members().iter().find(|m| m.outcome == b.outcome).unwrap();
        channel_fidelity(&m.channel.chi(), &b.chi).unwrap()
    };
    let worst_exact = exact.iter().map(fid).fold(1.0, f64::min);
    let worst_sampled = sampled.iter().map(fid).fold(1.0, f64::min);
    let ok = exact.len() == 32 && worst_exact >= 1.0 - 1e-9 && worst_sampled >= 0.995;
    report(
        7,
        "process tomography of 32 branches",
        ok,
        format!("exact min F = {worst_exact:.12} (>= 1 - 1e-9), 40000 shots min F = {worst_sampled:.5} (>= 0.995)"),
    );
}

#[test]
fn criterion_08_mitigation() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    let mut roundtrip: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(1..=6);
        let model =
            ConfusionModel::new((0..n).map(|_| (rng.random_range(0.0..0.1), rng.random_range(0.0..0.1))).collect()).unwrap();
        let lam = calibration_matrix::<f64>(&model);
        let p = random_distribution(&mut rng, 1 << n);
        let back = mitigate(&lam, &lam.apply(&p)).unwrap();
        roundtrip = roundtrip.max(p.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }

    let model = ConfusionModel::new(vec![(0.02, 0.05), (0.04, 0.08), (0.03, 0.06)]).unwrap();
    let lam = calibration_matrix::<f64>(&model);
    let mut improved = 0;
    for trial in 0..100u64 {
        let truth = random_distribution(&mut rng, 8);
        let counts = apply_readout_noise(&truth, &model, 1000 + trial, 8000).unwrap();
        let raw = counts.frequencies::<f64>();
        let fixed = mitigate(&lam, &raw).unwrap();
        if total_variation(&fixed, &truth) < total_variation(&raw, &truth) {
            improved += 1;
        }
    }

    let mut proj_gap: f64 = 0.0;
    for _ in 0..200 {
        let d = rng.random_range(1..=8);
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-0.5..1.0)).collect();
        let got = project_to_simplex(&v);
        let want = simplex_projection_oracle(&v);
        proj_gap = proj_gap.max(got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }

    let ok = roundtrip <= 1e-10 && improved >= 95 && proj_gap <= 1e-10;
    report(
        8,
        "readout mitigation",
        ok,
        format!("round trip {roundtrip:.1e} (1e-10), TV improved {improved}/100 (>= 95), projection gap {proj_gap:.1e}"),
    );
}

#[test]
fn criterion_09_identity_bench() {
    let acq = Acquisition::exact();
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [3, 5, 7] {
        let r = identity_bench::<f64>(n, 0.0, &acq, Weighting::Probability).unwrap();
        let chi00 = r.chi_average.entry(0, 0).re;
        ok &= chi00 >= 1.0 - 1e-9;
        notes.push(format!("n = {n} p = 0 chi00 = {chi00:.12}"));
    }
    let mut worst: f64 = 0.0;
    for p in [0.01, 0.042, 0.1] {
        let mut prev = f64::INFINITY;
        for n in [3, 5, 7] {
            let r = identity_bench::<f64>(n, p, &acq, Weighting::Probability).unwrap();
            worst = worst.max((r.inferred_p - p).abs());
            let chi00 = r.chi_average.entry(0, 0).re;
            ok &= chi00 < prev;
            prev = chi00;
        }
    }
    ok &= worst <= 1e-4;
    notes.push(format!("max |p_inferred - p| = {worst:.1e} (1e-4), chi00 decreasing in n"));
    report(9, "identity benchmark", ok, notes.join(", "));
}

#[test]
fn criterion_10_branch_uniformity_and_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut prob_gap: f64 = 0.0;
    let mut state_gap: f64 = 0.0;
    for n in 2..=8 {
        let uniform = 1.0 / (1u64 << (n - 1)) as f64;
        for _ in 0..50 {
            let angles: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.0..std::f64::consts::PI)).collect();
            let u0 = haar_unitary(&mut rng);
            let amps = vec![u0[(0, 0)], u0[(1, 0)]];
            let input = PureState::new(amps).unwrap();
            let rho = input.density();
            let branches = measure_chain(&build_linear_cluster(n, &input).unwrap(), &angles).unwrap();
            for b in &branches {
                prob_gap = prob_gap.max((b.probability - uniform).abs());
                let u = logical_unitary(&b.outcome, &angles).unwrap();
                let want = rho.matrix().conjugate_by(&u);
                state_gap = state_gap.max(b.output_state.matrix().max_abs_diff(&want));
            }
        }
    }
    let ok = prob_gap <= 1e-10 && state_gap <= 1e-10;
    report(
        10,
        "chain branches, n = 2..8 x 50 angle sets",
        ok,
        format!("max |P - 2^-(n-1)| = {prob_gap:.1e}, max state error = {state_gap:.1e} (1e-10)"),
    );
}

#[test]
fn criterion_11_monte_carlo_haar() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let e = UnitaryEnsemble::<f64>::exact_three_design();
    let states: Vec<DensityMatrix<f64>> = (0..20).map(|_| random_state(&mut rng)).collect();
    let mut worst: f64 = 0.0;
    for (i, rho) in states.iter().enumerate() {
        for t in 1..=3 {
            let mc = monte_carlo_haar_moment(rho, t, 100_000, (i * 3 + t) as u64);
            let d = ensemble_moment(&e, rho, Order::new(t).unwrap());
            worst = worst.max((&mc - &d).operator_norm());
        }
    }
    report(11, "exact design vs sampled Haar moments", worst <= 5e-3, format!("max operator-norm gap {worst:.2e} (5e-3)"));
}
