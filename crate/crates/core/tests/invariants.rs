mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tdesign::cluster::{sample_counts, Outcome};
use tdesign::design::{epsilons, Order, UnitaryEnsemble};
use tdesign::noise::{calibration_matrix, depolarise, mitigate, project_to_simplex, ConfusionModel};
use tdesign::numerics::{hermitian_eig, kron, psd_sqrt, spectral_map, ComplexMatrix};
use tdesign::tomography::{apply_chi, chi_of_unitary, DensityMatrix};
use tdesign::C64;

fn matrix(n: usize) -> impl Strategy<Value = M> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| ComplexMatrix::from_vec(n, n, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()))
}

fn bloch() -> impl Strategy<Value = (f64, f64, f64)> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_filter("inside ball", |(x, y, z)| x * x + y * y + z * z <= 1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(a in matrix(2), b in matrix(2), c in matrix(2)) {
        let l = kron(&kron(&a, &b), &c);
        let r = kron(&a, &kron(&b, &c));
        prop_assert!(l.max_abs_diff(&r) < 1e-12);
    }

    #[test]
    fn kron_mixed_product(a in matrix(2), b in matrix(2), c in matrix(2), d in matrix(2)) {
        let l = kron(&a, &b).matmul(&kron(&c, &d));
        let r = kron(&a.matmul(&c), &b.matmul(&d));
        prop_assert!(l.max_abs_diff(&r) < 1e-12);
    }

    #[test]
    fn eigendecomposition_reconstructs(a in matrix(4)) {
        let h = &a + &a.adjoint();
        let (vals, vecs) = hermitian_eig(&h).unwrap();
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(spectral_map(&vals, &vecs, |x| x).max_abs_diff(&h) < 1e-10);
        prop_assert!(vecs.unitarity_defect() < 1e-10);
    }

    #[test]
    fn psd_sqrt_squares_back(a in matrix(4)) {
        let p = a.matmul(&a.adjoint());
        let s = psd_sqrt(&p).unwrap();
        prop_assert!(s.matmul(&s).max_abs_diff(&p) < 1e-9);
        prop_assert!(s.hermitian_deviation() < 1e-10);
    }

    #[test]
    fn simplex_projection_matches_oracle(v in proptest::collection::vec(-2.0f64..2.0, 1..=8)) {
        let got = project_to_simplex(&v);
        let want = simplex_projection_oracle(&v);
        prop_assert!((got.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(got.iter().all(|&x| x >= 0.0));
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-10);
        }
        let again = project_to_simplex(&got);
        for (g, a) in got.iter().zip(&again) {
            prop_assert!((g - a).abs() < 1e-12);
        }
    }

    #[test]
    fn mitigation_inverts_readout(
        flips in proptest::collection::vec((0.0f64..0.2, 0.0f64..0.2), 1..=4),
        seed in any::<u64>(),
    ) {
        let model = ConfusionModel::new(flips.clone()).unwrap();
        let lam = calibration_matrix::<f64>(&model);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_distribution(&mut rng, 1 << flips.len());
        let back = mitigate(&lam, &lam.apply(&p)).unwrap();
        for (a, b) in p.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn depolarising_shrinks_bloch_vector((x, y, z) in bloch(), p in 0.0f64..=1.0) {
        let rho = DensityMatrix::from_bloch(x, y, z);
        let out = depolarise(&rho, p).unwrap();
        let r = rho.bloch_radius();
        prop_assert!((out.bloch_radius() - (1.0 - p) * r).abs() < 1e-12);
    }

    #[test]
    fn chi_of_unitary_reproduces_conjugation(seed in any::<u64>(), (x, y, z) in bloch()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = haar_unitary(&mut rng);
        let chi = chi_of_unitary(&u).unwrap();
        prop_assert!((chi.trace() - 1.0).abs() < 1e-12);
        let rho = DensityMatrix::from_bloch(x, y, z);
        let out = apply_chi(&chi, &rho).unwrap();
        prop_assert!(out.matrix().max_abs_diff(&rho.matrix().conjugate_by(&u)) < 1e-12);
    }

    #[test]
    fn outcome_strings_round_trip(width in 1usize..10, raw in any::<usize>()) {
        let o = Outcome::from_index(raw % (1 << width), width);
        let back: Outcome = o.to_string().parse().unwrap();
        prop_assert_eq!(o, back);
    }

    #[test]
    fn sampling_is_deterministic_and_complete(seed in any::<u64>(), shots in 0u64..5000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_distribution(&mut rng, 8);
        let a = sample_counts(&p, 3, shots, seed).unwrap();
        let b = sample_counts(&p, 3, shots, seed).unwrap();
        prop_assert_eq!(a.total(), shots);
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn epsilon_ignores_member_order(rot in 0usize..32, (x, y, z) in bloch()) {
        let e = UnitaryEnsemble::<f64>::approx_two_design();
        let mut members = e.members().to_vec();
        let k = rot % members.len();
        members.rotate_left(k);
        members.reverse();
        let shuffled = UnitaryEnsemble::new(members).unwrap();
        let rho = DensityMatrix::from_bloch(x, y, z);
        for t in [Order::ONE, Order::TWO, Order::THREE] {
            let a = epsilons(&e, t, &[&rho]).unwrap()[0];
            let b = epsilons(&shuffled, t, &[&rho]).unwrap()[0];
            prop_assert!((a - b).abs() < 1e-9 || (a.is_infinite() && b.is_infinite()));
        }
    }
}
