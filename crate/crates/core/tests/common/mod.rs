//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use tdesign::numerics::{tensor_power, ComplexMatrix};
use tdesign::tomography::DensityMatrix;
use tdesign::C64;

pub type M = ComplexMatrix<f64>;
pub type D = DensityMatrix<f64>;

/// Haar-random SU(2) element from a uniformly random unit quaternion.
pub fn haar_unitary(rng: &mut impl Rng) -> M {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [a, b, c, d] = q.map(|x| x / n);
    M::from_vec(2, 2, vec![C64::new(a, b), C64::new(c, d), C64::new(-c, d), C64::new(a, -b)])
}

/// Uniformly random point in the Bloch ball.
pub fn random_state(rng: &mut impl Rng) -> D {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return D::from_bloch(v[0], v[1], v[2]);
        }
    }
}

/// Monte-Carlo estimate of the Haar moment E[(UρU†)^{⊗t}].
pub fn monte_carlo_haar_moment(rho: &D, t: usize, samples: usize, seed: u64) -> M {
    const CHUNKS: usize = 16;
    let per = samples / CHUNKS;
    let d = 1usize << t;
    let parts: Vec<M> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1000).wrapping_add(c as u64));
            let mut acc = M::zeros(d, d);
            for _ in 0..per {
                let u = haar_unitary(&mut rng);
                acc.add_scaled(&tensor_power(&rho.matrix().conjugate_by(&u), t), 1.0);
            }
            acc
        })
        .collect();
    let mut total = M::zeros(d, d);
    for p in &parts {
        total.add_scaled(p, 1.0);
    }
    total.scale_real(1.0 / (per * CHUNKS) as f64)
}

/// Closest simplex point by enumerating every candidate support set.
pub fn simplex_projection_oracle(v: &[f64]) -> Vec<f64> {
    let d = v.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << d) {
        let support: Vec<usize> = (0..d).filter(|i| mask & (1 << i) != 0).collect();
        let shift = (support.iter().map(|&i| v[i]).sum::<f64>() - 1.0) / support.len() as f64;
        let mut x = vec![0.0; d];
        let mut feasible = true;
        for &i in &support {
            x[i] = v[i] - shift;
            if x[i] < -1e-15 {
                feasible = false;
            }
        }
        if !feasible {
            continue;
        }
        let dist: f64 = x.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|(bd, _)| dist < *bd) {
            best = Some((dist, x));
        }
    }
    best.expect("some support is feasible").1
}

/// Random probability vector with entries bounded away from zero.
pub fn random_distribution(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}
