#![allow(dead_code)]

use std::f64::consts::PI;

use le_hierarchy::ensembles::gghz;
use le_hierarchy::linalg::{ComplexMatrix, DensityMatrix, PureState, C64};
use le_hierarchy::measurement::{measurement_branches, MeasurementSetting, PauliAxis};
use le_hierarchy::noise::{apply_local_noise, ChannelKind, NoiseConfig};
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

pub fn random_mixed(n: usize, rank: usize, seed: u64) -> DensityMatrix {
    let dim = 1 << n;
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut m = ComplexMatrix::zeros(dim);
    let weights: Vec<f64> = (0..rank).map(|_| rng.gen::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    for w in weights {
        let v: Vec<C64> = (0..dim).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        let psi = PureState::normalized(v).unwrap().to_density();
        m = &m + &psi.matrix().scale_real(w / total);
    }
    DensityMatrix::new(m).unwrap()
}

/// Largest entry-wise gap between branch states of two inputs measured the same way.
pub fn branch_gap(a: &DensityMatrix, b: &DensityMatrix, axis: PauliAxis) -> f64 {
    let setting = MeasurementSetting::pauli(vec![2], &[axis]).unwrap();
    let ba = measurement_branches(a, &setting).unwrap();
    let bb = measurement_branches(b, &setting).unwrap();
    ba.iter()
        .zip(&bb)
        .map(|(x, y)| {
            let prob = (x.probability - y.probability).abs();
            let state = match (&x.state, &y.state) {
                (Some(s), Some(t)) => s.matrix().max_abs_diff(t.matrix()),
                (None, None) => 0.0,
                _ => f64::INFINITY,
            };
            prob.max(state)
        })
        .fold(0.0, f64::max)
}

pub fn retention(kind: ChannelKind, axis: PauliAxis, p: f64) -> f64 {
    let clean = gghz(PI / 3.0, 0.4).unwrap().to_density();
    let noisy = apply_local_noise(&clean, &NoiseConfig::new(kind, p, vec![2]).unwrap()).unwrap();
    branch_gap(&noisy, &clean, axis)
}

pub fn qubit0_purity(amps: &[C64]) -> f64 {
    // ρ₁ = [[a, c], [c*, b]] summed over the last two qubits
    let (mut a, mut b, mut c) = (0.0, 0.0, C64::new(0.0, 0.0));
    for k in 0..4 {
        a += amps[k].norm_sqr();
        b += amps[4 + k].norm_sqr();
        c += amps[k] * amps[4 + k].conj();
    }
    a * a + b * b + 2.0 * c.norm_sqr()
}

pub fn ks_distance(mut xs: Vec<f64>, mut ys: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < xs.len() && j < ys.len() {
        if xs[i] <= ys[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / xs.len() as f64 - j as f64 / ys.len() as f64).abs());
    }
    d
}

/// Haar-ish product of two single-qubit unitaries from Euler angles.
pub fn random_local_unitary(seed: u64) -> ComplexMatrix {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut one = || {
        let (a, b, c): (f64, f64, f64) = (rng.gen::<f64>() * PI, rng.gen::<f64>() * 2.0 * PI, rng.gen::<f64>() * 2.0 * PI);
        let (s, co) = a.sin_cos();
        ComplexMatrix::from_rows(&[
            vec![C64::from_polar(co, b), C64::from_polar(s, c)],
            vec![-C64::from_polar(s, -c), C64::from_polar(co, -b)],
        ])
    };
    let u = one();
    let v = one();
    le_hierarchy::linalg::tensor_product(&u, &v)
}
