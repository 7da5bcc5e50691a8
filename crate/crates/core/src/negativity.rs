//! Negativity of two-qubit states, using the sum of absolute negative eigenvalues of the partial transpose.

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, DensityMatrix, Subsystem};

/// Partial-transpose eigenvalues above `-NEGATIVE_EIGEN_THRESHOLD` count as zero.
pub const NEGATIVE_EIGEN_THRESHOLD: f64 = 1e-12;

/// `Σ |λ|` over negative eigenvalues of `ρ^{T_A}`. A Bell pair gives `0.5`.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    if rho.num_qubits() != 2 {
        return Err(Error::Domain(format!(
            "negativity needs a two-qubit state, got {} qubits",
            rho.num_qubits()
        )));
    }
    let pt = linalg::partial_transpose_4(rho.matrix(), Subsystem::First);
    let eig = linalg::hermitian_eigenvalues(&pt)?;
    let negative: Vec<f64> = eig.into_iter().filter(|&l| l < -NEGATIVE_EIGEN_THRESHOLD).collect();
    if negative.len() > 1 {
        return Err(Error::InvalidState(format!(
            "partial transpose has {} negative eigenvalues",
            negative.len()
        )));
    }
    Ok(negative.iter().map(|l| -l).sum())
}

/// Negativity of `m / Tr m` multiplied by `Tr m`, for an unnormalized positive 4×4 matrix.
///
/// This is the contribution `p_k E(ρ_k)` of one measurement branch, computed without dividing by `p_k`.
#[cfg(test)]
pub(crate) fn weighted_negativity(m: &ComplexMatrix) -> f64 {
    let weight = m.trace().re;
    if weight < crate::measurement::ZERO_BRANCH_THRESHOLD {
        return 0.0;
    }
    let mut pt = linalg::partial_transpose_4(m, Subsystem::First);
    let eig = linalg::jacobi_in_place(&mut pt);
    let cut = -NEGATIVE_EIGEN_THRESHOLD * weight;
    eig.iter().filter(|&&l| l < cut).map(|l| -l).sum()
}

/// Characteristic polynomial of a 4×4 partial transpose, from power sums via Newton's identities.
struct PtPoly {
    e: [f64; 4],
    mean: f64,
    spread: f64,
}

impl PtPoly {
    fn new(m: &ComplexMatrix) -> Self {
        let a = linalg::partial_transpose_4(m, Subsystem::First);
        let d = a.data();
        let mut sq = [linalg::ZERO; 16];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = linalg::ZERO;
                for k in 0..4 {
                    acc += d[4 * i + k] * d[4 * k + j];
                }
                sq[4 * i + j] = acc;
            }
        }
        let p1: f64 = (0..4).map(|i| d[5 * i].re).sum();
        let p2: f64 = (0..4).map(|i| sq[5 * i].re).sum();
        let mut p3 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                p3 += (sq[4 * i + j] * d[4 * j + i]).re;
            }
        }
        let p4: f64 = sq.iter().map(|z| z.norm_sqr()).sum();
        let e1 = p1;
        let e2 = (e1 * p1 - p2) / 2.0;
        let e3 = (e2 * p1 - e1 * p2 + p3) / 3.0;
        let e4 = (e3 * p1 - e2 * p2 + e1 * p3 - p4) / 4.0;
        let mean = p1 / 4.0;
        // no eigenvalue lies below mean - spread
        let spread = (3.0 * (p2 / 4.0 - mean * mean).max(0.0)).sqrt();
        Self { e: [e1, e2, e3, e4], mean, spread }
    }

    fn eval(&self, x: f64) -> f64 {
        let [e1, e2, e3, e4] = self.e;
        (((x - e1) * x + e2) * x - e3) * x + e4
    }

    /// Newton from the guaranteed lower bound, which approaches the smallest root from the left.
    fn smallest_root(&self, stop_above: f64) -> f64 {
        let [e1, e2, e3, _] = self.e;
        let deriv = |x: f64| ((4.0 * x - 3.0 * e1) * x + 2.0 * e2) * x - e3;
        let mut x = self.mean - self.spread;
        for _ in 0..200 {
            let step = self.eval(x) / deriv(x);
            if !step.is_finite() {
                break;
            }
            let next = x - step;
            if next <= x || next > stop_above {
                break;
            }
            x = next;
        }
        x
    }
}

/// Branch-weighted negativity for use inside optimizers.
///
/// The smallest partial-transpose eigenvalue is the leftmost root of the
/// characteristic polynomial. Accuracy is a few ulps of the spectral scale
/// away from double roots and about `1e-8` next to one, which is plenty for
/// ranking candidates but not for reporting values.
pub(crate) fn weighted_negativity_search(m: &ComplexMatrix) -> f64 {
    let weight = m.trace().re;
    if weight < crate::measurement::ZERO_BRANCH_THRESHOLD {
        return 0.0;
    }
    let poly = PtPoly::new(m);
    let cut = -NEGATIVE_EIGEN_THRESHOLD * weight;
    // at most one root lies below zero, so a positive value here means none lies below the cut
    if poly.eval(cut) >= 0.0 {
        return 0.0;
    }
    -poly.smallest_root(cut)
}

/// `-λ_min` of the partial transpose of an unnormalized matrix, negative for PPT branches.
///
/// Serves as a signed distance to entanglement where the negativity is flat at zero.
pub(crate) fn signed_pt_margin_search(m: &ComplexMatrix) -> f64 {
    if m.trace().re < crate::measurement::ZERO_BRANCH_THRESHOLD {
        return 0.0;
    }
    -PtPoly::new(m).smallest_root(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{tensor_product, PureState, C64, ZERO};
    use crate::noise::{apply_local_noise, ChannelKind, NoiseConfig};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> DensityMatrix {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        PureState::new(vec![h, ZERO, ZERO, h]).unwrap().to_density()
    }

    fn random_state(seed: &[f64]) -> DensityMatrix {
        // rank-2 mixture of two pure states built from the seed values
        let a: Vec<C64> = (0..4).map(|k| C64::new(seed[2 * k], seed[2 * k + 1])).collect();
        let b: Vec<C64> = (0..4).map(|k| C64::new(seed[8 + 2 * k], seed[9 + 2 * k])).collect();
        let pa = PureState::normalized(a).unwrap().to_density();
        let pb = PureState::normalized(b).unwrap().to_density();
        let w = seed[16].abs().min(1.0);
        let m = &pa.matrix().scale_real(w) + &pb.matrix().scale_real(1.0 - w);
        DensityMatrix::new(m).unwrap()
    }

    fn unitary(a: f64, b: f64, c: f64) -> ComplexMatrix {
        let (s, co) = (a.sin(), a.cos());
        ComplexMatrix::from_rows(&[
            vec![C64::from_polar(co, b), C64::from_polar(s, c)],
            vec![-C64::from_polar(s, -c), C64::from_polar(co, -b)],
        ])
    }

    /// `(‖ρ^{T_A}‖₁ - 1) / 2`, from the full spectrum.
    fn trace_norm_oracle(rho: &DensityMatrix) -> f64 {
        let pt = linalg::partial_transpose(rho.matrix(), Subsystem::First).unwrap();
        let eig = linalg::hermitian_eigenvalues(&pt).unwrap();
        (eig.iter().map(|l| l.abs()).sum::<f64>() - 1.0) / 2.0
    }

    #[test]
    fn known_values() {
        assert!((negativity(&bell()).unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(negativity(&PureState::basis(2, 0).to_density()).unwrap(), 0.0);
        assert_eq!(negativity(&DensityMatrix::maximally_mixed(2)).unwrap(), 0.0);
        assert!(negativity(&DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn weighted_form_is_homogeneous() {
        let rho = random_state(&[0.3, -1.0, 0.2, 0.5, 1.1, 0.0, -0.4, 0.9, 0.1, 0.2, -0.8, 0.6, 0.3, 0.3, -0.2, 1.4, 0.85]);
        let e = negativity(&rho).unwrap();
        assert!(e > 0.0);
        let w = weighted_negativity(&rho.matrix().scale_real(0.37));
        assert!((w - 0.37 * e).abs() < 1e-14);
    }

    #[test]
    fn bell_stays_bounded_under_noise() {
        let e0 = negativity(&bell()).unwrap();
        for kind in ChannelKind::ALL {
            for i in 0..=10 {
                let p = i as f64 / 10.0;
                for noisy in [vec![0], vec![1], vec![0, 1]] {
                    let cfg = NoiseConfig::new(kind, p, noisy).unwrap();
                    let e = negativity(&apply_local_noise(&bell(), &cfg).unwrap()).unwrap();
                    assert!(e <= e0 + 1e-12, "{kind} p={p}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn search_variant_tracks_jacobi(seed in prop::collection::vec(-2.0f64..2.0, 17), w in 0.01f64..1.0) {
            let m = random_state(&seed).matrix().scale_real(w);
            prop_assert!((weighted_negativity_search(&m) - weighted_negativity(&m)).abs() < 1e-11);
        }

        #[test]
        fn signed_margin_tracks_smallest_eigenvalue(seed in prop::collection::vec(-2.0f64..2.0, 17), w in 0.01f64..1.0) {
            let m = random_state(&seed).matrix().scale_real(w);
            let mut pt = linalg::partial_transpose_4(&m, Subsystem::First);
            let min = linalg::jacobi_in_place(&mut pt).into_iter().fold(f64::INFINITY, f64::min);
            prop_assert!((signed_pt_margin_search(&m) + min).abs() < 1e-7);
        }

        #[test]
        fn bounded_and_matches_trace_norm(seed in prop::collection::vec(-2.0f64..2.0, 17)) {
            let rho = random_state(&seed);
            let e = negativity(&rho).unwrap();
            prop_assert!((0.0..=0.5 + 1e-12).contains(&e));
            prop_assert!((e - trace_norm_oracle(&rho).max(0.0)).abs() < 1e-10);
        }

        #[test]
        fn local_unitary_invariance(
            seed in prop::collection::vec(-2.0f64..2.0, 17),
            angles in prop::collection::vec(0.0f64..6.3, 6),
        ) {
            let rho = random_state(&seed);
            let u = tensor_product(&unitary(angles[0], angles[1], angles[2]), &unitary(angles[3], angles[4], angles[5]));
            let rotated = DensityMatrix::new(rho.matrix().conjugate_by(&u).hermitian_part()).unwrap();
            prop_assert!((negativity(&rho).unwrap() - negativity(&rotated).unwrap()).abs() < 1e-10);
        }
    }
}
