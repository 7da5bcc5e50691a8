//! Single-qubit Kraus channels and their uncorrelated application to a set of qubits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{pauli, ComplexMatrix, DensityMatrix, C64, ONE, ZERO};

/// Single-qubit noise model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChannelKind {
    #[serde(rename = "bf")]
    BitFlip,
    #[serde(rename = "pf")]
    PhaseFlip,
    #[serde(rename = "dp")]
    Depolarizing,
    #[serde(rename = "ad")]
    AmplitudeDamping,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 4] = [
        ChannelKind::BitFlip,
        ChannelKind::PhaseFlip,
        ChannelKind::Depolarizing,
        ChannelKind::AmplitudeDamping,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::BitFlip => "bf",
            ChannelKind::PhaseFlip => "pf",
            ChannelKind::Depolarizing => "dp",
            ChannelKind::AmplitudeDamping => "ad",
        }
    }

    /// Number of Kraus operators.
    pub fn kraus_rank(self) -> usize {
        match self {
            ChannelKind::Depolarizing => 4,
            _ => 2,
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bf" => Ok(ChannelKind::BitFlip),
            "pf" => Ok(ChannelKind::PhaseFlip),
            "dp" => Ok(ChannelKind::Depolarizing),
            "ad" => Ok(ChannelKind::AmplitudeDamping),
            other => domain(format!("unknown channel kind {other:?} (expected bf|pf|dp|ad)")),
        }
    }
}

fn check_strength(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("noise strength {p} outside [0, 1]"));
    }
    Ok(())
}

/// Kraus operators of a single-qubit channel of strength `p`.
///
/// Bit and phase flip apply their Pauli with probability `p/2`; the
/// depolarizing channel applies each Pauli with probability `p/4`.
pub fn kraus_operators(kind: ChannelKind, p: f64) -> Result<Vec<ComplexMatrix>> {
    check_strength(p)?;
    let id = pauli::identity();
    Ok(match kind {
        ChannelKind::BitFlip => vec![
            id.scale_real((1.0 - p / 2.0).sqrt()),
            pauli::x().scale_real((p / 2.0).sqrt()),
        ],
        ChannelKind::PhaseFlip => vec![
            id.scale_real((1.0 - p / 2.0).sqrt()),
            pauli::z().scale_real((p / 2.0).sqrt()),
        ],
        ChannelKind::Depolarizing => {
            let w = (p / 4.0).sqrt();
            vec![
                id.scale_real((1.0 - 3.0 * p / 4.0).sqrt()),
                pauli::x().scale_real(w),
                pauli::y().scale_real(w),
                pauli::z().scale_real(w),
            ]
        }
        ChannelKind::AmplitudeDamping => vec![
            ComplexMatrix::from_rows(&[vec![ONE, ZERO], vec![ZERO, C64::new((1.0 - p).sqrt(), 0.0)]]),
            ComplexMatrix::from_rows(&[vec![ZERO, C64::new(p.sqrt(), 0.0)], vec![ZERO, ZERO]]),
        ],
    })
}

/// Which members of the retained pair carry noise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scenario {
    /// Neither retained qubit is noisy.
    Neither,
    /// Exactly one retained qubit is noisy.
    One,
    /// Both retained qubits are noisy.
    Both,
}

impl Scenario {
    pub fn of(noisy_mask: u32, pair: (usize, usize)) -> Self {
        let a = noisy_mask & (1 << pair.0) != 0;
        let b = noisy_mask & (1 << pair.1) != 0;
        match (a, b) {
            (false, false) => Scenario::Neither,
            (true, true) => Scenario::Both,
            _ => Scenario::One,
        }
    }
}

/// Noise kind, strength and the set of noisy qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    kind: ChannelKind,
    strength: f64,
    noisy: Vec<usize>,
}

impl NoiseConfig {
    pub fn new(kind: ChannelKind, strength: f64, mut noisy: Vec<usize>) -> Result<Self> {
        check_strength(strength)?;
        noisy.sort_unstable();
        if noisy.windows(2).any(|w| w[0] == w[1]) {
            return domain(format!("duplicate qubit in noisy set {noisy:?}"));
        }
        Ok(Self { kind, strength, noisy })
    }

    /// Builds the config whose noisy set is given as a bitmask (bit `q` = qubit `q`).
    pub fn from_mask(kind: ChannelKind, strength: f64, mask: u32) -> Result<Self> {
        Self::new(kind, strength, mask_to_qubits(mask))
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn noisy_set(&self) -> &[usize] {
        &self.noisy
    }

    pub fn mask(&self) -> u32 {
        qubits_to_mask(&self.noisy)
    }

    pub fn cardinality(&self) -> usize {
        self.noisy.len()
    }
}

pub fn mask_to_qubits(mask: u32) -> Vec<usize> {
    (0..32).filter(|q| mask & (1 << q) != 0).collect()
}

pub fn qubits_to_mask(qubits: &[usize]) -> u32 {
    qubits.iter().fold(0, |m, &q| m | (1 << q))
}

/// Applies `Σ_μ K_μ ρ K_μ^†` on one qubit without forming the embedded operator.
fn apply_single_qubit(m: &ComplexMatrix, kraus: &[ComplexMatrix], target: usize, n: usize) -> ComplexMatrix {
    let dim = m.dim();
    let bit = crate::linalg::qubit_bit(target, n);
    let mut out = ComplexMatrix::zeros(dim);
    for k in kraus {
        // rows: (K ⊗ I) m
        let mut left = ComplexMatrix::zeros(dim);
        for r in 0..dim {
            if r & bit != 0 {
                continue;
            }
            let r1 = r | bit;
            for c in 0..dim {
                let (a0, a1) = (m[(r, c)], m[(r1, c)]);
                left[(r, c)] = k[(0, 0)] * a0 + k[(0, 1)] * a1;
                left[(r1, c)] = k[(1, 0)] * a0 + k[(1, 1)] * a1;
            }
        }
        // columns: left (K^† ⊗ I)
        for c in 0..dim {
            if c & bit != 0 {
                continue;
            }
            let c1 = c | bit;
            for r in 0..dim {
                let (b0, b1) = (left[(r, c)], left[(r, c1)]);
                out[(r, c)] += b0 * k[(0, 0)].conj() + b1 * k[(0, 1)].conj();
                out[(r, c1)] += b0 * k[(1, 0)].conj() + b1 * k[(1, 1)].conj();
            }
        }
    }
    out
}

/// Uncorrelated identical noise on every qubit of `cfg.noisy_set()`, applied one qubit at a time.
pub fn apply_local_noise(rho: &DensityMatrix, cfg: &NoiseConfig) -> Result<DensityMatrix> {
    let n = rho.num_qubits();
    if let Some(&q) = cfg.noisy.iter().find(|&&q| q >= n) {
        return domain(format!("noisy qubit {q} out of range for {n} qubits"));
    }
    if cfg.noisy.is_empty() {
        return Ok(rho.clone());
    }
    let kraus = kraus_operators(cfg.kind, cfg.strength)?;
    let mut m = rho.matrix().clone();
    for &q in &cfg.noisy {
        m = apply_single_qubit(&m, &kraus, q, n);
    }
    Ok(DensityMatrix::from_matrix_unchecked(m.hermitian_part()))
}

/// The same channel evaluated as one sum over all `d^m` product Kraus operators.
pub fn apply_local_noise_joint(rho: &DensityMatrix, cfg: &NoiseConfig) -> Result<DensityMatrix> {
    let n = rho.num_qubits();
    if let Some(&q) = cfg.noisy.iter().find(|&&q| q >= n) {
        return domain(format!("noisy qubit {q} out of range for {n} qubits"));
    }
    if cfg.noisy.is_empty() {
        return Ok(rho.clone());
    }
    let kraus = kraus_operators(cfg.kind, cfg.strength)?;
    let d = kraus.len();
    let m = cfg.noisy.len();
    let id = ComplexMatrix::identity(2);
    let mut out = ComplexMatrix::zeros(rho.dim());
    for mu in 0..d.pow(m as u32) {
        let mut digits = vec![0usize; m];
        let mut rest = mu;
        for slot in digits.iter_mut().rev() {
            *slot = rest % d;
            rest /= d;
        }
        let mut op = ComplexMatrix::identity(1);
        for q in 0..n {
            let factor = match cfg.noisy.iter().position(|&l| l == q) {
                Some(pos) => &kraus[digits[pos]],
                None => &id,
            };
            op = crate::linalg::tensor_product(&op, factor);
        }
        out = &out + &rho.matrix().conjugate_by(&op);
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// A noise configuration together with its placement relative to the retained pair.
#[derive(Clone, Debug, PartialEq)]
pub struct TaggedConfig {
    pub config: NoiseConfig,
    pub cardinality: usize,
    pub scenario: Scenario,
}

/// Every subset of an `n`-qubit register (empty set first, then by bitmask), tagged by scenario.
pub fn enumerate_noise_configs(
    n: usize,
    pair: (usize, usize),
    kind: ChannelKind,
    p: f64,
) -> Result<Vec<TaggedConfig>> {
    if !(3..=4).contains(&n) {
        return domain(format!("register size {n} not supported (expected 3 or 4)"));
    }
    if pair.0 >= n || pair.1 >= n || pair.0 == pair.1 {
        return domain(format!("invalid retained pair {pair:?} for {n} qubits"));
    }
    (0u32..(1 << n))
        .map(|mask| {
            let config = NoiseConfig::from_mask(kind, p, mask)?;
            Ok(TaggedConfig {
                cardinality: config.cardinality(),
                scenario: Scenario::of(mask, pair),
                config,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{embed_local, partial_trace, PureState};

    fn completeness_defect(ks: &[ComplexMatrix]) -> f64 {
        let mut sum = ComplexMatrix::zeros(2);
        for k in ks {
            sum = &sum + &(&k.dagger() * k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(2))
    }

    #[test]
    fn kraus_completeness_on_grid() {
        for kind in ChannelKind::ALL {
            for i in 0..=20 {
                let p = i as f64 / 20.0;
                let ks = kraus_operators(kind, p).unwrap();
                assert_eq!(ks.len(), kind.kraus_rank());
                assert!(completeness_defect(&ks) < 1e-12, "{kind} p={p}");
            }
        }
    }

    #[test]
    fn zero_noise_bit_flip_is_identity_plus_zero() {
        let ks = kraus_operators(ChannelKind::BitFlip, 0.0).unwrap();
        assert_eq!(ks[0], ComplexMatrix::identity(2));
        assert_eq!(ks[1], ComplexMatrix::zeros(2));
    }

    #[test]
    fn depolarizing_weights() {
        let p = 0.36;
        let ks = kraus_operators(ChannelKind::Depolarizing, p).unwrap();
        assert!((ks[0][(0, 0)].re - (1.0 - 0.75 * p).sqrt()).abs() < 1e-15);
        assert!((ks[1][(0, 1)].re - 0.3).abs() < 1e-15);
        assert!((ks[2][(1, 0)].im - 0.3).abs() < 1e-15);
        assert!((ks[3][(1, 1)].re + 0.3).abs() < 1e-15);
    }

    #[test]
    fn strength_is_validated() {
        assert!(kraus_operators(ChannelKind::PhaseFlip, -0.01).is_err());
        assert!(kraus_operators(ChannelKind::PhaseFlip, 1.01).is_err());
        assert!(NoiseConfig::new(ChannelKind::PhaseFlip, 1.5, vec![0]).is_err());
        assert!(NoiseConfig::new(ChannelKind::PhaseFlip, 0.5, vec![0, 0]).is_err());
    }

    #[test]
    fn full_damping_sends_one_to_zero() {
        let cfg = NoiseConfig::new(ChannelKind::AmplitudeDamping, 1.0, vec![0]).unwrap();
        let out = apply_local_noise(&PureState::basis(1, 1).to_density(), &cfg).unwrap();
        assert_eq!(out.matrix(), &ComplexMatrix::diagonal(&[1., 0.]));
    }

    #[test]
    fn full_bit_flip_mixes_zero_state() {
        let cfg = NoiseConfig::new(ChannelKind::BitFlip, 1.0, vec![0]).unwrap();
        let out = apply_local_noise(&PureState::basis(1, 0).to_density(), &cfg).unwrap();
        assert!(out.matrix().max_abs_diff(&ComplexMatrix::diagonal(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn zero_strength_and_empty_set_are_identity() {
        let psi = PureState::normalized(vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.5), ONE, C64::new(0.0, -0.7)]).unwrap();
        let rho = psi.to_density();
        for kind in ChannelKind::ALL {
            let cfg = NoiseConfig::new(kind, 0.0, vec![0, 1]).unwrap();
            assert!(apply_local_noise(&rho, &cfg).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
            let cfg = NoiseConfig::new(kind, 0.7, vec![]).unwrap();
            assert_eq!(apply_local_noise(&rho, &cfg).unwrap(), rho);
        }
        let cfg = NoiseConfig::new(ChannelKind::BitFlip, 0.7, vec![2]).unwrap();
        assert!(apply_local_noise(&rho, &cfg).is_err());
    }

    #[test]
    fn single_qubit_fast_path_matches_embedded_operator() {
        let psi = PureState::normalized((0..8).map(|k| C64::new(k as f64 - 3.5, (k * k) as f64 * 0.1)).collect()).unwrap();
        let rho = psi.to_density();
        for kind in ChannelKind::ALL {
            let ks = kraus_operators(kind, 0.37).unwrap();
            for q in 0..3 {
                let fast = apply_single_qubit(rho.matrix(), &ks, q, 3);
                let mut slow = ComplexMatrix::zeros(8);
                for k in &ks {
                    slow = &slow + &rho.matrix().conjugate_by(&embed_local(k, q, 3).unwrap());
                }
                assert!(fast.max_abs_diff(&slow) < 1e-14);
            }
        }
    }

    #[test]
    fn unital_channels_fix_maximally_mixed_state() {
        let mixed = DensityMatrix::maximally_mixed(3);
        for kind in [ChannelKind::BitFlip, ChannelKind::PhaseFlip, ChannelKind::Depolarizing] {
            let cfg = NoiseConfig::new(kind, 0.6, vec![0, 1, 2]).unwrap();
            let out = apply_local_noise(&mixed, &cfg).unwrap();
            assert!(out.matrix().max_abs_diff(mixed.matrix()) < 1e-12);
        }
        let cfg = NoiseConfig::new(ChannelKind::AmplitudeDamping, 1.0, vec![0]).unwrap();
        let out = apply_local_noise(&DensityMatrix::maximally_mixed(1), &cfg).unwrap();
        assert!(out.matrix().max_abs_diff(&ComplexMatrix::diagonal(&[1., 0.])) < 1e-15);
    }

    #[test]
    fn noise_commutes_with_tracing_untouched_qubits() {
        let psi = PureState::normalized((0..8).map(|k| C64::new((k as f64).sin(), (k as f64 * 1.3).cos())).collect()).unwrap();
        let rho = psi.to_density();
        for kind in ChannelKind::ALL {
            let cfg3 = NoiseConfig::new(kind, 0.45, vec![0, 1]).unwrap();
            let cfg2 = NoiseConfig::new(kind, 0.45, vec![0, 1]).unwrap();
            let lhs = partial_trace(&apply_local_noise(&rho, &cfg3).unwrap(), &[2]).unwrap();
            let rhs = apply_local_noise(&partial_trace(&rho, &[2]).unwrap(), &cfg2).unwrap();
            assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-10);
        }
    }

    #[test]
    fn enumerate_three_qubit_configs() {
        let all = enumerate_noise_configs(3, (0, 1), ChannelKind::PhaseFlip, 0.1).unwrap();
        assert_eq!(all.len(), 8);
        let of = |s: Scenario| -> Vec<Vec<usize>> {
            all.iter()
                .filter(|t| t.scenario == s && t.cardinality > 0)
                .map(|t| t.config.noisy_set().to_vec())
                .collect()
        };
        assert_eq!(of(Scenario::Neither), vec![vec![2]]);
        assert_eq!(of(Scenario::One), vec![vec![0], vec![1], vec![0, 2], vec![1, 2]]);
        assert_eq!(of(Scenario::Both), vec![vec![0, 1], vec![0, 1, 2]]);
        let count = |m: usize| all.iter().filter(|t| t.cardinality == m).count();
        assert_eq!((count(0), count(1), count(2), count(3)), (1, 3, 3, 1));
    }

    #[test]
    fn enumerate_four_qubit_configs() {
        let all = enumerate_noise_configs(4, (0, 1), ChannelKind::BitFlip, 0.1).unwrap();
        assert_eq!(all.len(), 16);
        let count = |s: Scenario| all.iter().filter(|t| t.scenario == s && t.cardinality > 0).count();
        assert_eq!(count(Scenario::Neither), 3);
        assert_eq!(count(Scenario::One), 8);
        assert_eq!(count(Scenario::Both), 4);
        assert!(enumerate_noise_configs(5, (0, 1), ChannelKind::BitFlip, 0.1).is_err());
    }

    #[test]
    fn channel_kind_strings() {
        for kind in ChannelKind::ALL {
            assert_eq!(kind.as_str().parse::<ChannelKind>().unwrap(), kind);
            assert_eq!(serde_json::to_string(&kind).unwrap(), format!("\"{}\"", kind.as_str()));
        }
        assert!("bpf".parse::<ChannelKind>().is_err());
    }
}
