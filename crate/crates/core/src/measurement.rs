//! Rank-1 single-qubit projective measurements and their outcome branches.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::{self, ComplexMatrix, DensityMatrix, C64, I, ONE, ZERO};

/// Branches with probability below this are flagged and contribute nothing.
pub const ZERO_BRANCH_THRESHOLD: f64 = 1e-12;

/// Measurement basis `{|0'>, |1'>}` with
/// `|0'> = cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>` and
/// `|1'> = sin(θ/2)|0> - e^{iφ} cos(θ/2)|1>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleBasis {
    pub theta: f64,
    pub phi: f64,
}

impl AngleBasis {
    /// Requires `θ ∈ [0, π)` and `φ ∈ [0, 2π]`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..PI).contains(&theta) || !(0.0..=2.0 * PI).contains(&phi) {
            return domain(format!("angles (θ={theta}, φ={phi}) outside [0,π) × [0,2π]"));
        }
        Ok(Self { theta, phi })
    }

    /// Maps arbitrary angles onto the canonical ranges describing the same pair of projectors.
    ///
    /// Shifting θ by π swaps the two outcome labels and flipping the sign of θ
    /// is absorbed by φ → φ + π, so the canonical representative measures the
    /// same basis (possibly with relabelled outcomes).
    pub fn wrapped(theta: f64, phi: f64) -> Self {
        let two_pi = 2.0 * PI;
        let mut t = theta.rem_euclid(two_pi);
        let mut f = phi;
        if t >= PI {
            // θ ∈ [π, 2π) is the basis at 2π - θ with φ + π
            t = two_pi - t;
            f += PI;
        }
        if t >= PI {
            t = 0.0;
        }
        Self { theta: t, phi: f.rem_euclid(two_pi) }
    }

    pub fn kets(&self) -> [[C64; 2]; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let e = C64::from_polar(1.0, self.phi);
        [[C64::new(c, 0.0), e * s], [C64::new(s, 0.0), -e * c]]
    }
}

/// Pauli measurement axis. Codes follow `X → 0, Y → 1, Z → 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn code(self) -> u8 {
        match self {
            PauliAxis::X => 0,
            PauliAxis::Y => 1,
            PauliAxis::Z => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    /// The equivalent point of the angle parametrization.
    pub fn angles(self) -> AngleBasis {
        match self {
            PauliAxis::X => AngleBasis { theta: PI / 2.0, phi: 0.0 },
            PauliAxis::Y => AngleBasis { theta: PI / 2.0, phi: PI / 2.0 },
            PauliAxis::Z => AngleBasis { theta: 0.0, phi: 0.0 },
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            PauliAxis::X => linalg::pauli::x(),
            PauliAxis::Y => linalg::pauli::y(),
            PauliAxis::Z => linalg::pauli::z(),
        }
    }

    /// Eigenvectors for eigenvalues `+1` (outcome 0) and `-1` (outcome 1).
    pub fn kets(self) -> [[C64; 2]; 2] {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            PauliAxis::X => [[h, h], [h, -h]],
            PauliAxis::Y => [[h, I * FRAC_1_SQRT_2], [h, -I * FRAC_1_SQRT_2]],
            PauliAxis::Z => [[ONE, ZERO], [ZERO, ONE]],
        }
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PauliAxis::X => "X",
            PauliAxis::Y => "Y",
            PauliAxis::Z => "Z",
        };
        f.write_str(s)
    }
}

/// Basis used on one measured qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalBasis {
    Angles(AngleBasis),
    Pauli(PauliAxis),
}

impl LocalBasis {
    pub fn kets(&self) -> [[C64; 2]; 2] {
        match self {
            LocalBasis::Angles(a) => a.kets(),
            LocalBasis::Pauli(p) => p.kets(),
        }
    }
}

impl fmt::Display for LocalBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalBasis::Angles(a) => write!(f, "({:.6},{:.6})", a.theta, a.phi),
            LocalBasis::Pauli(p) => write!(f, "{p}"),
        }
    }
}

/// `|k'><k'|` for the angle basis.
pub fn projector(basis: AngleBasis, outcome: usize) -> ComplexMatrix {
    ComplexMatrix::outer(&basis.kets()[outcome & 1])
}

/// `(I + (-1)^k σ) / 2`.
pub fn pauli_projector(axis: PauliAxis, outcome: usize) -> ComplexMatrix {
    let sign = if outcome & 1 == 0 { 0.5 } else { -0.5 };
    &ComplexMatrix::identity(2).scale_real(0.5) + &axis.matrix().scale_real(sign)
}

/// Local bases for an ordered list of measured qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    measured: Vec<usize>,
    bases: Vec<LocalBasis>,
}

impl MeasurementSetting {
    pub fn new(measured: Vec<usize>, bases: Vec<LocalBasis>) -> Result<Self> {
        if measured.len() != bases.len() {
            return domain("one basis per measured qubit is required");
        }
        for (i, q) in measured.iter().enumerate() {
            if measured[..i].contains(q) {
                return domain(format!("qubit {q} measured twice"));
            }
        }
        Ok(Self { measured, bases })
    }

    pub fn pauli(measured: Vec<usize>, axes: &[PauliAxis]) -> Result<Self> {
        Self::new(measured, axes.iter().map(|&a| LocalBasis::Pauli(a)).collect())
    }

    pub fn angles(measured: Vec<usize>, angles: &[AngleBasis]) -> Result<Self> {
        Self::new(measured, angles.iter().map(|&a| LocalBasis::Angles(a)).collect())
    }

    pub fn measured(&self) -> &[usize] {
        &self.measured
    }

    pub fn bases(&self) -> &[LocalBasis] {
        &self.bases
    }

    /// Pauli multi-index with the first measured qubit as the most significant base-3 digit.
    pub fn pauli_index(&self) -> Option<usize> {
        self.bases.iter().try_fold(0, |acc, b| match b {
            LocalBasis::Pauli(a) => Some(acc * 3 + a.code() as usize),
            LocalBasis::Angles(_) => None,
        })
    }

    /// Unmeasured qubits of an `n`-qubit register, in ascending order.
    pub fn retained(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|q| !self.measured.contains(q)).collect()
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .measured
            .iter()
            .zip(&self.bases)
            .map(|(q, b)| format!("q{q}:{b}"))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// One measurement outcome and the normalized state left on the retained qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    /// Outcome bits, first measured qubit most significant.
    pub outcome: usize,
    pub probability: f64,
    /// `None` when the probability is below [`ZERO_BRANCH_THRESHOLD`].
    pub state: Option<DensityMatrix>,
}

/// Outcome probabilities and post-measurement reduced states.
pub fn measurement_branches(rho: &DensityMatrix, setting: &MeasurementSetting) -> Result<Vec<Branch>> {
    let n = rho.num_qubits();
    if let Some(&q) = setting.measured.iter().find(|&&q| q >= n) {
        return domain(format!("measured qubit {q} out of range for {n} qubits"));
    }
    let kernel = ProjectionKernel::new(rho, setting.measured())?;
    let kets: Vec<[[C64; 2]; 2]> = setting.bases.iter().map(LocalBasis::kets).collect();
    let r = setting.measured.len();
    let mut out = Vec::with_capacity(1 << r);
    let mut w = vec![ZERO; 1 << r];
    for outcome in 0..(1usize << r) {
        product_ket(&kets, outcome, &mut w);
        let sigma = kernel.project(&w);
        let probability = sigma.trace().re.max(0.0);
        let state = (probability >= ZERO_BRANCH_THRESHOLD).then(|| {
            let m = sigma.scale_real(1.0 / probability).hermitian_part();
            DensityMatrix::from_matrix_unchecked(m)
        });
        out.push(Branch { outcome, probability, state });
    }
    Ok(out)
}

/// Fills `w` with `⊗_i |k_i>` where `k_i` is bit `i` of `outcome` (first qubit most significant).
pub(crate) fn product_ket(kets: &[[[C64; 2]; 2]], outcome: usize, w: &mut [C64]) {
    let r = kets.len();
    for (idx, slot) in w.iter_mut().enumerate() {
        let mut acc = ONE;
        for (pos, k) in kets.iter().enumerate() {
            let out_bit = (outcome >> (r - 1 - pos)) & 1;
            let comp = (idx >> (r - 1 - pos)) & 1;
            acc *= k[out_bit][comp];
        }
        *slot = acc;
    }
}

/// `ρ` rearranged into blocks `B_rs = <r|ρ|s>` over measured-register basis states, so that
/// `Tr_R[(I ⊗ |w><w|) ρ (I ⊗ |w><w|)] = Σ_rs conj(w_r) w_s B_rs`.
#[derive(Clone, Debug)]
pub(crate) struct ProjectionKernel {
    kept_dim: usize,
    meas_dim: usize,
    /// Block `(r, s)` stored at `(r * meas_dim + s) * kept_dim^2`.
    blocks: Vec<C64>,
}

impl ProjectionKernel {
    pub(crate) fn new(rho: &DensityMatrix, measured: &[usize]) -> Result<Self> {
        let n = rho.num_qubits();
        let kept: Vec<usize> = (0..n).filter(|q| !measured.contains(q)).collect();
        if kept.is_empty() {
            return domain("at least one qubit must remain unmeasured");
        }
        let kept_dim = 1 << kept.len();
        let meas_dim = 1 << measured.len();
        let kept_idx: Vec<usize> = (0..kept_dim).map(|a| linalg::scatter_index(a, &kept, n)).collect();
        let meas_idx: Vec<usize> = (0..meas_dim).map(|r| linalg::scatter_index(r, measured, n)).collect();
        let m = rho.matrix();
        let mut blocks = Vec::with_capacity(meas_dim * meas_dim * kept_dim * kept_dim);
        for &r in &meas_idx {
            for &s in &meas_idx {
                for &a in &kept_idx {
                    for &b in &kept_idx {
                        blocks.push(m[(a | r, b | s)]);
                    }
                }
            }
        }
        Ok(Self { kept_dim, meas_dim, blocks })
    }

    pub(crate) fn meas_dim(&self) -> usize {
        self.meas_dim
    }

    /// Kernel for the remaining measured qubits after projecting the leading one onto `v`.
    pub(crate) fn contract_leading(&self, v: &[C64; 2]) -> Self {
        let kd2 = self.kept_dim * self.kept_dim;
        let half = self.meas_dim / 2;
        let mut blocks = vec![ZERO; half * half * kd2];
        for a in 0..2 {
            for a2 in 0..2 {
                let coef = v[a].conj() * v[a2];
                if coef == ZERO {
                    continue;
                }
                for b in 0..half {
                    for b2 in 0..half {
                        let src = ((a * half + b) * self.meas_dim + a2 * half + b2) * kd2;
                        let dst = (b * half + b2) * kd2;
                        for (d, s) in blocks[dst..dst + kd2].iter_mut().zip(&self.blocks[src..src + kd2]) {
                            *d += coef * s;
                        }
                    }
                }
            }
        }
        Self { kept_dim: self.kept_dim, meas_dim: half, blocks }
    }

    /// Unnormalized reduced state for the product ket `w`.
    pub(crate) fn project(&self, w: &[C64]) -> ComplexMatrix {
        let kd2 = self.kept_dim * self.kept_dim;
        let mut acc = vec![ZERO; kd2];
        for r in 0..self.meas_dim {
            let wr = w[r].conj();
            if wr == ZERO {
                continue;
            }
            for s in 0..self.meas_dim {
                let coef = wr * w[s];
                if coef == ZERO {
                    continue;
                }
                let block = &self.blocks[(r * self.meas_dim + s) * kd2..][..kd2];
                for (a, b) in acc.iter_mut().zip(block) {
                    *a += coef * b;
                }
            }
        }
        ComplexMatrix::from_data(self.kept_dim, acc)
    }
}
