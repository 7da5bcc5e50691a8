//! Parametrized GHZ/W families and seeded Gaussian samplers of random pure states.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{PureState, C64, ZERO};

/// Computational-basis support of a W-class sample: `|000>, |001>, |010>, |100>`.
pub const W_CLASS_SUPPORT: [usize; 4] = [0b000, 0b001, 0b010, 0b100];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnsembleKind {
    #[serde(rename = "ghz3")]
    GhzClass3,
    #[serde(rename = "w3")]
    WClass3,
    #[serde(rename = "generic4")]
    Generic4,
}

impl EnsembleKind {
    pub fn num_qubits(self) -> usize {
        match self {
            EnsembleKind::GhzClass3 | EnsembleKind::WClass3 => 3,
            EnsembleKind::Generic4 => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EnsembleKind::GhzClass3 => "ghz3",
            EnsembleKind::WClass3 => "w3",
            EnsembleKind::Generic4 => "generic4",
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ghz3" | "ghz" => Ok(EnsembleKind::GhzClass3),
            "w3" | "w" => Ok(EnsembleKind::WClass3),
            "generic4" | "4q" => Ok(EnsembleKind::Generic4),
            other => domain(format!("unknown ensemble {other:?} (expected ghz3, w3 or generic4)")),
        }
    }
}

/// Independent random stream `stream_index` derived from `master_seed`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self { master_seed, stream_index }
    }

    /// ChaCha8 keyed by the master seed, on its own 64-bit stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Two independent standard normals by Box–Muller.
pub fn normal_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    // 1 - [0,1) keeps the logarithm finite
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (2.0 * PI * u2).sin_cos();
    (r * c, r * s)
}

/// `cos(α/2)|000> + e^{iβ} sin(α/2)|111>`.
pub fn gghz(alpha: f64, beta: f64) -> Result<PureState> {
    check_range("alpha", alpha, PI)?;
    check_range("beta", beta, 2.0 * PI)?;
    let mut a = vec![ZERO; 8];
    a[0] = C64::new((alpha / 2.0).cos(), 0.0);
    a[7] = C64::from_polar((alpha / 2.0).sin(), beta);
    PureState::normalized(a)
}

/// `cos α|001> + e^{iγ₁} sin α cos β|010> + e^{iγ₂} sin α sin β|100>`.
pub fn gw(alpha: f64, beta: f64, gamma1: f64, gamma2: f64) -> Result<PureState> {
    check_range("alpha", alpha, PI)?;
    check_range("beta", beta, PI)?;
    check_range("gamma1", gamma1, 2.0 * PI)?;
    check_range("gamma2", gamma2, 2.0 * PI)?;
    let mut a = vec![ZERO; 8];
    a[0b001] = C64::new(alpha.cos(), 0.0);
    a[0b010] = C64::from_polar(alpha.sin() * beta.cos(), gamma1);
    a[0b100] = C64::from_polar(alpha.sin() * beta.sin(), gamma2);
    PureState::normalized(a)
}

fn check_range(name: &str, v: f64, hi: f64) -> Result<()> {
    if (0.0..=hi).contains(&v) {
        Ok(())
    } else {
        domain(format!("{name} = {v} outside [0, {hi}]"))
    }
}

/// A random pure state with i.i.d. complex Gaussian amplitudes on the ensemble's support.
pub fn sample(kind: EnsembleKind, stream: RngStream) -> PureState {
    sample_with(kind, &mut stream.rng())
}

pub fn sample_with<R: Rng + ?Sized>(kind: EnsembleKind, rng: &mut R) -> PureState {
    let dim = 1 << kind.num_qubits();
    let mut a = vec![ZERO; dim];
    let mut draw = |slot: &mut C64| {
        let (re, im) = normal_pair(rng);
        *slot = C64::new(re, im);
    };
    match kind {
        EnsembleKind::WClass3 => W_CLASS_SUPPORT.iter().for_each(|&k| draw(&mut a[k])),
        _ => a.iter_mut().for_each(draw),
    }
    // a zero vector has probability zero; fall back to |0...0> rather than panic
    PureState::normalized(a).unwrap_or_else(|_| PureState::basis(kind.num_qubits(), 0))
}
