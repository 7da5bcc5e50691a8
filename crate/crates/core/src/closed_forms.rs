//! Analytic RLE of the noisy three-qubit gGHZ state, localized on qubits 0 and 1, plus the
//! noise strengths at which these expressions vanish or cross.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::noise::ChannelKind;

/// Where the noise sits on the gGHZ register (qubits printed 1-based, stored 0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GGHZConfigLabel {
    Rho123,
    Rho12,
    Rho13,
    Rho23,
    Rho1,
    Rho2,
    Rho3,
    Noiseless,
}

impl GGHZConfigLabel {
    pub const ALL: [GGHZConfigLabel; 8] = [
        GGHZConfigLabel::Rho123,
        GGHZConfigLabel::Rho12,
        GGHZConfigLabel::Rho13,
        GGHZConfigLabel::Rho23,
        GGHZConfigLabel::Rho1,
        GGHZConfigLabel::Rho2,
        GGHZConfigLabel::Rho3,
        GGHZConfigLabel::Noiseless,
    ];

    /// Noise bitmask with bit `q` set when 0-based qubit `q` is noisy.
    pub fn mask(self) -> u32 {
        match self {
            GGHZConfigLabel::Rho123 => 0b111,
            GGHZConfigLabel::Rho12 => 0b011,
            GGHZConfigLabel::Rho13 => 0b101,
            GGHZConfigLabel::Rho23 => 0b110,
            GGHZConfigLabel::Rho1 => 0b001,
            GGHZConfigLabel::Rho2 => 0b010,
            GGHZConfigLabel::Rho3 => 0b100,
            GGHZConfigLabel::Noiseless => 0,
        }
    }

    pub fn from_mask(mask: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.mask() == mask)
    }

    pub fn cardinality(self) -> usize {
        self.mask().count_ones() as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GGHZConfigLabel::Rho123 => "rho123",
            GGHZConfigLabel::Rho12 => "rho12",
            GGHZConfigLabel::Rho13 => "rho13",
            GGHZConfigLabel::Rho23 => "rho23",
            GGHZConfigLabel::Rho1 => "rho1",
            GGHZConfigLabel::Rho2 => "rho2",
            GGHZConfigLabel::Rho3 => "rho3",
            GGHZConfigLabel::Noiseless => "rho",
        }
    }

    /// Qubits 0 and 1 play symmetric roles in the gGHZ state, so `ρ23 ≡ ρ13` and `ρ2 ≡ ρ1`.
    fn canonical(self) -> Self {
        match self {
            GGHZConfigLabel::Rho23 => GGHZConfigLabel::Rho13,
            GGHZConfigLabel::Rho2 => GGHZConfigLabel::Rho1,
            other => other,
        }
    }
}

impl fmt::Display for GGHZConfigLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormResult {
    /// `max(raw, 0)`.
    pub value: f64,
    /// The expression before clamping; its sign change locates critical strengths.
    pub raw: f64,
    pub clamped: bool,
    /// Human-readable parameter range on which the expression is valid.
    pub valid_domain: &'static str,
}

impl ClosedFormResult {
    fn new(raw: f64, valid_domain: &'static str) -> Self {
        Self { value: raw.max(0.0), raw, clamped: raw < 0.0, valid_domain }
    }
}

const HALF_DOMAIN: &str = "alpha in [0, pi/2], p in [0, 1]";
const FULL_DOMAIN: &str = "alpha in [0, pi], p in [0, 1]";
const ANGLE_SLOP: f64 = 1e-12;

fn check(alpha: f64, alpha_max: f64, p: f64) -> Result<()> {
    if !(-ANGLE_SLOP..=alpha_max + ANGLE_SLOP).contains(&alpha) {
        return domain(format!("alpha = {alpha} outside [0, {alpha_max}]"));
    }
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("p = {p} outside [0, 1]"));
    }
    Ok(())
}

/// Phase flip: `½(1-p)^m sin α` with `m = |L|`.
pub fn pf_rle(label: GGHZConfigLabel, alpha: f64, p: f64) -> Result<ClosedFormResult> {
    check(alpha, FRAC_PI_2, p)?;
    let m = label.cardinality() as i32;
    Ok(ClosedFormResult::new(0.5 * (1.0 - p).powi(m) * alpha.sin(), HALF_DOMAIN))
}

/// `⅛[sin α √f - 2p(2-p)]` with `f = [p² + (2-p)²]² - 4p²(2-p)² w` and `w` a squared trigonometric weight.
///
/// Evaluated as `(D · D⁺) / (8(sin α √f + 2p(2-p)))` with [`bf_pair_sign`] as `D`, which avoids
/// the cancellation that turns the simple zero into an apparent double one.
fn bf_pair_raw(alpha: f64, w: f64, p: f64) -> f64 {
    let q = 2.0 - p;
    let s = alpha.sin();
    let f = (p * p + q * q).powi(2) - 4.0 * p * p * q * q * w;
    let denom = 8.0 * (s * f.max(0.0).sqrt() + 2.0 * p * q);
    if denom == 0.0 {
        return 0.0;
    }
    let d = bf_pair_sign(alpha, w, p);
    let d_plus = 4.0 * (1.0 - p) * s + 2.0 * p * q * bf_weight_root(alpha, w);
    d * d_plus / denom
}

fn bf_weight_root(alpha: f64, w: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    (c * c + s * s * w).sqrt()
}

/// `4(1-p) sin α - 2p(2-p) √(cos²α + sin²α w)`, which has the sign of [`bf_pair_raw`].
fn bf_pair_sign(alpha: f64, w: f64, p: f64) -> f64 {
    4.0 * (1.0 - p) * alpha.sin() - 2.0 * p * (2.0 - p) * bf_weight_root(alpha, w)
}

/// Bit flip.
///
/// With both retained qubits noisy and qubit 2 clean, measuring qubit 2 in the Y
/// basis beats X whenever `sin²β > ½`, so the weight is `min(sin²β, cos²β)`.
/// With all three noisy the X-basis value with weight `sin²β` is optimal.
pub fn bf_rle(label: GGHZConfigLabel, alpha: f64, beta: f64, p: f64) -> Result<ClosedFormResult> {
    check(alpha, FRAC_PI_2, p)?;
    if !(0.0..=2.0 * PI).contains(&beta) {
        return domain(format!("beta = {beta} outside [0, 2pi]"));
    }
    let s = alpha.sin();
    let sb2 = beta.sin().powi(2);
    let raw = match label.canonical() {
        GGHZConfigLabel::Rho123 => bf_pair_raw(alpha, sb2, p),
        GGHZConfigLabel::Rho12 => bf_pair_raw(alpha, sb2.min(1.0 - sb2), p),
        GGHZConfigLabel::Rho13 | GGHZConfigLabel::Rho1 => ((p * p + 4.0 * (1.0 - p) * s * s).sqrt() - p) / 4.0,
        _ => 0.5 * s,
    };
    Ok(ClosedFormResult::new(raw, HALF_DOMAIN))
}

/// `[p² + (2-p)²]² / [4p²(2-p)²] - (1 + sin²α sin²β) / sin²α`; zero exactly where the X-basis
/// bit-flip expression with weight `sin²β` vanishes.
pub fn bf_critical_residual(alpha: f64, beta: f64, p: f64) -> f64 {
    let q = 2.0 - p;
    let sa2 = alpha.sin().powi(2);
    (p * p + q * q).powi(2) / (4.0 * p * p * q * q) - (1.0 + sa2 * beta.sin().powi(2)) / sa2
}

/// Smallest `p ∈ (0, 1]` where the all-noisy bit-flip RLE reaches zero; 1 if it stays positive below 1.
///
/// This is also the critical strength of the two-noisy-retained configuration when `sin²β ≤ ½`.
pub fn bf_critical(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= FRAC_PI_2 + ANGLE_SLOP) {
        return domain(format!("alpha = {alpha} outside (0, pi/2]; the RLE vanishes identically at 0"));
    }
    let sb2 = beta.sin().powi(2);
    Ok(first_nonpositive(|p| bf_pair_sign(alpha, sb2, p)).unwrap_or(1.0))
}

/// Depolarizing.
pub fn dp_rle(label: GGHZConfigLabel, alpha: f64, p: f64) -> Result<ClosedFormResult> {
    check(alpha, FRAC_PI_2, p)?;
    let s = alpha.sin();
    let s2 = s * s;
    let raw = match label.canonical() {
        GGHZConfigLabel::Rho123 => (2.0 * (1.0 - p).powi(3) * s - (2.0 - p) * p) / 4.0,
        GGHZConfigLabel::Rho12 => (2.0 * (1.0 - p).powi(2) * s - (2.0 - p) * p) / 4.0,
        GGHZConfigLabel::Rho13 => {
            let f1 = 2.0 * s2 * (8.0 - 32.0 * p + 46.0 * p * p - 32.0 * p.powi(3) + 8.0 * p.powi(4));
            ((4.0 * p * p + f1).max(0.0).sqrt() - 2.0 * p) / 8.0
        }
        GGHZConfigLabel::Rho1 => {
            let f2 = s2 * (2.0 - p) * (2.0 - 3.0 * p);
            ((p * p + f2).max(0.0).sqrt() - p) / 4.0
        }
        GGHZConfigLabel::Rho3 => 0.5 * (1.0 - p) * s,
        _ => 0.5 * s,
    };
    Ok(ClosedFormResult::new(raw, HALF_DOMAIN))
}

/// Amplitude damping; valid for the full range `α ∈ [0, π]`.
pub fn ad_rle(label: GGHZConfigLabel, alpha: f64, p: f64) -> Result<ClosedFormResult> {
    check(alpha, PI, p)?;
    let (s, c) = alpha.sin_cos();
    let s = s.max(0.0);
    let h = (alpha / 2.0).sin().powi(2);
    let raw = match label.canonical() {
        GGHZConfigLabel::Rho123 => 0.5 * ((1.0 - p).powf(1.5) * s - p * (1.0 - p) * (1.0 - c)),
        GGHZConfigLabel::Rho12 => 0.5 * (1.0 - p) * (s + p * c - p),
        GGHZConfigLabel::Rho13 => {
            let f1 = 4.0 * (1.0 - p).powi(2) * s * s;
            ((f1 + 4.0 * p * p * h * h).sqrt() - 2.0 * p * h) / 4.0
        }
        GGHZConfigLabel::Rho1 => {
            let f2 = 4.0 * (1.0 - p) * s * s;
            ((f2 + 4.0 * p * p * h * h).sqrt() - 2.0 * p * h) / 4.0
        }
        GGHZConfigLabel::Rho3 => 0.5 * (1.0 - p).sqrt() * s,
        _ => 0.5 * s,
    };
    Ok(ClosedFormResult::new(raw, FULL_DOMAIN))
}

/// Dispatches on the channel; `beta` only matters for bit flip.
pub fn closed_form(kind: ChannelKind, label: GGHZConfigLabel, alpha: f64, beta: f64, p: f64) -> Result<ClosedFormResult> {
    match kind {
        ChannelKind::PhaseFlip => pf_rle(label, alpha, p),
        ChannelKind::BitFlip => bf_rle(label, alpha, beta, p),
        ChannelKind::Depolarizing => dp_rle(label, alpha, p),
        ChannelKind::AmplitudeDamping => ad_rle(label, alpha, p),
    }
}

/// Smallest `p ∈ (0, 1]` at which the unclamped expression drops to zero or below, by bisection to 1e-12.
///
/// `None` when it stays positive on the whole interval.
pub fn critical_strength(kind: ChannelKind, label: GGHZConfigLabel, alpha: f64, beta: f64) -> Result<Option<f64>> {
    closed_form(kind, label, alpha, beta, 0.0)?;
    Ok(first_nonpositive(|p| closed_form(kind, label, alpha, beta, p).map(|r| r.raw).unwrap_or(f64::NAN)))
}

const SCAN_STEPS: usize = 4096;
const BISECT_TOL: f64 = 1e-12;

fn first_nonpositive(f: impl Fn(f64) -> f64) -> Option<f64> {
    let mut lo = 0.0;
    for k in 1..=SCAN_STEPS {
        let hi = k as f64 / SCAN_STEPS as f64;
        if f(hi) <= 0.0 {
            return Some(bisect(&f, lo, hi));
        }
        lo = hi;
    }
    None
}

/// Boundary between `f > 0` at `lo` and `f ≤ 0` at `hi`.
fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Amplitude-damping strength where the `ρ13` and `ρ12` curves cross: `min[1, f(α)]`.
///
/// For `α > π/2` the square root in `f` has a negative argument and no crossing exists below 1.
pub fn ad_crossing(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < PI) {
        return domain(format!("alpha = {alpha} outside (0, pi)"));
    }
    let (s, c) = alpha.sin_cos();
    let radicand = 4.0 * s * (s + c - 1.0);
    if radicand < 0.0 {
        return Ok(1.0);
    }
    let f = (2.0 * s - radicand.sqrt()) / (2.0 * (1.0 - c));
    Ok(f.min(1.0))
}

/// Same crossing located by bisection on `ρ13 - ρ12`, skipping the trivial touch at `p = 0`.
pub fn ad_crossing_numeric(alpha: f64) -> Result<f64> {
    ad_crossing(alpha)?;
    let diff = |p: f64| {
        ad_rle(GGHZConfigLabel::Rho13, alpha, p).map(|r| r.raw).unwrap_or(f64::NAN)
            - ad_rle(GGHZConfigLabel::Rho12, alpha, p).map(|r| r.raw).unwrap_or(f64::NAN)
    };
    let mut lo = 1.0 / SCAN_STEPS as f64;
    if diff(lo) <= 0.0 {
        return Ok(lo);
    }
    for k in 2..SCAN_STEPS {
        let hi = k as f64 / SCAN_STEPS as f64;
        if diff(hi) <= 0.0 {
            return Ok(bisect(&diff, lo, hi));
        }
        lo = hi;
    }
    Ok(1.0)
}

/// How two RLE values are claimed to compare.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// `lhs ≤ rhs`
    AtMost,
    /// `lhs = rhs`
    Equal,
    /// `lhs > rhs`, checked as `rhs ≤ lhs` since both may vanish together.
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ordering {
    pub lhs: GGHZConfigLabel,
    pub relation: Relation,
    pub rhs: GGHZConfigLabel,
}

impl Ordering {
    /// Smallest signed distance from violation; negative means violated by that amount.
    pub fn margin(&self, lhs: f64, rhs: f64) -> f64 {
        match self.relation {
            Relation::AtMost => rhs - lhs,
            Relation::Equal => -(lhs - rhs).abs(),
            Relation::Above => lhs - rhs,
        }
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::Equal => "=",
            Relation::Above => ">",
        };
        write!(f, "{} {rel} {}", self.lhs, self.rhs)
    }
}

/// The RLE ordering chain of the noisy gGHZ state for each channel.
///
/// For amplitude damping with `α < π/2` the `ρ12`/`ρ13` link flips beyond [`ad_crossing`].
pub fn ordering_chain(kind: ChannelKind, alpha: f64, p: f64) -> Result<Vec<Ordering>> {
    use GGHZConfigLabel::*;
    use Relation::*;
    let links: [Relation; 4] = match kind {
        ChannelKind::PhaseFlip => [AtMost, Equal, AtMost, Equal],
        ChannelKind::BitFlip => [Equal, AtMost, Equal, AtMost],
        ChannelKind::Depolarizing => [AtMost; 4],
        ChannelKind::AmplitudeDamping => {
            let flipped = alpha < FRAC_PI_2 && alpha > 0.0 && p > ad_crossing(alpha)?;
            [AtMost, if flipped { Above } else { AtMost }, AtMost, AtMost]
        }
    };
    let chain = [Rho123, Rho12, Rho13, Rho1, Rho3];
    Ok((0..4).map(|i| Ordering { lhs: chain[i], relation: links[i], rhs: chain[i + 1] }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use GGHZConfigLabel::*;

    #[test]
    fn phase_flip_values() {
        assert!((pf_rle(Rho123, FRAC_PI_2, 0.2).unwrap().value - 0.256).abs() < 1e-15);
        for (a, p) in [(0.3, 0.4), (1.2, 0.9)] {
            let v1 = pf_rle(Rho1, a, p).unwrap().value;
            assert_eq!(v1, pf_rle(Rho3, a, p).unwrap().value);
            assert!((v1 - 0.5 * (1.0 - p) * f64::sin(a)).abs() < 1e-15);
        }
        for l in GGHZConfigLabel::ALL {
            let expect = if l == Noiseless { 0.5 } else { 0.0 };
            assert_eq!(pf_rle(l, FRAC_PI_2, 1.0).unwrap().value, expect);
        }
        assert!(pf_rle(Rho1, 2.0, 0.1).is_err());
        assert!(pf_rle(Rho1, 1.0, 1.1).is_err());
    }

    #[test]
    fn bit_flip_values() {
        for p in [0.0, 0.5, 1.0] {
            assert!((bf_rle(Rho3, 0.7, 1.0, p).unwrap().value - 0.5 * f64::sin(0.7)).abs() < 1e-15);
        }
        assert_eq!(bf_rle(Rho1, FRAC_PI_2, 0.0, 1.0).unwrap().value, 0.0);
        let r = bf_rle(Rho12, FRAC_PI_2, 0.0, 0.3).unwrap();
        assert!((r.value - 0.245).abs() < 1e-12, "{r:?}");
        assert_eq!(bf_rle(Rho123, FRAC_PI_2, 0.0, 0.3).unwrap().value, r.value);
        // Y-basis optimum for the pair-only configuration at β = π/2
        let y = bf_rle(Rho12, FRAC_PI_2, FRAC_PI_2, 0.5).unwrap().value;
        let x = bf_rle(Rho123, FRAC_PI_2, FRAC_PI_2, 0.5).unwrap().value;
        assert!((y - 0.125).abs() < 1e-15 && (x - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn bit_flip_critical_strength() {
        assert!((bf_critical(FRAC_PI_2, 0.0).unwrap() - 1.0).abs() < 1e-9);
        for (a, b) in [(0.4, 0.3), (1.0, 2.0), (0.2, 0.0), (1.3, 1.2)] {
            let pc = bf_critical(a, b).unwrap();
            if pc < 1.0 {
                assert!(bf_critical_residual(a, b, pc).abs() < 1e-9, "{a} {b} {pc}");
                assert_eq!(bf_rle(Rho123, a, b, (pc + 1e-6).min(1.0)).unwrap().value, 0.0);
                assert!(bf_rle(Rho123, a, b, pc - 1e-6).unwrap().value > 0.0);
            }
        }
        assert!(bf_critical(0.0, 0.0).is_err());
    }

    #[test]
    fn depolarizing_values() {
        for a in [0.2, 0.9, FRAC_PI_2] {
            let s = f64::sin(a);
            for l in GGHZConfigLabel::ALL {
                assert!((dp_rle(l, a, 0.0).unwrap().value - 0.5 * s).abs() < 1e-15, "{l}");
            }
            assert!((dp_rle(Rho3, a, 0.4).unwrap().value - 0.3 * s).abs() < 1e-15);
            assert!(dp_rle(Rho13, a, 0.5).unwrap().value.abs() < 1e-15);
            assert!(dp_rle(Rho1, a, 2.0 / 3.0).unwrap().value.abs() < 1e-15);
            let pc13 = critical_strength(ChannelKind::Depolarizing, Rho13, a, 0.0).unwrap().unwrap();
            let pc1 = critical_strength(ChannelKind::Depolarizing, Rho1, a, 0.0).unwrap().unwrap();
            assert!((pc13 - 0.5).abs() < 1e-8 && (pc1 - 2.0 / 3.0).abs() < 1e-8);
        }
    }

    #[test]
    fn amplitude_damping_values() {
        for a in [0.3, 1.0, FRAC_PI_2, 2.5] {
            let s = f64::sin(a);
            for l in GGHZConfigLabel::ALL {
                assert!((ad_rle(l, a, 0.0).unwrap().value - 0.5 * s).abs() < 1e-15, "{l}");
            }
            assert!((ad_rle(Rho3, a, 0.36).unwrap().value - 0.4 * s).abs() < 1e-15);
            let pc = critical_strength(ChannelKind::AmplitudeDamping, Rho12, a, 0.0).unwrap().unwrap();
            let expected = (1.0 / f64::tan(a / 2.0)).min(1.0);
            assert!((pc - expected).abs() < 1e-8, "{a} {pc} {expected}");
        }
    }

    #[test]
    fn amplitude_damping_crossing() {
        assert_eq!(ad_crossing(FRAC_PI_2).unwrap(), 1.0);
        assert_eq!(ad_crossing(2.0).unwrap(), 1.0);
        assert!(ad_crossing(0.0).is_err() && ad_crossing(PI).is_err());
        for a in [0.3, PI / 3.0, 1.2] {
            let pcr = ad_crossing(a).unwrap();
            assert!(pcr < 1.0);
            assert!((ad_crossing_numeric(a).unwrap() - pcr).abs() < 1e-8);
            let d = |p| ad_rle(Rho13, a, p).unwrap().value - ad_rle(Rho12, a, p).unwrap().value;
            assert!(d(pcr).abs() < 1e-9);
            assert!(d(pcr - 0.05) > 0.0 && d((pcr + 0.05).min(1.0)) < 0.0);
        }
        assert!((ad_crossing(PI / 3.0).unwrap() - 0.60602).abs() < 1e-5);
    }

    #[test]
    fn clamping_is_reported() {
        let r = dp_rle(Rho123, 0.2, 0.9).unwrap();
        assert!(r.clamped && r.value == 0.0 && r.raw < 0.0);
        assert!(!pf_rle(Rho1, 0.2, 0.9).unwrap().clamped);
    }

    #[test]
    fn label_masks() {
        for l in GGHZConfigLabel::ALL {
            assert_eq!(GGHZConfigLabel::from_mask(l.mask()), Some(l));
        }
        assert_eq!(Rho13.mask(), 0b101);
        assert_eq!(Rho123.cardinality(), 3);
    }
}
