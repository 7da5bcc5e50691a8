//! Hierarchy predicates over the localizable entanglement of every noise placement.
//!
//! Chains are written from the noisiest group to the cleanest: `max(group_k) ≤ min(group_{k+1})`.
//! A comparison `a ≤ b` passes when `a ≤ b + slack`; each predicate's margin is the
//! smallest `min - max` over its comparisons.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::DensityMatrix;
use crate::localizable::{localize, Method, OptimizerOptions};
use crate::noise::{apply_local_noise, mask_to_qubits, ChannelKind, NoiseConfig, Scenario};

/// Default comparison slack for exhaustive Pauli searches.
pub const RLE_SLACK: f64 = 1e-9;
/// Default comparison slack for optimizer values.
pub const LE_SLACK: f64 = 1e-6;

pub fn default_slack(method: Method) -> f64 {
    match method {
        Method::Rle => RLE_SLACK,
        Method::Le => LE_SLACK,
    }
}

/// Localized entanglement on `pair` for noise subsets `L`, keyed by bitmask (bit `q` = qubit `q`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LEProfile {
    pub num_qubits: usize,
    pub pair: (usize, usize),
    pub method: Method,
    pub kind: Option<ChannelKind>,
    pub strength: f64,
    pub values: BTreeMap<u32, f64>,
}

impl LEProfile {
    pub fn new(num_qubits: usize, pair: (usize, usize), method: Method) -> Self {
        Self { num_qubits, pair, method, kind: None, strength: 0.0, values: BTreeMap::new() }
    }

    pub fn with_noise(mut self, kind: ChannelKind, strength: f64) -> Self {
        self.kind = Some(kind);
        self.strength = strength;
        self
    }

    pub fn insert(&mut self, mask: u32, value: f64) {
        self.values.insert(mask, value);
    }

    pub fn get(&self, mask: u32) -> Result<f64> {
        self.values.get(&mask).copied().ok_or_else(|| Error::MissingSubset(subset_name(mask)))
    }

    pub fn is_complete(&self) -> bool {
        (0..1u32 << self.num_qubits).all(|m| self.values.contains_key(&m))
    }

    /// Profile with qubits `a` and `b` exchanged in every key.
    pub fn relabeled(&self, a: usize, b: usize) -> Self {
        let swap = |mask: u32| {
            let (ba, bb) = ((mask >> a) & 1, (mask >> b) & 1);
            (mask & !(1 << a) & !(1 << b)) | (ba << b) | (bb << a)
        };
        let mut out = self.clone();
        out.values = self.values.iter().map(|(&m, &v)| (swap(m), v)).collect();
        out
    }
}

/// `{}` or `{1,3}` style name using 1-based qubit labels.
pub fn subset_name(mask: u32) -> String {
    let names: Vec<String> = mask_to_qubits(mask).iter().map(|q| (q + 1).to_string()).collect();
    format!("{{{}}}", names.join(","))
}

/// Evaluates `method` on every noisy version of `rho` (all `2^N` subsets, same channel and strength).
pub fn build_profile(
    rho: &DensityMatrix,
    pair: (usize, usize),
    kind: ChannelKind,
    strength: f64,
    method: Method,
    opts: &OptimizerOptions,
) -> Result<LEProfile> {
    let n = rho.num_qubits();
    if !(3..=4).contains(&n) {
        return domain(format!("profiles need 3 or 4 qubits, got {n}"));
    }
    let mut profile = LEProfile::new(n, pair, method).with_noise(kind, strength);
    for mask in 0..1u32 << n {
        let noisy = apply_local_noise(rho, &NoiseConfig::from_mask(kind, strength, mask)?)?;
        profile.insert(mask, localize(&noisy, pair, method, opts)?.value);
    }
    Ok(profile)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub name: String,
    pub holds: bool,
    /// Worst `min - max` over the predicate's comparisons (`+∞` when it has none).
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyVerdict {
    pub slack: f64,
    pub predicates: Vec<Predicate>,
}

impl HierarchyVerdict {
    pub fn get(&self, name: &str) -> Option<&Predicate> {
        self.predicates.iter().find(|p| p.name == name)
    }

    /// Panics on an unknown name.
    pub fn holds(&self, name: &str) -> bool {
        self.get(name).unwrap_or_else(|| panic!("no predicate named {name}")).holds
    }

    pub fn names(&self) -> Vec<&str> {
        self.predicates.iter().map(|p| p.name.as_str()).collect()
    }

    fn push(&mut self, name: &str, margin: f64) {
        self.predicates.push(Predicate { name: name.to_string(), holds: margin >= -self.slack, margin });
    }
}

/// Masks of all nonempty subsets in `scenario`, grouped by cardinality, noisiest group first.
fn scenario_groups(n: usize, pair: (usize, usize), scenario: Scenario, filter: impl Fn(u32) -> bool) -> Vec<Vec<u32>> {
    let mut by_size: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for mask in 1..1u32 << n {
        if Scenario::of(mask, pair) == scenario && filter(mask) {
            by_size.entry(mask.count_ones() as usize).or_default().push(mask);
        }
    }
    by_size.into_values().rev().collect()
}

fn all_subsets_by_size(n: usize) -> Vec<Vec<u32>> {
    let mut by_size: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for mask in 0..1u32 << n {
        by_size.entry(mask.count_ones() as usize).or_default().push(mask);
    }
    by_size.into_values().rev().collect()
}

fn extreme(profile: &LEProfile, masks: &[u32], max: bool) -> Result<f64> {
    let mut acc = if max { f64::NEG_INFINITY } else { f64::INFINITY };
    for &m in masks {
        let v = profile.get(m)?;
        acc = if max { acc.max(v) } else { acc.min(v) };
    }
    Ok(acc)
}

/// Worst `min(next) - max(prev)` along consecutive groups.
fn chain_margin(profile: &LEProfile, groups: &[Vec<u32>]) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for w in groups.windows(2) {
        worst = worst.min(extreme(profile, &w[1], false)? - extreme(profile, &w[0], true)?);
    }
    Ok(worst)
}

fn flat(profile: &LEProfile, scenario: Scenario) -> Vec<u32> {
    scenario_groups(profile.num_qubits, profile.pair, scenario, |_| true).concat()
}

/// Both-noisy ≤ one-noisy ≤ measured-only noise (noiseless excluded).
fn envelope_margin(profile: &LEProfile) -> Result<f64> {
    let groups = [flat(profile, Scenario::Both), flat(profile, Scenario::One), flat(profile, Scenario::Neither)];
    chain_margin(profile, &groups)
}

fn fine_margin(profile: &LEProfile, scenario: Scenario) -> Result<f64> {
    chain_margin(profile, &scenario_groups(profile.num_qubits, profile.pair, scenario, |_| true))
}

fn cardinality_margin(profile: &LEProfile) -> Result<f64> {
    chain_margin(profile, &all_subsets_by_size(profile.num_qubits))
}

fn check_n(profile: &LEProfile, n: usize) -> Result<()> {
    if profile.num_qubits != n {
        return domain(format!("expected a {n}-qubit profile, got {}", profile.num_qubits));
    }
    Ok(())
}

/// Three-qubit predicates `Env`, `A`, `B`, `C`.
pub fn verdict3(profile: &LEProfile, slack: f64) -> Result<HierarchyVerdict> {
    check_n(profile, 3)?;
    let mut v = HierarchyVerdict { slack, predicates: Vec::new() };
    v.push("Env", envelope_margin(profile)?);
    v.push("A", fine_margin(profile, Scenario::Both)?);
    v.push("B", fine_margin(profile, Scenario::One)?);
    v.push("C", cardinality_margin(profile)?);
    Ok(v)
}

/// Four-qubit predicates `H1`–`H5`; `H2` merges both choices of the noisy retained qubit.
pub fn verdict4(profile: &LEProfile, slack: f64) -> Result<HierarchyVerdict> {
    check_n(profile, 4)?;
    let mut v = HierarchyVerdict { slack, predicates: Vec::new() };
    v.push("H1", fine_margin(profile, Scenario::Neither)?);
    v.push("H2", fine_margin(profile, Scenario::One)?);
    v.push("H3", fine_margin(profile, Scenario::Both)?);
    v.push("H4", envelope_margin(profile)?);
    v.push("H5", cardinality_margin(profile)?);
    Ok(v)
}

/// `verdict3` or `verdict4` according to the register size.
pub fn verdict(profile: &LEProfile, slack: f64) -> Result<HierarchyVerdict> {
    match profile.num_qubits {
        3 => verdict3(profile, slack),
        4 => verdict4(profile, slack),
        n => domain(format!("no hierarchy defined for {n} qubits")),
    }
}

/// One-noisy-retained chain kept separate for each retained qubit `j` (`B(j=..)` or `H2(j=..)`).
pub fn per_j_diagnostic(profile: &LEProfile, slack: f64) -> Result<HierarchyVerdict> {
    let base = match profile.num_qubits {
        3 => "B",
        4 => "H2",
        n => return domain(format!("no hierarchy defined for {n} qubits")),
    };
    let mut v = HierarchyVerdict { slack, predicates: Vec::new() };
    for j in [profile.pair.0, profile.pair.1] {
        let groups = scenario_groups(profile.num_qubits, profile.pair, Scenario::One, |m| m & (1 << j) != 0);
        v.push(&format!("{base}(j={})", j + 1), chain_margin(profile, &groups)?);
    }
    Ok(v)
}

/// `min{E(L={j})} - max{E(L={j, r})}` over retained `j` and the measured qubit `r`; negative values break `B`.
pub fn delta_b(profile: &LEProfile) -> Result<f64> {
    check_n(profile, 3)?;
    let groups = scenario_groups(3, profile.pair, Scenario::One, |_| true);
    // groups = [two noisy, one noisy]
    extreme(profile, &groups[1], false).and_then(|lo| Ok(lo - extreme(profile, &groups[0], true)?))
}
