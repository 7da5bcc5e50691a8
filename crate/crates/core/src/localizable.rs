//! Localizable entanglement on a qubit pair: exhaustive Pauli search (RLE) and
//! continuous optimization over measurement angles (LE).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::{DensityMatrix, C64, ZERO};
use crate::measurement::{
    measurement_branches, product_ket, AngleBasis, LocalBasis, MeasurementSetting, PauliAxis, ProjectionKernel,
};
use crate::negativity::{negativity, signed_pt_margin_search, weighted_negativity_search};
use crate::optimize::nelder_mead;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rle,
    Le,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Rle => "rle",
            Method::Le => "le",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rle" => Ok(Method::Rle),
            "le" => Ok(Method::Le),
            other => domain(format!("unknown method {other:?} (expected le or rle)")),
        }
    }
}

/// Grid-then-simplex settings for [`le`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    /// Grid cells along θ per measured qubit.
    pub grid_theta: usize,
    /// Grid cells along φ per measured qubit.
    pub grid_phi: usize,
    /// How many of the best grid cells seed a simplex run (the RLE optimum is always added).
    pub starts: usize,
    /// Evaluation budget per simplex run.
    pub max_evals: usize,
    /// Simplex diameter at which a run stops.
    pub tol: f64,
}

impl OptimizerOptions {
    /// 9×16 grid per qubit for three qubits, 7×12 for four.
    pub fn for_qubits(n: usize) -> Self {
        let (grid_theta, grid_phi) = if n >= 4 { (7, 12) } else { (9, 16) };
        Self { grid_theta, grid_phi, starts: 5, max_evals: 2000, tol: 1e-7 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_theta == 0 || self.grid_phi == 0 || self.max_evals == 0 || !(self.tol > 0.0) {
            return domain(format!("invalid optimizer options {self:?}"));
        }
        Ok(())
    }
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self::for_qubits(3)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationResult {
    pub value: f64,
    pub best_setting: MeasurementSetting,
    /// `(p_k, E(ρ_k))` per outcome of the best setting.
    pub branch_values: Vec<(f64, f64)>,
    pub method: Method,
}

/// `Σ_k p_k E(ρ_k)` for the given setting; zero-probability branches contribute nothing.
pub fn average_entanglement(rho: &DensityMatrix, setting: &MeasurementSetting) -> Result<f64> {
    Ok(branch_values(rho, setting)?.iter().map(|(p, e)| p * e).sum())
}

fn branch_values(rho: &DensityMatrix, setting: &MeasurementSetting) -> Result<Vec<(f64, f64)>> {
    let kept = setting.retained(rho.num_qubits());
    if kept.len() != 2 {
        return domain(format!("exactly two qubits must stay unmeasured, got {kept:?}"));
    }
    measurement_branches(rho, setting)?
        .into_iter()
        .map(|b| match b.state {
            Some(s) => Ok((b.probability, negativity(&s)?)),
            None => Ok((b.probability, 0.0)),
        })
        .collect()
}

fn measured_for_pair(rho: &DensityMatrix, pair: (usize, usize)) -> Result<Vec<usize>> {
    let n = rho.num_qubits();
    if !(3..=4).contains(&n) {
        return domain(format!("localization is defined here for 3 or 4 qubits, got {n}"));
    }
    let (a, b) = pair;
    if a == b || a >= n || b >= n {
        return domain(format!("invalid pair {pair:?} for {n} qubits"));
    }
    Ok((0..n).filter(|&q| q != a && q != b).collect())
}

/// Single-pass evaluator of the branch-averaged negativity for fixed `ρ` and measured set.
struct Objective {
    kernel: ProjectionKernel,
    measured: usize,
    buf: Vec<C64>,
}

impl Objective {
    fn new(rho: &DensityMatrix, measured: &[usize]) -> Result<Self> {
        let kernel = ProjectionKernel::new(rho, measured)?;
        let buf = vec![ZERO; kernel.meas_dim()];
        Ok(Self { kernel, measured: measured.len(), buf })
    }

    fn eval_kets(&mut self, kets: &[[[C64; 2]; 2]]) -> f64 {
        let mut total = 0.0;
        for outcome in 0..(1usize << self.measured) {
            product_ket(kets, outcome, &mut self.buf);
            total += weighted_negativity_search(&self.kernel.project(&self.buf));
        }
        total
    }

    /// The objective where positive; elsewhere the summed signed PT margins, which are at most zero.
    ///
    /// The negativity is flat at zero on separable regions, which would leave the simplex stranded.
    fn eval_kets_ranked(&mut self, kets: &[[[C64; 2]; 2]]) -> f64 {
        let total = self.eval_kets(kets);
        if total > 0.0 {
            return total;
        }
        let mut margin = 0.0;
        for outcome in 0..(1usize << self.measured) {
            product_ket(kets, outcome, &mut self.buf);
            margin += signed_pt_margin_search(&self.kernel.project(&self.buf));
        }
        margin.min(0.0)
    }

    /// `x` holds `(θ, φ)` per measured qubit.
    fn eval_angles_ranked(&mut self, x: &[f64]) -> f64 {
        let kets: Vec<_> = x.chunks(2).map(|c| AngleBasis { theta: c[0], phi: c[1] }.kets()).collect();
        self.eval_kets_ranked(&kets)
    }
}

/// Settings closer than this count as tied during the Pauli search.
const RLE_TIE_TOL: f64 = 1e-12;

/// Exact maximum over all `3^(N-2)` Pauli settings on the complement of `pair`.
///
/// Ties resolve to the smallest multi-index, with the first measured qubit as the leading digit.
pub fn rle(rho: &DensityMatrix, pair: (usize, usize)) -> Result<LocalizationResult> {
    let measured = measured_for_pair(rho, pair)?;
    let mut obj = Objective::new(rho, &measured)?;
    let (best_axes, _) = best_pauli(&mut obj, measured.len());
    let setting = MeasurementSetting::pauli(measured, &best_axes)?;
    finish(rho, setting, Method::Rle)
}

fn best_pauli(obj: &mut Objective, r: usize) -> (Vec<PauliAxis>, f64) {
    let count = 3usize.pow(r as u32);
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    for index in 0..count {
        let axes = pauli_digits(index, r);
        let kets: Vec<_> = axes.iter().map(|a| a.kets()).collect();
        let v = obj.eval_kets(&kets);
        if v > best.1 + RLE_TIE_TOL {
            best = (axes, v);
        }
    }
    best
}

fn pauli_digits(mut index: usize, r: usize) -> Vec<PauliAxis> {
    let mut axes = vec![PauliAxis::X; r];
    for slot in axes.iter_mut().rev() {
        *slot = PauliAxis::from_code((index % 3) as u8).unwrap();
        index /= 3;
    }
    axes
}

fn finish(rho: &DensityMatrix, setting: MeasurementSetting, method: Method) -> Result<LocalizationResult> {
    let branch_values = branch_values(rho, &setting)?;
    let value = branch_values.iter().map(|(p, e)| p * e).sum();
    Ok(LocalizationResult { value, best_setting: setting, branch_values, method })
}

/// Maximum over arbitrary rank-1 projective measurements on the complement of `pair`.
///
/// A coarse grid picks the best `opts.starts` points; simplex runs start from
/// those and from the RLE optimum. Candidates are rescored exactly against the
/// RLE setting, so the result is never below the RLE value.
pub fn le(rho: &DensityMatrix, pair: (usize, usize), opts: &OptimizerOptions) -> Result<LocalizationResult> {
    opts.validate()?;
    let measured = measured_for_pair(rho, pair)?;
    let r = measured.len();
    let mut obj = Objective::new(rho, &measured)?;

    let (pauli_axes, _) = best_pauli(&mut obj, r);
    let pauli_start: Vec<f64> = pauli_axes
        .iter()
        .flat_map(|a| {
            let b = a.angles();
            [b.theta, b.phi]
        })
        .collect();

    let d_theta = PI / opts.grid_theta as f64;
    let d_phi = 2.0 * PI / opts.grid_phi as f64;
    let cells = grid_cells(&obj, opts.grid_theta, opts.grid_phi, d_theta, d_phi);
    let mut ranked: Vec<(usize, f64)> = cells.into_iter().map(|c| c.rank()).enumerate().collect();
    // descending by value, ascending by cell index on ties
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut starts: Vec<Vec<f64>> = ranked
        .iter()
        .take(opts.starts)
        .map(|&(idx, _)| cell_point(idx, r, opts.grid_theta, opts.grid_phi, d_theta, d_phi))
        .collect();
    starts.push(pauli_start);

    let steps: Vec<f64> = (0..r).flat_map(|_| [d_theta / 2.0, d_phi / 2.0]).collect();
    let pauli = MeasurementSetting::pauli(measured.clone(), &pauli_axes)?;
    let mut best = finish(rho, pauli, Method::Le)?;
    for start in &starts {
        let m = nelder_mead(|x| -obj.eval_angles_ranked(x), start, &steps, opts.tol, opts.max_evals);
        // the search objective is approximate, so every candidate is rescored exactly
        if -m.value <= 0.0 || -m.value < best.value - SEARCH_SLOP {
            continue;
        }
        let bases: Vec<LocalBasis> =
            m.x.chunks(2).map(|c| LocalBasis::Angles(AngleBasis::wrapped(c[0], c[1]))).collect();
        let candidate = finish(rho, MeasurementSetting::new(measured.clone(), bases)?, Method::Le)?;
        if candidate.value > best.value {
            best = candidate;
        }
    }
    Ok(best)
}

/// Candidates this far below the incumbent by the search objective are not rescored.
const SEARCH_SLOP: f64 = 1e-6;

/// Grid-cell score: the objective and, for ranking separable cells, the summed PT margins.
#[derive(Clone, Copy, Default)]
struct CellScore {
    value: f64,
    margin: f64,
}

impl CellScore {
    fn rank(self) -> f64 {
        if self.value > 0.0 {
            self.value
        } else {
            self.margin.min(0.0)
        }
    }
}

/// Scores at every grid point, indexed with the first measured qubit's θ as the leading digit.
///
/// θ sits at cell centers and φ on cell edges, so the real-amplitude plane `φ = 0` is sampled.
/// Measured qubits are contracted one at a time so the cost per point is dominated by the last qubit.
fn grid_cells(obj: &Objective, gt: usize, gp: usize, dt: f64, dp: f64) -> Vec<CellScore> {
    let per_qubit: Vec<[[C64; 2]; 2]> = (0..gt * gp)
        .map(|c| {
            let (i, j) = (c / gp, c % gp);
            AngleBasis { theta: (i as f64 + 0.5) * dt, phi: j as f64 * dp }.kets()
        })
        .collect();
    grid_values(&obj.kernel, &per_qubit)
}

/// Scores over all points of the measured qubits still present in `kernel`.
fn grid_values(kernel: &ProjectionKernel, per_qubit: &[[[C64; 2]; 2]]) -> Vec<CellScore> {
    if kernel.meas_dim() == 2 {
        return per_qubit
            .iter()
            .map(|kets| {
                let mut s = CellScore::default();
                for k in kets {
                    let block = kernel.project(k);
                    s.value += weighted_negativity_search(&block);
                    s.margin += signed_pt_margin_search(&block);
                }
                s
            })
            .collect();
    }
    let mut out = Vec::new();
    for kets in per_qubit {
        let first = grid_values(&kernel.contract_leading(&kets[0]), per_qubit);
        let second = grid_values(&kernel.contract_leading(&kets[1]), per_qubit);
        out.extend(first.iter().zip(&second).map(|(a, b)| CellScore { value: a.value + b.value, margin: a.margin + b.margin }));
    }
    out
}

fn cell_point(idx: usize, r: usize, gt: usize, gp: usize, dt: f64, dp: f64) -> Vec<f64> {
    let per = gt * gp;
    let mut x = vec![0.0; 2 * r];
    let mut rest = idx;
    for q in (0..r).rev() {
        let c = rest % per;
        rest /= per;
        x[2 * q] = ((c / gp) as f64 + 0.5) * dt;
        x[2 * q + 1] = (c % gp) as f64 * dp;
    }
    x
}

/// `LE - RLE` for the pair.
pub fn epsilon(rho: &DensityMatrix, pair: (usize, usize), opts: &OptimizerOptions) -> Result<f64> {
    Ok(le(rho, pair, opts)?.value - rle(rho, pair)?.value)
}

/// Runs the chosen method.
pub fn localize(rho: &DensityMatrix, pair: (usize, usize), method: Method, opts: &OptimizerOptions) -> Result<LocalizationResult> {
    match method {
        Method::Rle => rle(rho, pair),
        Method::Le => le(rho, pair, opts),
    }
}
