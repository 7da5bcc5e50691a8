//! Experiment drivers: ensemble scans, gGHZ dynamics, LE−RLE surfaces, Δ_B surfaces and
//! closed-form cross-checks. Every table is rendered as CSV with a `#`-prefixed JSON header.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::closed_forms::{
    ad_crossing, ad_crossing_numeric, closed_form, critical_strength, ordering_chain, GGHZConfigLabel,
};
use crate::ensembles::{gghz, gw, sample, EnsembleKind, RngStream};
use crate::error::{domain, Error, Result};
use crate::hierarchy::{build_profile, default_slack, delta_b, per_j_diagnostic, verdict, HierarchyVerdict, LEProfile};
use crate::linalg::DensityMatrix;
use crate::localizable::{le, localize, rle, Method, OptimizerOptions};
use crate::noise::{apply_local_noise, mask_to_qubits, ChannelKind, NoiseConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// z for a two-sided 95% interval.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `k` successes in `n` trials, as percentages.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 100.0);
    }
    let (k, n) = (k as f64, n as f64);
    let phat = k / n;
    let z2 = Z95 * Z95;
    let centre = (phat + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    (100.0 * (centre - half).max(0.0), 100.0 * (centre + half).min(1.0))
}

/// A rendered table: column names and stringified rows.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn body(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Header line carrying the command, its configuration and a SHA-256 of the body, then the body.
    pub fn render(&self, command: &str, config: &impl Serialize, extra: serde_json::Value) -> Result<String> {
        let body = self.body();
        let header = serde_json::json!({
            "tool": "le-hier",
            "version": VERSION,
            "command": command,
            "config": config,
            "run": extra,
            "content_sha256": sha256_hex(body.as_bytes()),
        });
        Ok(format!("# {header}\n{body}"))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Splits a rendered file into its parsed header and body.
pub fn parse_output(text: &str) -> Result<(serde_json::Value, &str)> {
    let (first, body) = text.split_once('\n').ok_or_else(|| Error::Domain("empty output".into()))?;
    let json = first.strip_prefix("# ").ok_or_else(|| Error::Domain("missing header line".into()))?;
    let header = serde_json::from_str(json).map_err(|e| Error::Domain(format!("bad header: {e}")))?;
    Ok((header, body))
}

fn fmt(v: f64) -> String {
    // adding zero turns -0 into 0
    format!("{}", v + 0.0)
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Runs `f` over `0..n` on `workers` threads, returning results in index order.
pub fn run_indexed<T, F>(workers: usize, range: std::ops::Range<u64>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    pool.install(|| range.into_par_iter().map(&f).collect())
}

// ---------------------------------------------------------------------------
// scans

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub ensemble: EnsembleKind,
    pub noise: ChannelKind,
    pub p: f64,
    pub samples: u64,
    pub seed: u64,
    pub method: Method,
    pub pair: (usize, usize),
    /// `None` picks the method's default.
    pub slack: Option<f64>,
    pub opt: OptimizerOptions,
}

impl ScanConfig {
    /// Desk-scale defaults: 5000 samples for three qubits, 1000 for four.
    pub fn new(ensemble: EnsembleKind, noise: ChannelKind, p: f64) -> Self {
        let n = ensemble.num_qubits();
        Self {
            ensemble,
            noise,
            p,
            samples: if n == 3 { 5000 } else { 1000 },
            seed: 1,
            method: Method::Le,
            pair: (0, 1),
            slack: None,
            opt: OptimizerOptions::for_qubits(n),
        }
    }

    pub fn slack(&self) -> f64 {
        self.slack.unwrap_or_else(|| default_slack(self.method))
    }

    /// Hash of the fields that determine each per-sample record.
    ///
    /// Sample count and slack are left out, so a longer scan reuses a shorter one's checkpoint.
    pub fn hash(&self) -> String {
        let key = serde_json::json!({
            "ensemble": self.ensemble,
            "noise": self.noise,
            "p": self.p,
            "seed": self.seed,
            "method": self.method,
            "pair": self.pair,
            "opt": self.opt,
        });
        sha256_hex(key.to_string().as_bytes())
    }

    fn validate(&self) -> Result<()> {
        let n = self.ensemble.num_qubits();
        let (a, b) = self.pair;
        if a == b || a >= n || b >= n {
            return domain(format!("pair {:?} invalid for {n} qubits", self.pair));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return domain(format!("p = {} outside [0, 1]", self.p));
        }
        Ok(())
    }
}

/// Localized values of one sampled state for every noise subset, indexed by mask.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub index: u64,
    pub values: Vec<f64>,
}

impl ScanRecord {
    pub fn profile(&self, cfg: &ScanConfig) -> LEProfile {
        let mut p = LEProfile::new(cfg.ensemble.num_qubits(), cfg.pair, cfg.method).with_noise(cfg.noise, cfg.p);
        for (m, &v) in self.values.iter().enumerate() {
            p.insert(m as u32, v);
        }
        p
    }
}

/// Count, percentage and Wilson interval for one predicate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelSummary {
    pub label: String,
    pub satisfied: u64,
    pub percentage: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub samples: u64,
    pub labels: Vec<LabelSummary>,
    /// Per-retained-qubit form of the one-noisy chain.
    pub diagnostics: Vec<LabelSummary>,
    pub wall_time_s: f64,
}

impl ScanSummary {
    pub fn get(&self, label: &str) -> Option<&LabelSummary> {
        self.labels.iter().chain(&self.diagnostics).find(|l| l.label == label)
    }
}

pub struct ScanOutput {
    pub summary: ScanSummary,
    pub records: Vec<ScanRecord>,
    pub verdicts: Vec<HierarchyVerdict>,
    pub diagnostics: Vec<HierarchyVerdict>,
}

/// Noise profile of sample `index` of the configured ensemble.
pub fn scan_sample(cfg: &ScanConfig, index: u64) -> Result<ScanRecord> {
    let psi = sample(cfg.ensemble, RngStream::new(cfg.seed, index));
    let profile = build_profile(&psi.to_density(), cfg.pair, cfg.noise, cfg.p, cfg.method, &cfg.opt)?;
    Ok(ScanRecord { index, values: profile.values.values().copied().collect() })
}

/// Samples evaluated between checkpoint flushes.
const CHECKPOINT_CHUNK: u64 = 64;

/// Runs the scan, resuming from and appending to `checkpoint` when given.
///
/// Results depend only on the configuration, never on `workers` or on interruptions.
pub fn run_scan(cfg: &ScanConfig, workers: usize, checkpoint: Option<&Path>) -> Result<ScanOutput> {
    cfg.validate()?;
    let start = Instant::now();
    let mut done: BTreeMap<u64, ScanRecord> = match checkpoint {
        Some(path) => load_checkpoint(path, cfg)?,
        None => BTreeMap::new(),
    };
    done.retain(|&i, _| i < cfg.samples);
    let missing: Vec<u64> = (0..cfg.samples).filter(|i| !done.contains_key(i)).collect();
    if let Some(path) = checkpoint {
        if done.is_empty() {
            fs::write(path, format!("{}\n", serde_json::json!({ "config_hash": cfg.hash() })))
                .map_err(|e| io_err(path, e))?;
        } else {
            terminate_last_line(path)?;
        }
    }
    for chunk in missing.chunks(CHECKPOINT_CHUNK as usize) {
        let fresh = run_indexed(workers, 0..chunk.len() as u64, |k| scan_sample(cfg, chunk[k as usize]))?;
        if let Some(path) = checkpoint {
            let mut file = OpenOptions::new().append(true).open(path).map_err(|e| io_err(path, e))?;
            for r in &fresh {
                let line = serde_json::to_string(r).map_err(|e| Error::Domain(e.to_string()))?;
                writeln!(file, "{line}").map_err(|e| io_err(path, e))?;
            }
        }
        done.extend(fresh.into_iter().map(|r| (r.index, r)));
    }
    let records: Vec<ScanRecord> = done.into_values().collect();
    let slack = cfg.slack();
    let mut verdicts = Vec::with_capacity(records.len());
    let mut diagnostics = Vec::with_capacity(records.len());
    for r in &records {
        let p = r.profile(cfg);
        verdicts.push(verdict(&p, slack)?);
        diagnostics.push(per_j_diagnostic(&p, slack)?);
    }
    let summary = ScanSummary {
        samples: records.len() as u64,
        labels: summarize(&verdicts),
        diagnostics: summarize(&diagnostics),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(ScanOutput { summary, records, verdicts, diagnostics })
}

fn summarize(verdicts: &[HierarchyVerdict]) -> Vec<LabelSummary> {
    let Some(first) = verdicts.first() else { return Vec::new() };
    let n = verdicts.len() as u64;
    first
        .names()
        .into_iter()
        .map(|name| {
            let k = verdicts.iter().filter(|v| v.holds(name)).count() as u64;
            let (lo, hi) = wilson_interval(k, n);
            LabelSummary {
                label: name.to_string(),
                satisfied: k,
                percentage: 100.0 * k as f64 / n as f64,
                wilson_low: lo,
                wilson_high: hi,
            }
        })
        .collect()
}

fn load_checkpoint(path: &Path, cfg: &ScanConfig) -> Result<BTreeMap<u64, ScanRecord>> {
    let file = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(BTreeMap::new()),
        Err(e) => return Err(io_err(path, e)),
    };
    let mut lines = BufReader::new(file).lines();
    let header = match lines.next() {
        Some(line) => line.map_err(|e| io_err(path, e))?,
        None => return Ok(BTreeMap::new()),
    };
    let hash = serde_json::from_str::<serde_json::Value>(&header)
        .ok()
        .and_then(|v| v.get("config_hash").and_then(|h| h.as_str()).map(str::to_owned));
    if hash.as_deref() != Some(cfg.hash().as_str()) {
        return Ok(BTreeMap::new());
    }
    let width = 1usize << cfg.ensemble.num_qubits();
    let mut out = BTreeMap::new();
    for line in lines {
        let line = line.map_err(|e| io_err(path, e))?;
        // a torn final line from an interrupted write is simply recomputed
        if let Ok(r) = serde_json::from_str::<ScanRecord>(&line) {
            if r.values.len() == width {
                out.insert(r.index, r);
            }
        }
    }
    Ok(out)
}

/// Ends a torn final line so appended records start on a fresh one.
fn terminate_last_line(path: &Path) -> Result<()> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    if bytes.last().is_some_and(|&b| b != b'\n') {
        let mut file = OpenOptions::new().append(true).open(path).map_err(|e| io_err(path, e))?;
        file.write_all(b"\n").map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

/// `E_` for the empty set, otherwise `E_` followed by 1-based qubit digits.
pub fn value_column(mask: u32) -> String {
    let digits: String = mask_to_qubits(mask).iter().map(|q| (q + 1).to_string()).collect();
    format!("E_{digits}")
}

/// Per-sample verdict table.
pub fn scan_table(cfg: &ScanConfig, out: &ScanOutput) -> Table {
    let n = cfg.ensemble.num_qubits();
    let mut columns = vec!["index".to_string()];
    columns.extend((0..1u32 << n).map(value_column));
    let names: Vec<String> = out
        .verdicts
        .first()
        .into_iter()
        .chain(out.diagnostics.first())
        .flat_map(|v| v.names().into_iter().map(str::to_owned).collect::<Vec<_>>())
        .collect();
    for name in &names {
        columns.push(name.clone());
        columns.push(format!("{name}_margin"));
    }
    if n == 3 {
        columns.push("delta_b".into());
    }
    let mut table = Table::new(columns);
    for ((r, v), d) in out.records.iter().zip(&out.verdicts).zip(&out.diagnostics) {
        let mut row = vec![r.index.to_string()];
        row.extend(r.values.iter().map(|&x| fmt(x)));
        for p in v.predicates.iter().chain(&d.predicates) {
            row.push(u8::from(p.holds).to_string());
            row.push(fmt(p.margin));
        }
        if n == 3 {
            row.push(delta_b(&r.profile(cfg)).map(fmt).unwrap_or_default());
        }
        table.rows.push(row);
    }
    table
}

/// One row per predicate with count, percentage and Wilson interval.
pub fn summary_table(summary: &ScanSummary) -> Table {
    let mut table = Table::new(
        ["label", "satisfied", "samples", "percentage", "wilson_low", "wilson_high"].map(String::from).to_vec(),
    );
    for l in summary.labels.iter().chain(&summary.diagnostics) {
        table.rows.push(vec![
            l.label.clone(),
            l.satisfied.to_string(),
            summary.samples.to_string(),
            format!("{:.2}", l.percentage),
            format!("{:.2}", l.wilson_low),
            format!("{:.2}", l.wilson_high),
        ]);
    }
    table
}

/// Default checkpoint location next to an output file.
pub fn checkpoint_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".ckpt");
    out.with_file_name(name)
}

// ---------------------------------------------------------------------------
// gGHZ dynamics

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicsConfig {
    pub alpha: f64,
    pub beta: f64,
    pub kinds: Vec<ChannelKind>,
    pub p_values: Vec<f64>,
    pub methods: Vec<Method>,
    pub opt: OptimizerOptions,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            alpha: PI / 3.0,
            beta: 0.0,
            kinds: ChannelKind::ALL.to_vec(),
            p_values: grid(0.0, 1.0, 21),
            methods: vec![Method::Le, Method::Rle],
            opt: OptimizerOptions::for_qubits(3),
        }
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn noisy_gghz(alpha: f64, beta: f64, kind: ChannelKind, p: f64, mask: u32) -> Result<DensityMatrix> {
    let rho = gghz(alpha, beta)?.to_density();
    apply_local_noise(&rho, &NoiseConfig::from_mask(kind, p, mask)?)
}

/// Localized entanglement of the noisy gGHZ state for every label, per channel and strength.
pub fn dynamics(cfg: &DynamicsConfig, workers: usize) -> Result<Table> {
    let mut columns = vec!["kind".to_string(), "p".to_string()];
    for m in &cfg.methods {
        for l in GGHZConfigLabel::ALL {
            columns.push(format!("{}_{}", m.as_str(), l));
        }
    }
    let jobs: Vec<(ChannelKind, f64)> =
        cfg.kinds.iter().flat_map(|&k| cfg.p_values.iter().map(move |&p| (k, p))).collect();
    let rows = run_indexed(workers, 0..jobs.len() as u64, |i| {
        let (kind, p) = jobs[i as usize];
        let mut row = vec![kind.to_string(), fmt(p)];
        for &m in &cfg.methods {
            for l in GGHZConfigLabel::ALL {
                let rho = noisy_gghz(cfg.alpha, cfg.beta, kind, p, l.mask())?;
                row.push(fmt(localize(&rho, (0, 1), m, &cfg.opt)?.value));
            }
        }
        Ok(row)
    })?;
    Ok(Table { columns, rows })
}

// ---------------------------------------------------------------------------
// LE − RLE surfaces

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceAxis {
    Beta,
    P,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorSurfaceConfig {
    pub kind: ChannelKind,
    pub labels: Vec<GGHZConfigLabel>,
    pub alphas: Vec<f64>,
    /// What the second grid axis varies; the other parameter stays at its fixed value.
    pub axis: SurfaceAxis,
    pub second: Vec<f64>,
    pub beta: f64,
    pub p: f64,
    pub opt: OptimizerOptions,
}

impl ErrorSurfaceConfig {
    pub fn new(kind: ChannelKind) -> Self {
        let alpha_hi = if kind == ChannelKind::AmplitudeDamping { PI } else { FRAC_PI_2 };
        Self {
            kind,
            labels: vec![GGHZConfigLabel::Rho123],
            alphas: grid(0.0, alpha_hi, 11),
            axis: SurfaceAxis::P,
            second: grid(0.0, 1.0, 11),
            beta: 0.0,
            p: 0.5,
            opt: OptimizerOptions::for_qubits(3),
        }
    }
}

/// `ε = LE - RLE` over the configured grid.
pub fn error_surface(cfg: &ErrorSurfaceConfig, workers: usize) -> Result<Table> {
    let columns = ["label", "alpha", "beta", "p", "le", "rle", "epsilon"].map(String::from).to_vec();
    let mut jobs = Vec::new();
    for &l in &cfg.labels {
        for &a in &cfg.alphas {
            for &s in &cfg.second {
                let (b, p) = match cfg.axis {
                    SurfaceAxis::Beta => (s, cfg.p),
                    SurfaceAxis::P => (cfg.beta, s),
                };
                jobs.push((l, a, b, p));
            }
        }
    }
    let rows = run_indexed(workers, 0..jobs.len() as u64, |i| {
        let (l, a, b, p) = jobs[i as usize];
        let rho = noisy_gghz(a, b, cfg.kind, p, l.mask())?;
        let lv = le(&rho, (0, 1), &cfg.opt)?.value;
        let rv = rle(&rho, (0, 1))?.value;
        Ok(vec![l.to_string(), fmt(a), fmt(b), fmt(p), fmt(lv), fmt(rv), fmt(lv - rv)])
    })?;
    Ok(Table { columns, rows })
}

// ---------------------------------------------------------------------------
// Δ_B surfaces on gW states

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaBConfig {
    pub kind: ChannelKind,
    pub p: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub gamma1: f64,
    pub gamma2: f64,
    pub method: Method,
    pub opt: OptimizerOptions,
}

impl DeltaBConfig {
    pub fn new(kind: ChannelKind, p: f64) -> Self {
        Self {
            kind,
            p,
            alphas: grid(0.0, PI, 21),
            betas: grid(0.0, PI, 21),
            gamma1: 0.0,
            gamma2: 0.0,
            method: Method::Le,
            opt: OptimizerOptions::for_qubits(3),
        }
    }
}

/// Masks entering Δ_B with the pair (0, 1): `{1}, {2}, {1,3}, {2,3}`.
const DELTA_B_MASKS: [u32; 4] = [0b001, 0b010, 0b101, 0b110];

/// Δ_B at one gW point together with the four values it is built from.
pub fn delta_b_point(cfg: &DeltaBConfig, alpha: f64, beta: f64) -> Result<(f64, [f64; 4])> {
    let rho = gw(alpha, beta, cfg.gamma1, cfg.gamma2)?.to_density();
    let mut profile = LEProfile::new(3, (0, 1), cfg.method).with_noise(cfg.kind, cfg.p);
    let mut vals = [0.0; 4];
    for (slot, &mask) in vals.iter_mut().zip(&DELTA_B_MASKS) {
        let noisy = apply_local_noise(&rho, &NoiseConfig::from_mask(cfg.kind, cfg.p, mask)?)?;
        *slot = localize(&noisy, (0, 1), cfg.method, &cfg.opt)?.value;
        profile.insert(mask, *slot);
    }
    Ok((delta_b(&profile)?, vals))
}

pub fn delta_b_surface(cfg: &DeltaBConfig, workers: usize) -> Result<Table> {
    let mut columns = vec!["alpha".to_string(), "beta".to_string()];
    columns.extend(DELTA_B_MASKS.iter().map(|&m| value_column(m)));
    columns.push("delta_b".into());
    let jobs: Vec<(f64, f64)> = cfg.alphas.iter().flat_map(|&a| cfg.betas.iter().map(move |&b| (a, b))).collect();
    let rows = run_indexed(workers, 0..jobs.len() as u64, |i| {
        let (a, b) = jobs[i as usize];
        let (d, vals) = delta_b_point(cfg, a, b)?;
        let mut row = vec![fmt(a), fmt(b)];
        row.extend(vals.iter().map(|&v| fmt(v)));
        row.push(fmt(d));
        Ok(row)
    })?;
    Ok(Table { columns, rows })
}

// ---------------------------------------------------------------------------
// closed-form cross-checks

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormCheckConfig {
    pub kinds: Vec<ChannelKind>,
    pub alphas: Vec<f64>,
    /// Extra angles above π/2, used only for amplitude damping.
    pub ad_extra_alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub p_values: Vec<f64>,
    pub tolerance: f64,
    pub ordering_slack: f64,
}

impl Default for ClosedFormCheckConfig {
    fn default() -> Self {
        Self {
            kinds: ChannelKind::ALL.to_vec(),
            alphas: (1..=6).map(|k| k as f64 * PI / 12.0).collect(),
            ad_extra_alphas: (1..=5).map(|k| PI - k as f64 * PI / 12.0).collect(),
            betas: vec![0.0, PI / 4.0, PI / 2.0],
            p_values: grid(0.0, 1.0, 11),
            tolerance: 1e-9,
            ordering_slack: 1e-9,
        }
    }
}

/// Worst |closed form − numerical RLE| for one channel and label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationRow {
    pub kind: ChannelKind,
    pub label: GGHZConfigLabel,
    pub max_deviation: f64,
    pub worst_point: (f64, f64, f64),
    pub pass: bool,
}

/// Worst margin of one link of an ordering chain, evaluated on numerical RLE values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderingRow {
    pub kind: ChannelKind,
    pub link: String,
    pub worst_margin: f64,
    pub worst_point: (f64, f64, f64),
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalRow {
    pub name: String,
    pub expected: f64,
    pub found: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormReport {
    pub deviations: Vec<DeviationRow>,
    pub orderings: Vec<OrderingRow>,
    pub criticals: Vec<CriticalRow>,
}

impl ClosedFormReport {
    /// Closed forms and critical strengths agree; orderings are reported separately.
    pub fn pass(&self) -> bool {
        self.deviations.iter().all(|d| d.pass) && self.criticals.iter().all(|c| c.pass)
    }

    pub fn orderings_pass(&self) -> bool {
        self.orderings.iter().all(|o| o.pass)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(["check", "kind", "item", "value", "at_alpha", "at_beta", "at_p", "pass"].map(String::from).to_vec());
        for d in &self.deviations {
            let (a, b, p) = d.worst_point;
            t.rows.push(vec!["deviation".into(), d.kind.to_string(), d.label.to_string(), fmt(d.max_deviation), fmt(a), fmt(b), fmt(p), u8::from(d.pass).to_string()]);
        }
        for o in &self.orderings {
            let (a, b, p) = o.worst_point;
            t.rows.push(vec!["ordering".into(), o.kind.to_string(), o.link.clone(), fmt(o.worst_margin), fmt(a), fmt(b), fmt(p), u8::from(o.pass).to_string()]);
        }
        for c in &self.criticals {
            t.rows.push(vec!["critical".into(), String::new(), c.name.clone(), fmt(c.found - c.expected), String::new(), String::new(), fmt(c.found), u8::from(c.pass).to_string()]);
        }
        t
    }
}

/// Compares every closed form with the exhaustive Pauli search, checks the ordering chains and
/// locates the critical strengths.
pub fn check_closed_forms(cfg: &ClosedFormCheckConfig, workers: usize) -> Result<ClosedFormReport> {
    let mut deviations = Vec::new();
    let mut orderings = Vec::new();
    for &kind in &cfg.kinds {
        let mut alphas = cfg.alphas.clone();
        if kind == ChannelKind::AmplitudeDamping {
            alphas.extend(&cfg.ad_extra_alphas);
        }
        let points: Vec<(f64, f64, f64)> = alphas
            .iter()
            .flat_map(|&a| cfg.betas.iter().flat_map(move |&b| cfg.p_values.iter().map(move |&p| (a, b, p))))
            .collect();
        let evaluated = run_indexed(workers, 0..points.len() as u64, |i| {
            let (a, b, p) = points[i as usize];
            let mut out = BTreeMap::new();
            for l in GGHZConfigLabel::ALL {
                let numeric = rle(&noisy_gghz(a, b, kind, p, l.mask())?, (0, 1))?.value;
                let analytic = closed_form(kind, l, a, b, p)?.value;
                out.insert(l, (numeric, analytic));
            }
            Ok(out)
        })?;
        for l in GGHZConfigLabel::ALL {
            let mut worst = (0.0, points[0]);
            for (pt, vals) in points.iter().zip(&evaluated) {
                let (num, ana) = vals[&l];
                let d = (num - ana).abs();
                if d > worst.0 {
                    worst = (d, *pt);
                }
            }
            deviations.push(DeviationRow { kind, label: l, max_deviation: worst.0, worst_point: worst.1, pass: worst.0 < cfg.tolerance });
        }
        let mut link_worst: BTreeMap<String, (f64, (f64, f64, f64))> = BTreeMap::new();
        let mut link_order = Vec::new();
        for (pt, vals) in points.iter().zip(&evaluated) {
            for link in ordering_chain(kind, pt.0, pt.2)? {
                // the flipped amplitude-damping link is tracked under its own name
                let name = link.to_string();
                let margin = link.margin(vals[&link.lhs].0, vals[&link.rhs].0);
                let entry = link_worst.entry(name.clone()).or_insert_with(|| {
                    link_order.push(name.clone());
                    (f64::INFINITY, *pt)
                });
                if margin < entry.0 {
                    *entry = (margin, *pt);
                }
            }
        }
        for name in link_order {
            let (m, pt) = link_worst[&name];
            orderings.push(OrderingRow { kind, link: name, worst_margin: m, worst_point: pt, pass: m >= -cfg.ordering_slack });
        }
    }
    Ok(ClosedFormReport { deviations, orderings, criticals: critical_checks(cfg)? })
}

fn critical_checks(cfg: &ClosedFormCheckConfig) -> Result<Vec<CriticalRow>> {
    const TOL: f64 = 1e-8;
    let mut rows = Vec::new();
    let mut push = |name: String, expected: f64, found: f64, tol: f64| {
        rows.push(CriticalRow { name, expected, found, pass: (found - expected).abs() < tol });
    };
    for &a in &cfg.alphas {
        let dp13 = critical_strength(ChannelKind::Depolarizing, GGHZConfigLabel::Rho13, a, 0.0)?.unwrap_or(f64::NAN);
        push(format!("dp rho13 p_c alpha={a:.6}"), 0.5, dp13, TOL);
        let dp1 = critical_strength(ChannelKind::Depolarizing, GGHZConfigLabel::Rho1, a, 0.0)?.unwrap_or(f64::NAN);
        push(format!("dp rho1 p_c alpha={a:.6}"), 2.0 / 3.0, dp1, TOL);
    }
    for &a in cfg.alphas.iter().chain(&cfg.ad_extra_alphas) {
        let pc = critical_strength(ChannelKind::AmplitudeDamping, GGHZConfigLabel::Rho12, a, 0.0)?.unwrap_or(f64::NAN);
        push(format!("ad rho12 p_c alpha={a:.6}"), (1.0 / (a / 2.0).tan()).min(1.0), pc, TOL);
        push(format!("ad p_cr alpha={a:.6}"), ad_crossing(a)?, ad_crossing_numeric(a)?, TOL);
    }
    push("ad p_cr alpha=pi/2".into(), 1.0, ad_crossing(FRAC_PI_2)?, 1e-10);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_values() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 40.38).abs() < 0.01 && (hi - 59.62).abs() < 0.01);
        let (lo, hi) = wilson_interval(100, 100);
        assert!(hi == 100.0 && (lo - 96.30).abs() < 0.01);
        let (lo, _) = wilson_interval(0, 10);
        assert_eq!(lo, 0.0);
    }

    #[test]
    fn table_render_round_trip() {
        let mut t = Table::new(vec!["a".into(), "b".into()]);
        t.rows.push(vec!["1".into(), "2".into()]);
        let text = t.render("demo", &serde_json::json!({"x": 1}), serde_json::json!({})).unwrap();
        let (header, body) = parse_output(&text).unwrap();
        assert_eq!(body, "a,b\n1,2\n");
        assert_eq!(header["content_sha256"].as_str().unwrap(), sha256_hex(body.as_bytes()));
        assert_eq!(header["command"], "demo");
    }

    #[test]
    fn value_columns() {
        assert_eq!(value_column(0), "E_");
        assert_eq!(value_column(0b1101), "E_134");
    }

    #[test]
    fn grid_endpoints() {
        assert_eq!(grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(grid(2.0, 3.0, 1), vec![2.0]);
    }

    #[test]
    fn small_rle_scan_is_worker_independent() {
        let mut cfg = ScanConfig::new(EnsembleKind::GhzClass3, ChannelKind::PhaseFlip, 0.1);
        cfg.samples = 12;
        cfg.method = Method::Rle;
        let a = run_scan(&cfg, 1, None).unwrap();
        let b = run_scan(&cfg, 3, None).unwrap();
        assert_eq!(scan_table(&cfg, &a).body(), scan_table(&cfg, &b).body());
        assert_eq!(a.summary.labels, b.summary.labels);
    }
}
