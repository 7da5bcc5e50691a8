use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use le_hierarchy::closed_forms::GGHZConfigLabel;
use le_hierarchy::ensembles::EnsembleKind;
use le_hierarchy::experiments::{
    check_closed_forms, checkpoint_path, delta_b_surface, dynamics, error_surface, grid, run_scan, scan_table,
    summary_table, ClosedFormCheckConfig, DeltaBConfig, DynamicsConfig, ErrorSurfaceConfig, ScanConfig, SurfaceAxis,
    Table,
};
use le_hierarchy::localizable::{Method, OptimizerOptions};
use le_hierarchy::noise::ChannelKind;
use le_hierarchy::Error;

#[derive(Parser)]
#[command(name = "le-hier", version, about = "Localizable-entanglement hierarchies of noisy multi-qubit states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score random ensemble samples against the hierarchies.
    Scan(ScanArgs),
    /// LE and RLE of a noisy gGHZ state against noise strength.
    Dynamics(DynamicsArgs),
    /// LE - RLE over a gGHZ parameter grid.
    ErrorSurface(ErrorSurfaceArgs),
    /// Δ_B over the gW (α, β) grid.
    DeltaB(DeltaBArgs),
    /// Compare closed forms, orderings and critical strengths with exact enumeration.
    CheckClosedForms(CheckArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct OptArgs {
    /// LE search grid: polar divisions per measured qubit
    #[arg(long = "opt.grid-theta")]
    grid_theta: Option<usize>,
    /// LE search grid: azimuthal divisions per measured qubit
    #[arg(long = "opt.grid-phi")]
    grid_phi: Option<usize>,
    /// Simplex runs seeded from the best grid points
    #[arg(long = "opt.starts")]
    starts: Option<usize>,
    /// Objective evaluations per simplex run
    #[arg(long = "opt.max-evals")]
    max_evals: Option<usize>,
    /// Simplex convergence tolerance
    #[arg(long = "opt.tol")]
    tol: Option<f64>,
}

impl OptArgs {
    fn resolve(&self, n: usize) -> Result<OptimizerOptions, Error> {
        let mut o = OptimizerOptions::for_qubits(n);
        o.grid_theta = self.grid_theta.unwrap_or(o.grid_theta);
        o.grid_phi = self.grid_phi.unwrap_or(o.grid_phi);
        o.starts = self.starts.unwrap_or(o.starts);
        o.max_evals = self.max_evals.unwrap_or(o.max_evals);
        o.tol = self.tol.unwrap_or(o.tol);
        o.validate()?;
        Ok(o)
    }
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, default_value = "ghz3")]
    ensemble: EnsembleKind,
    #[arg(long, default_value = "pf")]
    noise: ChannelKind,
    /// Comma-separated noise strengths; one scan each.
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    p: Vec<f64>,
    /// Samples per scan (defaults to 5000 for three qubits and 1000 for four).
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "le")]
    method: Method,
    /// Retained pair as 1-based qubit labels.
    #[arg(long, default_value = "1,2")]
    pair: String,
    /// Comparison slack (defaults to 1e-9 for rle and 1e-6 for le).
    #[arg(long)]
    slack: Option<f64>,
    /// Checkpoint file for resuming; defaults to `<out>.ckpt` when --out is given.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Do not read or write checkpoints.
    #[arg(long)]
    no_checkpoint: bool,
    /// Where to write the per-label summary; stdout when absent.
    #[arg(long)]
    summary_out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    opt: OptArgs,
}

#[derive(Args)]
struct DynamicsArgs {
    #[arg(long, default_value = "pi/3", value_parser = parse_angle)]
    alpha: f64,
    #[arg(long, default_value = "0", value_parser = parse_angle)]
    beta: f64,
    #[arg(long, value_delimiter = ',', default_value = "bf,pf,dp,ad")]
    noise: Vec<ChannelKind>,
    /// Explicit comma-separated strengths; overrides --p-steps.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long, default_value_t = 21)]
    p_steps: usize,
    #[arg(long, value_delimiter = ',', default_value = "le,rle")]
    method: Vec<Method>,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    opt: OptArgs,
}

#[derive(Args)]
struct ErrorSurfaceArgs {
    #[arg(long, default_value = "pf")]
    noise: ChannelKind,
    /// Comma-separated labels such as rho123,rho12.
    #[arg(long, value_delimiter = ',', default_value = "rho123", value_parser = parse_label)]
    labels: Vec<GGHZConfigLabel>,
    #[arg(long, default_value_t = 11)]
    alpha_steps: usize,
    /// Second grid axis: `p` (fixed β) or `beta` (fixed p).
    #[arg(long, default_value = "p", value_parser = parse_axis)]
    axis: SurfaceAxis,
    #[arg(long, default_value_t = 11)]
    steps: usize,
    #[arg(long, default_value = "0", value_parser = parse_angle)]
    beta: f64,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    opt: OptArgs,
}

#[derive(Args)]
struct DeltaBArgs {
    #[arg(long, default_value = "bf")]
    noise: ChannelKind,
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    /// Grid points per axis over [0, π].
    #[arg(long, default_value_t = 21)]
    steps: usize,
    #[arg(long, default_value = "le")]
    method: Method,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    opt: OptArgs,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: Common,
}

/// Accepts plain numbers and forms like `pi`, `pi/3`, `2pi/3`.
fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let Some(idx) = t.find("pi") else { return Err(format!("cannot parse angle {s:?}")) };
    let (num, rest) = t.split_at(idx);
    let num = num.trim_end_matches('*');
    let k: f64 = if num.is_empty() { 1.0 } else { num.parse().map_err(|_| format!("cannot parse angle {s:?}"))? };
    let rest = &rest[2..];
    let d: f64 = match rest.strip_prefix('/') {
        Some(d) => d.parse().map_err(|_| format!("cannot parse angle {s:?}"))?,
        None if rest.is_empty() => 1.0,
        None => return Err(format!("cannot parse angle {s:?}")),
    };
    Ok(k * PI / d)
}

fn parse_label(s: &str) -> Result<GGHZConfigLabel, String> {
    GGHZConfigLabel::ALL
        .into_iter()
        .find(|l| l.as_str() == s.trim())
        .ok_or_else(|| format!("unknown label {s:?}"))
}

fn parse_axis(s: &str) -> Result<SurfaceAxis, String> {
    match s {
        "p" => Ok(SurfaceAxis::P),
        "beta" => Ok(SurfaceAxis::Beta),
        _ => Err(format!("unknown axis {s:?} (expected p or beta)")),
    }
}

fn parse_pair(s: &str, n: usize) -> Result<(usize, usize), Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Error::Domain(format!("--pair {s:?}: expected two distinct labels in 1..={n}"));
    let [a, b] = parts.as_slice() else { return Err(bad()) };
    let a: usize = a.parse().map_err(|_| bad())?;
    let b: usize = b.parse().map_err(|_| bad())?;
    if a == b || a == 0 || b == 0 || a > n || b > n {
        return Err(bad());
    }
    Ok((a - 1, b - 1))
}

/// Failure classes mapped to exit codes.
enum Failure {
    Config(Error),
    Runtime(Error),
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) => Failure::Config(e),
            other => Failure::Runtime(other),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Runtime(Error::Io(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_info(workers: usize, extra: serde_json::Value) -> serde_json::Value {
    let mut v = serde_json::json!({ "workers": workers });
    if let (Some(m), serde_json::Value::Object(e)) = (v.as_object_mut(), extra) {
        m.extend(e);
    }
    v
}

/// `out.csv` becomes `out_p0.2.csv` when several strengths are scanned.
fn per_p_path(out: &Path, p: f64, many: bool) -> PathBuf {
    if !many {
        return out.to_path_buf();
    }
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}_p{p}.{}", ext.to_string_lossy()),
        None => format!("{stem}_p{p}"),
    };
    out.with_file_name(name)
}

fn cmd_scan(a: ScanArgs) -> Result<(), Failure> {
    let n = a.ensemble.num_qubits();
    let pair = parse_pair(&a.pair, n)?;
    let opt = a.opt.resolve(n)?;
    let many = a.p.len() > 1;
    let mut combined: Option<Table> = None;
    let mut configs = Vec::new();
    for &p in &a.p {
        let mut cfg = ScanConfig::new(a.ensemble, a.noise, p);
        cfg.samples = a.samples.unwrap_or(cfg.samples);
        cfg.seed = a.seed;
        cfg.method = a.method;
        cfg.pair = pair;
        cfg.slack = a.slack;
        cfg.opt = opt;
        let out = a.common.out.as_deref().map(|o| per_p_path(o, p, many));
        let ckpt = match (&a.checkpoint, &out) {
            _ if a.no_checkpoint => None,
            (Some(c), _) => Some(per_p_path(c, p, many)),
            (None, Some(o)) => Some(checkpoint_path(o)),
            (None, None) => None,
        };
        let result = run_scan(&cfg, a.common.workers, ckpt.as_deref())?;
        if let Some(path) = &out {
            let text = scan_table(&cfg, &result).render(
                "scan",
                &cfg,
                run_info(a.common.workers, serde_json::json!({ "wall_time_s": result.summary.wall_time_s })),
            )?;
            emit(&text, Some(path))?;
        }
        eprintln!(
            "{} {} p={p} method={} samples={} wall={:.1}s",
            cfg.ensemble,
            cfg.noise,
            cfg.method.as_str(),
            result.summary.samples,
            result.summary.wall_time_s
        );
        let s = summary_table(&result.summary);
        let table = combined.get_or_insert_with(|| {
            let mut cols = vec!["p".to_string()];
            cols.extend(s.columns.iter().cloned());
            Table::new(cols)
        });
        for row in s.rows {
            let mut r = vec![format!("{p}")];
            r.extend(row);
            table.rows.push(r);
        }
        configs.push(cfg);
    }
    let table = combined.unwrap_or_default();
    let text = table.render("scan-summary", &configs, run_info(a.common.workers, serde_json::json!({})))?;
    emit(&text, a.summary_out.as_deref())
}

fn cmd_dynamics(a: DynamicsArgs) -> Result<(), Failure> {
    let cfg = DynamicsConfig {
        alpha: a.alpha,
        beta: a.beta,
        kinds: a.noise,
        p_values: if a.p.is_empty() { grid(0.0, 1.0, a.p_steps) } else { a.p },
        methods: a.method,
        opt: a.opt.resolve(3)?,
    };
    let table = dynamics(&cfg, a.common.workers)?;
    emit(&table.render("dynamics", &cfg, run_info(a.common.workers, serde_json::json!({})))?, a.common.out.as_deref())
}

fn cmd_error_surface(a: ErrorSurfaceArgs) -> Result<(), Failure> {
    let mut cfg = ErrorSurfaceConfig::new(a.noise);
    let alpha_hi = cfg.alphas.last().copied().unwrap_or(PI / 2.0);
    cfg.labels = a.labels;
    cfg.alphas = grid(0.0, alpha_hi, a.alpha_steps);
    cfg.axis = a.axis;
    cfg.second = match a.axis {
        SurfaceAxis::P => grid(0.0, 1.0, a.steps),
        SurfaceAxis::Beta => grid(0.0, 2.0 * PI, a.steps),
    };
    cfg.beta = a.beta;
    cfg.p = a.p;
    cfg.opt = a.opt.resolve(3)?;
    let table = error_surface(&cfg, a.common.workers)?;
    emit(&table.render("error-surface", &cfg, run_info(a.common.workers, serde_json::json!({})))?, a.common.out.as_deref())
}

fn cmd_delta_b(a: DeltaBArgs) -> Result<(), Failure> {
    let mut cfg = DeltaBConfig::new(a.noise, a.p);
    cfg.alphas = grid(0.0, PI, a.steps);
    cfg.betas = grid(0.0, PI, a.steps);
    cfg.method = a.method;
    cfg.opt = a.opt.resolve(3)?;
    let table = delta_b_surface(&cfg, a.common.workers)?;
    emit(&table.render("delta-b", &cfg, run_info(a.common.workers, serde_json::json!({})))?, a.common.out.as_deref())
}

fn cmd_check(a: CheckArgs) -> Result<(), Failure> {
    let cfg = ClosedFormCheckConfig::default();
    let report = check_closed_forms(&cfg, a.common.workers)?;
    let extra = serde_json::json!({ "pass": report.pass(), "orderings_pass": report.orderings_pass() });
    emit(&report.table().render("check-closed-forms", &cfg, run_info(a.common.workers, extra))?, a.common.out.as_deref())?;
    let worst = report.deviations.iter().map(|d| d.max_deviation).fold(0.0, f64::max);
    eprintln!("max closed-form deviation {worst:e}");
    for o in report.orderings.iter().filter(|o| !o.pass) {
        eprintln!("ordering {} {} violated by {:e}", o.kind, o.link, -o.worst_margin);
    }
    if report.pass() {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Scan(a) => cmd_scan(a),
        Command::Dynamics(a) => cmd_dynamics(a),
        Command::ErrorSurface(a) => cmd_error_surface(a),
        Command::DeltaB(a) => cmd_delta_b(a),
        Command::CheckClosedForms(a) => cmd_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Validation) => {
            eprintln!("closed-form validation failed");
            ExitCode::from(3)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert!((parse_angle("pi/3").unwrap() - PI / 3.0).abs() < 1e-15);
        assert!((parse_angle("2pi/3").unwrap() - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((parse_angle("PI").unwrap() - PI).abs() < 1e-15);
        assert!(parse_angle("pie").is_err());
    }

    #[test]
    fn pairs() {
        assert_eq!(parse_pair("1,2", 3).unwrap(), (0, 1));
        assert_eq!(parse_pair("3, 1", 4).unwrap(), (2, 0));
        assert!(parse_pair("1,1", 3).is_err());
        assert!(parse_pair("1,4", 3).is_err());
    }

    #[test]
    fn per_p_paths() {
        assert_eq!(per_p_path(Path::new("a/s.csv"), 0.2, true), PathBuf::from("a/s_p0.2.csv"));
        assert_eq!(per_p_path(Path::new("s.csv"), 0.2, false), PathBuf::from("s.csv"));
    }
}
