//! `lcurv`: command-line front end for the lightcone curvature library.
//!
//! Subcommands:
//!   run          run selected analyses on one model, emit a JSON report
//!   sweep        rerun tau / Gauss-Bonnet across grid levels, emit CSV
//!   list-models  print the builtin model catalog
//!
//! Exit codes: 0 = all theorem verdicts pass and no analysis errored,
//! 1 = an analysis errored (partial report written) or a verdict failed,
//! 2 = configuration error (no report written).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ini::Ini;
use serde_json::{json, Map, Value};

use lcurv_core::curvature::flatness_probe;
use lcurv_core::immersion::{builtin_catalog, model_by_name, SubmanifoldModel};
use lcurv_core::integrate::{
    codim2_totals, kgrid_csv, sphere_volume, tau_via_eta, theorem_verdicts,
    total_absolute_curvature, willmore_energy, QuadratureSpec, SectionSign, TotalCurvatureReport,
    Verdict,
};
use lcurv_core::par::set_thread_cap;
use lcurv_core::tightness::{l_convexity_check, l_tightness_verdict, ConvexityVerdict, TightnessVerdict};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const DEFAULT_SWEEP_LEVELS: &[usize] = &[32, 64, 128];
/// Successive sweep levels whose tau differs by more than this relative
/// amount mark the sweep as not converged.
const SWEEP_CONVERGENCE: f64 = 0.10;

#[derive(Parser)]
#[command(name = "lcurv", version, about = "Lightcone curvature invariants of spacelike submanifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run analyses on one model and write a JSON report.
    Run(RunArgs),
    /// Recompute tau and the Gauss-Bonnet integral over a list of grid
    /// levels and write a convergence CSV.
    Sweep(SweepArgs),
    /// List the builtin model catalog.
    ListModels(ListArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// INI config file; command-line flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model name from the builtin catalog.
    #[arg(long)]
    model: Option<String>,
    /// Model parameter as K=V; repeatable.
    #[arg(long = "param")]
    params: Vec<String>,
    /// Nodes per base-grid axis (sets both the polar and periodic rules).
    #[arg(long = "grid-base")]
    grid_base: Option<usize>,
    /// Trapezoid nodes on an S^1 fiber.
    #[arg(long = "grid-fiber")]
    grid_fiber: Option<usize>,
    /// Monte-Carlo directions for the critical-point oracle.
    #[arg(long)]
    mc: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread cap; 0 = all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Output path (JSON report for `run`, CSV for `sweep`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also print the report to stdout as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated subset of: curvature, total, eta, gauss-bonnet,
    /// willmore, convexity, flatness, sweep.
    #[arg(long)]
    analyses: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated base-grid levels (at least two).
    #[arg(long)]
    levels: Option<String>,
}

#[derive(Args)]
struct ListArgs {
    /// Emit the catalog as JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Analysis {
    Curvature,
    Total,
    Eta,
    GaussBonnet,
    Willmore,
    Convexity,
    Flatness,
    Sweep,
}

impl Analysis {
    fn parse(name: &str) -> Result<Self, String> {
        match name {
            "curvature" => Ok(Self::Curvature),
            "total" => Ok(Self::Total),
            "eta" => Ok(Self::Eta),
            "gauss-bonnet" => Ok(Self::GaussBonnet),
            "willmore" => Ok(Self::Willmore),
            "convexity" => Ok(Self::Convexity),
            "flatness" => Ok(Self::Flatness),
            "sweep" => Ok(Self::Sweep),
            other => Err(format!("unknown analysis `{other}`")),
        }
    }
}

/// Fully resolved configuration for `run` / `sweep`.
struct RunConfig {
    model: SubmanifoldModel,
    spec: QuadratureSpec,
    analyses: Vec<Analysis>,
    out: PathBuf,
    json_stdout: bool,
    sweep_levels: Vec<usize>,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => match resolve_config(&args.common, args.analyses.as_deref(), None) {
            Ok(cfg) => do_run(&cfg),
            Err(msg) => config_error(&msg),
        },
        Command::Sweep(args) => match resolve_config(&args.common, None, args.levels.as_deref()) {
            Ok(cfg) => do_sweep(&cfg),
            Err(msg) => config_error(&msg),
        },
        Command::ListModels(args) => do_list(args.json),
    }
}

fn config_error(msg: &str) -> ExitCode {
    eprintln!("lcurv: config error: {msg}");
    ExitCode::from(2)
}

fn parse_num<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T, String> {
    raw.trim()
        .parse()
        .map_err(|_| format!("invalid value `{raw}` for `{key}`"))
}

/// Merges config file and flags (flags win), validates names, and builds
/// the model up front so bad configs never start an analysis.
fn resolve_config(
    common: &CommonArgs,
    analyses: Option<&str>,
    levels: Option<&str>,
) -> Result<RunConfig, String> {
    let mut model_name: Option<String> = None;
    let mut params: BTreeMap<String, f64> = BTreeMap::new();
    let mut spec = QuadratureSpec::default();
    let mut analysis_str = analyses.map(str::to_owned);
    let mut out: Option<PathBuf> = None;
    let mut threads: Option<usize> = None;
    let mut sweep_levels: Option<String> = levels.map(str::to_owned);

    if let Some(path) = &common.config {
        let ini = Ini::load_from_file(path)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        for (section, props) in ini.iter() {
            match section {
                None | Some("run") => {
                    for (key, raw) in props.iter() {
                        match key {
                            "model" => model_name = Some(raw.to_string()),
                            "analyses" => {
                                if analysis_str.is_none() {
                                    analysis_str = Some(raw.to_string());
                                }
                            }
                            "out" => out = Some(PathBuf::from(raw)),
                            "threads" => threads = Some(parse_num(key, raw)?),
                            "seed" => spec.seed = parse_num(key, raw)?,
                            "grid_base" => {
                                let n: usize = parse_num(key, raw)?;
                                spec.base_polar = n;
                                spec.base_periodic = n;
                            }
                            "grid_fiber" => spec.fiber_nodes = parse_num(key, raw)?,
                            "mc" => spec.mc_directions = parse_num(key, raw)?,
                            other => return Err(format!("unknown config key `{other}` in [run]")),
                        }
                    }
                }
                Some("params") => {
                    for (key, raw) in props.iter() {
                        params.insert(key.to_string(), parse_num(key, raw)?);
                    }
                }
                Some("spec") => {
                    for (key, raw) in props.iter() {
                        match key {
                            "base_polar" => spec.base_polar = parse_num(key, raw)?,
                            "base_periodic" => spec.base_periodic = parse_num(key, raw)?,
                            "fiber_nodes" => spec.fiber_nodes = parse_num(key, raw)?,
                            "mc_directions" => spec.mc_directions = parse_num(key, raw)?,
                            "eta_grid" => spec.eta_grid = parse_num(key, raw)?,
                            "newton_tol" => spec.newton_tol = parse_num(key, raw)?,
                            "seed" => spec.seed = parse_num(key, raw)?,
                            other => return Err(format!("unknown config key `{other}` in [spec]")),
                        }
                    }
                }
                Some("sweep") => {
                    for (key, raw) in props.iter() {
                        match key {
                            "levels" => {
                                if sweep_levels.is_none() {
                                    sweep_levels = Some(raw.to_string());
                                }
                            }
                            other => return Err(format!("unknown config key `{other}` in [sweep]")),
                        }
                    }
                }
                Some(other) => return Err(format!("unknown config section [{other}]")),
            }
        }
    }

    if let Some(m) = &common.model {
        model_name = Some(m.clone());
    }
    for kv in &common.params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| format!("--param expects K=V, got `{kv}`"))?;
        params.insert(k.trim().to_string(), parse_num(k, v)?);
    }
    if let Some(n) = common.grid_base {
        spec.base_polar = n;
        spec.base_periodic = n;
    }
    if let Some(n) = common.grid_fiber {
        spec.fiber_nodes = n;
    }
    if let Some(n) = common.mc {
        spec.mc_directions = n;
    }
    if let Some(s) = common.seed {
        spec.seed = s;
    }
    if let Some(t) = common.threads {
        threads = Some(t);
    }
    if let Some(p) = &common.out {
        out = Some(p.clone());
    }

    let model_name = model_name.ok_or("no model selected (use --model or a config file)")?;
    let model = model_by_name(&model_name, &params).map_err(|e| e.to_string())?;
    spec.validate().map_err(|e| e.to_string())?;

    let mut parsed_analyses = Vec::new();
    for name in analysis_str.as_deref().unwrap_or("total").split(',') {
        let name = name.trim();
        if name.is_empty() {
            continue;
        }
        let a = Analysis::parse(name)?;
        if !parsed_analyses.contains(&a) {
            parsed_analyses.push(a);
        }
    }
    if parsed_analyses.is_empty() {
        return Err("empty analysis list".into());
    }
    // Fixed execution order regardless of how the list was written.
    parsed_analyses.sort();

    let parsed_levels: Vec<usize> = match sweep_levels.as_deref() {
        None => DEFAULT_SWEEP_LEVELS.to_vec(),
        Some(raw) => {
            let mut ls = Vec::new();
            for part in raw.split(',') {
                ls.push(parse_num("levels", part)?);
            }
            ls.sort_unstable();
            ls.dedup();
            if ls.len() < 2 {
                return Err("sweep needs at least two distinct levels".into());
            }
            if ls.iter().any(|&l| l < 8) {
                return Err("sweep levels must be >= 8".into());
            }
            ls
        }
    };

    set_thread_cap(threads.unwrap_or(0));
    Ok(RunConfig {
        model,
        spec,
        analyses: parsed_analyses,
        out: out.unwrap_or_else(|| PathBuf::from("lcurv-report.json")),
        json_stdout: common.json,
        sweep_levels: parsed_levels,
    })
}

/// Empty per-model report skeleton; analyses fill in the optional fields.
fn report_skeleton(model: &SubmanifoldModel) -> TotalCurvatureReport {
    TotalCurvatureReport {
        model: model.name.clone(),
        params: model.params.clone(),
        ambient_dim: model.ambient_dim,
        intrinsic_dim: model.intrinsic_dim,
        euler_characteristic: model.euler_characteristic,
        morse_number: model.morse_number,
        kstar_min: None,
        kstar_max: None,
        kstar_mean: None,
        tau_ell: None,
        tau_plus: None,
        tau_minus: None,
        tau_via_eta: None,
        tau_via_eta_stderr: None,
        eta_used: None,
        eta_flagged: None,
        gauss_bonnet_lhs: None,
        willmore_energy: None,
        verdicts: Vec::new(),
    }
}

fn do_run(cfg: &RunConfig) -> ExitCode {
    let model = &cfg.model;
    let spec = &cfg.spec;
    let mut results = Map::new();
    let mut errors: Vec<String> = Vec::new();
    let mut skeleton = report_skeleton(model);
    let mut extra_verdicts: Vec<Verdict> = Vec::new();

    for &analysis in &cfg.analyses {
        match analysis {
            Analysis::Curvature => match kgrid_csv(model, spec) {
                Ok(csv) => {
                    let path = sibling_path(&cfg.out, "-kgrid.csv");
                    match std::fs::write(&path, &csv) {
                        Ok(()) => {
                            results.insert(
                                "curvature".into(),
                                json!({
                                    "csv_path": path.display().to_string(),
                                    "rows": csv.lines().count() - 1,
                                }),
                            );
                        }
                        Err(e) => errors.push(format!("curvature: write {}: {e}", path.display())),
                    }
                }
                Err(e) => errors.push(format!("curvature: {e}")),
            },
            Analysis::Total => match total_absolute_curvature(model, spec) {
                Ok(tau) => {
                    skeleton.tau_ell = Some(tau.tau_ell);
                    skeleton.kstar_min = Some(tau.kstar_min);
                    skeleton.kstar_max = Some(tau.kstar_max);
                    skeleton.kstar_mean = Some(tau.kstar_mean);
                    results.insert("total".into(), serde_json::to_value(&tau).unwrap());
                }
                Err(e) => errors.push(format!("total: {e}")),
            },
            Analysis::Eta => match tau_via_eta(model, spec) {
                Ok(eta) => {
                    skeleton.tau_via_eta = Some(eta.mean);
                    skeleton.tau_via_eta_stderr = Some(eta.stderr);
                    skeleton.eta_used = Some(eta.used);
                    skeleton.eta_flagged = Some(eta.flagged);
                    results.insert("eta".into(), serde_json::to_value(&eta).unwrap());
                }
                Err(e) => errors.push(format!("eta: {e}")),
            },
            Analysis::GaussBonnet => match codim2_totals(model, spec) {
                Ok(totals) => {
                    skeleton.tau_plus = Some(totals.tau_plus);
                    skeleton.tau_minus = Some(totals.tau_minus);
                    skeleton.gauss_bonnet_lhs = Some(totals.gauss_bonnet_lhs);
                    results.insert("gauss-bonnet".into(), serde_json::to_value(&totals).unwrap());
                }
                Err(e) => errors.push(format!("gauss-bonnet: {e}")),
            },
            Analysis::Willmore => match willmore_energy(model, spec, SectionSign::Plus) {
                Ok(w) => {
                    skeleton.willmore_energy = Some(w);
                    results.insert("willmore".into(), json!({ "energy": w }));
                }
                Err(e) => errors.push(format!("willmore: {e}")),
            },
            Analysis::Convexity => match convexity_analysis(model, spec, skeleton.tau_ell) {
                Ok((value, verdict)) => {
                    results.insert("convexity".into(), value);
                    extra_verdicts.push(verdict);
                }
                Err(e) => errors.push(format!("convexity: {e}")),
            },
            Analysis::Flatness => match flatness_probe(model, 16, 1e-10) {
                Ok(rep) => {
                    results.insert(
                        "flatness".into(),
                        json!({
                            "direction": rep.direction.components(),
                            "max_h": rep.max_h,
                            "gauss_spread": rep.gauss_spread,
                        }),
                    );
                }
                Err(e) => errors.push(format!("flatness: {e}")),
            },
            Analysis::Sweep => match sweep_rows(model, spec, &cfg.sweep_levels) {
                Ok(rows) => {
                    if let Some(note) = convergence_note(&rows) {
                        errors.push(format!("sweep: {note}"));
                    }
                    results.insert("sweep".into(), sweep_rows_json(&rows));
                }
                Err(e) => errors.push(format!("sweep: {e}")),
            },
        }
    }

    let mut verdicts = theorem_verdicts(&skeleton);
    verdicts.extend(extra_verdicts);

    let report = json!({
        "model": model.name,
        "params": model.params,
        "spec": spec,
        "seed": spec.seed,
        "results": Value::Object(results),
        "verdicts": verdicts,
        "errors": errors,
        "version": VERSION,
        "timestamp": unix_timestamp(),
    });
    let text = serde_json::to_string_pretty(&report).unwrap();
    if let Err(e) = std::fs::write(&cfg.out, format!("{text}\n")) {
        eprintln!("lcurv: cannot write {}: {e}", cfg.out.display());
        return ExitCode::from(1);
    }
    if cfg.json_stdout {
        println!("{text}");
    }

    let all_pass = verdicts.iter().all(|v| v.pass);
    if errors.is_empty() && all_pass {
        ExitCode::SUCCESS
    } else {
        for e in &errors {
            eprintln!("lcurv: {e}");
        }
        for v in verdicts.iter().filter(|v| !v.pass) {
            eprintln!(
                "lcurv: verdict {} failed: measured {:.6}, target {:.6}, tolerance {:.2e}",
                v.id, v.measured, v.target, v.tolerance
            );
        }
        ExitCode::from(1)
    }
}

/// Support-plane test plus the tau-based tightness verdict; passes when
/// the two classifications are conclusive and agree.
fn convexity_analysis(
    model: &SubmanifoldModel,
    spec: &QuadratureSpec,
    tau_hint: Option<f64>,
) -> lcurv_core::Result<(Value, Verdict)> {
    let support = l_convexity_check(model, 24, 48, 1e-6)?;
    let tau = match tau_hint {
        Some(t) => t,
        None => total_absolute_curvature(model, spec)?.tau_ell,
    };
    let tightness = l_tightness_verdict(model, tau, 0.02)?;
    let agree = matches!(
        (support.verdict, tightness),
        (ConvexityVerdict::Convex, TightnessVerdict::Tight)
            | (ConvexityVerdict::NonConvex, TightnessVerdict::NotTight)
    );
    let verdict = Verdict {
        id: "tightness-convexity-agreement".into(),
        target: 1.0,
        measured: if agree { 1.0 } else { 0.0 },
        tolerance: 0.0,
        pass: agree,
    };
    let value = json!({
        "support": support,
        "tightness": tightness,
        "tau_ell": tau,
    });
    Ok((value, verdict))
}

struct SweepRow {
    level: usize,
    tau_ell: f64,
    gauss_bonnet_lhs: Option<f64>,
    runtime: f64,
}

fn sweep_rows(
    model: &SubmanifoldModel,
    spec: &QuadratureSpec,
    levels: &[usize],
) -> lcurv_core::Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(levels.len());
    for &level in levels {
        let mut leveled = spec.clone();
        leveled.base_polar = level;
        leveled.base_periodic = level;
        let start = Instant::now();
        let tau = total_absolute_curvature(model, &leveled)?;
        let gb = if model.codim() == 2 {
            Some(codim2_totals(model, &leveled)?.gauss_bonnet_lhs)
        } else {
            None
        };
        rows.push(SweepRow {
            level,
            tau_ell: tau.tau_ell,
            gauss_bonnet_lhs: gb,
            runtime: start.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}

fn convergence_note(rows: &[SweepRow]) -> Option<String> {
    for pair in rows.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let denom = a.tau_ell.abs().max(b.tau_ell.abs()).max(1e-12);
        if (a.tau_ell - b.tau_ell).abs() / denom > SWEEP_CONVERGENCE {
            return Some(format!(
                "not converged: tau changed by more than {:.0}% between levels {} and {}",
                SWEEP_CONVERGENCE * 100.0,
                a.level,
                b.level
            ));
        }
    }
    None
}

fn sweep_rows_json(rows: &[SweepRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "level": r.level,
                    "tau_ell": r.tau_ell,
                    "gauss_bonnet_lhs": r.gauss_bonnet_lhs,
                    "runtime": r.runtime,
                })
            })
            .collect(),
    )
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("level,tau_ell,gauss_bonnet_lhs,runtime\n");
    for r in rows {
        let gb = r
            .gauss_bonnet_lhs
            .map(|v| format!("{v:.17e}"))
            .unwrap_or_default();
        let _ = writeln!(out, "{},{:.17e},{},{:.6}", r.level, r.tau_ell, gb, r.runtime);
    }
    out
}

fn do_sweep(cfg: &RunConfig) -> ExitCode {
    let rows = match sweep_rows(&cfg.model, &cfg.spec, &cfg.sweep_levels) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("lcurv: sweep: {e}");
            return ExitCode::from(1);
        }
    };
    let csv = sweep_csv(&rows);
    let out = if cfg.out.extension().is_some_and(|e| e == "json") {
        sibling_path(&cfg.out, "-sweep.csv")
    } else {
        cfg.out.clone()
    };
    if let Err(e) = std::fs::write(&out, &csv) {
        eprintln!("lcurv: cannot write {}: {e}", out.display());
        return ExitCode::from(1);
    }
    if cfg.json_stdout {
        println!("{}", serde_json::to_string_pretty(&sweep_rows_json(&rows)).unwrap());
    } else {
        print!("{csv}");
    }
    if let Some(note) = convergence_note(&rows) {
        eprintln!("lcurv: sweep: {note}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}

fn do_list(as_json: bool) -> ExitCode {
    let catalog = builtin_catalog();
    if as_json {
        let entries: Vec<Value> = catalog
            .iter()
            .map(|m| {
                json!({
                    "model": m.name,
                    "params": m.params,
                    "ambient_dim": m.ambient_dim,
                    "intrinsic_dim": m.intrinsic_dim,
                    "codim": m.codim(),
                    "closed": m.closed,
                    "euler_characteristic": m.euler_characteristic,
                    "morse_number": m.morse_number,
                    "gamma_sphere_volume": sphere_volume(m.ambient_dim - 2),
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&Value::Array(entries)).unwrap());
        return ExitCode::SUCCESS;
    }
    println!(
        "{:<22} {:<18} {:>7} {:>3} {:>6} {:>4} {:>6} {:>9}",
        "model", "params", "ambient", "dim", "closed", "chi", "gamma", "vol(S)"
    );
    for m in &catalog {
        let params = m
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",");
        let chi = m
            .euler_characteristic
            .map(|c| c.to_string())
            .unwrap_or_else(|| "-".into());
        let gamma = m
            .morse_number
            .map(|g| g.to_string())
            .unwrap_or_else(|| "-".into());
        println!(
            "{:<22} {:<18} {:>7} {:>3} {:>6} {:>4} {:>6} {:>9.4}",
            m.name,
            params,
            m.ambient_dim,
            m.intrinsic_dim,
            m.closed,
            chi,
            gamma,
            sphere_volume(m.ambient_dim - 2),
        );
    }
    ExitCode::SUCCESS
}

/// `report.json` -> `report<suffix>`, next to the report.
fn sibling_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "lcurv".into());
    out.with_file_name(format!("{stem}{suffix}"))
}

fn unix_timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
