//! Experiment drivers behind the command-line subcommands.
//!
//! Every command writes its CSV outputs plus `manifest.ini` (the resolved
//! configuration and code version) into one directory. Seeds run on a worker
//! pool; results are gathered and written in seed order so the bytes do not
//! depend on the number of workers.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::comparison::{comparison_bundle, comparison_dominates, ComparisonBundle, DominanceReport};
use crate::config::{ConfigError, ExperimentConfig, StartChoice};
use crate::csv::{fmt_g, triangle_csv, CsvWriter};
use crate::exponent::{ExponentError, ExponentEvaluator};
use crate::grid::GridSpec;
use crate::regime::{bound_constant, classify, fit_lower_power, log_grid, Certificate, Verdict};
use crate::rng::derive_seed;
use crate::simulation::{a_field, simulate_path, CoefficientField, InitialCurve, JumpPath};
use crate::solver::{solve_fixed_point, IterationRecord, SolveOptions, SolveOutcome, StartField};

pub const CODE_VERSION: &str = concat!("levy-hjm ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("regime mismatch: command needs {expected}, classifier says {found}")]
    RegimeMismatch { expected: Verdict, found: Verdict },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            ExperimentError::Numeric(_) | ExperimentError::Io { .. } => 3,
            ExperimentError::RegimeMismatch { .. } => 4,
        }
    }
}

impl From<ExponentError> for ExperimentError {
    fn from(e: ExponentError) -> Self {
        ExperimentError::Numeric(e.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub workers: usize,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>, workers: usize) -> Self {
        Self {
            out_dir: out_dir.into(),
            workers: workers.max(1),
        }
    }
}

/// What a command produced, for printing.
#[derive(Debug, Clone, Default)]
pub struct CommandSummary {
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

struct Output<'a> {
    dir: &'a Path,
    summary: CommandSummary,
}

impl<'a> Output<'a> {
    fn new(dir: &'a Path) -> Result<Self, ExperimentError> {
        fs::create_dir_all(dir).map_err(|source| ExperimentError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir,
            summary: CommandSummary::default(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), ExperimentError> {
        let path = self.dir.join(name);
        fs::write(&path, contents.as_bytes()).map_err(|source| ExperimentError::Io {
            path: path.clone(),
            source,
        })?;
        self.summary.files.push(path);
        Ok(())
    }

    fn manifest(&mut self, command: &str, cfg: &ExperimentConfig) -> Result<(), ExperimentError> {
        let text = format!("# {CODE_VERSION}\n# command: {command}\n{}", cfg.to_ini());
        self.write("manifest.ini", &text)
    }

    fn say(&mut self, line: impl Into<String>) {
        self.summary.lines.push(line.into());
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, ExperimentError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| ExperimentError::Numeric(format!("worker pool: {e}")))
}

fn seeds(cfg: &ExperimentConfig) -> Vec<(usize, u64)> {
    (0..cfg.seeds.count)
        .map(|i| (i, derive_seed(cfg.seeds.master_seed, i as u64)))
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_g).unwrap_or_default()
}

fn clean(message: &str) -> String {
    message.replace([',', '\n'], ";")
}

pub fn cmd_classify(cfg: &ExperimentConfig, run: &RunOptions) -> Result<CommandSummary, ExperimentError> {
    let measure = cfg.validated_measure();
    let report = classify(&measure, &cfg.volatility, cfg.horizon);
    let mut out = Output::new(&run.out_dir)?;

    let mut table = CsvWriter::with_header(&["z", "j_prime", "gap", "certificate_bound"]);
    for s in &report.samples {
        let bound = report.certificate.map(|c| c.lower_bound(s.z));
        table.row(&[fmt_g(s.z), fmt_g(s.j_prime), fmt_g(s.gap), opt(bound)]);
    }
    out.write("classify.csv", &table.finish())?;

    let mut verdict = CsvWriter::with_header(&["key", "value"]);
    let cert = report.certificate;
    let (gap_z, gap) = report.max_gap.map(|(z, g)| (Some(z), Some(g))).unwrap_or((None, None));
    let rows = [
        ("measure", measure.kind().key().to_string()),
        ("verdict", report.verdict.to_string()),
        ("alpha", opt(cert.map(|c| c.alpha))),
        ("gamma", opt(cert.map(|c| c.gamma))),
        ("beta", opt(cert.map(|c| c.beta))),
        (
            "certificate_source",
            cert.map(|c| format!("{:?}", c.source)).unwrap_or_default(),
        ),
        ("max_gap_z", opt(gap_z)),
        ("max_gap", opt(gap)),
        ("violations", report.violations.len().to_string()),
        ("notes", clean(&report.notes.join(" | "))),
    ];
    for (k, v) in rows {
        verdict.row(&[k.to_string(), v]);
    }
    out.write("verdict.csv", &verdict.finish())?;
    out.manifest("classify", cfg)?;
    out.say(format!("verdict: {}", report.verdict));
    if let Some(c) = cert {
        out.say(format!(
            "certificate: alpha={} gamma={} beta={}",
            fmt_g(c.alpha),
            fmt_g(c.gamma),
            fmt_g(c.beta)
        ));
    }
    Ok(out.summary)
}

pub fn cmd_exponent_table(cfg: &ExperimentConfig, run: &RunOptions) -> Result<CommandSummary, ExperimentError> {
    let et = cfg.exponent_table;
    let ev = ExponentEvaluator::new(cfg.validated_measure()).with_strategy(et.strategy);
    let mut out = Output::new(&run.out_dir)?;
    let mut table = CsvWriter::with_header(&["z", "J", "J_prime", "J_second"]);
    let value = |r: Result<f64, ExponentError>| -> Result<f64, ExperimentError> {
        match r {
            Ok(v) => Ok(v),
            Err(ExponentError::NumericOverflow { .. }) => Ok(f64::INFINITY),
            Err(e) => Err(e.into()),
        }
    };
    for z in std::iter::once(0.0).chain(log_grid(et.z_min, et.z_max, et.points)) {
        table.numbers(&[z, value(ev.j(z))?, value(ev.j_prime(z))?, value(ev.j_second(z))?]);
    }
    out.write("exponent_table.csv", &table.finish())?;
    out.manifest("exponent-table", cfg)?;
    out.say(format!("wrote {} rows", et.points + 1));
    Ok(out.summary)
}

pub fn cmd_simulate(cfg: &ExperimentConfig, run: &RunOptions) -> Result<CommandSummary, ExperimentError> {
    let measure = cfg.validated_measure();
    let grid = GridSpec::new(cfg.horizon, cfg.grid_n);
    let results: Vec<Result<(JumpPath, CoefficientField), String>> = pool(run.workers)?.install(|| {
        seeds(cfg)
            .into_par_iter()
            .map(|(_, seed)| {
                let path = simulate_path(&measure, cfg.horizon, cfg.eps, seed).map_err(|e| e.to_string())?;
                let a = a_field(&path, &cfg.initial_curve, &cfg.volatility, grid).map_err(|e| e.to_string())?;
                Ok((path, a))
            })
            .collect()
    });
    let mut out = Output::new(&run.out_dir)?;
    let mut summary = CsvWriter::with_header(&["seed_index", "seed", "status", "jumps", "terminal_level", "sup_a"]);
    for ((idx, seed), result) in seeds(cfg).into_iter().zip(results) {
        match result {
            Ok((path, a)) => {
                let mut p = CsvWriter::with_header(&["time", "size"]);
                for &(t, y) in &path.jumps {
                    p.numbers(&[t, y]);
                }
                out.write(&format!("path_{idx:04}.csv"), &p.finish())?;
                out.write(&format!("a_field_{idx:04}.csv"), &triangle_csv(&a.values))?;
                summary.row(&[
                    idx.to_string(),
                    seed.to_string(),
                    "ok".into(),
                    path.jumps.len().to_string(),
                    fmt_g(path.terminal_level()),
                    fmt_g(a.sup_a),
                ]);
            }
            Err(e) => summary.row(&[
                idx.to_string(),
                seed.to_string(),
                clean(&e),
                String::new(),
                String::new(),
                String::new(),
            ]),
        }
    }
    out.write("simulate_summary.csv", &summary.finish())?;
    out.manifest("simulate", cfg)?;
    out.say(format!("simulated {} paths", cfg.seeds.count));
    Ok(out.summary)
}

/// `(α, γ, β)` for the dominance check: config overrides, otherwise the
/// non-existence certificate.
fn comparison_parameters(cfg: &ExperimentConfig, ev: &ExponentEvaluator) -> Result<Certificate, ExperimentError> {
    let c = cfg.comparison;
    let fitted = fit_lower_power(ev).ok();
    let pick = |given: Option<f64>, from: Option<f64>, name: &str| {
        given.or(from).ok_or_else(|| {
            ExperimentError::Config(ConfigError {
                line: 0,
                message: format!("comparison needs `{name}`: no certificate is available for this measure"),
            })
        })
    };
    Ok(Certificate {
        alpha: pick(c.alpha, fitted.map(|f| f.alpha), "alpha")?,
        gamma: pick(c.gamma, fitted.map(|f| f.gamma), "gamma")?,
        beta: pick(c.beta, fitted.map(|f| f.beta), "beta")?,
        source: fitted
            .map(|f| f.source)
            .unwrap_or(crate::regime::CertificateSource::NumericFit),
    })
}

#[derive(Debug, Clone)]
struct SeedRun {
    jumps: usize,
    sup_a: f64,
    bound_c: Option<f64>,
    outcome: Result<SolveOutcome, String>,
    dominance: Option<DominanceReport>,
}

impl SeedRun {
    fn label(&self) -> String {
        match &self.outcome {
            Ok(SolveOutcome::Converged(_)) => "converged".into(),
            Ok(SolveOutcome::Diverged(_)) => "diverged".into(),
            Err(e) => format!("error: {}", clean(e)),
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn solve_one(
    ev: &ExponentEvaluator,
    cfg: &ExperimentConfig,
    path: &JumpPath,
    curve: &InitialCurve,
    grid: GridSpec,
    start: StartChoice,
    bundle: Option<(&ComparisonBundle, f64)>,
) -> SeedRun {
    let a = match a_field(path, curve, &cfg.volatility, grid) {
        Ok(a) => a,
        Err(e) => {
            return SeedRun {
                jumps: path.jumps.len(),
                sup_a: f64::NAN,
                bound_c: None,
                outcome: Err(e.to_string()),
                dominance: None,
            }
        }
    };
    let bound_c = bound_constant(ev, a.sup_a, &cfg.volatility, cfg.horizon).ok();
    let mut opts: SolveOptions = cfg.solver;
    opts.start = match (start, bound_c) {
        (StartChoice::Zero, _) => StartField::Zero,
        (StartChoice::Bound, Some(c)) => StartField::Constant(c),
        (StartChoice::Bound, None) => {
            return SeedRun {
                jumps: path.jumps.len(),
                sup_a: a.sup_a,
                bound_c,
                outcome: Err("no bound constant for a constant start".into()),
                dominance: None,
            }
        }
    };
    let outcome = solve_fixed_point(&a, ev, &cfg.volatility, &opts).map_err(|e| e.to_string());
    let dominance = match (&outcome, bundle) {
        (Ok(o), Some((b, beta))) => Some(comparison_dominates(o.field(), &a, b, beta)),
        _ => None,
    };
    SeedRun {
        jumps: path.jumps.len(),
        sup_a: a.sup_a,
        bound_c,
        outcome,
        dominance,
    }
}

fn history_csv(history: &[IterationRecord]) -> String {
    let mut w = CsvWriter::with_header(&["iter", "sup", "delta"]);
    for r in history {
        w.row(&[r.iteration.to_string(), fmt_g(r.sup), fmt_g(r.delta)]);
    }
    w.finish()
}

pub fn cmd_solve(cfg: &ExperimentConfig, run: &RunOptions) -> Result<CommandSummary, ExperimentError> {
    let measure = cfg.validated_measure();
    let ev = ExponentEvaluator::new(measure.clone());
    let grid = GridSpec::new(cfg.horizon, cfg.grid_n);
    let comparison = if cfg.comparison.enabled {
        let p = comparison_parameters(cfg, &ev)?;
        let corner = cfg.comparison.corner.unwrap_or(cfg.horizon);
        let bundle = comparison_bundle(corner, corner, p.gamma, p.alpha, grid)
            .map_err(|e| ExperimentError::Numeric(e.to_string()))?;
        Some((bundle, p.beta))
    } else {
        None
    };
    let bundle_ref = comparison.as_ref().map(|(b, beta)| (b, *beta));

    let runs: Vec<(u64, SeedRun)> = pool(run.workers)?.install(|| {
        seeds(cfg)
            .into_par_iter()
            .map(|(_, seed)| {
                let run = match simulate_path(&measure, cfg.horizon, cfg.eps, seed) {
                    Ok(path) => solve_one(&ev, cfg, &path, &cfg.initial_curve, grid, cfg.start, bundle_ref),
                    Err(e) => SeedRun {
                        jumps: 0,
                        sup_a: f64::NAN,
                        bound_c: None,
                        outcome: Err(e.to_string()),
                        dominance: None,
                    },
                };
                (seed, run)
            })
            .collect()
    });

    let mut out = Output::new(&run.out_dir)?;
    let mut summary = CsvWriter::with_header(&[
        "seed_index",
        "seed",
        "outcome",
        "iterations",
        "jumps",
        "sup_a",
        "sup_f",
        "bound_c",
        "within_bound",
        "hypothesis",
        "dominates",
        "verified_delta",
    ]);
    let (mut converged, mut diverged, mut failed, mut dominated) = (0usize, 0usize, 0usize, 0usize);
    for (idx, (seed, r)) in runs.iter().enumerate() {
        let (iterations, sup_f) = match &r.outcome {
            Ok(o) => {
                out.write(&format!("field_{idx:04}.csv"), &triangle_csv(o.field()))?;
                let history = match o {
                    SolveOutcome::Converged(f) => {
                        converged += 1;
                        &f.history
                    }
                    SolveOutcome::Diverged(d) => {
                        diverged += 1;
                        &d.history
                    }
                };
                out.write(&format!("iterations_{idx:04}.csv"), &history_csv(history))?;
                (o.iterations().to_string(), fmt_g(o.field().sup()))
            }
            Err(_) => {
                failed += 1;
                (String::new(), String::new())
            }
        };
        let within = match (&r.outcome, r.bound_c) {
            (Ok(SolveOutcome::Converged(f)), Some(c)) => (f.sup <= c * (1.0 + 1e-12)).to_string(),
            _ => String::new(),
        };
        let (hyp, dom, vd) = match &r.dominance {
            Some(d) => {
                if d.dominates() {
                    dominated += 1;
                }
                (
                    d.hypothesis_holds.to_string(),
                    d.dominates().to_string(),
                    opt(d.verified_delta),
                )
            }
            None => (String::new(), String::new(), String::new()),
        };
        summary.row(&[
            idx.to_string(),
            seed.to_string(),
            r.label(),
            iterations,
            r.jumps.to_string(),
            fmt_g(r.sup_a),
            sup_f,
            opt(r.bound_c),
            within,
            hyp,
            dom,
            vd,
        ]);
    }
    out.write("solve_summary.csv", &summary.finish())?;
    let n = runs.len().max(1) as f64;
    let mut agg = CsvWriter::with_header(&[
        "seeds",
        "converged",
        "diverged",
        "failed",
        "converged_frequency",
        "dominance_frequency",
    ]);
    agg.row(&[
        runs.len().to_string(),
        converged.to_string(),
        diverged.to_string(),
        failed.to_string(),
        fmt_g(converged as f64 / n),
        if comparison.is_some() {
            fmt_g(dominated as f64 / n)
        } else {
            String::new()
        },
    ]);
    out.write("aggregate.csv", &agg.finish())?;
    out.manifest("solve", cfg)?;
    out.say(format!(
        "seeds: {} converged: {converged} diverged: {diverged} failed: {failed}",
        runs.len()
    ));
    Ok(out.summary)
}

/// One `(f₀, n)` cell of the explosion study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyCell {
    pub f0: f64,
    pub n: usize,
    pub seeds: usize,
    pub converged: usize,
    pub hypothesis: usize,
    pub dominated: usize,
    /// Largest field value at the innermost checked cell over all seeds.
    pub max_f_innermost: f64,
    pub h_innermost: f64,
}

impl StudyCell {
    pub fn dominance_frequency(&self) -> f64 {
        self.dominated as f64 / self.seeds.max(1) as f64
    }
}

/// Runs the sweep and returns per-cell statistics; `rows` receives one CSV
/// row per (f₀, n, seed).
fn explosion_sweep(
    cfg: &ExperimentConfig,
    workers: usize,
    rows: &mut CsvWriter,
) -> Result<Vec<StudyCell>, ExperimentError> {
    let measure = cfg.validated_measure();
    let report = classify(&measure, &cfg.volatility, cfg.horizon);
    if report.verdict != Verdict::NonExistence {
        return Err(ExperimentError::RegimeMismatch {
            expected: Verdict::NonExistence,
            found: report.verdict,
        });
    }
    let ev = ExponentEvaluator::new(measure.clone());
    let p = comparison_parameters(cfg, &ev)?;
    let corner = cfg.comparison.corner.unwrap_or(cfg.horizon);
    let mut bundles = Vec::new();
    for &n in &cfg.study.grid_levels {
        let grid = GridSpec::new(cfg.horizon, n);
        bundles.push(
            comparison_bundle(corner, corner, p.gamma, p.alpha, grid)
                .map_err(|e| ExperimentError::Numeric(e.to_string()))?,
        );
    }

    // per seed: results for every (f0, n), in config order
    let per_seed: Vec<(u64, Vec<SeedRun>)> = pool(workers)?.install(|| {
        seeds(cfg)
            .into_par_iter()
            .map(|(_, seed)| {
                let mut runs = Vec::new();
                match simulate_path(&measure, cfg.horizon, cfg.eps, seed) {
                    Ok(path) => {
                        for &f0 in &cfg.study.f0_levels {
                            for b in &bundles {
                                runs.push(solve_one(
                                    &ev,
                                    cfg,
                                    &path,
                                    &InitialCurve::Constant(f0),
                                    b.grid(),
                                    StartChoice::Zero,
                                    Some((b, p.beta)),
                                ));
                            }
                        }
                    }
                    Err(e) => {
                        for _ in 0..cfg.study.f0_levels.len() * bundles.len() {
                            runs.push(SeedRun {
                                jumps: 0,
                                sup_a: f64::NAN,
                                bound_c: None,
                                outcome: Err(e.to_string()),
                                dominance: None,
                            });
                        }
                    }
                }
                (seed, runs)
            })
            .collect()
    });

    let mut cells = Vec::new();
    for (li, &f0) in cfg.study.f0_levels.iter().enumerate() {
        for (gi, b) in bundles.iter().enumerate() {
            let k = li * bundles.len() + gi;
            let mut cell = StudyCell {
                f0,
                n: b.grid().n,
                seeds: per_seed.len(),
                converged: 0,
                hypothesis: 0,
                dominated: 0,
                max_f_innermost: f64::NEG_INFINITY,
                h_innermost: f64::NAN,
            };
            for (idx, (seed, runs)) in per_seed.iter().enumerate() {
                let r = &runs[k];
                if matches!(r.outcome, Ok(SolveOutcome::Converged(_))) {
                    cell.converged += 1;
                }
                let (hyp, dom, vd, fin, hin) = match &r.dominance {
                    Some(d) => {
                        cell.hypothesis += d.hypothesis_holds as usize;
                        cell.dominated += d.dominates() as usize;
                        cell.max_f_innermost = cell.max_f_innermost.max(d.f_innermost);
                        cell.h_innermost = d.h_innermost;
                        (
                            d.hypothesis_holds.to_string(),
                            d.dominates().to_string(),
                            opt(d.verified_delta),
                            fmt_g(d.f_innermost),
                            fmt_g(d.h_innermost),
                        )
                    }
                    None => Default::default(),
                };
                rows.row(&[
                    fmt_g(f0),
                    b.grid().n.to_string(),
                    idx.to_string(),
                    seed.to_string(),
                    r.label(),
                    r.outcome
                        .as_ref()
                        .map(|o| o.iterations().to_string())
                        .unwrap_or_default(),
                    hyp,
                    dom,
                    vd,
                    fin,
                    hin,
                ]);
            }
            cells.push(cell);
        }
    }
    Ok(cells)
}

/// The explosion sweep without writing files.
pub fn explosion_study(cfg: &ExperimentConfig, workers: usize) -> Result<Vec<StudyCell>, ExperimentError> {
    explosion_sweep(cfg, workers, &mut CsvWriter::default())
}

pub fn cmd_explode_study(cfg: &ExperimentConfig, run: &RunOptions) -> Result<CommandSummary, ExperimentError> {
    let mut rows = CsvWriter::with_header(&[
        "f0",
        "n",
        "seed_index",
        "seed",
        "outcome",
        "iterations",
        "hypothesis",
        "dominates",
        "verified_delta",
        "f_innermost",
        "h_innermost",
    ]);
    let cells = explosion_sweep(cfg, run.workers, &mut rows)?;
    let mut out = Output::new(&run.out_dir)?;
    out.write("explode_study.csv", &rows.finish())?;
    let mut summary = CsvWriter::with_header(&[
        "f0",
        "n",
        "seeds",
        "converged",
        "hypothesis_frequency",
        "dominance_frequency",
        "max_f_innermost",
        "h_innermost",
    ]);
    for c in &cells {
        summary.row(&[
            fmt_g(c.f0),
            c.n.to_string(),
            c.seeds.to_string(),
            c.converged.to_string(),
            fmt_g(c.hypothesis as f64 / c.seeds.max(1) as f64),
            fmt_g(c.dominance_frequency()),
            fmt_g(c.max_f_innermost),
            fmt_g(c.h_innermost),
        ]);
        out.say(format!(
            "f0={} n={}: dominance {}",
            fmt_g(c.f0),
            c.n,
            fmt_g(c.dominance_frequency())
        ));
    }
    out.write("explode_summary.csv", &summary.finish())?;
    out.manifest("explode-study", cfg)?;
    Ok(out.summary)
}

/// Loads a configuration file, mapping failures to config errors.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
    let text = fs::read_to_string(path).map_err(|e| {
        ExperimentError::Config(ConfigError {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })
    })?;
    Ok(ExperimentConfig::parse(&text)?)
}
