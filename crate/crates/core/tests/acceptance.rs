//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

mod common;

use std::fs;
use std::path::Path;
use std::time::Instant;

use common::measure;
use levy_hjm::catalog::reference_catalog;
use levy_hjm::comparison::{closed_double_integral, comparison_bundle, g_reference, power_mean_check, r_function};
use levy_hjm::config::ExperimentConfig;
use levy_hjm::experiment::{cmd_explode_study, cmd_simulate, cmd_solve, explosion_study, RunOptions};
use levy_hjm::exponent::{EvalStrategy, ExponentEvaluator};
use levy_hjm::grid::{GridSpec, TriangleField};
use levy_hjm::measure::{validate, LevyMeasureSpec, VolatilitySpec};
use levy_hjm::quadrature::{integrate, QuadOptions};
use levy_hjm::regime::{bound_constant, certificate_violations, classify, log_grid};
use levy_hjm::rng::{derive_seed, StreamRng};
use levy_hjm::simulation::{a_field, simulate_path, CoefficientField, InitialCurve};
use levy_hjm::solver::{apply_a_extended, solve_fixed_point, SolveOptions, SolveOutcome, StartField};
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn catalog_verdicts() -> Outcome {
    let start = Instant::now();
    for e in reference_catalog() {
        let m = validate(e.spec.clone(), &e.vol).map_err(|err| err.to_string())?;
        let verdict = classify(&m, &e.vol, e.horizon).verdict;
        check(
            verdict == e.expected,
            format!("{}: {verdict} instead of {}", e.name, e.expected),
        )?;
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 10.0, format!("took {secs:.2} s"))?;
    Ok(format!("9/9 verdicts in {secs:.2} s"))
}

fn exponent_analytics() -> Outcome {
    let fsp = ExponentEvaluator::new(measure(LevyMeasureSpec::FullStablePositive { rho: 1.5 }));
    let d0 = fsp.j_prime(0.0).map_err(|e| e.to_string())?;
    check((d0 + 2.0).abs() < 1e-12, format!("J'(0) = {d0}"))?;

    let tsp = ExponentEvaluator::new(measure(LevyMeasureSpec::TruncatedStablePositive { rho: 0.5 }));
    let far = tsp.j_prime(1e6).map_err(|e| e.to_string())?;
    check((far - 2.0).abs() < 1e-2, format!("J'(1e6) = {far}"))?;

    let mut worst = 0.0f64;
    for rho in [0.5, 1.0, 1.5] {
        for spec in [
            LevyMeasureSpec::TruncatedStablePositive { rho },
            LevyMeasureSpec::TruncatedStableSymmetric { rho },
            LevyMeasureSpec::TruncatedStableNegative { rho },
        ] {
            let series = ExponentEvaluator::new(measure(spec.clone())).with_strategy(EvalStrategy::SeriesSmallZ);
            let quad = ExponentEvaluator::new(measure(spec)).with_strategy(EvalStrategy::QuadratureGeneral);
            for k in 0..=300 {
                let z = 0.1 * k as f64;
                let (a, b) = (series.j_prime(z).unwrap(), quad.j_prime(z).unwrap());
                worst = worst.max((a - b).abs() / b.abs().max(1.0));
            }
        }
    }
    check(worst < 1e-8, format!("series vs quadrature differ by {worst:e}"))?;

    for e in reference_catalog() {
        let ev = ExponentEvaluator::new(validate(e.spec.clone(), &e.vol).unwrap());
        let values: Vec<f64> = log_grid(1e-6, 1e12, 200)
            .into_iter()
            .map(|z| ev.j_prime_extended(z).unwrap())
            .collect();
        check(
            values
                .windows(2)
                .all(|w| w[1] >= w[0] || w[1] - w[0] >= -1e-12 * w[0].abs()),
            format!("J' not monotone for {}", e.name),
        )?;
    }
    Ok(format!(
        "J'(0) = {d0}, J'(1e6) = {far:.6}, series gap {worst:.1e}, monotone on 9 measures"
    ))
}

fn certificate_soundness() -> Outcome {
    let m = measure(LevyMeasureSpec::TruncatedStableSymmetric { rho: 1.5 });
    let ev = ExponentEvaluator::new(m.clone());
    let grid = log_grid(1e-6, 1e12, 200);
    let mut bad = 0;
    for &z in &grid {
        let d = ev.j_prime_extended(z).unwrap();
        if d < 4.0 * z - 1e-9 * (4.0 * z).max(1.0) {
            bad += 1;
        }
    }
    check(bad == 0, format!("J'(z) < 4z at {bad} points"))?;
    let cert = classify(&m, &VolatilitySpec::unit(), 1.0)
        .certificate
        .ok_or("no certificate")?;
    check(cert.alpha == 4.0 && cert.gamma == 0.5, format!("certificate {cert:?}"))?;
    let violations = certificate_violations(&ev, &cert, &grid, 1e-9).unwrap();
    check(
        violations.is_empty(),
        format!("{} certificate violations", violations.len()),
    )?;
    Ok("J'(z) ≥ 4z at 200 points".into())
}

fn laplace_monte_carlo() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for spec in [
        LevyMeasureSpec::ExponentialJumps { scale: 1.0, rate: 1.0 },
        LevyMeasureSpec::TruncatedStablePositive { rho: 0.5 },
    ] {
        let m = measure(spec.clone());
        let ev = ExponentEvaluator::new(m.clone());
        let eps = if m.spec().is_finite_activity() { 0.0 } else { 1e-4 };
        let levels: Vec<f64> = (0..100_000u64)
            .into_par_iter()
            .map(|i| {
                simulate_path(&m, 1.0, eps, derive_seed(2718, i))
                    .unwrap()
                    .terminal_level()
            })
            .collect();
        for z in [0.5, 1.0, 2.0] {
            let xs: Vec<f64> = levels.iter().map(|l| (-z * l).exp()).collect();
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let se = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
            let want = ev.j(z).unwrap().exp();
            let score = (mean - want).abs() / se;
            worst = worst.max(score);
            check(score < 4.0, format!("{spec:?} z={z}: {mean} vs {want} ({score:.2} SE)"))?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 60.0, format!("took {secs:.1} s"))?;
    Ok(format!("max deviation {worst:.2} SE, {secs:.1} s"))
}

fn existence_setup() -> (
    levy_hjm::measure::ValidatedMeasure,
    ExponentEvaluator,
    VolatilitySpec,
    GridSpec,
) {
    let m = measure(LevyMeasureSpec::ExponentialJumps { scale: 1.0, rate: 1.0 });
    (
        m.clone(),
        ExponentEvaluator::new(m),
        VolatilitySpec::unit(),
        GridSpec::new(1.0, 200),
    )
}

fn fixed_point_existence() -> Outcome {
    let (m, ev, vol, grid) = existence_setup();
    let results: Vec<Result<(f64, f64), String>> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let path = simulate_path(&m, 1.0, 0.0, derive_seed(31, i)).map_err(|e| e.to_string())?;
            let a = a_field(&path, &InitialCurve::Constant(1.0), &vol, grid).map_err(|e| e.to_string())?;
            let c = bound_constant(&ev, a.sup_a, &vol, 1.0).map_err(|e| e.to_string())?;
            match solve_fixed_point(&a, &ev, &vol, &SolveOptions::default()).map_err(|e| e.to_string())? {
                SolveOutcome::Converged(f) => Ok((f.sup, c)),
                SolveOutcome::Diverged(_) => Err(format!("seed {i} diverged")),
            }
        })
        .collect();
    let mut converged = 0;
    for r in &results {
        let (sup, c) = r.clone()?;
        check(sup <= c, format!("sup f = {sup} above c = {c}"))?;
        converged += 1;
    }
    Ok(format!("{converged}/100 converged, all within bound_constant"))
}

fn uniqueness() -> Outcome {
    let (m, ev, vol, grid) = existence_setup();
    let opts = SolveOptions::default();
    let mut worst = 0.0f64;
    for i in 0..20u64 {
        let path = simulate_path(&m, 1.0, 0.0, derive_seed(31, i)).unwrap();
        let a = a_field(&path, &InitialCurve::Constant(1.0), &vol, grid).unwrap();
        let c = bound_constant(&ev, a.sup_a, &vol, 1.0).unwrap();
        let low = solve_fixed_point(&a, &ev, &vol, &opts).map_err(|e| e.to_string())?;
        let high = solve_fixed_point(
            &a,
            &ev,
            &vol,
            &SolveOptions {
                start: StartField::Constant(c),
                ..opts
            },
        )
        .map_err(|e| e.to_string())?;
        check(
            low.is_converged() && high.is_converged(),
            format!("seed {i} did not converge"),
        )?;
        worst = worst.max(low.field().sup_distance(high.field()));
    }
    check(worst <= 10.0 * opts.tol, format!("sup distance {worst:e}"))?;
    Ok(format!("max sup distance {worst:.2e} over 20 seeds"))
}

const EXPLOSION: &str = "\
[measure]
kind = truncated_stable_negative
rho = 1.5
[model]
horizon = 1
eps = 1e-4
[seeds]
master_seed = 2024
count = 200
[comparison]
enabled = true
[study]
f0_levels = 1, 10, 100
grid_levels = 50, 100, 200
";

fn explosion() -> Outcome {
    let cfg = ExperimentConfig::parse(EXPLOSION).map_err(|e| e.to_string())?;
    let cells = explosion_study(&cfg, rayon::current_num_threads()).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    for &n in &cfg.study.grid_levels {
        let row: Vec<_> = cells.iter().filter(|c| c.n == n).collect();
        let freq: Vec<f64> = row.iter().map(|c| c.dominance_frequency()).collect();
        check(
            freq.windows(2).all(|w| w[1] >= w[0]),
            format!("n={n}: frequencies {freq:?} not nondecreasing"),
        )?;
        let top = *freq.last().unwrap();
        check(top >= 0.95, format!("n={n}: dominance at f0=100 is {top}"))?;
        lines.push(format!("n={n}: {freq:?}"));
    }
    for &f0 in &cfg.study.f0_levels {
        let by_n: Vec<f64> = cells.iter().filter(|c| c.f0 == f0).map(|c| c.max_f_innermost).collect();
        check(
            by_n.windows(2).all(|w| w[1] >= w[0]),
            format!("f0={f0}: innermost maxima {by_n:?} not monotone in n"),
        )?;
    }
    let last = cells
        .iter()
        .filter(|c| c.f0 == 100.0)
        .all(|c| c.max_f_innermost >= c.h_innermost);
    check(last, "innermost field below the barrier at f0=100")?;
    Ok(format!("dominance frequency by f0 {}", lines.join("; ")))
}

fn comparison_machinery() -> Outcome {
    let mut rng = StreamRng::new(8, 0);
    let opts = QuadOptions::with_rel_tol(1e-13);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let y = 0.5 + 0.5 * rng.uniform();
        let x = y * (0.3 + 0.7 * rng.uniform());
        let t = x * 0.95 * rng.uniform();
        let big_t = t + (y - t) * 0.95 * rng.uniform();
        let closed = closed_double_integral(t, big_t, x, y).map_err(|e| e.to_string())?;
        let nested = integrate(
            |s| integrate(|u| (x - s + y - u).powi(-3), s, big_t, &opts).unwrap().value,
            0.0,
            t,
            &opts,
        )
        .unwrap()
        .value;
        worst = worst.max((closed - nested).abs());
    }
    check(worst < 1e-9, format!("closed form off by {worst:e}"))?;

    let (gamma, alpha) = (0.5, 2.0);
    let grid = GridSpec::new(1.0, 400);
    let b = comparison_bundle(1.0, 1.0, gamma, alpha, grid).map_err(|e| e.to_string())?;
    let mut recon = 0.0f64;
    for i in (0..=400).step_by(20) {
        for j in (i..=400).step_by(20) {
            let (t, big_t) = (grid.time(i), grid.time(j));
            if 2.0 - t - big_t < 0.25 {
                continue;
            }
            let h = b.h.get(i, j);
            let g_exact = g_reference(t, big_t, 1.0, 1.0, gamma, alpha);
            // e^{∫R(∫h)} from the reference, times the tabulated g
            let rebuilt = (h / g_exact) * b.g.get(i, j);
            recon = recon.max((rebuilt - h).abs() / h);
        }
    }
    check(recon < 0.01, format!("reconstruction error {recon}"))?;

    let directions = [
        (1, 0),
        (1, 1),
        (2, 1),
        (3, 1),
        (3, 2),
        (4, 1),
        (4, 3),
        (5, 2),
        (5, 3),
        (5, 4),
    ];
    for (di, dj) in directions {
        let along: Vec<f64> = (1..=60).rev().map(|k| b.g.get(400 - k * di, 400 - k * dj)).collect();
        let peak = along.iter().cloned().fold(0.0, f64::max);
        let tail = &along[along.len() - 10..];
        check(
            tail.windows(2).all(|w| w[1] <= w[0]) && *tail.last().unwrap() < 1e-12 * peak,
            format!("g does not vanish along ({di},{dj}): {tail:?}"),
        )?;
    }
    Ok(format!(
        "closed form {worst:.1e}, reconstruction {:.3}%, g → 0 on 10 paths",
        100.0 * recon
    ))
}

fn property_suites() -> Outcome {
    let mut rng = StreamRng::new(99, 0);
    for _ in 0..1000 {
        let k = 2 + (rng.uniform() * 10.0) as usize;
        let mut x = -5.0 + 10.0 * rng.uniform();
        let mut knots = Vec::new();
        for _ in 0..k {
            knots.push((x, 50.0 * rng.uniform()));
            x += 0.01 + rng.uniform();
        }
        let gamma = 0.01 + 0.98 * rng.uniform();
        check(
            power_mean_check(&knots, gamma),
            format!("power mean fails for {knots:?}"),
        )?;
    }
    for _ in 0..1000 {
        let (z1, z2) = (100.0 * rng.uniform(), 100.0 * rng.uniform());
        let alpha = rng.uniform();
        let gamma = 0.01 + 0.98 * rng.uniform();
        let r = r_function(z1, alpha, gamma);
        let top = alpha * z1.powf(gamma);
        check(
            r <= top * (1.0 + 1e-12) && r >= top - 1.0,
            format!("sandwich fails at z={z1}"),
        )?;
        let d = (r - r_function(z2, alpha, gamma)).abs();
        check(d <= alpha * (z1 - z2).abs() * (1.0 + 1e-12) + 1e-12, "Lipschitz fails")?;
    }
    let ev = ExponentEvaluator::new(measure(LevyMeasureSpec::FullStableTwoSided { rho: 1.7 }));
    let vol = VolatilitySpec::unit();
    let grid = GridSpec::new(1.0, 12);
    for _ in 0..100 {
        let a = CoefficientField::from_values(TriangleField::from_fn(grid, |_, _| 0.1 + 2.0 * rng.uniform()));
        let f = TriangleField::from_fn(grid, |_, _| 3.0 * rng.uniform());
        let g = TriangleField::from_fn(grid, |i, j| f.get(i, j) + 2.0 * rng.uniform());
        let (af, ag) = (
            apply_a_extended(&a, &f, &ev, &vol).unwrap(),
            apply_a_extended(&a, &g, &ev, &vol).unwrap(),
        );
        check(
            af.iter().all(|(i, j, v)| v <= ag.get(i, j) * (1.0 + 1e-12)),
            "operator not monotone",
        )?;
    }
    Ok("1000 power-mean, 1000 R, 100 operator cases".into())
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let solve = ExperimentConfig::parse(
        "[measure]\nkind = truncated_stable_positive\nrho = 0.5\n[model]\ngrid_n = 60\n[seeds]\nmaster_seed = 5\ncount = 8\n",
    )
    .unwrap();
    let mut study = ExperimentConfig::parse(EXPLOSION).unwrap();
    study.seeds.count = 6;
    study.study.grid_levels = vec![20, 40];
    let mut total = 0;
    for (name, cfg, cmd) in [
        ("solve", &solve, cmd_solve as fn(&_, &_) -> _),
        ("simulate", &solve, cmd_simulate),
        ("study", &study, cmd_explode_study),
    ] {
        let mut runs = Vec::new();
        for (k, workers) in [(0, 1), (1, 1), (2, 4)] {
            let dir = root.path().join(format!("{name}{k}"));
            cmd(cfg, &RunOptions::new(&dir, workers)).map_err(|e| e.to_string())?;
            runs.push(snapshot(&dir));
        }
        check(runs[0] == runs[1], format!("{name}: two runs differ"))?;
        check(runs[0] == runs[2], format!("{name}: worker counts 1 and 4 differ"))?;
        total += runs[0].len();
    }
    Ok(format!("{total} files byte-identical across runs and worker counts"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("catalog verdicts", catalog_verdicts),
        ("exponent analytics", exponent_analytics),
        ("certificate soundness", certificate_soundness),
        ("Laplace transform Monte Carlo", laplace_monte_carlo),
        ("fixed-point existence", fixed_point_existence),
        ("uniqueness from two starts", uniqueness),
        ("explosion study", explosion),
        ("comparison machinery", comparison_machinery),
        ("property suites", property_suites),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1} s]", k + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1} s]", k + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
