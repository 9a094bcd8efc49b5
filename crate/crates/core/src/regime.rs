//! Regime classification: does a bounded forward-rate field exist for a given
//! measure, volatility bound and horizon?
//!
//! Existence is witnessed by an unbounded gap `ln z − λ̄T*·J'(z)`; non-existence
//! by a lower power bound `J'(z) ≥ α z^γ + β` with `γ ∈ (0, 1)` under unit
//! volatility. Both are checked on a log-spaced grid, and anything that fits
//! neither pattern is reported as indeterminate.

use thiserror::Error;

use crate::exponent::{ExponentError, ExponentEvaluator};
use crate::measure::{LevyMeasureSpec, ValidatedMeasure, VolatilitySpec};
use crate::quadrature::{integrate, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Existence,
    NonExistence,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Existence => "Existence",
            Verdict::NonExistence => "NonExistence",
            Verdict::Indeterminate => "Indeterminate",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateSource {
    /// Odd series bound `J'(z) ≥ 2z/(2−ρ)` for symmetric small jumps.
    SymmetricSeries,
    /// `J'(z) ≥ z^{ρ−1} ∫_0^1 (1−e^{−v}) v^{−ρ} dv` for positive small jumps, `ρ > 1`.
    PositiveSmallJumps,
    /// Convexity of `J'` when every jump is negative.
    Convexity,
    /// Slopes fitted to sampled values.
    NumericFit,
}

/// Lower bound `J'(z) ≥ α z^γ + β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    pub source: CertificateSource,
}

impl Certificate {
    pub fn lower_bound(&self, z: f64) -> f64 {
        self.alpha * z.powf(self.gamma) + self.beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSample {
    pub z: f64,
    /// `+∞` where the exponent overflows.
    pub j_prime: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    /// Largest sampled gap and where it occurs.
    pub max_gap: Option<(f64, f64)>,
    pub samples: Vec<GridSample>,
    /// Grid points where the certificate fails.
    pub violations: Vec<f64>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub grid_points: usize,
    pub z_min: f64,
    pub z_max: f64,
    /// Start of the window over which the gap must grow monotonically.
    pub growth_from: f64,
    pub gap_threshold: f64,
    pub slack: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            grid_points: 200,
            z_min: 1e-6,
            z_max: 1e12,
            growth_from: 1e10,
            gap_threshold: 10.0,
            slack: 1e-9,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("J' does not grow like a power of z (slopes {0:?})")]
    NoPowerGrowth(Vec<f64>),
    #[error("candidate certificate violated at z = {0}")]
    Violated(f64),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("bound constant requires a positive finite K, got {0}")]
    InvalidK(f64),
    #[error("no c ≤ {c_max:e} satisfies ln K + λ̄T*·J'(λ̄cT*) ≤ ln c")]
    NoBound { c_max: f64 },
    #[error(transparent)]
    Exponent(#[from] ExponentError),
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

pub fn classify(measure: &ValidatedMeasure, vol: &VolatilitySpec, horizon: f64) -> RegimeReport {
    classify_with(measure, vol, horizon, &ClassifyOptions::default())
}

pub fn classify_with(
    measure: &ValidatedMeasure,
    vol: &VolatilitySpec,
    horizon: f64,
    opts: &ClassifyOptions,
) -> RegimeReport {
    let evaluator = ExponentEvaluator::new(measure.clone());
    let scale = vol.lambda_bar() * horizon;
    let grid = log_grid(opts.z_min, opts.z_max, opts.grid_points);
    let mut report = RegimeReport {
        verdict: Verdict::Indeterminate,
        certificate: None,
        max_gap: None,
        samples: Vec::with_capacity(grid.len()),
        violations: Vec::new(),
        notes: Vec::new(),
    };

    for &z in &grid {
        match evaluator.j_prime_extended(z) {
            Ok(jp) => report.samples.push(GridSample {
                z,
                j_prime: jp,
                gap: z.ln() - scale * jp,
            }),
            Err(e) => {
                report.notes.push(format!("J' failed at z = {z:e}: {e}"));
                return report;
            }
        }
    }
    report.max_gap = report
        .samples
        .iter()
        .filter(|s| s.gap.is_finite())
        .max_by(|a, b| a.gap.total_cmp(&b.gap))
        .map(|s| (s.z, s.gap));

    if let LevyMeasureSpec::TruncatedStablePositive { rho } = *measure.spec() {
        if rho == 1.0 && scale >= 1.0 {
            report.notes.push(format!(
                "ρ = 1 with λ̄T* = {scale} ≥ 1 is not covered by either criterion"
            ));
            return report;
        }
    }

    let window: Vec<&GridSample> = report.samples.iter().filter(|s| s.z >= opts.growth_from).collect();
    let grows = window.len() >= 2
        && window.windows(2).all(|w| w[1].gap >= w[0].gap)
        && window.last().is_some_and(|s| s.gap > opts.gap_threshold);
    if grows {
        report.verdict = Verdict::Existence;
        return report;
    }

    if !vol.is_identically_one() {
        report.notes.push("the non-existence criterion needs λ ≡ 1".to_string());
        return report;
    }
    match fit_lower_power_with(&evaluator, opts) {
        Ok(cert) => {
            report.verdict = Verdict::NonExistence;
            report.certificate = Some(cert);
        }
        Err(e) => report.notes.push(format!("no power lower bound: {e}")),
    }
    report
}

/// `∫_0^1 (1 − e^{−v}) v^{−ρ} dv`.
pub fn small_jump_alpha(rho: f64) -> f64 {
    // Σ_{k≥1} (−1)^{k+1} / (k! (k+1−ρ)), term-wise from the Taylor series.
    let mut sum = 0.0;
    let mut fact = 1.0;
    for k in 1..40 {
        fact *= k as f64;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign / (fact * (k as f64 + 1.0 - rho));
    }
    sum
}

pub fn fit_lower_power(evaluator: &ExponentEvaluator) -> Result<Certificate, FitError> {
    fit_lower_power_with(evaluator, &ClassifyOptions::default())
}

pub fn fit_lower_power_with(evaluator: &ExponentEvaluator, opts: &ClassifyOptions) -> Result<Certificate, FitError> {
    let grid = log_grid(opts.z_min, opts.z_max, opts.grid_points);
    let values = grid
        .iter()
        .map(|&z| evaluator.j_prime_extended(z))
        .collect::<Result<Vec<f64>, _>>()?;

    if let Some(cert) = analytic_certificate(evaluator)? {
        if first_violation(&cert, &grid, &values, opts.slack).is_none() {
            return Ok(cert);
        }
    }
    let cert = numeric_certificate(&grid, &values)?;
    match first_violation(&cert, &grid, &values, opts.slack) {
        None => Ok(cert),
        Some(z) => Err(FitError::Violated(z)),
    }
}

/// Grid points where `J'(z) < α z^γ + β − slack`.
pub fn certificate_violations(
    evaluator: &ExponentEvaluator,
    cert: &Certificate,
    grid: &[f64],
    slack: f64,
) -> Result<Vec<f64>, ExponentError> {
    let mut out = Vec::new();
    for &z in grid {
        if evaluator.j_prime_extended(z)? < cert.lower_bound(z) - slack {
            out.push(z);
        }
    }
    Ok(out)
}

fn first_violation(cert: &Certificate, grid: &[f64], values: &[f64], slack: f64) -> Option<f64> {
    grid.iter()
        .zip(values)
        .find(|(&z, &v)| v < cert.lower_bound(z) - slack)
        .map(|(&z, _)| z)
}

fn analytic_certificate(evaluator: &ExponentEvaluator) -> Result<Option<Certificate>, ExponentError> {
    let spec = evaluator.measure().spec();
    let cert = match *spec {
        LevyMeasureSpec::TruncatedStableSymmetric { rho } => {
            let alpha = 2.0 / (2.0 - rho);
            Some(Certificate {
                alpha,
                gamma: 0.5,
                beta: -alpha,
                source: CertificateSource::SymmetricSeries,
            })
        }
        LevyMeasureSpec::FullStableTwoSided { rho } => {
            let alpha = 2.0 / (2.0 - rho);
            // the large jumps lower J' by at most ∫_1^∞ y^{−ρ} dy
            Some(Certificate {
                alpha,
                gamma: 0.5,
                beta: -alpha - 1.0 / (rho - 1.0),
                source: CertificateSource::SymmetricSeries,
            })
        }
        LevyMeasureSpec::TruncatedStablePositive { rho } if rho > 1.0 => {
            let alpha = small_jump_alpha(rho);
            Some(Certificate {
                alpha,
                gamma: rho - 1.0,
                beta: -alpha,
                source: CertificateSource::PositiveSmallJumps,
            })
        }
        LevyMeasureSpec::FullStablePositive { rho } => {
            let alpha = small_jump_alpha(rho);
            Some(Certificate {
                alpha,
                gamma: rho - 1.0,
                beta: -alpha - 1.0 / (rho - 1.0),
                source: CertificateSource::PositiveSmallJumps,
            })
        }
        _ if spec.has_negative_jumps() && !spec.has_positive_jumps() => {
            let curvature = evaluator.j_second(0.0)?;
            if curvature > 0.0 && curvature.is_finite() {
                Some(Certificate {
                    alpha: curvature,
                    gamma: 0.5,
                    beta: evaluator.j_prime(0.0)? - curvature,
                    source: CertificateSource::Convexity,
                })
            } else {
                None
            }
        }
        _ => None,
    };
    Ok(cert)
}

fn numeric_certificate(grid: &[f64], values: &[f64]) -> Result<Certificate, FitError> {
    let lookup = |target: f64| -> f64 {
        let i = grid.iter().position(|&z| z >= target).unwrap_or(grid.len() - 1);
        values[i]
    };
    let gamma = if values.iter().any(|v| v.is_infinite()) {
        0.5
    } else {
        let (v8, v10, v12) = (lookup(1e8), lookup(1e10), lookup(1e12));
        if v8 <= 0.0 || v10 <= 0.0 || v12 <= 0.0 {
            return Err(FitError::NoPowerGrowth(vec![]));
        }
        let decades = 100f64.ln();
        let s1 = (v10 / v8).ln() / decades;
        let s2 = (v12 / v10).ln() / decades;
        let low = s1.min(s2);
        if low < 0.1 || (s1 - s2).abs() > 0.1 * s1.max(s2) {
            return Err(FitError::NoPowerGrowth(vec![s1, s2]));
        }
        (0.95 * low).min(0.99)
    };
    let alpha = 0.5
        * grid
            .iter()
            .zip(values)
            .filter(|(&z, v)| z >= 10.0 && v.is_finite())
            .map(|(&z, &v)| v / z.powf(gamma))
            .fold(f64::INFINITY, f64::min);
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(FitError::NoPowerGrowth(vec![]));
    }
    let beta = grid
        .iter()
        .zip(values)
        .map(|(&z, &v)| v - alpha * z.powf(gamma))
        .fold(f64::INFINITY, f64::min);
    Ok(Certificate {
        alpha,
        gamma,
        beta,
        source: CertificateSource::NumericFit,
    })
}

/// Smallest `c ≥ K` found with `ln K + λ̄T*·J'(λ̄cT*)⁺ ≤ ln c`.
pub fn bound_constant(
    evaluator: &ExponentEvaluator,
    k: f64,
    vol: &VolatilitySpec,
    horizon: f64,
) -> Result<f64, BoundError> {
    const C_MAX: f64 = 1e15;
    if !(k > 0.0) || !k.is_finite() {
        return Err(BoundError::InvalidK(k));
    }
    let scale = vol.lambda_bar() * horizon;
    let holds = |c: f64| -> Result<bool, ExponentError> {
        let jp = evaluator.j_prime_extended(vol.lambda_bar() * c * horizon)?;
        Ok(k.ln() + scale * jp.max(0.0) <= c.ln())
    };
    if holds(k)? {
        return Ok(k);
    }
    let mut lo = k;
    let mut hi = k;
    loop {
        hi *= 2.0;
        if hi > C_MAX {
            if holds(C_MAX)? {
                hi = C_MAX;
                break;
            }
            return Err(BoundError::NoBound { c_max: C_MAX });
        }
        if holds(hi)? {
            break;
        }
        lo = hi;
    }
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if holds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Reference value of [`small_jump_alpha`] by quadrature.
pub fn small_jump_alpha_quadrature(rho: f64) -> f64 {
    integrate(
        |v: f64| if v == 0.0 { 0.0 } else { -(-v).exp_m1() * v.powf(-rho) },
        0.0,
        1.0,
        &QuadOptions::with_rel_tol(1e-12),
    )
    .map(|r| r.value)
    .unwrap_or(f64::NAN)
}
