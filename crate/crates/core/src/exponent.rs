//! The Lévy–Khinchin exponent `J` and its first two derivatives on `[0, ∞)`.
//!
//! For a pure-jump measure `ν`,
//!
//! ```text
//! J(z)   = ∫_{y<1} (e^{-zy} - 1 + zy) ν(dy) + ∫_{y≥1} (e^{-zy} - 1) ν(dy)
//! J'(z)  = ∫_{y<1} y (1 - e^{-zy}) ν(dy)    - ∫_{y≥1} y e^{-zy} ν(dy)
//! J''(z) = ∫ y² e^{-zy} ν(dy)
//! ```
//!
//! Stable-type measures are evaluated after the substitution `v = z|y|`,
//! which turns the small-jump parts into integrals of entire kernels against
//! `v^p`. Near `v = 0` those integrals are summed term by term; the rest goes
//! through log-substituted Gauss-Kronrod quadrature. `J'` additionally has
//! power series: a Poisson-weighted positive form for the positive side, the
//! plain exponential series for the negative side, and the odd series for the
//! symmetric case.

use thiserror::Error;

use crate::measure::{exp_poly_integral, LevyMeasureSpec, ValidatedMeasure};
use crate::quadrature::{integrate, integrate_log, QuadOptions, QuadratureError};

/// Below this `v`, small-jump integrals are summed analytically.
const SERIES_CUTOFF: f64 = 1e-3;
/// Above this `z` the alternating positive-side series is not used.
const SERIES_MAX_Z: f64 = 30.0;
/// Beyond this `v`, `1 - e^{-v}` equals one to double precision.
const SATURATION_V: f64 = 40.0;
/// `e^x` overflows for `x` above this.
const EXP_OVERFLOW: f64 = 709.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExponentError {
    #[error("exponent is defined on [0, ∞) only, got z = {0}")]
    InvalidArgument(f64),
    #[error("e^(-z·y) overflows on the negative support at z = {z}")]
    NumericOverflow { z: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalStrategy {
    /// Series for `J'` where available, closed-form limits for large `z`.
    SeriesSmallZ,
    /// Quadrature everywhere.
    QuadratureGeneral,
    /// Quadrature up to the saturation point, analytic beyond it.
    ClosedFormLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Order {
    J,
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Positive,
    Negative,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Positive => 1.0,
            Side::Negative => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentEvaluator {
    measure: ValidatedMeasure,
    strategy: EvalStrategy,
    series_terms: usize,
    quad_tol: f64,
}

impl ExponentEvaluator {
    pub fn new(measure: ValidatedMeasure) -> Self {
        Self {
            measure,
            strategy: EvalStrategy::SeriesSmallZ,
            series_terms: 10_000,
            quad_tol: 1e-12,
        }
    }

    pub fn with_strategy(mut self, strategy: EvalStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_quad_tol(mut self, quad_tol: f64) -> Self {
        self.quad_tol = quad_tol;
        self
    }

    pub fn with_series_terms(mut self, series_terms: usize) -> Self {
        self.series_terms = series_terms.max(1);
        self
    }

    pub fn measure(&self) -> &ValidatedMeasure {
        &self.measure
    }

    pub fn strategy(&self) -> EvalStrategy {
        self.strategy
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    pub fn j(&self, z: f64) -> Result<f64, ExponentError> {
        self.eval(Order::J, z)
    }

    pub fn j_prime(&self, z: f64) -> Result<f64, ExponentError> {
        self.eval(Order::First, z)
    }

    pub fn j_second(&self, z: f64) -> Result<f64, ExponentError> {
        self.eval(Order::Second, z)
    }

    /// `J'(z)` with overflow on the negative support mapped to `+∞`,
    /// which is the direction every overflow goes.
    pub fn j_prime_extended(&self, z: f64) -> Result<f64, ExponentError> {
        if z == f64::INFINITY {
            return Ok(self.j_prime_limit());
        }
        match self.j_prime(z) {
            Err(ExponentError::NumericOverflow { .. }) => Ok(f64::INFINITY),
            other => other,
        }
    }

    /// `lim_{z→∞} J'(z)`, possibly `+∞`.
    pub fn j_prime_limit(&self) -> f64 {
        let spec = self.measure.spec();
        if spec.has_negative_jumps() {
            return f64::INFINITY;
        }
        match *spec {
            LevyMeasureSpec::TruncatedStablePositive { rho } | LevyMeasureSpec::FullStablePositive { rho } => {
                if rho < 1.0 {
                    1.0 / (1.0 - rho)
                } else {
                    f64::INFINITY
                }
            }
            LevyMeasureSpec::ExponentialJumps { scale, rate } => scale * exp_poly_integral(1, rate, 0.0, 1.0),
            LevyMeasureSpec::FiniteActivityTabulated { ref table } => table.moment(1, 0.0, 1.0),
            _ => f64::INFINITY,
        }
    }

    fn opts(&self) -> QuadOptions {
        QuadOptions {
            abs_tol: 1e-300,
            rel_tol: self.quad_tol,
            max_intervals: 4000,
        }
    }

    fn eval(&self, order: Order, z: f64) -> Result<f64, ExponentError> {
        if !(z >= 0.0) || !z.is_finite() {
            return Err(ExponentError::InvalidArgument(z));
        }
        let spec = self.measure.spec();
        if spec.has_negative_jumps() {
            let low = self.charged_low();
            if z * (-low) > EXP_OVERFLOW {
                return Err(ExponentError::NumericOverflow { z });
            }
        }
        let value = match *spec {
            LevyMeasureSpec::TruncatedStablePositive { rho } => self.stable_side(order, rho, z, Side::Positive)?,
            LevyMeasureSpec::TruncatedStableNegative { rho } => self.stable_side(order, rho, z, Side::Negative)?,
            LevyMeasureSpec::TruncatedStableSymmetric { rho } => self.symmetric(order, rho, z)?,
            LevyMeasureSpec::FullStablePositive { rho } => {
                self.stable_side(order, rho, z, Side::Positive)? + stable_tail(order, rho, z, &self.opts())?
            }
            LevyMeasureSpec::FullStableTwoSided { rho } => {
                self.symmetric(order, rho, z)? + stable_tail(order, rho, z, &self.opts())?
            }
            LevyMeasureSpec::ExponentialJumps { scale, rate } => {
                if self.strategy == EvalStrategy::QuadratureGeneral {
                    self.density_quadrature(order, z)?
                } else {
                    exponential_closed_form(order, scale, rate, z)
                }
            }
            LevyMeasureSpec::FiniteActivityTabulated { .. } => self.density_quadrature(order, z)?,
        };
        if !value.is_finite() && !(order == Order::Second && value == f64::INFINITY) {
            return Err(ExponentError::NumericOverflow { z });
        }
        Ok(value)
    }

    fn charged_low(&self) -> f64 {
        match self.measure.spec() {
            LevyMeasureSpec::FiniteActivityTabulated { table } => table
                .knots()
                .windows(2)
                .find(|w| w[0].1 > 0.0 || w[1].1 > 0.0)
                .map(|w| w[0].0)
                .unwrap_or(0.0),
            other => other.support().0,
        }
    }

    fn symmetric(&self, order: Order, rho: f64, z: f64) -> Result<f64, ExponentError> {
        if order == Order::First && self.strategy == EvalStrategy::SeriesSmallZ {
            if let Some(v) = symmetric_series(rho, z, self.series_terms) {
                return Ok(v);
            }
        }
        Ok(self.stable_side(order, rho, z, Side::Positive)? + self.stable_side(order, rho, z, Side::Negative)?)
    }

    /// Contribution of `|y|^{-1-ρ}` on `(0, 1)` or `(-1, 0)`.
    fn stable_side(&self, order: Order, rho: f64, z: f64, side: Side) -> Result<f64, ExponentError> {
        if z == 0.0 {
            return Ok(match order {
                Order::J | Order::First => 0.0,
                Order::Second => 1.0 / (2.0 - rho),
            });
        }
        if order == Order::First && self.strategy == EvalStrategy::SeriesSmallZ {
            let series = match side {
                Side::Positive if z <= SERIES_MAX_Z => positive_series(rho, z, self.series_terms),
                Side::Negative => negative_series(rho, z, self.series_terms),
                Side::Positive => None,
            };
            if let Some(v) = series {
                return Ok(v);
            }
        }
        let (power, prefactor) = match order {
            Order::J => (-1.0 - rho, z.powf(rho)),
            Order::First => (-rho, z.powf(rho - 1.0)),
            Order::Second => (1.0 - rho, z.powf(rho - 2.0)),
        };
        let split = z.min(SERIES_CUTOFF);
        let mut total = kernel_series(order, side, power, split);
        if z > split {
            let saturate =
                side == Side::Positive && self.strategy != EvalStrategy::QuadratureGeneral && z > SATURATION_V;
            let upper = if saturate { SATURATION_V } else { z };
            let q = integrate_log(|v| kernel(order, side, v) * v.powf(power), split, upper, &self.opts())?;
            total += q.value;
            if saturate {
                total += saturated_tail(order, rho, SATURATION_V, z);
            }
        }
        Ok(prefactor * total)
    }

    /// Direct quadrature of the defining integrals against the density.
    fn density_quadrature(&self, order: Order, z: f64) -> Result<f64, ExponentError> {
        let spec = self.measure.spec();
        let opts = self.opts();
        let mut total = 0.0;
        match spec {
            LevyMeasureSpec::FiniteActivityTabulated { table } => {
                for (lo, hi) in [(f64::NEG_INFINITY, 0.0), (0.0, 1.0), (1.0, f64::INFINITY)] {
                    for (a, b, c0, c1) in table.pieces(lo, hi) {
                        total += integrate_scaled(|y| integrand(order, z, y) * (c0 + c1 * y), a, b, z, &opts)?;
                    }
                }
            }
            _ => {
                let (low, high) = spec.support();
                let density = |y: f64| spec.density(y);
                let mut cuts = vec![low, 0.0_f64.max(low), 1.0_f64.min(high)];
                if high.is_finite() {
                    cuts.push(high);
                } else {
                    let g = |y: f64| (integrand(order, z, y) * density(y)).abs();
                    cuts.push(truncation_point(g, 1.0_f64.max(low)));
                }
                cuts.dedup();
                for w in cuts.windows(2) {
                    if w[1] > w[0] {
                        total += integrate_scaled(|y| integrand(order, z, y) * density(y), w[0], w[1], z, &opts)?;
                    }
                }
            }
        }
        Ok(total)
    }
}

/// Integrates over `[a, b]` with extra break points at `|y| = 10^k / z`,
/// where the kernels change on the scale of `1/z`.
fn integrate_scaled<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, z: f64, opts: &QuadOptions) -> Result<f64, ExponentError> {
    let mut cuts = vec![a];
    if z > 0.0 {
        for k in 0..6 {
            let m = 10f64.powi(k) / z;
            for c in [-m, m] {
                if c > a && c < b {
                    cuts.push(c);
                }
            }
        }
    }
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate(&f, w[0], w[1], opts)?.value;
    }
    Ok(total)
}

/// Integrand of `J`, `J'` or `J''` against `ν(dy)` at jump size `y`.
fn integrand(order: Order, z: f64, y: f64) -> f64 {
    let x = z * y;
    match order {
        Order::J => {
            if y < 1.0 {
                exp_neg_m1_plus(x)
            } else {
                (-x).exp_m1()
            }
        }
        Order::First => {
            if y < 1.0 {
                -y * (-x).exp_m1()
            } else {
                -y * (-x).exp()
            }
        }
        Order::Second => y * y * (-x).exp(),
    }
}

/// First point past `start` where `g` has dropped below `1e-16` of the
/// largest value seen while stepping outwards.
fn truncation_point<G: Fn(f64) -> f64>(g: G, start: f64) -> f64 {
    let mut peak = g(start);
    let mut y = start.max(1.0);
    let mut step = 1.0;
    for _ in 0..200 {
        y += step;
        let v = g(y);
        peak = peak.max(v);
        if v <= 1e-16 * peak {
            return y;
        }
        step *= 1.5;
    }
    y
}

/// `e^{-x} - 1 + x` without cancellation near zero.
pub(crate) fn exp_neg_m1_plus(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let mut term = x * x / 2.0;
        let mut sum = term;
        for k in 3..20 {
            term *= -x / k as f64;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        (-x).exp_m1() + x
    }
}

/// Kernel of the small-jump integrals in the variable `v = z|y|`.
fn kernel(order: Order, side: Side, v: f64) -> f64 {
    let x = side.sign() * v;
    match order {
        Order::J => exp_neg_m1_plus(x),
        Order::First => -side.sign() * (-x).exp_m1(),
        Order::Second => (-x).exp(),
    }
}

/// `∫_0^w K(v) v^p dv` summed from the Taylor series of the kernel.
fn kernel_series(order: Order, side: Side, power: f64, w: f64) -> f64 {
    if w == 0.0 {
        return 0.0;
    }
    let s = side.sign();
    let (start, mult) = match order {
        Order::J => (2, 1.0),
        Order::First => (1, -s),
        Order::Second => (0, 1.0),
    };
    // coefficient of v^k is mult·(-s)^k / k!
    let mut coeff = mult;
    for k in 1..=start {
        coeff *= -s / k as f64;
    }
    let mut sum = 0.0;
    let mut k = start;
    loop {
        let e = k as f64 + power + 1.0;
        let term = coeff * w.powf(e) / e;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 60 {
            break;
        }
        k += 1;
        coeff *= -s / k as f64;
    }
    sum
}

/// Analytic `∫_a^z` of the saturated positive-side kernel against `v^p`.
fn saturated_tail(order: Order, rho: f64, a: f64, z: f64) -> f64 {
    let power_integral = |e: f64| -> f64 {
        if (e + 1.0).abs() < 1e-15 {
            (z / a).ln()
        } else {
            (z.powf(e + 1.0) - a.powf(e + 1.0)) / (e + 1.0)
        }
    };
    match order {
        // e^{-v} - 1 + v ≈ v - 1
        Order::J => power_integral(-rho) - power_integral(-1.0 - rho),
        // 1 - e^{-v} ≈ 1
        Order::First => power_integral(-rho),
        // e^{-v} ≈ 0
        Order::Second => 0.0,
    }
}

/// `∫_0^1 (1 - e^{-zy}) y^{-ρ} dy` as the Poisson mixture
/// `e^{-z} Σ_n z^n/n! · d_n`, where `d_n = ∫_0^1 y^{-ρ}(1 - (1-y)^n) dy`
/// grows through `d_{n+1} = d_n + B(2-ρ, n+1)`. All terms are positive.
pub(crate) fn positive_series(rho: f64, z: f64, max_terms: usize) -> Option<f64> {
    let mut weight = (-z).exp();
    let mut beta = 1.0 / (2.0 - rho); // B(2-ρ, 1)
    let mut d = 0.0;
    let mut sum = 0.0;
    for n in 1..=max_terms {
        let nf = n as f64;
        d += beta;
        beta *= nf / (nf + 2.0 - rho);
        weight *= z / nf;
        let term = weight * d;
        sum += term;
        if nf > z && term <= 1e-16 * sum {
            return Some(sum);
        }
    }
    None
}

/// `∫_0^1 (e^{zw} - 1) w^{-ρ} dw = Σ_{k≥1} z^k / (k! (k+1-ρ))`.
pub(crate) fn negative_series(rho: f64, z: f64, max_terms: usize) -> Option<f64> {
    let mut power = 1.0;
    let mut sum = 0.0;
    for k in 1..=max_terms {
        let kf = k as f64;
        power *= z / kf;
        let term = power / (kf + 1.0 - rho);
        sum += term;
        if !sum.is_finite() {
            return Some(f64::INFINITY);
        }
        if kf > z && term <= 1e-16 * sum {
            return Some(sum);
        }
    }
    None
}

/// `J'` of the symmetric truncated measure:
/// `2 Σ_{k≥0} z^{2k+1} / ((2k+2-ρ)(2k+1)!)`.
pub(crate) fn symmetric_series(rho: f64, z: f64, max_terms: usize) -> Option<f64> {
    if z == 0.0 {
        return Some(0.0);
    }
    let mut power = z; // z^{2k+1}/(2k+1)!
    let mut sum = 0.0;
    for k in 0..max_terms {
        let kf = k as f64;
        let term = 2.0 * power / (2.0 * kf + 2.0 - rho);
        sum += term;
        if !sum.is_finite() {
            return Some(f64::INFINITY);
        }
        if 2.0 * kf + 1.0 > z && term <= 1e-16 * sum {
            return Some(sum);
        }
        power *= z * z / ((2.0 * kf + 2.0) * (2.0 * kf + 3.0));
    }
    None
}

/// Large-jump part `∫_1^∞ (...) y^{-1-ρ} dy` of the full-support kinds.
fn stable_tail(order: Order, rho: f64, z: f64, opts: &QuadOptions) -> Result<f64, ExponentError> {
    Ok(match order {
        Order::J => tail_integral(z, 1.0 + rho, opts)? - 1.0 / rho,
        Order::First => -tail_integral(z, rho, opts)?,
        Order::Second => tail_integral(z, rho - 1.0, opts)?,
    })
}

/// `E_q(z) = ∫_1^∞ e^{-zy} y^{-q} dy`, integrated over `y = e^u`.
pub(crate) fn tail_integral(z: f64, q: f64, opts: &QuadOptions) -> Result<f64, ExponentError> {
    if z == 0.0 {
        return Ok(if q > 1.0 { 1.0 / (q - 1.0) } else { f64::INFINITY });
    }
    // e^{-745} is below the smallest subnormal.
    let upper = (745.0 / z).ln();
    if upper <= 0.0 {
        return Ok(0.0);
    }
    let r = integrate(|u| (-z * u.exp() + u * (1.0 - q)).exp(), 0.0, upper, opts)?;
    Ok(r.value)
}

fn exponential_closed_form(order: Order, scale: f64, rate: f64, z: f64) -> f64 {
    // A = ∫_0^1 y e^{-θy} dy
    let a = exp_poly_integral(1, rate, 0.0, 1.0);
    let s = z + rate;
    match order {
        Order::J => scale * z * (a - 1.0 / (rate * s)),
        Order::First => scale * (a - 1.0 / (s * s)),
        Order::Second => 2.0 * scale / (s * s * s),
    }
}
