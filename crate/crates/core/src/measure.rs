//! Catalog of Lévy jump measures and volatility bounds.
//!
//! A [`LevyMeasureSpec`] is a parametric description of the jump intensity
//! `ν`. Pairing it with a [`VolatilitySpec`] through [`validate`] checks the
//! integrability conditions and the support floor `-1/λ̄`, and annotates the
//! measure with its basic moment integrals.
//!
//! Supports are treated as open intervals: a measure on `(-1, 0)` is
//! admissible for `λ̄ = 1`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("integrability violation: {integral} diverges ({detail})")]
    IntegrabilityViolation { integral: &'static str, detail: String },
    #[error("support violation: support starts at {support_low}, below the floor -1/lambda_bar = {floor}")]
    SupportViolation { support_low: f64, floor: f64 },
    #[error("stability index rho = {rho} sits on the boundary of the admissible range for {kind}")]
    BoundaryIndex { kind: MeasureKind, rho: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VolatilityError {
    #[error("lambda_low must be positive, got {0}")]
    NonPositiveLower(f64),
    #[error("lambda_high must be at least 1 and at least lambda_low, got [{low}, {high}]")]
    BadUpper { low: f64, high: f64 },
    #[error("constant volatility {value} lies outside [{low}, {high}]")]
    ConstantOutOfRange { value: f64, low: f64, high: f64 },
    #[error("volatility parameters must be finite")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    TruncatedStablePositive,
    TruncatedStableSymmetric,
    TruncatedStableNegative,
    FullStablePositive,
    FullStableTwoSided,
    FiniteActivityTabulated,
    ExponentialJumps,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 7] = [
        MeasureKind::TruncatedStablePositive,
        MeasureKind::TruncatedStableSymmetric,
        MeasureKind::TruncatedStableNegative,
        MeasureKind::FullStablePositive,
        MeasureKind::FullStableTwoSided,
        MeasureKind::FiniteActivityTabulated,
        MeasureKind::ExponentialJumps,
    ];

    /// Config-file spelling of the kind.
    pub fn key(self) -> &'static str {
        match self {
            MeasureKind::TruncatedStablePositive => "truncated_stable_positive",
            MeasureKind::TruncatedStableSymmetric => "truncated_stable_symmetric",
            MeasureKind::TruncatedStableNegative => "truncated_stable_negative",
            MeasureKind::FullStablePositive => "full_stable_positive",
            MeasureKind::FullStableTwoSided => "full_stable_two_sided",
            MeasureKind::FiniteActivityTabulated => "finite_activity_tabulated",
            MeasureKind::ExponentialJumps => "exponential_jumps",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.key() == key)
    }

    pub fn is_stable(self) -> bool {
        !matches!(
            self,
            MeasureKind::FiniteActivityTabulated | MeasureKind::ExponentialJumps
        )
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Nonnegative piecewise-linear density on a bounded support.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    knots: Vec<(f64, f64)>,
}

impl DensityTable {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self, MeasureError> {
        if knots.len() < 2 {
            return Err(MeasureError::InvalidParameter(
                "density table needs at least two knots".into(),
            ));
        }
        for &(y, p) in &knots {
            if !y.is_finite() || !p.is_finite() {
                return Err(MeasureError::InvalidParameter(
                    "density table entries must be finite".into(),
                ));
            }
            if p < 0.0 {
                return Err(MeasureError::InvalidParameter(format!(
                    "density must be nonnegative, got {p} at y = {y}"
                )));
            }
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(MeasureError::InvalidParameter(
                "density table abscissae must be strictly increasing".into(),
            ));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn low(&self) -> f64 {
        self.knots[0].0
    }

    pub fn high(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    pub fn density(&self, y: f64) -> f64 {
        if y < self.low() || y > self.high() {
            return 0.0;
        }
        let idx = self.knots.partition_point(|&(k, _)| k <= y);
        if idx == 0 {
            return self.knots[0].1;
        }
        if idx >= self.knots.len() {
            return self.knots[self.knots.len() - 1].1;
        }
        let (y0, p0) = self.knots[idx - 1];
        let (y1, p1) = self.knots[idx];
        p0 + (p1 - p0) * (y - y0) / (y1 - y0)
    }

    /// Linear pieces `(a, b, intercept, slope)` of the density, clipped to
    /// `[lo, hi]`.
    pub fn pieces(&self, lo: f64, hi: f64) -> Vec<(f64, f64, f64, f64)> {
        let mut out = Vec::new();
        for w in self.knots.windows(2) {
            let ((y0, p0), (y1, p1)) = (w[0], w[1]);
            let a = y0.max(lo);
            let b = y1.min(hi);
            if b <= a {
                continue;
            }
            let slope = (p1 - p0) / (y1 - y0);
            let intercept = p0 - slope * y0;
            out.push((a, b, intercept, slope));
        }
        out
    }

    /// Exact `∫_{lo}^{hi} y^k p(y) dy` of the piecewise-linear density.
    pub fn moment(&self, k: i32, lo: f64, hi: f64) -> f64 {
        self.pieces(lo, hi)
            .into_iter()
            .map(|(a, b, c0, c1)| {
                let p1 = (k + 1) as f64;
                let p2 = (k + 2) as f64;
                c0 * (b.powi(k + 1) - a.powi(k + 1)) / p1 + c1 * (b.powi(k + 2) - a.powi(k + 2)) / p2
            })
            .sum()
    }

    /// `∫ y^k p(y) dy` over `{ε ≤ |y| < 1}` for `k ∈ {0, 1}`, or over the
    /// whole `{|y| ≥ ε}` when `upper_one` is false.
    pub(crate) fn moment_away_from_zero(&self, k: i32, eps: f64, upper_one: bool) -> f64 {
        let hi = if upper_one { 1.0 } else { f64::INFINITY };
        let lo_neg = if upper_one { -1.0 } else { f64::NEG_INFINITY };
        let neg = self.moment(k, lo_neg, -eps);
        let pos = self.moment(k, eps, hi);
        neg + pos
    }
}

/// Parametric jump intensity measure.
///
/// Stable kinds have density `|y|^{-1-ρ}` on their kind-specific support;
/// the exponential kind has density `c·e^{-θy}` on `(0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub enum LevyMeasureSpec {
    TruncatedStablePositive { rho: f64 },
    TruncatedStableSymmetric { rho: f64 },
    TruncatedStableNegative { rho: f64 },
    FullStablePositive { rho: f64 },
    FullStableTwoSided { rho: f64 },
    FiniteActivityTabulated { table: DensityTable },
    ExponentialJumps { scale: f64, rate: f64 },
}

impl LevyMeasureSpec {
    pub fn kind(&self) -> MeasureKind {
        match self {
            LevyMeasureSpec::TruncatedStablePositive { .. } => MeasureKind::TruncatedStablePositive,
            LevyMeasureSpec::TruncatedStableSymmetric { .. } => MeasureKind::TruncatedStableSymmetric,
            LevyMeasureSpec::TruncatedStableNegative { .. } => MeasureKind::TruncatedStableNegative,
            LevyMeasureSpec::FullStablePositive { .. } => MeasureKind::FullStablePositive,
            LevyMeasureSpec::FullStableTwoSided { .. } => MeasureKind::FullStableTwoSided,
            LevyMeasureSpec::FiniteActivityTabulated { .. } => MeasureKind::FiniteActivityTabulated,
            LevyMeasureSpec::ExponentialJumps { .. } => MeasureKind::ExponentialJumps,
        }
    }

    pub fn rho(&self) -> Option<f64> {
        match *self {
            LevyMeasureSpec::TruncatedStablePositive { rho }
            | LevyMeasureSpec::TruncatedStableSymmetric { rho }
            | LevyMeasureSpec::TruncatedStableNegative { rho }
            | LevyMeasureSpec::FullStablePositive { rho }
            | LevyMeasureSpec::FullStableTwoSided { rho } => Some(rho),
            _ => None,
        }
    }

    /// Open support interval `(low, high)`; `high` may be `+∞`.
    pub fn support(&self) -> (f64, f64) {
        match self {
            LevyMeasureSpec::TruncatedStablePositive { .. } => (0.0, 1.0),
            LevyMeasureSpec::TruncatedStableSymmetric { .. } => (-1.0, 1.0),
            LevyMeasureSpec::TruncatedStableNegative { .. } => (-1.0, 0.0),
            LevyMeasureSpec::FullStablePositive { .. } => (0.0, f64::INFINITY),
            LevyMeasureSpec::FullStableTwoSided { .. } => (-1.0, f64::INFINITY),
            LevyMeasureSpec::FiniteActivityTabulated { table } => (table.low(), table.high()),
            LevyMeasureSpec::ExponentialJumps { .. } => (0.0, f64::INFINITY),
        }
    }

    pub fn is_finite_activity(&self) -> bool {
        matches!(
            self,
            LevyMeasureSpec::FiniteActivityTabulated { .. } | LevyMeasureSpec::ExponentialJumps { .. }
        )
    }

    /// True when the measure charges `(-∞, 0)`.
    pub fn has_negative_jumps(&self) -> bool {
        match self {
            LevyMeasureSpec::FiniteActivityTabulated { table } => table.moment(0, f64::NEG_INFINITY, 0.0) > 0.0,
            other => other.support().0 < 0.0,
        }
    }

    /// True when the measure charges `(0, ∞)`.
    pub fn has_positive_jumps(&self) -> bool {
        match self {
            LevyMeasureSpec::FiniteActivityTabulated { table } => table.moment(0, 0.0, f64::INFINITY) > 0.0,
            LevyMeasureSpec::TruncatedStableNegative { .. } => false,
            _ => true,
        }
    }

    /// Density of `ν` with respect to Lebesgue measure.
    pub fn density(&self, y: f64) -> f64 {
        if let LevyMeasureSpec::FiniteActivityTabulated { table } = self {
            return table.density(y);
        }
        let (lo, hi) = self.support();
        if y <= lo || y >= hi || y == 0.0 {
            return 0.0;
        }
        match *self {
            LevyMeasureSpec::ExponentialJumps { scale, rate } => scale * (-rate * y).exp(),
            _ => {
                let rho = self.rho().expect("stable kind");
                y.abs().powf(-1.0 - rho)
            }
        }
    }

    fn check_parameters(&self) -> Result<(), MeasureError> {
        let kind = self.kind();
        match *self {
            LevyMeasureSpec::ExponentialJumps { scale, rate } => {
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(MeasureError::InvalidParameter(format!(
                        "exponential scale c must be positive, got {scale}"
                    )));
                }
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(MeasureError::InvalidParameter(format!(
                        "exponential rate theta must be positive, got {rate}"
                    )));
                }
                Ok(())
            }
            LevyMeasureSpec::FiniteActivityTabulated { .. } => Ok(()),
            _ => {
                let rho = self.rho().expect("stable kind");
                if !rho.is_finite() {
                    return Err(MeasureError::InvalidParameter(format!(
                        "stability index must be finite, got {rho}"
                    )));
                }
                if rho < 0.0 {
                    return Err(MeasureError::InvalidParameter(format!(
                        "stability index must lie in (0, 2), got {rho}"
                    )));
                }
                if rho == 0.0 {
                    return Err(MeasureError::BoundaryIndex { kind, rho });
                }
                if rho >= 2.0 {
                    return Err(MeasureError::IntegrabilityViolation {
                        integral: "∫ y²∧1 ν(dy)",
                        detail: format!("|y|^(1-rho) is not integrable at 0 for rho = {rho} ≥ 2"),
                    });
                }
                let full = matches!(kind, MeasureKind::FullStablePositive | MeasureKind::FullStableTwoSided);
                if full && rho <= 1.0 {
                    return Err(MeasureError::IntegrabilityViolation {
                        integral: "∫_1^∞ y ν(dy)",
                        detail: format!("y^(-rho) is not integrable at ∞ for rho = {rho} ≤ 1"),
                    });
                }
                Ok(())
            }
        }
    }

    fn moments(&self, lambda_bar: f64) -> MassMoments {
        let floor = -1.0 / lambda_bar;
        match *self {
            LevyMeasureSpec::TruncatedStablePositive { rho } | LevyMeasureSpec::TruncatedStableNegative { rho } => {
                MassMoments {
                    m2_small: 1.0 / (2.0 - rho),
                    m1_tail: 0.0,
                    total_mass: TotalMass::Infinite,
                }
            }
            LevyMeasureSpec::TruncatedStableSymmetric { rho } => MassMoments {
                m2_small: 2.0 / (2.0 - rho),
                m1_tail: 0.0,
                total_mass: TotalMass::Infinite,
            },
            LevyMeasureSpec::FullStablePositive { rho } => MassMoments {
                m2_small: 1.0 / (2.0 - rho),
                m1_tail: 1.0 / (rho - 1.0),
                total_mass: TotalMass::Infinite,
            },
            LevyMeasureSpec::FullStableTwoSided { rho } => MassMoments {
                m2_small: 2.0 / (2.0 - rho),
                m1_tail: 1.0 / (rho - 1.0),
                total_mass: TotalMass::Infinite,
            },
            LevyMeasureSpec::ExponentialJumps { scale, rate } => MassMoments {
                m2_small: scale * exp_poly_integral(2, rate, 0.0, 1.0),
                m1_tail: scale * exp_poly_integral(1, rate, 1.0, f64::INFINITY),
                total_mass: TotalMass::Finite(scale / rate),
            },
            LevyMeasureSpec::FiniteActivityTabulated { ref table } => MassMoments {
                m2_small: table.moment(2, floor, 1.0),
                m1_tail: table.moment(1, 1.0, f64::INFINITY),
                total_mass: TotalMass::Finite(table.moment(0, f64::NEG_INFINITY, f64::INFINITY)),
            },
        }
    }

    /// `ν({|y| ≥ ε})`; infinite only for infinite-activity kinds at `ε = 0`.
    pub fn mass_beyond(&self, eps: f64) -> f64 {
        let eps = eps.max(0.0);
        let power_mass = |rho: f64, upper: f64| -> f64 {
            // ∫_ε^upper y^{-1-ρ} dy
            if eps == 0.0 {
                return f64::INFINITY;
            }
            if eps >= upper {
                return 0.0;
            }
            let tail = if upper.is_finite() { upper.powf(-rho) } else { 0.0 };
            (eps.powf(-rho) - tail) / rho
        };
        match *self {
            LevyMeasureSpec::TruncatedStablePositive { rho } | LevyMeasureSpec::TruncatedStableNegative { rho } => {
                power_mass(rho, 1.0)
            }
            LevyMeasureSpec::TruncatedStableSymmetric { rho } => 2.0 * power_mass(rho, 1.0),
            LevyMeasureSpec::FullStablePositive { rho } => power_mass(rho, f64::INFINITY),
            LevyMeasureSpec::FullStableTwoSided { rho } => power_mass(rho, 1.0) + power_mass(rho, f64::INFINITY),
            LevyMeasureSpec::ExponentialJumps { scale, rate } => scale * (-rate * eps).exp() / rate,
            LevyMeasureSpec::FiniteActivityTabulated { ref table } => table.moment_away_from_zero(0, eps, false),
        }
    }

    /// `∫_{ε ≤ |y| < 1} y ν(dy)`, the drift carried by compensated jumps.
    pub fn compensated_first_moment(&self, eps: f64) -> f64 {
        let eps = eps.max(0.0);
        // ∫_ε^1 y^{-ρ} dy
        let power_first = |rho: f64| -> f64 {
            if eps >= 1.0 {
                return 0.0;
            }
            if rho == 1.0 {
                -eps.ln()
            } else {
                (1.0 - eps.powf(1.0 - rho)) / (1.0 - rho)
            }
        };
        match *self {
            LevyMeasureSpec::TruncatedStablePositive { rho } | LevyMeasureSpec::FullStablePositive { rho } => {
                power_first(rho)
            }
            LevyMeasureSpec::TruncatedStableNegative { rho } => -power_first(rho),
            LevyMeasureSpec::TruncatedStableSymmetric { .. } | LevyMeasureSpec::FullStableTwoSided { .. } => 0.0,
            LevyMeasureSpec::ExponentialJumps { scale, rate } => {
                if eps >= 1.0 {
                    0.0
                } else {
                    scale * exp_poly_integral(1, rate, eps, 1.0)
                }
            }
            LevyMeasureSpec::FiniteActivityTabulated { ref table } => table.moment_away_from_zero(1, eps, true),
        }
    }
}

/// `∫_a^b y^k e^{-θy} dy` for `k ∈ {0, 1, 2}`; `b` may be `+∞`.
pub(crate) fn exp_poly_integral(k: u32, theta: f64, a: f64, b: f64) -> f64 {
    let antiderivative = |y: f64| -> f64 {
        if y.is_infinite() {
            return 0.0;
        }
        let e = (-theta * y).exp();
        match k {
            0 => -e / theta,
            1 => -e * (y / theta + 1.0 / (theta * theta)),
            2 => -e * (y * y / theta + 2.0 * y / (theta * theta) + 2.0 / (theta * theta * theta)),
            _ => unreachable!("only k <= 2 is used"),
        }
    };
    antiderivative(b) - antiderivative(a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TotalMass {
    Finite(f64),
    Infinite,
}

impl TotalMass {
    pub fn as_f64(self) -> f64 {
        match self {
            TotalMass::Finite(m) => m,
            TotalMass::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, TotalMass::Finite(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassMoments {
    /// `∫_{(-1/λ̄, 1)} y² ν(dy)`
    pub m2_small: f64,
    /// `∫_1^∞ y ν(dy)`
    pub m1_tail: f64,
    pub total_mass: TotalMass,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VolatilityForm {
    Constant(f64),
    /// `λ(t) = intercept + slope·t`, clamped into `[λ̲, λ̄]`.
    SeparableLinear {
        intercept: f64,
        slope: f64,
    },
}

/// Deterministic volatility scale `λ(t, T)`, zero for `t > T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolatilitySpec {
    pub lambda_low: f64,
    pub lambda_high: f64,
    pub form: VolatilityForm,
}

impl VolatilitySpec {
    pub fn new(lambda_low: f64, lambda_high: f64, form: VolatilityForm) -> Result<Self, VolatilityError> {
        let spec = Self {
            lambda_low,
            lambda_high,
            form,
        };
        spec.check()?;
        Ok(spec)
    }

    /// `λ ≡ 1` with bounds `[1, 1]`.
    pub fn unit() -> Self {
        Self {
            lambda_low: 1.0,
            lambda_high: 1.0,
            form: VolatilityForm::Constant(1.0),
        }
    }

    /// Constant `λ ≡ value` with `λ̄ = max(1, value)`.
    pub fn constant(value: f64) -> Result<Self, VolatilityError> {
        Self::new(value, value.max(1.0), VolatilityForm::Constant(value))
    }

    pub fn check(&self) -> Result<(), VolatilityError> {
        let (low, high) = (self.lambda_low, self.lambda_high);
        let finite_form = match self.form {
            VolatilityForm::Constant(v) => v.is_finite(),
            VolatilityForm::SeparableLinear { intercept, slope } => intercept.is_finite() && slope.is_finite(),
        };
        if !low.is_finite() || !high.is_finite() || !finite_form {
            return Err(VolatilityError::NonFinite);
        }
        if low <= 0.0 {
            return Err(VolatilityError::NonPositiveLower(low));
        }
        if high < 1.0 || high < low {
            return Err(VolatilityError::BadUpper { low, high });
        }
        if let VolatilityForm::Constant(value) = self.form {
            if value < low || value > high {
                return Err(VolatilityError::ConstantOutOfRange { value, low, high });
            }
        }
        Ok(())
    }

    pub fn lambda_bar(&self) -> f64 {
        self.lambda_high
    }

    /// `λ(t, T)`; the form depends on `t` only and vanishes past maturity.
    pub fn value(&self, t: f64, maturity: f64) -> f64 {
        if t > maturity {
            return 0.0;
        }
        self.at(t)
    }

    fn at(&self, t: f64) -> f64 {
        match self.form {
            VolatilityForm::Constant(v) => v,
            VolatilityForm::SeparableLinear { intercept, slope } => {
                (intercept + slope * t).clamp(self.lambda_low, self.lambda_high)
            }
        }
    }

    /// Exact `∫_{t0}^{t1} λ(s) ds` for `t0 ≤ t1` below maturity.
    pub fn integral(&self, t0: f64, t1: f64) -> f64 {
        match self.form {
            VolatilityForm::Constant(v) => v * (t1 - t0),
            VolatilityForm::SeparableLinear { intercept, slope } => {
                if slope == 0.0 {
                    return self.at(t0) * (t1 - t0);
                }
                // Break points where the line meets the clamp bounds.
                let mut cuts = vec![t0, t1];
                for bound in [self.lambda_low, self.lambda_high] {
                    let s = (bound - intercept) / slope;
                    if s > t0 && s < t1 {
                        cuts.push(s);
                    }
                }
                cuts.sort_by(f64::total_cmp);
                cuts.windows(2)
                    .map(|w| 0.5 * (self.at(w[0]) + self.at(w[1])) * (w[1] - w[0]))
                    .sum()
            }
        }
    }

    pub fn is_identically_one(&self) -> bool {
        match self.form {
            VolatilityForm::Constant(v) => v == 1.0,
            VolatilityForm::SeparableLinear { .. } => self.lambda_low == 1.0 && self.lambda_high == 1.0,
        }
    }
}

/// A measure that passed [`validate`] against a volatility bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedMeasure {
    spec: LevyMeasureSpec,
    lambda_bar: f64,
    moments: MassMoments,
}

impl ValidatedMeasure {
    pub fn spec(&self) -> &LevyMeasureSpec {
        &self.spec
    }

    pub fn kind(&self) -> MeasureKind {
        self.spec.kind()
    }

    /// The `λ̄` the support floor was checked against.
    pub fn lambda_bar(&self) -> f64 {
        self.lambda_bar
    }

    pub fn moments(&self) -> MassMoments {
        self.moments
    }

    /// Re-checks the measure against another volatility.
    pub fn revalidate(&self, vol: &VolatilitySpec) -> Result<ValidatedMeasure, MeasureError> {
        validate(self.spec.clone(), vol)
    }
}

/// Checks integrability and the support floor for `spec` paired with `vol`.
pub fn validate(spec: LevyMeasureSpec, vol: &VolatilitySpec) -> Result<ValidatedMeasure, MeasureError> {
    spec.check_parameters()?;
    let lambda_bar = vol.lambda_bar();
    let floor = -1.0 / lambda_bar;
    let support_low = match &spec {
        // Only the charged part of a table counts.
        LevyMeasureSpec::FiniteActivityTabulated { table } => table
            .knots()
            .windows(2)
            .find(|w| w[0].1 > 0.0 || w[1].1 > 0.0)
            .map(|w| w[0].0)
            .unwrap_or(0.0),
        other => other.support().0,
    };
    if support_low < floor {
        return Err(MeasureError::SupportViolation { support_low, floor });
    }
    let moments = spec.moments(lambda_bar);
    Ok(ValidatedMeasure {
        spec,
        lambda_bar,
        moments,
    })
}

/// Moment integrals of a validated measure.
pub fn mass_moments(measure: &ValidatedMeasure) -> MassMoments {
    measure.moments
}
