//! Jump paths of the driving process and the coefficient field they induce.
//!
//! Jumps with `|y| ≥ ε` are simulated exactly as a compound Poisson process.
//! Jumps below `ε` are replaced by their compensator drift
//! `−∫_{ε≤|y|<1} y ν(dy)` per unit time.

use thiserror::Error;

use crate::grid::{GridSpec, TriangleField};
use crate::measure::{LevyMeasureSpec, ValidatedMeasure, VolatilitySpec};
use crate::rng::StreamRng;

/// Default truncation for infinite-activity measures.
pub const DEFAULT_EPS: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulationError {
    #[error("infinite-activity measure needs a positive truncation ε")]
    EpsRequired,
    #[error("invalid truncation ε = {0}")]
    InvalidEps(f64),
    #[error("jump {size} at t = {time} gives 1 + λΔL = {factor} ≤ 0")]
    JumpBelowFloor { time: f64, size: f64, factor: f64 },
    #[error("initial curve must be positive and finite, got {value} at T = {maturity}")]
    InvalidInitialCurve { maturity: f64, value: f64 },
    #[error("coefficient field is not finite at t = {time}")]
    NonFiniteField { time: f64 },
    #[error("path horizon {path} does not cover grid horizon {grid}")]
    HorizonMismatch { path: f64, grid: f64 },
}

/// Simulated jump times and sizes on `[0, T*]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpPath {
    pub jumps: Vec<(f64, f64)>,
    pub truncation_eps: f64,
    pub compensator_rate: f64,
    pub horizon: f64,
    pub seed: u64,
    pub stream: u64,
}

impl JumpPath {
    /// Path with no jumps and no drift.
    pub fn empty(horizon: f64) -> Self {
        Self {
            jumps: Vec::new(),
            truncation_eps: 0.0,
            compensator_rate: 0.0,
            horizon,
            seed: 0,
            stream: 0,
        }
    }

    /// `L(t)`: jumps up to `t` plus the compensator drift.
    pub fn level(&self, t: f64) -> f64 {
        let jumps: f64 = self.jumps.iter().take_while(|(s, _)| *s <= t).map(|(_, y)| y).sum();
        jumps + self.compensator_rate * t
    }

    pub fn terminal_level(&self) -> f64 {
        self.level(self.horizon)
    }
}

/// Sizes drawn from `ν` restricted to `|y| ≥ ε`, normalised.
#[derive(Debug, Clone)]
pub struct JumpSampler {
    kind: SamplerKind,
    rate: f64,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    /// Power law on `[ε, upper)` mirrored by `sign`; `upper` may be `∞`.
    Power {
        rho: f64,
        eps: f64,
        upper: f64,
        sign: f64,
    },
    /// Negative power law on `(-1, -ε]` with probability `p_negative`,
    /// otherwise positive on `[ε, upper)`.
    TwoSidedPower {
        rho: f64,
        eps: f64,
        upper: f64,
        p_negative: f64,
    },
    Exponential {
        rate: f64,
        eps: f64,
    },
    Table(TableSampler),
    Empty,
}

#[derive(Debug, Clone)]
struct TableSampler {
    /// `(a, b, intercept, slope, cumulative mass at b)`.
    pieces: Vec<(f64, f64, f64, f64, f64)>,
}

impl TableSampler {
    fn sample(&self, u: f64) -> f64 {
        let total = self.pieces.last().map(|p| p.4).unwrap_or(0.0);
        let target = u * total;
        let k = self.pieces.partition_point(|p| p.4 < target).min(self.pieces.len() - 1);
        let (a, b, c0, c1, cum) = self.pieces[k];
        let before = if k == 0 { 0.0 } else { self.pieces[k - 1].4 };
        let r = (target - before).clamp(0.0, cum - before);
        // Solve ∫_a^y (c0 + c1 s) ds = r; p(y)² = p(a)² + 2 c1 r.
        let pa = c0 + c1 * a;
        let disc = (pa * pa + 2.0 * c1 * r).max(0.0);
        let denom = pa + disc.sqrt();
        let y = if denom > 0.0 { a + 2.0 * r / denom } else { a };
        y.clamp(a, b)
    }
}

/// `y` on `[ε, upper)` with density `∝ y^{-1-ρ}`.
fn power_sample(u: f64, rho: f64, eps: f64, upper: f64) -> f64 {
    let e = eps.powf(-rho);
    if upper.is_finite() {
        let top = upper.powf(-rho);
        (e - u * (e - top)).powf(-1.0 / rho)
    } else {
        // u ∈ [0,1) → 1 - u ∈ (0, 1]
        eps * (1.0 - u).powf(-1.0 / rho)
    }
}

impl JumpSampler {
    pub fn new(measure: &ValidatedMeasure, eps: f64) -> Result<Self, SimulationError> {
        let spec = measure.spec();
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(SimulationError::InvalidEps(eps));
        }
        if eps == 0.0 && !spec.is_finite_activity() {
            return Err(SimulationError::EpsRequired);
        }
        let rate = spec.mass_beyond(eps);
        let kind = match *spec {
            LevyMeasureSpec::TruncatedStablePositive { rho } if eps < 1.0 => SamplerKind::Power {
                rho,
                eps,
                upper: 1.0,
                sign: 1.0,
            },
            LevyMeasureSpec::TruncatedStableNegative { rho } if eps < 1.0 => SamplerKind::Power {
                rho,
                eps,
                upper: 1.0,
                sign: -1.0,
            },
            LevyMeasureSpec::TruncatedStableSymmetric { rho } if eps < 1.0 => SamplerKind::TwoSidedPower {
                rho,
                eps,
                upper: 1.0,
                p_negative: 0.5,
            },
            LevyMeasureSpec::FullStablePositive { rho } => SamplerKind::Power {
                rho,
                eps,
                upper: f64::INFINITY,
                sign: 1.0,
            },
            LevyMeasureSpec::FullStableTwoSided { rho } => {
                let neg = if eps < 1.0 { (eps.powf(-rho) - 1.0) / rho } else { 0.0 };
                let pos = eps.powf(-rho) / rho;
                SamplerKind::TwoSidedPower {
                    rho,
                    eps,
                    upper: f64::INFINITY,
                    p_negative: neg / (neg + pos),
                }
            }
            LevyMeasureSpec::ExponentialJumps { rate, .. } => SamplerKind::Exponential { rate, eps },
            LevyMeasureSpec::FiniteActivityTabulated { ref table } => {
                let mut pieces = Vec::new();
                let mut cum = 0.0;
                for (lo, hi) in [(f64::NEG_INFINITY, -eps), (eps, f64::INFINITY)] {
                    for (a, b, c0, c1) in table.pieces(lo, hi) {
                        let mass = c0 * (b - a) + 0.5 * c1 * (b * b - a * a);
                        if mass > 0.0 {
                            cum += mass;
                            pieces.push((a, b, c0, c1, cum));
                        }
                    }
                }
                if pieces.is_empty() {
                    SamplerKind::Empty
                } else {
                    SamplerKind::Table(TableSampler { pieces })
                }
            }
            _ => SamplerKind::Empty,
        };
        let rate = if matches!(kind, SamplerKind::Empty) { 0.0 } else { rate };
        Ok(Self { kind, rate })
    }

    /// Intensity `ν({|y| ≥ ε})` of the simulated jumps.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn sample(&self, rng: &mut StreamRng) -> f64 {
        match self.kind {
            SamplerKind::Power { rho, eps, upper, sign } => sign * power_sample(rng.uniform(), rho, eps, upper),
            SamplerKind::TwoSidedPower {
                rho,
                eps,
                upper,
                p_negative,
            } => {
                if rng.uniform() < p_negative {
                    -power_sample(rng.uniform(), rho, eps, 1.0)
                } else {
                    power_sample(rng.uniform(), rho, eps, upper)
                }
            }
            SamplerKind::Exponential { rate, eps } => eps + rng.exponential(rate),
            SamplerKind::Table(ref t) => t.sample(rng.uniform()),
            SamplerKind::Empty => 0.0,
        }
    }
}

pub fn simulate_path(
    measure: &ValidatedMeasure,
    horizon: f64,
    eps: f64,
    seed: u64,
) -> Result<JumpPath, SimulationError> {
    simulate_path_on_stream(measure, horizon, eps, seed, 0)
}

/// Path driven by stream `stream` of generator `seed`.
pub fn simulate_path_on_stream(
    measure: &ValidatedMeasure,
    horizon: f64,
    eps: f64,
    seed: u64,
    stream: u64,
) -> Result<JumpPath, SimulationError> {
    let sampler = JumpSampler::new(measure, eps)?;
    let mut rng = StreamRng::new(seed, stream);
    let mut jumps = Vec::new();
    if sampler.rate() > 0.0 {
        jumps.reserve((sampler.rate() * horizon * 1.1) as usize + 4);
        let mut t = rng.exponential(sampler.rate());
        while t <= horizon {
            jumps.push((t, sampler.sample(&mut rng)));
            t += rng.exponential(sampler.rate());
        }
    }
    Ok(JumpPath {
        jumps,
        truncation_eps: eps,
        compensator_rate: -measure.spec().compensated_first_moment(eps),
        horizon,
        seed,
        stream,
    })
}

/// Initial forward curve `f₀(T)`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCurve {
    Constant(f64),
    /// Linear interpolation between knots, flat beyond the ends.
    PiecewiseLinear(Vec<(f64, f64)>),
}

impl InitialCurve {
    pub fn value(&self, maturity: f64) -> f64 {
        match self {
            InitialCurve::Constant(v) => *v,
            InitialCurve::PiecewiseLinear(knots) => {
                let k = knots.partition_point(|&(x, _)| x <= maturity);
                if k == 0 {
                    knots[0].1
                } else if k == knots.len() {
                    knots[k - 1].1
                } else {
                    let ((x0, y0), (x1, y1)) = (knots[k - 1], knots[k]);
                    y0 + (y1 - y0) * (maturity - x0) / (x1 - x0)
                }
            }
        }
    }

    fn check(&self, grid: &GridSpec) -> Result<(), SimulationError> {
        if let InitialCurve::PiecewiseLinear(knots) = self {
            if knots.is_empty() {
                return Err(SimulationError::InvalidInitialCurve {
                    maturity: 0.0,
                    value: f64::NAN,
                });
            }
        }
        for j in 0..grid.points() {
            let t = grid.time(j);
            let v = self.value(t);
            if !(v > 0.0) || !v.is_finite() {
                return Err(SimulationError::InvalidInitialCurve { maturity: t, value: v });
            }
        }
        Ok(())
    }
}

/// `a(t_i, T_j)` for one path.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    pub values: TriangleField,
    pub sup_a: f64,
}

impl CoefficientField {
    pub fn grid(&self) -> GridSpec {
        self.values.grid()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    pub fn from_values(values: TriangleField) -> Self {
        let sup_a = values.sup();
        Self { values, sup_a }
    }
}

/// Builds `a(t,T) = f₀(T)·exp(rate·∫₀^t λ)·Π_{s≤t}(1 + λ(s)ΔL(s))`.
///
/// The volatility depends on `t` only, so `a` factors into `f₀(T)·G(t)`.
pub fn a_field(
    path: &JumpPath,
    f0: &InitialCurve,
    vol: &VolatilitySpec,
    grid: GridSpec,
) -> Result<CoefficientField, SimulationError> {
    if path.horizon + 1e-12 < grid.horizon {
        return Err(SimulationError::HorizonMismatch {
            path: path.horizon,
            grid: grid.horizon,
        });
    }
    f0.check(&grid)?;
    let mut log_g = vec![0.0; grid.points()];
    let mut log_jumps = 0.0;
    let mut next = 0;
    for (i, slot) in log_g.iter_mut().enumerate() {
        let t = grid.time(i);
        while next < path.jumps.len() && path.jumps[next].0 <= t {
            let (s, y) = path.jumps[next];
            let factor = 1.0 + vol.value(s, grid.horizon) * y;
            if !(factor > 0.0) {
                return Err(SimulationError::JumpBelowFloor {
                    time: s,
                    size: y,
                    factor,
                });
            }
            log_jumps += (vol.value(s, grid.horizon) * y).ln_1p();
            next += 1;
        }
        *slot = log_jumps + path.compensator_rate * vol.integral(0.0, t);
    }
    let growth: Vec<f64> = log_g.iter().map(|l| l.exp()).collect();
    for (i, g) in growth.iter().enumerate() {
        if !g.is_finite() {
            return Err(SimulationError::NonFiniteField { time: grid.time(i) });
        }
    }
    let values = TriangleField::from_fn(grid, |i, j| f0.value(grid.time(j)) * growth[i]);
    Ok(CoefficientField::from_values(values))
}
