//! Discrete operator `𝒜` and its monotone fixed-point iteration.
//!
//! On the grid `t_i = iΔ`,
//!
//! ```text
//! (𝒜f)(t_i, T_j) = a(t_i, T_j) · exp( Σ_{k<i} Δ λ(t_k) J'(I_kj) ),
//! I_kj = trapezoid over u ∈ [t_k, T_j] of λ(t_k) f(t_k, u).
//! ```
//!
//! The outer sum uses left endpoints, so row `i` of `𝒜f` depends only on
//! rows `k < i` of `f`.

use thiserror::Error;

use crate::exponent::{ExponentError, ExponentEvaluator};
use crate::grid::{GridSpec, TriangleField};
use crate::measure::VolatilitySpec;
use crate::simulation::CoefficientField;

/// Exponents above this are treated as overflow.
pub const EXPONENT_LIMIT: f64 = 700.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("grid mismatch between coefficient field and iterate")]
    GridMismatch,
    #[error("exponent exceeds {EXPONENT_LIMIT} at (t_{i}, T_{j})")]
    NumericOverflow { i: usize, j: usize },
    #[error("no convergence after {iterations} iterations (last sup values {previous_sup}, {last_sup})")]
    MaxIterExceeded {
        iterations: usize,
        previous_sup: f64,
        last_sup: f64,
    },
    #[error("iterate {iteration} breaks monotonicity at (t_{i}, T_{j}): {before} -> {after}")]
    MonotonicityViolated {
        iteration: usize,
        i: usize,
        j: usize,
        before: f64,
        after: f64,
    },
    #[error(transparent)]
    Exponent(#[from] ExponentError),
}

/// A forward-rate field with solve metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardField {
    pub values: TriangleField,
    pub iterations: usize,
    pub converged: bool,
    pub sup: f64,
    pub history: Vec<IterationRecord>,
}

impl ForwardField {
    pub fn new(values: TriangleField) -> Self {
        let sup = values.sup();
        Self {
            values,
            iterations: 0,
            converged: false,
            sup,
            history: Vec::new(),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.values.grid()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub sup: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StartField {
    /// `h₀ ≡ 0`; iterates increase.
    Zero,
    /// `h₀ ≡ c` with `𝒜c ≤ c`; iterates decrease.
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub ceiling: f64,
    pub start: StartField,
    /// Relative slack allowed in the monotonicity assertion.
    pub monotone_slack: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol: 1e-8,
            ceiling: 1e12,
            start: StartField::Zero,
            monotone_slack: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceReason {
    Ceiling,
    Overflow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    pub reason: DivergenceReason,
    pub iterations: usize,
    pub last_sup: f64,
    pub history: Vec<IterationRecord>,
    /// Fixed point of the discrete scheme in extended reals; `+∞` marks
    /// cells where it blows up.
    pub completed: TriangleField,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Converged(ForwardField),
    Diverged(Divergence),
}

impl SolveOutcome {
    pub fn is_converged(&self) -> bool {
        matches!(self, SolveOutcome::Converged(_))
    }

    /// Converged field, or the extended fixed point of a diverged run.
    pub fn field(&self) -> &TriangleField {
        match self {
            SolveOutcome::Converged(f) => &f.values,
            SolveOutcome::Diverged(d) => &d.completed,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            SolveOutcome::Converged(f) => f.iterations,
            SolveOutcome::Diverged(d) => d.iterations,
        }
    }
}

/// Accumulated outer sums `Σ_{k<i} Δ λ_k J'(I_kj)` for every cell.
fn exponents(
    f: &TriangleField,
    evaluator: &ExponentEvaluator,
    vol: &VolatilitySpec,
) -> Result<TriangleField, ExponentError> {
    let grid = f.grid();
    let m = grid.points();
    let dt = grid.step();
    let mut out = TriangleField::filled(grid, 0.0);
    let mut acc = vec![0.0; m];
    let mut inner = vec![0.0; m];
    for i in 1..m {
        let k = i - 1;
        let lam = vol.value(grid.time(k), grid.horizon);
        // trapezoid I_kj, accumulated in j so that infinities stay infinite
        inner[k] = 0.0;
        for j in k + 1..m {
            inner[j] = inner[j - 1] + 0.5 * dt * lam * (f.get(k, j - 1) + f.get(k, j));
        }
        for j in i..m {
            acc[j] += dt * lam * evaluator.j_prime_extended(inner[j])?;
            out.set(i, j, acc[j]);
        }
    }
    Ok(out)
}

fn check_grid(a: &CoefficientField, f: &TriangleField) -> Result<(), SolverError> {
    if a.grid() != f.grid() {
        return Err(SolverError::GridMismatch);
    }
    Ok(())
}

/// One application of `𝒜`; exponents above the limit are an error.
pub fn apply_a(
    a: &CoefficientField,
    f: &TriangleField,
    evaluator: &ExponentEvaluator,
    vol: &VolatilitySpec,
) -> Result<TriangleField, SolverError> {
    check_grid(a, f)?;
    let e = exponents(f, evaluator, vol)?;
    let mut out = TriangleField::filled(f.grid(), 0.0);
    for (i, j, x) in e.iter() {
        if !(x <= EXPONENT_LIMIT) {
            return Err(SolverError::NumericOverflow { i, j });
        }
        out.set(i, j, a.get(i, j) * x.exp());
    }
    Ok(out)
}

/// `𝒜f` in extended reals: overflowing cells become `+∞`.
pub fn apply_a_extended(
    a: &CoefficientField,
    f: &TriangleField,
    evaluator: &ExponentEvaluator,
    vol: &VolatilitySpec,
) -> Result<TriangleField, SolverError> {
    check_grid(a, f)?;
    let e = exponents(f, evaluator, vol)?;
    Ok(TriangleField::from_fn(f.grid(), |i, j| {
        let x = e.get(i, j);
        if x > EXPONENT_LIMIT {
            f64::INFINITY
        } else {
            a.get(i, j) * x.exp()
        }
    }))
}

/// The discrete fixed point computed row by row, in extended reals.
pub fn march_fixed_point(
    a: &CoefficientField,
    evaluator: &ExponentEvaluator,
    vol: &VolatilitySpec,
) -> Result<TriangleField, SolverError> {
    let grid = a.grid();
    let m = grid.points();
    let dt = grid.step();
    let mut f = TriangleField::filled(grid, 0.0);
    let mut acc = vec![0.0; m];
    let mut inner = vec![0.0; m];
    for j in 0..m {
        f.set(0, j, a.get(0, j));
    }
    for i in 1..m {
        let k = i - 1;
        let lam = vol.value(grid.time(k), grid.horizon);
        inner[k] = 0.0;
        for j in k + 1..m {
            inner[j] = inner[j - 1] + 0.5 * dt * lam * (f.get(k, j - 1) + f.get(k, j));
        }
        for j in i..m {
            acc[j] += dt * lam * evaluator.j_prime_extended(inner[j])?;
            let v = if acc[j] > EXPONENT_LIMIT {
                f64::INFINITY
            } else {
                a.get(i, j) * acc[j].exp()
            };
            f.set(i, j, v);
        }
    }
    Ok(f)
}

/// Picard iteration `h_{n+1} = 𝒜h_n` with monotonicity checked at every step.
pub fn solve_fixed_point(
    a: &CoefficientField,
    evaluator: &ExponentEvaluator,
    vol: &VolatilitySpec,
    opts: &SolveOptions,
) -> Result<SolveOutcome, SolverError> {
    let grid = a.grid();
    let (mut h, increasing) = match opts.start {
        StartField::Zero => (TriangleField::filled(grid, 0.0), true),
        StartField::Constant(c) => (TriangleField::filled(grid, c), false),
    };
    let mut history = Vec::new();
    let mut previous_sup = h.sup();
    for iteration in 1..=opts.max_iter {
        let next = match apply_a(a, &h, evaluator, vol) {
            Ok(next) => next,
            Err(SolverError::NumericOverflow { .. }) => {
                return Ok(SolveOutcome::Diverged(Divergence {
                    reason: DivergenceReason::Overflow,
                    iterations: iteration,
                    last_sup: previous_sup,
                    history,
                    completed: march_fixed_point(a, evaluator, vol)?,
                }));
            }
            Err(e) => return Err(e),
        };
        let mut delta = 0.0_f64;
        for (i, j, after) in next.iter() {
            let before = h.get(i, j);
            let slack = opts.monotone_slack * before.abs().max(1.0);
            let broken = if increasing {
                after < before - slack
            } else {
                after > before + slack
            };
            if broken {
                return Err(SolverError::MonotonicityViolated {
                    iteration,
                    i,
                    j,
                    before,
                    after,
                });
            }
            delta = delta.max((after - before).abs());
        }
        let sup = next.sup();
        history.push(IterationRecord { iteration, sup, delta });
        if sup > opts.ceiling {
            return Ok(SolveOutcome::Diverged(Divergence {
                reason: DivergenceReason::Ceiling,
                iterations: iteration,
                last_sup: sup,
                history,
                completed: march_fixed_point(a, evaluator, vol)?,
            }));
        }
        let converged = delta / (1.0 + previous_sup) < opts.tol;
        h = next;
        if converged {
            return Ok(SolveOutcome::Converged(ForwardField {
                values: h,
                iterations: iteration,
                converged: true,
                sup,
                history,
            }));
        }
        if iteration == opts.max_iter {
            return Err(SolverError::MaxIterExceeded {
                iterations: iteration,
                previous_sup,
                last_sup: sup,
            });
        }
        previous_sup = sup;
    }
    Err(SolverError::MaxIterExceeded {
        iterations: 0,
        previous_sup,
        last_sup: previous_sup,
    })
}

/// `P(t_i, T_j) = exp(−∫_{t_i}^{T_j} f(t_i, u) du)` by the trapezoid rule.
pub fn bond_price(f: &TriangleField, i: usize, j: usize) -> f64 {
    assert!(i <= j, "bond price needs t ≤ T");
    let dt = f.grid().step();
    let row = f.row(i);
    let integral: f64 = row[..=j - i].windows(2).map(|w| 0.5 * dt * (w[0] + w[1])).sum();
    (-integral).exp()
}
