//! Blow-up comparison functions and the dominance check.
//!
//! For a corner `(x, y)` and `γ ∈ (0, 1)` the barrier
//! `h(t,T) = (x − t + y − T)^{−3/γ}` explodes at the corner. The companion
//! `g = h · exp(−∫₀^t R(∫_s^T h(s,u) du) ds)` vanishes there. If
//! `e^{βt} a ≥ g` then any solution must dominate `h`, which is how explosion
//! is certified on a grid.

use thiserror::Error;

use crate::grid::{GridSpec, TriangleField};
use crate::quadrature::{integrate, QuadOptions};
use crate::simulation::CoefficientField;

/// `R(z) = αz` for `z ≤ 1`, `αz^γ` above.
pub fn r_function(z: f64, alpha: f64, gamma: f64) -> f64 {
    if z <= 1.0 {
        alpha * z
    } else {
        alpha * z.powf(gamma)
    }
}

/// Barrier `h` at `(t, T)`; `+∞` at the corner itself.
pub fn barrier(t: f64, maturity: f64, x: f64, y: f64, gamma: f64) -> f64 {
    let d = x - t + y - maturity;
    if d <= 0.0 {
        f64::INFINITY
    } else {
        d.powf(-3.0 / gamma)
    }
}

/// Exact `∫_s^T h(s, u) du`.
pub fn barrier_inner_integral(s: f64, maturity: f64, x: f64, y: f64, gamma: f64) -> f64 {
    let p = 3.0 / gamma;
    ((x - s + y - maturity).powf(1.0 - p) - (x + y - 2.0 * s).powf(1.0 - p)) / (p - 1.0)
}

/// `g(t,T)` from the exact inner integral and adaptive outer quadrature.
pub fn g_reference(t: f64, maturity: f64, x: f64, y: f64, gamma: f64, alpha: f64) -> f64 {
    if t >= x && maturity >= y {
        return 0.0;
    }
    let outer = integrate(
        |s| r_function(barrier_inner_integral(s, maturity, x, y, gamma), alpha, gamma),
        0.0,
        t,
        &QuadOptions::with_rel_tol(1e-12),
    )
    .map(|r| r.value)
    .unwrap_or(f64::INFINITY);
    barrier(t, maturity, x, y, gamma) * (-outer).exp()
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComparisonError {
    #[error("denominator vanishes at t = {t}, T = {maturity}")]
    DegenerateDenominator { t: f64, maturity: f64 },
    #[error("invalid comparison parameters: {0}")]
    InvalidParameters(String),
}

/// `∫₀^t ∫_s^T (x − s + y − u)^{−3} du ds` in closed form.
pub fn closed_double_integral(t: f64, maturity: f64, x: f64, y: f64) -> Result<f64, ComparisonError> {
    let big_t = maturity;
    let d1 = x - t + y - big_t;
    let d2 = x + y - 2.0 * t;
    let d3 = x + y - big_t;
    let d4 = x + y;
    if d1 == 0.0 || d2 == 0.0 || d3 == 0.0 || d4 == 0.0 {
        return Err(ComparisonError::DegenerateDenominator { t, maturity });
    }
    let num = -big_t * big_t - big_t * t - t * y + 2.0 * big_t * y + 2.0 * big_t * x - t * x;
    Ok(0.5 * t * num / (d1 * d2 * d3 * d4))
}

/// `h` and `g` tabulated on the sub-triangle `t ≤ x`, `T ≤ y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonBundle {
    pub x: f64,
    pub y: f64,
    pub gamma: f64,
    pub alpha: f64,
    /// Grid indices of the corner.
    pub ix: usize,
    pub iy: usize,
    /// `NaN` outside the sub-triangle, `+∞` at the corner.
    pub h: TriangleField,
    /// `NaN` outside the sub-triangle, `0` at the corner.
    pub g: TriangleField,
}

impl ComparisonBundle {
    pub fn grid(&self) -> GridSpec {
        self.h.grid()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i <= j && i <= self.ix && j <= self.iy
    }
}

/// Builds `h` and `g` on the grid, with trapezoid weights on both the inner
/// and the outer integral.
pub fn comparison_bundle(
    x: f64,
    y: f64,
    gamma: f64,
    alpha: f64,
    grid: GridSpec,
) -> Result<ComparisonBundle, ComparisonError> {
    if !(x > 0.0 && x <= y && y <= grid.horizon + 1e-12) {
        return Err(ComparisonError::InvalidParameters(format!(
            "corner must satisfy 0 < x ≤ y ≤ T*, got x = {x}, y = {y}"
        )));
    }
    if !(gamma > 0.0 && gamma < 1.0) || !(alpha > 0.0) {
        return Err(ComparisonError::InvalidParameters(format!(
            "need γ ∈ (0,1) and α > 0, got γ = {gamma}, α = {alpha}"
        )));
    }
    let ix = (x / grid.step()).round() as usize;
    let iy = (y / grid.step()).round() as usize;
    let (x, y) = (grid.time(ix), grid.time(iy));
    let inside = |i: usize, j: usize| i <= ix && j <= iy;
    let h = TriangleField::from_fn(grid, |i, j| {
        if !inside(i, j) {
            f64::NAN
        } else if i == ix && j == iy {
            f64::INFINITY
        } else {
            barrier(grid.time(i), grid.time(j), x, y, gamma)
        }
    });

    let m = grid.points();
    let dt = grid.step();
    let mut g = TriangleField::filled(grid, f64::NAN);
    let mut acc = vec![0.0; m];
    let mut inner = vec![0.0; m];
    let mut r_prev = vec![0.0; m];
    let mut r_row = vec![0.0; m];
    for i in 0..=ix {
        inner[i] = 0.0;
        for j in i + 1..=iy {
            inner[j] = inner[j - 1] + 0.5 * dt * (h.get(i, j - 1) + h.get(i, j));
        }
        for j in i..=iy {
            r_row[j] = r_function(inner[j], alpha, gamma);
            if i > 0 {
                acc[j] += 0.5 * dt * (r_prev[j] + r_row[j]);
            }
            let v = if i == ix && j == iy {
                0.0
            } else {
                h.get(i, j) * (-acc[j]).exp()
            };
            g.set(i, j, v);
        }
        std::mem::swap(&mut r_prev, &mut r_row);
    }
    Ok(ComparisonBundle {
        x,
        y,
        gamma,
        alpha,
        ix,
        iy,
        h,
        g,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceRung {
    /// Cells cut from the `T` side of the corner.
    pub cells: usize,
    pub delta: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    /// `e^{βt} a ≥ g` on the sub-triangle.
    pub hypothesis_holds: bool,
    pub hypothesis_failures: usize,
    /// From the widest cut inwards.
    pub ladder: Vec<DominanceRung>,
    /// Smallest `δ` whose sub-triangle satisfies `f ≥ h`.
    pub verified_delta: Option<f64>,
    /// The innermost checked cell (one cell short of the corner on the diagonal).
    pub innermost: (usize, usize),
    pub f_innermost: f64,
    pub h_innermost: f64,
}

impl DominanceReport {
    /// `f ≥ h` on every rung down to one cell from the corner.
    pub fn dominates(&self) -> bool {
        self.ladder.last().is_some_and(|r| r.holds && r.cells == 1)
    }
}

/// Checks `e^{βt}a ≥ g` and then `f ≥ h` on `𝒯_{x, y−δ}` for a ladder of `δ`.
pub fn comparison_dominates(
    f: &TriangleField,
    a: &CoefficientField,
    bundle: &ComparisonBundle,
    beta: f64,
) -> DominanceReport {
    let grid = bundle.grid();
    assert_eq!(f.grid(), grid, "field and bundle grids differ");
    let mut hypothesis_failures = 0;
    for (i, j, g) in bundle.g.iter() {
        if bundle.contains(i, j) && (beta * grid.time(i)).exp() * a.get(i, j) < g {
            hypothesis_failures += 1;
        }
    }

    let mut cuts = Vec::new();
    let mut c = bundle.iy / 2;
    while c >= 1 {
        cuts.push(c);
        c /= 2;
    }
    if cuts.last() != Some(&1) {
        cuts.push(1);
    }
    let mut ladder = Vec::new();
    for &cells in &cuts {
        let top = bundle.iy - cells;
        let holds = f
            .iter()
            .filter(|&(i, j, _)| i <= bundle.ix && j <= top)
            .all(|(i, j, v)| v >= bundle.h.get(i, j));
        ladder.push(DominanceRung {
            cells,
            delta: cells as f64 * grid.step(),
            holds,
        });
    }
    let verified_delta = ladder.iter().take_while(|r| r.holds).last().map(|r| r.delta);
    let k = (bundle.iy - 1).min(bundle.ix);
    let innermost = (k, bundle.iy - 1);
    DominanceReport {
        hypothesis_holds: hypothesis_failures == 0,
        hypothesis_failures,
        ladder,
        verified_delta,
        innermost,
        f_innermost: f.get(innermost.0, innermost.1),
        h_innermost: bundle.h.get(innermost.0, innermost.1),
    }
}

/// Both sides of `∫ f^γ ≤ (b − a)^{1−γ} (∫ f)^γ` for a piecewise-linear `f`
/// given by knots, using the trapezoid rule on `10⁴` cells.
pub fn power_mean_sides(knots: &[(f64, f64)], gamma: f64) -> (f64, f64) {
    assert!(knots.len() >= 2);
    let (a, b) = (knots[0].0, knots[knots.len() - 1].0);
    let n = 10_000;
    let h = (b - a) / n as f64;
    let eval = |x: f64| -> f64 {
        let k = knots.partition_point(|&(s, _)| s <= x).clamp(1, knots.len() - 1);
        let ((x0, y0), (x1, y1)) = (knots[k - 1], knots[k]);
        if x1 == x0 {
            y1
        } else {
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    };
    let (mut lhs, mut total) = (0.0, 0.0);
    for i in 0..=n {
        let x = if i == n { b } else { a + i as f64 * h };
        let w = if i == 0 || i == n { 0.5 * h } else { h };
        let v = eval(x).max(0.0);
        lhs += w * v.powf(gamma);
        total += w * v;
    }
    (lhs, (b - a).powf(1.0 - gamma) * total.powf(gamma))
}

pub fn power_mean_check(knots: &[(f64, f64)], gamma: f64) -> bool {
    let (lhs, rhs) = power_mean_sides(knots, gamma);
    lhs <= rhs + 1e-9
}
