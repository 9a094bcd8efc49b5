#![allow(dead_code)]

use levy_hjm::measure::{validate, LevyMeasureSpec, ValidatedMeasure, VolatilitySpec};

pub fn measure(spec: LevyMeasureSpec) -> ValidatedMeasure {
    validate(spec, &VolatilitySpec::unit()).expect("valid measure")
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Order {
    J,
    First,
    Second,
}

fn kernel(order: Order, z: f64, y: f64, small: bool) -> f64 {
    match order {
        Order::J => {
            let x = z * y;
            if small && x.abs() < 1e-2 {
                x * x * (0.5 - x * (1.0 / 6.0 - x * (1.0 / 24.0 - x * (1.0 / 120.0 - x / 720.0))))
            } else if small {
                (-x).exp_m1() + x
            } else {
                (-x).exp_m1()
            }
        }
        Order::First => {
            if small {
                -y * (-z * y).exp_m1()
            } else {
                -y * (-z * y).exp()
            }
        }
        Order::Second => y * y * (-z * y).exp(),
    }
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// Brute-force `J`, `J'` or `J''` at `z > 0`: Simpson's rule in `u = ln|y|`
/// on each side of zero and of `|y| = 1`, with the stable small-jump remainder
/// below `|y| = 1e-10` added in closed form.
pub fn exponent_oracle(spec: &LevyMeasureSpec, order: Order, z: f64) -> f64 {
    assert!(z > 0.0);
    const DELTA: f64 = 1e-10;
    const N: usize = 200_000;
    let (lo, hi) = spec.support();
    let mut total = 0.0;
    for sign in [1.0f64, -1.0] {
        let bound = if sign > 0.0 { hi } else { -lo };
        if bound <= 0.0 {
            continue;
        }
        let far = bound.min(800.0 / z).max(1.0);
        // density without the support cut, so endpoints see the interior value
        let density = |y: f64| match (spec.rho(), spec) {
            (Some(rho), _) => y.abs().powf(-1.0 - rho),
            (None, LevyMeasureSpec::ExponentialJumps { scale, rate }) => scale * (-rate * y).exp(),
            _ => spec.density(y),
        };
        let f = |u: f64, small: bool| {
            let y = sign * u.exp();
            kernel(order, z, y, small) * density(y) * u.exp()
        };
        let split = bound.min(1.0);
        total += simpson(|u| f(u, true), DELTA.ln(), split.ln(), N);
        if bound > 1.0 {
            total += simpson(|u| f(u, false), 0.0, far.ln(), N);
            if order == Order::J && bound.is_infinite() {
                // e^{-zy} is below e^{-800} past `far`, leaving -ν((far, ∞))
                total -= match (spec.rho(), spec) {
                    (Some(rho), _) => far.powf(-rho) / rho,
                    (None, LevyMeasureSpec::ExponentialJumps { scale, rate }) => scale / rate * (-rate * far).exp(),
                    _ => 0.0,
                };
            }
        }
        if let Some(rho) = spec.rho() {
            let tail = DELTA.powf(2.0 - rho) / (2.0 - rho);
            total += match order {
                Order::J => 0.5 * z * z * tail,
                Order::First => z * tail,
                Order::Second => tail,
            };
        }
    }
    total
}

/// Six measures spanning every evaluation path.
pub fn sample_specs() -> Vec<LevyMeasureSpec> {
    vec![
        LevyMeasureSpec::TruncatedStablePositive { rho: 0.5 },
        LevyMeasureSpec::TruncatedStablePositive { rho: 1.5 },
        LevyMeasureSpec::TruncatedStableSymmetric { rho: 1.5 },
        LevyMeasureSpec::TruncatedStableNegative { rho: 1.5 },
        LevyMeasureSpec::FullStablePositive { rho: 1.5 },
        LevyMeasureSpec::FullStableTwoSided { rho: 1.7 },
        LevyMeasureSpec::ExponentialJumps { scale: 1.0, rate: 2.0 },
    ]
}
