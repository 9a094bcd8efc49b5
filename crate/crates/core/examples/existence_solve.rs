//! Solve the forward-rate fixed point on one simulated path in the existence
//! regime, then price a few bonds from the solution.

use levy_hjm::exponent::ExponentEvaluator;
use levy_hjm::grid::GridSpec;
use levy_hjm::measure::{validate, LevyMeasureSpec, VolatilitySpec};
use levy_hjm::regime::{bound_constant, classify};
use levy_hjm::simulation::{a_field, simulate_path, InitialCurve};
use levy_hjm::solver::{bond_price, solve_fixed_point, SolveOptions, SolveOutcome};

fn main() {
    let vol = VolatilitySpec::unit();
    let m = validate(LevyMeasureSpec::TruncatedStablePositive { rho: 0.5 }, &vol).unwrap();
    println!("verdict: {}", classify(&m, &vol, 1.0).verdict);

    let grid = GridSpec::new(1.0, 100);
    let path = simulate_path(&m, 1.0, 1e-4, 2024).unwrap();
    let curve = InitialCurve::PiecewiseLinear(vec![(0.0, 0.02), (1.0, 0.05)]);
    let a = a_field(&path, &curve, &vol, grid).unwrap();
    println!(
        "{} jumps, L(1) = {:.4}, sup a = {:.4}",
        path.jumps.len(),
        path.terminal_level(),
        a.sup_a
    );

    let ev = ExponentEvaluator::new(m);
    let c = bound_constant(&ev, a.sup_a, &vol, 1.0).unwrap();
    match solve_fixed_point(&a, &ev, &vol, &SolveOptions::default()).unwrap() {
        SolveOutcome::Converged(f) => {
            println!(
                "converged in {} iterations, sup f = {:.6} ≤ c = {c:.6}",
                f.iterations, f.sup
            );
            for r in &f.history {
                println!("  iter {:>3}: sup {:.8}  delta {:.2e}", r.iteration, r.sup, r.delta);
            }
            for (i, j) in [(0, 25), (0, 100), (50, 100), (90, 100)] {
                println!(
                    "P({:.2}, {:.2}) = {:.6}",
                    grid.time(i),
                    grid.time(j),
                    bond_price(&f.values, i, j)
                );
            }
        }
        SolveOutcome::Diverged(d) => println!("diverged after {} iterations", d.iterations),
    }
}
