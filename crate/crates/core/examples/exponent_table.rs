//! Tabulate J, J' and J'' for a few measures and compare evaluation strategies.

use levy_hjm::exponent::{EvalStrategy, ExponentEvaluator};
use levy_hjm::measure::{validate, LevyMeasureSpec, VolatilitySpec};
use levy_hjm::regime::log_grid;

fn main() {
    let vol = VolatilitySpec::unit();
    let specs = [
        LevyMeasureSpec::TruncatedStablePositive { rho: 0.5 },
        LevyMeasureSpec::TruncatedStableNegative { rho: 1.5 },
        LevyMeasureSpec::FullStablePositive { rho: 1.5 },
        LevyMeasureSpec::ExponentialJumps { scale: 1.0, rate: 1.0 },
    ];
    for spec in specs {
        let m = validate(spec.clone(), &vol).unwrap();
        let series = ExponentEvaluator::new(m.clone());
        let quad = ExponentEvaluator::new(m).with_strategy(EvalStrategy::QuadratureGeneral);
        println!("\n{spec:?}  (J' limit {})", series.j_prime_limit());
        println!("{:>10} {:>16} {:>16} {:>16} {:>10}", "z", "J", "J'", "J''", "rel Δ J'");
        for z in log_grid(1e-3, 1e6, 10) {
            let row = (series.j(z), series.j_prime_extended(z), series.j_second(z));
            match row {
                (Ok(j), Ok(d1), Ok(d2)) => {
                    let diff = quad
                        .j_prime(z)
                        .map(|q| format!("{:.1e}", (q - d1).abs() / d1.abs().max(1e-300)))
                        .unwrap_or_default();
                    println!("{z:>10.3e} {j:>16.8e} {d1:>16.8e} {d2:>16.8e} {diff:>10}");
                }
                _ => println!("{z:>10.3e} {:>16} {:>16} {:>16}", "overflow", "inf", "overflow"),
            }
        }
    }
}
