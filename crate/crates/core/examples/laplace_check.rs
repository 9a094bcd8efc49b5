//! Monte Carlo check of E[exp(-z L(1))] = exp(J(z)) on simulated jump paths.

use levy_hjm::exponent::ExponentEvaluator;
use levy_hjm::measure::{validate, LevyMeasureSpec, VolatilitySpec};
use levy_hjm::rng::derive_seed;
use levy_hjm::simulation::simulate_path;
use rayon::prelude::*;

fn main() {
    let paths = 20_000u64;
    for (spec, eps) in [
        (LevyMeasureSpec::ExponentialJumps { scale: 1.0, rate: 1.0 }, 0.0),
        (LevyMeasureSpec::TruncatedStablePositive { rho: 0.5 }, 1e-4),
        (LevyMeasureSpec::TruncatedStableSymmetric { rho: 1.2 }, 1e-3),
    ] {
        let m = validate(spec.clone(), &VolatilitySpec::unit()).unwrap();
        let ev = ExponentEvaluator::new(m.clone());
        let levels: Vec<f64> = (0..paths)
            .into_par_iter()
            .map(|i| simulate_path(&m, 1.0, eps, derive_seed(1, i)).unwrap().terminal_level())
            .collect();
        println!("\n{spec:?}, eps = {eps}, {paths} paths");
        for z in [0.5, 1.0, 2.0] {
            let xs: Vec<f64> = levels.iter().map(|l| (-z * l).exp()).collect();
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let se = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
            let exact = ev.j(z).unwrap().exp();
            println!(
                "  z = {z}: empirical {mean:.6} ± {se:.1e}, exp(J) = {exact:.6}, {:.2} SE",
                (mean - exact) / se
            );
        }
    }
}
