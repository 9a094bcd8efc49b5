mod common;

use common::measure;
use levy_hjm::exponent::ExponentEvaluator;
use levy_hjm::grid::GridSpec;
use levy_hjm::measure::{LevyMeasureSpec, VolatilitySpec};
use levy_hjm::rng::derive_seed;
use levy_hjm::simulation::{a_field, simulate_path, simulate_path_on_stream, InitialCurve, JumpSampler};

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn jump_counts_are_poisson() {
    let m = measure(LevyMeasureSpec::TruncatedStablePositive { rho: 0.5 });
    let eps = 1e-2;
    let rate = JumpSampler::new(&m, eps).unwrap().rate();
    assert!((rate - 2.0 * (eps.powf(-0.5) - 1.0)).abs() < 1e-12);
    let counts: Vec<f64> = (0..4000)
        .map(|i| simulate_path(&m, 1.0, eps, derive_seed(3, i)).unwrap().jumps.len() as f64)
        .collect();
    let (mean, se) = mean_and_se(&counts);
    assert!((mean - rate).abs() < 4.0 * se, "{mean} ± {se} vs {rate}");
    let (_, se_var) = mean_and_se(&counts.iter().map(|c| (c - rate).powi(2)).collect::<Vec<_>>());
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / 3999.0;
    assert!((var - rate).abs() < 4.0 * se_var, "variance {var} vs {rate}");
}

#[test]
fn exponential_sizes_have_the_right_mean() {
    let m = measure(LevyMeasureSpec::ExponentialJumps { scale: 3.0, rate: 2.0 });
    let sizes: Vec<f64> = (0..2000)
        .flat_map(|i| {
            simulate_path(&m, 1.0, 0.0, i)
                .unwrap()
                .jumps
                .into_iter()
                .map(|(_, y)| y)
        })
        .collect();
    let (mean, se) = mean_and_se(&sizes);
    assert!((mean - 0.5).abs() < 4.0 * se, "{mean} ± {se}");
}

#[test]
fn times_are_ordered_and_inside_the_horizon() {
    let m = measure(LevyMeasureSpec::TruncatedStableSymmetric { rho: 1.2 });
    let p = simulate_path(&m, 2.0, 1e-3, 11).unwrap();
    assert!(p.jumps.windows(2).all(|w| w[0].0 < w[1].0));
    assert!(p
        .jumps
        .iter()
        .all(|&(t, y)| t > 0.0 && t <= 2.0 && y.abs() >= 1e-3 && y.abs() < 1.0));
}

#[test]
fn seeds_and_streams_are_reproducible() {
    let m = measure(LevyMeasureSpec::FullStableTwoSided { rho: 1.7 });
    let a = simulate_path(&m, 1.0, 1e-3, 42).unwrap();
    assert_eq!(a, simulate_path(&m, 1.0, 1e-3, 42).unwrap());
    assert_ne!(a.jumps, simulate_path(&m, 1.0, 1e-3, 43).unwrap().jumps);
    assert_ne!(a.jumps, simulate_path_on_stream(&m, 1.0, 1e-3, 42, 1).unwrap().jumps);
}

#[test]
fn laplace_transform_of_compound_poisson() {
    let m = measure(LevyMeasureSpec::ExponentialJumps { scale: 1.0, rate: 2.0 });
    let ev = ExponentEvaluator::new(m.clone());
    let z = 1.0;
    let samples: Vec<f64> = (0..20_000)
        .map(|i| (-z * simulate_path(&m, 1.0, 0.0, derive_seed(9, i)).unwrap().terminal_level()).exp())
        .collect();
    let (mean, se) = mean_and_se(&samples);
    let want = ev.j(z).unwrap().exp();
    assert!((mean - want).abs() < 4.0 * se, "{mean} ± {se} vs {want}");
}

#[test]
fn coefficient_field_factorises() {
    let m = measure(LevyMeasureSpec::TruncatedStablePositive { rho: 0.5 });
    let path = simulate_path(&m, 1.0, 1e-3, 5).unwrap();
    let curve = InitialCurve::PiecewiseLinear(vec![(0.0, 1.0), (1.0, 2.0)]);
    let grid = GridSpec::new(1.0, 20);
    let a = a_field(&path, &curve, &VolatilitySpec::unit(), grid).unwrap();
    for i in 0..=20 {
        let g = a.get(i, 20) / curve.value(1.0);
        for j in i..=20 {
            let want = curve.value(grid.time(j)) * g;
            assert!((a.get(i, j) - want).abs() < 1e-12 * want, "({i},{j})");
        }
    }
    // row 0 is the initial curve
    for j in 0..=20 {
        assert!((a.get(0, j) - curve.value(grid.time(j))).abs() < 1e-15);
    }
}
