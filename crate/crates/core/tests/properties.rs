mod common;

use common::measure;
use levy_hjm::comparison::{power_mean_check, r_function};
use levy_hjm::exponent::ExponentEvaluator;
use levy_hjm::grid::{GridSpec, TriangleField};
use levy_hjm::measure::{LevyMeasureSpec, VolatilitySpec};
use levy_hjm::simulation::CoefficientField;
use levy_hjm::solver::apply_a_extended;
use proptest::prelude::*;

fn knots_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    (
        -5.0f64..5.0,
        0.01f64..10.0,
        prop::collection::vec((0.01f64..1.0, 0.0f64..50.0), 2..12),
    )
        .prop_map(|(start, width, raw)| {
            let total: f64 = raw.iter().map(|(w, _)| w).sum();
            let mut x = start;
            let mut knots = vec![(start, raw[0].1)];
            for &(w, y) in &raw[1..] {
                x += width * w / total;
                knots.push((x, y));
            }
            knots
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn r_sandwich_for_unit_alpha(z in 0.0f64..1e3, alpha in 1e-3f64..=1.0, gamma in 0.01f64..0.99) {
        let r = r_function(z, alpha, gamma);
        let top = alpha * z.powf(gamma);
        prop_assert!(r <= top * (1.0 + 1e-12) + 1e-15);
        prop_assert!(r >= top - 1.0);
    }

    #[test]
    fn r_sandwich_scaled(z in 0.0f64..1e3, alpha in 1e-3f64..100.0, gamma in 0.01f64..0.99) {
        let r = r_function(z, alpha, gamma);
        let top = alpha * z.powf(gamma);
        prop_assert!(r <= top * (1.0 + 1e-12) + 1e-15);
        prop_assert!(r >= top - alpha);
    }

    #[test]
    fn r_is_alpha_lipschitz(z1 in 0.0f64..50.0, z2 in 0.0f64..50.0, alpha in 1e-3f64..100.0, gamma in 0.01f64..0.99) {
        let d = (r_function(z1, alpha, gamma) - r_function(z2, alpha, gamma)).abs();
        prop_assert!(d <= alpha * (z1 - z2).abs() * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn power_mean_inequality(knots in knots_strategy(), gamma in 0.01f64..0.99) {
        prop_assert!(power_mean_check(&knots, gamma));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn operator_is_monotone(
        kind in 0usize..4,
        base in prop::collection::vec(0.0f64..3.0, 13 * 13),
        bump in prop::collection::vec(0.0f64..2.0, 13 * 13),
        coef in prop::collection::vec(0.1f64..2.0, 13 * 13),
    ) {
        let spec = [
            LevyMeasureSpec::TruncatedStableNegative { rho: 1.5 },
            LevyMeasureSpec::TruncatedStableSymmetric { rho: 1.5 },
            LevyMeasureSpec::FullStableTwoSided { rho: 1.7 },
            LevyMeasureSpec::ExponentialJumps { scale: 1.0, rate: 1.0 },
        ][kind].clone();
        let ev = ExponentEvaluator::new(measure(spec));
        let vol = VolatilitySpec::unit();
        let grid = GridSpec::new(1.0, 12);
        let a = CoefficientField::from_values(TriangleField::from_fn(grid, |i, j| coef[13 * i + j]));
        let f = TriangleField::from_fn(grid, |i, j| base[13 * i + j]);
        let g = TriangleField::from_fn(grid, |i, j| base[13 * i + j] + bump[13 * i + j]);
        let (af, ag) = (apply_a_extended(&a, &f, &ev, &vol).unwrap(), apply_a_extended(&a, &g, &ev, &vol).unwrap());
        for (i, j, v) in af.iter() {
            let w = ag.get(i, j);
            prop_assert!(v <= w * (1.0 + 1e-12), "({}, {}): {} > {}", i, j, v, w);
        }
    }
}
