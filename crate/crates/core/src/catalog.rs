//! Reference configurations with known regimes.

use crate::measure::{DensityTable, LevyMeasureSpec, VolatilitySpec};
use crate::regime::Verdict;

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub spec: LevyMeasureSpec,
    pub vol: VolatilitySpec,
    pub horizon: f64,
    pub expected: Verdict,
}

fn entry(name: &'static str, spec: LevyMeasureSpec, horizon: f64, expected: Verdict) -> CatalogEntry {
    CatalogEntry {
        name,
        spec,
        vol: VolatilitySpec::unit(),
        horizon,
        expected,
    }
}

/// Nine measures covering both regimes, all with `λ ≡ 1`.
pub fn reference_catalog() -> Vec<CatalogEntry> {
    use LevyMeasureSpec::*;
    use Verdict::*;
    let bump = DensityTable::new(vec![(0.1, 0.0), (0.5, 2.0), (2.0, 0.0)]).expect("valid table");
    vec![
        entry(
            "negative_small_jumps",
            TruncatedStableNegative { rho: 1.5 },
            1.0,
            NonExistence,
        ),
        entry(
            "symmetric_small_jumps",
            TruncatedStableSymmetric { rho: 1.5 },
            1.0,
            NonExistence,
        ),
        entry(
            "two_sided_with_large_jumps",
            FullStableTwoSided { rho: 1.5 },
            1.0,
            NonExistence,
        ),
        entry(
            "exponential_jumps",
            ExponentialJumps { scale: 1.0, rate: 1.0 },
            1.0,
            Existence,
        ),
        entry(
            "positive_small_jumps_rho_1_5",
            TruncatedStablePositive { rho: 1.5 },
            1.0,
            NonExistence,
        ),
        entry(
            "positive_small_jumps_rho_0_5",
            TruncatedStablePositive { rho: 0.5 },
            1.0,
            Existence,
        ),
        entry(
            "positive_small_jumps_rho_1",
            TruncatedStablePositive { rho: 1.0 },
            0.5,
            Existence,
        ),
        entry(
            "positive_with_large_jumps",
            FullStablePositive { rho: 1.5 },
            1.0,
            NonExistence,
        ),
        entry(
            "tabulated_positive_finite",
            FiniteActivityTabulated { table: bump },
            1.0,
            Existence,
        ),
    ]
}
