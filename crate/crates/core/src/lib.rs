//! Forward-rate fields of an HJM model with proportional volatility driven by
//! pure-jump Lévy noise.
//!
//! The crate covers the whole chain: Lévy measure catalog, the cumulant
//! exponent `J` and its derivatives, regime classification, jump-path
//! simulation, the fixed-point solver for the forward field and the
//! comparison functions used to detect explosion near the horizon corner.
//! The `experiment` module drives these from INI configuration files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod comparison;
pub mod config;
pub mod csv;
pub mod experiment;
pub mod exponent;
pub mod grid;
pub mod measure;
pub mod quadrature;
pub mod regime;
pub mod rng;
pub mod simulation;
pub mod solver;

pub use catalog::{reference_catalog, CatalogEntry};
pub use comparison::{comparison_bundle, comparison_dominates, ComparisonBundle, DominanceReport};
pub use config::ExperimentConfig;
pub use experiment::{ExperimentError, RunOptions};
pub use exponent::{EvalStrategy, ExponentError, ExponentEvaluator};
pub use grid::{GridSpec, TriangleField};
pub use measure::{validate, LevyMeasureSpec, MeasureKind, ValidatedMeasure, VolatilitySpec};
pub use regime::{bound_constant, classify, Certificate, RegimeReport, Verdict};
pub use simulation::{a_field, simulate_path, CoefficientField, InitialCurve, JumpPath};
pub use solver::{solve_fixed_point, SolveOptions, SolveOutcome};
