//! INI-style experiment configuration.
//!
//! ```text
//! [measure]
//! kind = truncated_stable_negative
//! rho = 1.5
//!
//! [model]
//! horizon = 1
//! grid_n = 200
//! ```
//!
//! Unknown sections and keys are errors, and every error carries the line it
//! refers to. [`ExperimentConfig::to_ini`] writes the fully resolved
//! configuration back in the same format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::exponent::EvalStrategy;
use crate::measure::{
    validate, DensityTable, LevyMeasureSpec, MeasureKind, ValidatedMeasure, VolatilityForm, VolatilitySpec,
};
use crate::simulation::{InitialCurve, DEFAULT_EPS};
use crate::solver::{SolveOptions, StartField};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {message}")]
pub struct ConfigError {
    /// 1-based; 0 when the problem is not tied to a line.
    pub line: usize,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

type Knots = Vec<(f64, f64)>;

/// One `key = value` entry with its source line.
#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Debug, Clone, Default)]
struct Section {
    line: usize,
    entries: BTreeMap<String, Entry>,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("measure", &["kind", "rho", "scale", "rate", "knots"]),
    (
        "volatility",
        &["form", "value", "lambda_low", "lambda_high", "intercept", "slope"],
    ),
    ("model", &["horizon", "grid_n", "eps"]),
    ("initial_curve", &["form", "value", "knots"]),
    ("seeds", &["master_seed", "count"]),
    ("solver", &["tol", "max_iter", "ceiling", "start"]),
    ("comparison", &["enabled", "gamma", "alpha", "beta", "corner"]),
    ("study", &["f0_levels", "grid_levels"]),
    ("exponent_table", &["z_min", "z_max", "points", "strategy"]),
    ("output", &["dir"]),
];

fn parse_sections(text: &str) -> Result<BTreeMap<String, Section>, ConfigError> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::at(line, "unterminated section header"))?
                .trim();
            if !SECTIONS.iter().any(|(s, _)| *s == name) {
                return Err(ConfigError::at(line, format!("unknown section [{name}]")));
            }
            if sections.contains_key(name) {
                return Err(ConfigError::at(line, format!("duplicate section [{name}]")));
            }
            sections.insert(
                name.to_string(),
                Section {
                    line,
                    entries: BTreeMap::new(),
                },
            );
            current = Some(name.to_string());
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line, format!("expected key = value, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let section = current
            .as_ref()
            .ok_or_else(|| ConfigError::at(line, format!("key `{key}` outside of any section")))?;
        let allowed = SECTIONS
            .iter()
            .find(|(s, _)| s == section)
            .map(|(_, k)| *k)
            .unwrap_or(&[]);
        if !allowed.contains(&key) {
            return Err(ConfigError::at(line, format!("unknown key `{key}` in [{section}]")));
        }
        let entries = &mut sections.get_mut(section).expect("section exists").entries;
        if entries.contains_key(key) {
            return Err(ConfigError::at(line, format!("duplicate key `{key}` in [{section}]")));
        }
        entries.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                line,
            },
        );
    }
    Ok(sections)
}

/// Typed access to one section.
struct Reader<'a> {
    name: &'static str,
    section: Option<&'a Section>,
}

impl<'a> Reader<'a> {
    fn line(&self) -> usize {
        self.section.map(|s| s.line).unwrap_or(0)
    }

    fn get(&self, key: &str) -> Option<&'a Entry> {
        self.section.and_then(|s| s.entries.get(key))
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<T>()
                .map(Some)
                .map_err(|_| ConfigError::at(e.line, format!("cannot parse `{}` as a value for {key}", e.value))),
        }
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        self.parse(key)?
            .ok_or_else(|| ConfigError::at(self.line(), format!("[{}] needs `{key}`", self.name)))
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<T>()
                        .map_err(|_| ConfigError::at(e.line, format!("bad list item `{}` in {key}", s.trim())))
                })
                .collect::<Result<Vec<T>, _>>()
                .map(Some),
        }
    }

    /// `x:y, x:y, ...`
    /// Knot list and the line it came from.
    fn knots(&self, key: &str) -> Result<Option<(Knots, usize)>, ConfigError> {
        let Some(e) = self.get(key) else { return Ok(None) };
        let mut out = Vec::new();
        for item in e.value.split(',') {
            let (x, y) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| ConfigError::at(e.line, format!("knot `{}` is not x:y", item.trim())))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| ConfigError::at(e.line, format!("bad number `{}` in {key}", s.trim())))
            };
            out.push((parse(x)?, parse(y)?));
        }
        Ok(Some((out, e.line)))
    }
}

/// Where Picard iteration starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartChoice {
    Zero,
    /// The constant field `c` from the bound-constant search.
    Bound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedConfig {
    pub master_seed: u64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonConfig {
    pub enabled: bool,
    /// Taken from the non-existence certificate when absent.
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    /// Corner `x = y`; defaults to the horizon.
    pub corner: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub f0_levels: Vec<f64>,
    pub grid_levels: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentTableConfig {
    pub z_min: f64,
    pub z_max: f64,
    pub points: usize,
    pub strategy: EvalStrategy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub measure: LevyMeasureSpec,
    pub volatility: VolatilitySpec,
    pub horizon: f64,
    pub grid_n: usize,
    pub eps: f64,
    pub initial_curve: InitialCurve,
    pub seeds: SeedConfig,
    pub solver: SolveOptions,
    pub start: StartChoice,
    pub comparison: ComparisonConfig,
    pub study: StudyConfig,
    pub exponent_table: ExponentTableConfig,
    pub output_dir: Option<String>,
}

pub fn strategy_key(s: EvalStrategy) -> &'static str {
    match s {
        EvalStrategy::SeriesSmallZ => "series_small_z",
        EvalStrategy::QuadratureGeneral => "quadrature_general",
        EvalStrategy::ClosedFormLimit => "closed_form_limit",
    }
}

fn parse_strategy(s: &str) -> Option<EvalStrategy> {
    [
        EvalStrategy::SeriesSmallZ,
        EvalStrategy::QuadratureGeneral,
        EvalStrategy::ClosedFormLimit,
    ]
    .into_iter()
    .find(|&k| strategy_key(k) == s)
}

/// Parses a `[measure]`-style block into a spec (unvalidated).
fn measure_from(r: &Reader) -> Result<LevyMeasureSpec, ConfigError> {
    let Some(section) = r.section else {
        return Err(ConfigError::at(0, "missing [measure] block"));
    };
    if section.entries.is_empty() {
        return Err(ConfigError::at(section.line, "[measure] block is empty"));
    }
    let kind_entry = r
        .get("kind")
        .ok_or_else(|| ConfigError::at(section.line, "[measure] needs `kind`"))?;
    let kind = MeasureKind::from_key(&kind_entry.value)
        .ok_or_else(|| ConfigError::at(kind_entry.line, format!("unknown measure kind `{}`", kind_entry.value)))?;
    let allowed: &[&str] = match kind {
        MeasureKind::ExponentialJumps => &["kind", "scale", "rate"],
        MeasureKind::FiniteActivityTabulated => &["kind", "knots"],
        _ => &["kind", "rho"],
    };
    for (key, e) in &section.entries {
        if !allowed.contains(&key.as_str()) {
            return Err(ConfigError::at(
                e.line,
                format!("`{key}` does not apply to {}", kind.key()),
            ));
        }
    }
    let spec = match kind {
        MeasureKind::ExponentialJumps => LevyMeasureSpec::ExponentialJumps {
            scale: r.required("scale")?,
            rate: r.required("rate")?,
        },
        MeasureKind::FiniteActivityTabulated => {
            let (knots, line) = r
                .knots("knots")?
                .ok_or_else(|| ConfigError::at(section.line, "[measure] needs `knots`"))?;
            let table = DensityTable::new(knots).map_err(|e| ConfigError::at(line, e.to_string()))?;
            LevyMeasureSpec::FiniteActivityTabulated { table }
        }
        other => {
            let rho: f64 = r.required("rho")?;
            match other {
                MeasureKind::TruncatedStablePositive => LevyMeasureSpec::TruncatedStablePositive { rho },
                MeasureKind::TruncatedStableSymmetric => LevyMeasureSpec::TruncatedStableSymmetric { rho },
                MeasureKind::TruncatedStableNegative => LevyMeasureSpec::TruncatedStableNegative { rho },
                MeasureKind::FullStablePositive => LevyMeasureSpec::FullStablePositive { rho },
                _ => LevyMeasureSpec::FullStableTwoSided { rho },
            }
        }
    };
    Ok(spec)
}

/// Flat `key = value` lines describing a measure.
pub fn measure_to_block(spec: &LevyMeasureSpec) -> String {
    let mut s = format!("kind = {}\n", spec.kind().key());
    match spec {
        LevyMeasureSpec::ExponentialJumps { scale, rate } => {
            let _ = writeln!(s, "scale = {scale}\nrate = {rate}");
        }
        LevyMeasureSpec::FiniteActivityTabulated { table } => {
            let knots: Vec<String> = table.knots().iter().map(|(x, y)| format!("{x}:{y}")).collect();
            let _ = writeln!(s, "knots = {}", knots.join(", "));
        }
        other => {
            let _ = writeln!(s, "rho = {}", other.rho().expect("stable kind"));
        }
    }
    s
}

/// Parses a block produced by [`measure_to_block`].
pub fn measure_from_block(block: &str) -> Result<LevyMeasureSpec, ConfigError> {
    let sections = parse_sections(&format!("[measure]\n{block}"))?;
    measure_from(&Reader {
        name: "measure",
        section: sections.get("measure"),
    })
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let sections = parse_sections(text)?;
        let reader = |name: &'static str| Reader {
            name,
            section: sections.get(name),
        };

        let measure = measure_from(&reader("measure"))?;

        let v = reader("volatility");
        let form_name: String = v.or("form", "constant".to_string())?;
        let volatility = match form_name.as_str() {
            "constant" => {
                let value: f64 = v.or("value", 1.0)?;
                let low = v.or("lambda_low", value)?;
                let high = v.or("lambda_high", value.max(1.0))?;
                VolatilitySpec::new(low, high, VolatilityForm::Constant(value))
            }
            "separable_linear" => {
                let intercept: f64 = v.required("intercept")?;
                let slope: f64 = v.required("slope")?;
                VolatilitySpec::new(
                    v.required("lambda_low")?,
                    v.required("lambda_high")?,
                    VolatilityForm::SeparableLinear { intercept, slope },
                )
            }
            other => {
                let line = v.get("form").map(|e| e.line).unwrap_or(v.line());
                return Err(ConfigError::at(line, format!("unknown volatility form `{other}`")));
            }
        }
        .map_err(|e| ConfigError::at(v.line(), e.to_string()))?;

        validate(measure.clone(), &volatility).map_err(|e| ConfigError::at(reader("measure").line(), e.to_string()))?;

        let m = reader("model");
        let horizon: f64 = m.or("horizon", 1.0)?;
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(ConfigError::at(
                m.line(),
                format!("horizon must be positive, got {horizon}"),
            ));
        }
        let grid_n: usize = m.or("grid_n", 100)?;
        if grid_n < 2 {
            return Err(ConfigError::at(m.line(), "grid_n must be at least 2"));
        }
        let default_eps = if measure.is_finite_activity() { 0.0 } else { DEFAULT_EPS };
        let eps: f64 = m.or("eps", default_eps)?;
        if !(eps >= 0.0) || (eps == 0.0 && !measure.is_finite_activity()) {
            return Err(ConfigError::at(
                m.get("eps").map(|e| e.line).unwrap_or(m.line()),
                "infinite-activity measures need eps > 0",
            ));
        }

        let c = reader("initial_curve");
        let curve_form: String = c.or("form", "constant".to_string())?;
        let initial_curve = match curve_form.as_str() {
            "constant" => InitialCurve::Constant(c.or("value", 1.0)?),
            "piecewise_linear" => {
                let (knots, line) = c
                    .knots("knots")?
                    .ok_or_else(|| ConfigError::at(c.line(), "[initial_curve] needs `knots`"))?;
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(ConfigError::at(line, "initial curve knots must increase"));
                }
                InitialCurve::PiecewiseLinear(knots)
            }
            other => {
                return Err(ConfigError::at(
                    c.line(),
                    format!("unknown initial curve form `{other}`"),
                ))
            }
        };
        let positive = match &initial_curve {
            InitialCurve::Constant(v) => *v > 0.0 && v.is_finite(),
            InitialCurve::PiecewiseLinear(k) => k.iter().all(|&(_, y)| y > 0.0 && y.is_finite()),
        };
        if !positive {
            return Err(ConfigError::at(c.line(), "initial curve must be positive"));
        }

        let s = reader("seeds");
        let seeds = SeedConfig {
            master_seed: s.or("master_seed", 0)?,
            count: s.or("count", 1)?,
        };

        let so = reader("solver");
        let defaults = SolveOptions::default();
        let start_name: String = so.or("start", "zero".to_string())?;
        let start = match start_name.as_str() {
            "zero" => StartChoice::Zero,
            "bound" => StartChoice::Bound,
            other => return Err(ConfigError::at(so.line(), format!("unknown solver start `{other}`"))),
        };
        let solver = SolveOptions {
            max_iter: so.or("max_iter", defaults.max_iter)?,
            tol: so.or("tol", defaults.tol)?,
            ceiling: so.or("ceiling", defaults.ceiling)?,
            start: StartField::Zero,
            monotone_slack: defaults.monotone_slack,
        };

        let cmp = reader("comparison");
        let comparison = ComparisonConfig {
            enabled: cmp.or("enabled", cmp.section.is_some())?,
            gamma: cmp.parse("gamma")?,
            alpha: cmp.parse("alpha")?,
            beta: cmp.parse("beta")?,
            corner: cmp.parse("corner")?,
        };
        if let Some(g) = comparison.gamma {
            if !(g > 0.0 && g < 1.0) {
                return Err(ConfigError::at(cmp.line(), "gamma must lie in (0, 1)"));
            }
        }
        if let Some(x) = comparison.corner {
            if !(x > 0.0 && x <= horizon) {
                return Err(ConfigError::at(cmp.line(), "corner must lie in (0, horizon]"));
            }
        }

        let st = reader("study");
        let study = StudyConfig {
            f0_levels: st.list("f0_levels")?.unwrap_or_else(|| vec![1.0, 10.0, 100.0]),
            grid_levels: st.list("grid_levels")?.unwrap_or_else(|| vec![50, 100, 200]),
        };
        if study.grid_levels.iter().any(|&n| n < 2) || study.f0_levels.iter().any(|&f| !(f > 0.0)) {
            return Err(ConfigError::at(st.line(), "study levels must be positive (grids ≥ 2)"));
        }

        let et = reader("exponent_table");
        let strategy_name: String = et.or("strategy", "series_small_z".to_string())?;
        let exponent_table = ExponentTableConfig {
            z_min: et.or("z_min", 1e-6)?,
            z_max: et.or("z_max", 1e12)?,
            points: et.or("points", 200)?,
            strategy: parse_strategy(&strategy_name)
                .ok_or_else(|| ConfigError::at(et.line(), format!("unknown strategy `{strategy_name}`")))?,
        };
        if !(exponent_table.z_min > 0.0 && exponent_table.z_max > exponent_table.z_min && exponent_table.points >= 2) {
            return Err(ConfigError::at(et.line(), "need 0 < z_min < z_max and points ≥ 2"));
        }

        let output_dir = reader("output").parse("dir")?;
        Ok(Self {
            measure,
            volatility,
            horizon,
            grid_n,
            eps,
            initial_curve,
            seeds,
            solver,
            start,
            comparison,
            study,
            exponent_table,
            output_dir,
        })
    }

    pub fn validated_measure(&self) -> ValidatedMeasure {
        validate(self.measure.clone(), &self.volatility).expect("validated at load")
    }

    /// Resolved configuration in the input format, with every default filled.
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        s.push_str("[measure]\n");
        s.push_str(&measure_to_block(&self.measure));
        s.push_str("\n[volatility]\n");
        match self.volatility.form {
            VolatilityForm::Constant(v) => {
                let _ = writeln!(s, "form = constant\nvalue = {v}");
            }
            VolatilityForm::SeparableLinear { intercept, slope } => {
                let _ = writeln!(s, "form = separable_linear\nintercept = {intercept}\nslope = {slope}");
            }
        }
        let _ = writeln!(
            s,
            "lambda_low = {}\nlambda_high = {}",
            self.volatility.lambda_low, self.volatility.lambda_high
        );
        let _ = writeln!(
            s,
            "\n[model]\nhorizon = {}\ngrid_n = {}\neps = {}",
            self.horizon, self.grid_n, self.eps
        );
        s.push_str("\n[initial_curve]\n");
        match &self.initial_curve {
            InitialCurve::Constant(v) => {
                let _ = writeln!(s, "form = constant\nvalue = {v}");
            }
            InitialCurve::PiecewiseLinear(k) => {
                let knots: Vec<String> = k.iter().map(|(x, y)| format!("{x}:{y}")).collect();
                let _ = writeln!(s, "form = piecewise_linear\nknots = {}", knots.join(", "));
            }
        }
        let _ = writeln!(
            s,
            "\n[seeds]\nmaster_seed = {}\ncount = {}",
            self.seeds.master_seed, self.seeds.count
        );
        let start = match self.start {
            StartChoice::Zero => "zero",
            StartChoice::Bound => "bound",
        };
        let _ = writeln!(
            s,
            "\n[solver]\ntol = {}\nmax_iter = {}\nceiling = {}\nstart = {start}",
            self.solver.tol, self.solver.max_iter, self.solver.ceiling
        );
        let _ = writeln!(s, "\n[comparison]\nenabled = {}", self.comparison.enabled);
        for (key, v) in [
            ("gamma", self.comparison.gamma),
            ("alpha", self.comparison.alpha),
            ("beta", self.comparison.beta),
            ("corner", self.comparison.corner),
        ] {
            if let Some(v) = v {
                let _ = writeln!(s, "{key} = {v}");
            }
        }
        let levels: Vec<String> = self.study.f0_levels.iter().map(|v| v.to_string()).collect();
        let grids: Vec<String> = self.study.grid_levels.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(
            s,
            "\n[study]\nf0_levels = {}\ngrid_levels = {}",
            levels.join(", "),
            grids.join(", ")
        );
        let et = &self.exponent_table;
        let _ = writeln!(
            s,
            "\n[exponent_table]\nz_min = {}\nz_max = {}\npoints = {}\nstrategy = {}",
            et.z_min,
            et.z_max,
            et.points,
            strategy_key(et.strategy)
        );
        if let Some(dir) = &self.output_dir {
            let _ = writeln!(s, "\n[output]\ndir = {dir}");
        }
        s
    }
}
