//! Declarative experiment configuration.
//!
//! A config is a TOML document with global keys (`seed`, `jobs`, `out`) and
//! one table per experiment. The subcommand picks the table; a missing table
//! means all defaults. Every table rejects unknown keys.
//!
//! ```toml
//! seed = 7
//!
//! [ksat]
//! n = 150
//! densities = { start = 3.0, stop = 5.5, step = 0.25 }
//! trials = 100
//! solver = "dpll"
//! ```

use crate::error::{CliError, Result};
use randopt::graphopt::SubsetKind;
use randopt::ogp::{AnnealConfig, Metric, PlantedSuiteConfig};
use randopt::parisi::PenaltyForm;
use randopt::spin::Orthogonalize;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Gen,
    Graphopt,
    Spin,
    Parisi,
    Ksat,
    Ogp,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Gen => "gen",
            Experiment::Graphopt => "graphopt",
            Experiment::Spin => "spin",
            Experiment::Parisi => "parisi",
            Experiment::Ksat => "ksat",
            Experiment::Ogp => "ogp",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen: Option<GenConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graphopt: Option<GraphoptConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin: Option<SpinConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parisi: Option<ParisiConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ksat: Option<KsatConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ogp: Option<OgpConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    Graph,
    SparseGraph,
    Tensor,
    Ksat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenConfig {
    pub kind: GenKind,
    pub n: usize,
    pub edge_prob: f64,
    pub avg_degree: f64,
    pub p: usize,
    pub k: usize,
    /// Clause density; `m = round(density n)`.
    pub density: f64,
    pub count: usize,
    /// Also write K-SAT instances as DIMACS CNF.
    pub dimacs: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            kind: GenKind::Graph,
            n: 10,
            edge_prob: 0.5,
            avg_degree: 3.0,
            p: 2,
            k: 3,
            density: 4.0,
            count: 1,
            dimacs: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GraphoptConfig {
    pub n: usize,
    pub edge_prob: f64,
    /// When set, graphs are sparse with this mean degree instead.
    pub avg_degree: Option<f64>,
    pub kind: SubsetKind,
    pub seeds: usize,
    pub greedy: bool,
    /// Scan vertices in index order instead of a seeded permutation.
    pub fixed_order: bool,
    pub exact: bool,
    pub exact_cap: usize,
    pub moment_curve: bool,
}

impl Default for GraphoptConfig {
    fn default() -> Self {
        Self {
            n: 64,
            edge_prob: 0.5,
            avg_degree: None,
            kind: SubsetKind::Clique,
            seeds: 10,
            greedy: true,
            fixed_order: false,
            exact: false,
            exact_cap: randopt::graphopt::DEFAULT_EXACT_CAP,
            moment_curve: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpinMethod {
    Ground,
    Metropolis,
    Walk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpinConfig {
    pub n: usize,
    pub p: usize,
    pub seeds: usize,
    pub method: SpinMethod,
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub step: f64,
    pub max_steps: usize,
    pub orthogonalize: Orthogonalize,
    /// Also compute the exact ground state (small `n` only) for ratios.
    pub compare_ground: bool,
    /// Write per-seed walk trajectories.
    pub trajectories: bool,
}

impl Default for SpinConfig {
    fn default() -> Self {
        Self {
            n: 20,
            p: 2,
            seeds: 10,
            method: SpinMethod::Walk,
            sweeps: 1000,
            beta_start: 0.1,
            beta_end: 3.0,
            step: 0.1,
            max_steps: 1_000_000,
            orthogonalize: Orthogonalize::Previous,
            compare_ground: false,
            trajectories: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParisiClass {
    U,
    L,
    /// Both classes with matched budgets.
    Paired,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParisiConfig {
    pub p: usize,
    /// Explicit `ξ(s) = Σ c_k s^k`, index `k`; overrides `p`.
    pub coefficients: Option<Vec<f64>>,
    /// `ξ(s) = s^p` instead of `s^p / p!`.
    pub monomial: bool,
    pub penalty: PenaltyForm,
    /// Atom budget.
    pub k: usize,
    pub class: ParisiClass,
    /// Total-variation budget for class L; defaults to `m_max`.
    pub tv_budget: Option<f64>,
    pub starts: usize,
    pub max_evals: usize,
    pub tolerance: f64,
    pub m_max: f64,
    pub spacing: f64,
    pub max_half_width: f64,
    /// Grid halvings in the convergence table of the optimum.
    pub convergence_levels: usize,
}

impl Default for ParisiConfig {
    fn default() -> Self {
        let o = randopt::parisi::OptimizerConfig::default();
        Self {
            p: 2,
            coefficients: None,
            monomial: false,
            penalty: PenaltyForm::Standard,
            k: 2,
            class: ParisiClass::U,
            tv_budget: None,
            starts: o.starts,
            max_evals: o.max_evals,
            tolerance: o.tolerance,
            m_max: o.m_max,
            spacing: o.grid.spacing,
            max_half_width: o.grid.max_half_width,
            convergence_levels: 2,
        }
    }
}

/// Either an explicit list or an inclusive arithmetic range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::List(v) => v.clone(),
            Grid::Range { start, stop, step } => {
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                (0..count).map(|i| start + step * i as f64).collect()
            }
        }
    }

    fn validate(&self, key: &str) -> Result<()> {
        match self {
            Grid::List(v) if v.is_empty() => Err(CliError::config(key, "grid is empty")),
            Grid::List(v) if v.iter().any(|x| !x.is_finite() || *x < 0.0) => {
                Err(CliError::config(key, "grid values must be finite and nonnegative"))
            }
            Grid::Range { start, stop, step } if !(start.is_finite() && stop.is_finite() && *start >= 0.0) => {
                Err(CliError::config(key, "range bounds must be finite and nonnegative"))
            }
            Grid::Range { start, stop, step } if !(*step > 0.0 && stop >= start) => {
                Err(CliError::config(key, "range needs step > 0 and stop >= start"))
            }
            Grid::Range { start, stop, step } if (stop - start) / step > 1e6 => {
                Err(CliError::config(key, "range has too many points"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KsatSolver {
    Dpll,
    Walksat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KsatConfig {
    pub n: usize,
    pub k: usize,
    pub densities: Grid,
    pub trials: usize,
    pub solver: KsatSolver,
    pub node_budget: Option<u64>,
    pub max_flips: u64,
    pub noise: f64,
    /// Export the first trial at each density as DIMACS CNF.
    pub dimacs: bool,
}

impl Default for KsatConfig {
    fn default() -> Self {
        Self {
            n: 150,
            k: 3,
            densities: Grid::Range {
                start: 3.0,
                stop: 5.5,
                step: 0.25,
            },
            trials: 100,
            solver: KsatSolver::Dpll,
            node_budget: Some(10_000_000),
            max_flips: 100_000,
            noise: 0.5,
            dimacs: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OgpProbe {
    Planted,
    Histogram,
    Cluster,
    Interpolation,
    Stability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OgpModel {
    Spin,
    Clique,
    IndependentSet,
    Ksat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerChoice {
    Exhaustive,
    Annealed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OgpConfig {
    pub probe: OgpProbe,
    pub model: OgpModel,
    pub n: usize,
    pub p: usize,
    pub edge_prob: f64,
    pub k: usize,
    pub density: f64,
    /// Independent instances.
    pub instances: usize,
    /// Absolute level `η`; when absent, `level_fraction` of the exact
    /// optimum is used.
    pub level: Option<f64>,
    /// Defaults to 0.9 for spins and graphs and 1.0 (satisfying
    /// assignments) for K-SAT.
    pub level_fraction: Option<f64>,
    pub sampler: SamplerChoice,
    pub count: usize,
    pub anneal: AnnealConfig,
    pub bins: usize,
    pub metric: Option<Metric>,
    pub min_width: f64,
    pub mass_ceiling: f64,
    pub radius: usize,
    pub size_floor: usize,
    /// Path positions as fractions of `T`.
    pub positions: Vec<f64>,
    pub tuples: usize,
    pub shared_seed: bool,
    pub stride: usize,
    pub planted: PlantedSuiteConfig,
}

impl Default for OgpConfig {
    fn default() -> Self {
        Self {
            probe: OgpProbe::Histogram,
            model: OgpModel::Spin,
            n: 14,
            p: 2,
            edge_prob: 0.5,
            k: 3,
            density: 3.0,
            instances: 1,
            level: None,
            level_fraction: None,
            sampler: SamplerChoice::Exhaustive,
            count: 200,
            anneal: AnnealConfig::default(),
            bins: 50,
            metric: None,
            min_width: randopt::ogp::DEFAULT_MIN_WIDTH,
            mass_ceiling: randopt::ogp::DEFAULT_MASS_CEILING,
            radius: 1,
            size_floor: randopt::ogp::DEFAULT_SIZE_FLOOR,
            positions: vec![0.0, 1.0],
            tuples: 20,
            shared_seed: false,
            stride: 1,
            planted: PlantedSuiteConfig::default(),
        }
    }
}

fn positive(key: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(CliError::config(key, "must be >= 1"));
    }
    Ok(())
}

fn probability(key: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(CliError::config(key, format!("{v} is not in [0, 1]")));
    }
    Ok(())
}

fn finite_positive(key: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(CliError::config(key, format!("{v} must be finite and > 0")));
    }
    Ok(())
}

impl GenConfig {
    fn validate(&self) -> Result<()> {
        positive("gen.n", self.n)?;
        positive("gen.count", self.count)?;
        probability("gen.edge_prob", self.edge_prob)?;
        finite_positive("gen.avg_degree", self.avg_degree)?;
        if self.p < 2 {
            return Err(CliError::config("gen.p", "must be >= 2"));
        }
        if self.kind == GenKind::Tensor && self.p > self.n {
            return Err(CliError::config("gen.p", "must not exceed n"));
        }
        positive("gen.k", self.k)?;
        if self.kind == GenKind::Ksat && self.k > self.n {
            return Err(CliError::config("gen.k", "must not exceed n"));
        }
        if !(self.density.is_finite() && self.density >= 0.0) {
            return Err(CliError::config("gen.density", "must be finite and >= 0"));
        }
        Ok(())
    }
}

impl GraphoptConfig {
    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(CliError::config("graphopt.n", "must be >= 2"));
        }
        positive("graphopt.seeds", self.seeds)?;
        probability("graphopt.edge_prob", self.edge_prob)?;
        if let Some(d) = self.avg_degree {
            finite_positive("graphopt.avg_degree", d)?;
        }
        if self.exact && self.n > self.exact_cap {
            return Err(CliError::config("graphopt.exact_cap", format!("n = {} exceeds the cap", self.n)));
        }
        if !self.greedy && !self.exact {
            return Err(CliError::config("graphopt.greedy", "enable greedy, exact, or both"));
        }
        Ok(())
    }
}

impl SpinConfig {
    fn validate(&self) -> Result<()> {
        positive("spin.n", self.n)?;
        positive("spin.seeds", self.seeds)?;
        positive("spin.sweeps", self.sweeps)?;
        if self.p < 2 || self.p > self.n {
            return Err(CliError::config("spin.p", "must satisfy 2 <= p <= n"));
        }
        if !(self.beta_start >= 0.0 && self.beta_end >= 0.0) {
            return Err(CliError::config("spin.beta_start", "inverse temperatures must be >= 0"));
        }
        finite_positive("spin.step", self.step)?;
        let cap = if self.p == 2 {
            randopt::spin::GROUND_STATE_CAP_P2
        } else {
            randopt::spin::GROUND_STATE_CAP_PGE3
        };
        if (self.method == SpinMethod::Ground || self.compare_ground) && self.n > cap {
            return Err(CliError::config("spin.n", format!("exact ground states need n <= {cap}")));
        }
        Ok(())
    }
}

impl ParisiConfig {
    fn validate(&self) -> Result<()> {
        if self.coefficients.is_none() && self.p < 2 {
            return Err(CliError::config("parisi.p", "must be >= 2"));
        }
        positive("parisi.starts", self.starts)?;
        positive("parisi.max_evals", self.max_evals)?;
        finite_positive("parisi.m_max", self.m_max)?;
        finite_positive("parisi.spacing", self.spacing)?;
        finite_positive("parisi.max_half_width", self.max_half_width)?;
        finite_positive("parisi.tolerance", self.tolerance)?;
        if let Some(b) = self.tv_budget {
            finite_positive("parisi.tv_budget", b)?;
            if self.class != ParisiClass::L {
                return Err(CliError::config("parisi.tv_budget", "only applies to class l; paired runs match it to m_max"));
            }
        }
        if self.convergence_levels > 6 {
            return Err(CliError::config("parisi.convergence_levels", "at most 6 halvings"));
        }
        Ok(())
    }
}

impl KsatConfig {
    fn validate(&self) -> Result<()> {
        positive("ksat.n", self.n)?;
        positive("ksat.k", self.k)?;
        if self.k > self.n {
            return Err(CliError::config("ksat.k", "must not exceed n"));
        }
        positive("ksat.trials", self.trials)?;
        self.densities.validate("ksat.densities")?;
        probability("ksat.noise", self.noise)?;
        Ok(())
    }
}

impl OgpConfig {
    fn validate(&self) -> Result<()> {
        positive("ogp.n", self.n)?;
        positive("ogp.instances", self.instances)?;
        positive("ogp.bins", self.bins)?;
        probability("ogp.edge_prob", self.edge_prob)?;
        probability("ogp.mass_ceiling", self.mass_ceiling)?;
        if !(0.0..=1.0).contains(&self.min_width) {
            return Err(CliError::config("ogp.min_width", "is a fraction of the metric range in [0, 1]"));
        }
        if self.model == OgpModel::Spin && (self.p < 2 || self.p > self.n) {
            return Err(CliError::config("ogp.p", "must satisfy 2 <= p <= n"));
        }
        if self.model == OgpModel::Ksat && (self.k == 0 || self.k > self.n) {
            return Err(CliError::config("ogp.k", "must satisfy 1 <= k <= n"));
        }
        if let Some(l) = self.level {
            if l.is_nan() || l == f64::INFINITY {
                return Err(CliError::config("ogp.level", "must be finite or -inf"));
            }
        }
        if let Some(f) = self.level_fraction {
            finite_positive("ogp.level_fraction", f)?;
        }
        match self.probe {
            OgpProbe::Interpolation => {
                if self.positions.len() < 2 {
                    return Err(CliError::config("ogp.positions", "need at least two positions"));
                }
                if self.positions.iter().any(|x| !(0.0..=1.0).contains(x)) || self.positions.windows(2).any(|w| w[0] > w[1]) {
                    return Err(CliError::config("ogp.positions", "must be nondecreasing fractions in [0, 1]"));
                }
                positive("ogp.tuples", self.tuples)?;
            }
            OgpProbe::Stability => {
                if !matches!(self.model, OgpModel::Clique) {
                    return Err(CliError::config("ogp.model", "the stability profile runs greedy clique on graph paths"));
                }
                positive("ogp.stride", self.stride)?;
            }
            OgpProbe::Histogram | OgpProbe::Cluster => {
                if self.sampler == SamplerChoice::Annealed {
                    positive("ogp.count", self.count)?;
                }
            }
            OgpProbe::Planted => {}
        }
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let value: toml::Value = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::config(error_key(&e), e.message().to_string()))?;
        Self::from_value(value)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(format!("reading {}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Deserializes, naming the dotted key of the first offending entry.
    pub fn from_value(value: toml::Value) -> Result<Self> {
        serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            let message = e.inner().to_string();
            let message = message.lines().next().unwrap_or_default().to_string();
            let key = match unknown_field(&message) {
                Some(f) if path == "." || path.is_empty() => f.to_string(),
                Some(f) if path.rsplit('.').next() != Some(f) => format!("{path}.{f}"),
                _ => path,
            };
            CliError::config(key, message)
        })
    }

    /// The table for `exp`, filled in with defaults when absent.
    pub fn with_section(mut self, exp: Experiment) -> Self {
        match exp {
            Experiment::Gen => {
                self.gen.get_or_insert_with(Default::default);
            }
            Experiment::Graphopt => {
                self.graphopt.get_or_insert_with(Default::default);
            }
            Experiment::Spin => {
                self.spin.get_or_insert_with(Default::default);
            }
            Experiment::Parisi => {
                self.parisi.get_or_insert_with(Default::default);
            }
            Experiment::Ksat => {
                self.ksat.get_or_insert_with(Default::default);
            }
            Experiment::Ogp => {
                self.ogp.get_or_insert_with(Default::default);
            }
        }
        self
    }

    /// Checks the global keys and the table for `exp`.
    pub fn validate(&self, exp: Experiment) -> Result<()> {
        if self.jobs == Some(0) {
            return Err(CliError::config("jobs", "must be >= 1"));
        }
        let missing = || CliError::config(exp.name(), "section missing");
        match exp {
            Experiment::Gen => self.gen.as_ref().ok_or_else(missing)?.validate(),
            Experiment::Graphopt => self.graphopt.as_ref().ok_or_else(missing)?.validate(),
            Experiment::Spin => self.spin.as_ref().ok_or_else(missing)?.validate(),
            Experiment::Parisi => self.parisi.as_ref().ok_or_else(missing)?.validate(),
            Experiment::Ksat => self.ksat.as_ref().ok_or_else(missing)?.validate(),
            Experiment::Ogp => self.ogp.as_ref().ok_or_else(missing)?.validate(),
        }
    }

    /// Only the global keys and the table for `exp`.
    pub fn restricted_to(&self, exp: Experiment) -> Self {
        let mut c = ExperimentConfig {
            seed: self.seed,
            jobs: self.jobs,
            out: self.out.clone(),
            ..Default::default()
        };
        match exp {
            Experiment::Gen => c.gen = self.gen.clone(),
            Experiment::Graphopt => c.graphopt = self.graphopt.clone(),
            Experiment::Spin => c.spin = self.spin.clone(),
            Experiment::Parisi => c.parisi = self.parisi.clone(),
            Experiment::Ksat => c.ksat = self.ksat.clone(),
            Experiment::Ogp => c.ogp = self.ogp.clone(),
        }
        c
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

fn unknown_field(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("unknown field `")?;
    rest.split('`').next()
}

fn error_key(e: &toml::de::Error) -> String {
    match e.span() {
        Some(s) => format!("byte {}", s.start),
        None => "<document>".into(),
    }
}

/// Applies `key=value` overrides to a TOML document. Keys are dotted
/// paths; a key that does not start with a global key or a table name is
/// taken relative to `section`. Values are
/// parsed as TOML and fall back to plain strings.
pub fn apply_overrides(doc: &mut toml::Value, section: &str, overrides: &[String]) -> Result<()> {
    for o in overrides {
        let (key, raw) = o
            .split_once('=')
            .ok_or_else(|| CliError::config(o.clone(), "override must look like key=value"))?;
        let key = key.trim();
        let head = key.split('.').next().unwrap_or(key);
        let full = if is_global(key) || is_section(head) {
            key.to_string()
        } else {
            format!("{section}.{key}")
        };
        let value = parse_value(raw.trim());
        let mut parts: Vec<&str> = full.split('.').collect();
        let last = parts.pop().expect("split yields one part");
        let mut table = doc
            .as_table_mut()
            .ok_or_else(|| CliError::config(full.clone(), "document is not a table"))?;
        for p in parts {
            table = table
                .entry(p)
                .or_insert_with(|| toml::Value::Table(Default::default()))
                .as_table_mut()
                .ok_or_else(|| CliError::config(full.clone(), format!("`{p}` is not a table")))?;
        }
        table.insert(last.to_string(), value);
    }
    Ok(())
}

fn is_section(key: &str) -> bool {
    matches!(key, "gen" | "graphopt" | "spin" | "parisi" | "ksat" | "ogp")
}

fn is_global(key: &str) -> bool {
    matches!(key, "seed" | "jobs" | "out")
}

fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::from_toml_str("[ksat]\ntrails = 3\n").unwrap_err();
        match err {
            CliError::Config { key, .. } => assert_eq!(key, "ksat.trails"),
            e => panic!("{e}"),
        }
        let err = ExperimentConfig::from_toml_str("sead = 3\n").unwrap_err();
        assert!(matches!(err, CliError::Config { key, .. } if key == "sead"));
    }

    #[test]
    fn type_error_is_named() {
        let err = ExperimentConfig::from_toml_str("[ksat]\ntrials = \"many\"\n").unwrap_err();
        assert!(matches!(err, CliError::Config { key, .. } if key == "ksat.trials"));
        let err = ExperimentConfig::from_toml_str("[ogp.anneal]\nsweeps = -1\n").unwrap_err();
        assert!(matches!(err, CliError::Config { key, .. } if key == "ogp.anneal.sweeps"));
    }

    #[test]
    fn validation_names_key() {
        let c = ExperimentConfig::from_toml_str("[ksat]\nnoise = 2.0\n").unwrap();
        assert!(matches!(c.validate(Experiment::Ksat), Err(CliError::Config { key, .. }) if key == "ksat.noise"));
        let c = ExperimentConfig::default().with_section(Experiment::Ksat);
        c.validate(Experiment::Ksat).unwrap();
    }

    #[test]
    fn grids() {
        let g = Grid::Range {
            start: 3.0,
            stop: 5.5,
            step: 0.25,
        };
        let v = g.values();
        assert_eq!(v.len(), 11);
        assert_eq!(v[10], 5.5);
        let c = ExperimentConfig::from_toml_str("[ksat]\ndensities = [1.0, 2.0]\n").unwrap();
        assert_eq!(c.ksat.unwrap().densities, Grid::List(vec![1.0, 2.0]));
    }

    #[test]
    fn overrides() {
        let mut doc: toml::Value = "seed = 1\n[ksat]\nn = 10\n".parse().unwrap();
        apply_overrides(
            &mut doc,
            "ksat",
            &["n=20".into(), "seed=5".into(), "ksat.solver=walksat".into(), "densities=[1.0]".into()],
        )
        .unwrap();
        let c = ExperimentConfig::from_value(doc).unwrap();
        assert_eq!(c.seed, 5);
        let k = c.ksat.unwrap();
        assert_eq!(k.n, 20);
        assert_eq!(k.solver, KsatSolver::Walksat);
        assert_eq!(k.densities, Grid::List(vec![1.0]));

        let mut doc = toml::Value::Table(Default::default());
        apply_overrides(&mut doc, "ogp", &["planted.cases=7".into()]).unwrap();
        let c = ExperimentConfig::from_value(doc).unwrap();
        assert_eq!(c.ogp.unwrap().planted.cases, 7);
    }

    #[test]
    fn round_trips_through_toml() {
        let c = ExperimentConfig {
            seed: 3,
            ..Default::default()
        }
        .with_section(Experiment::Ogp)
        .with_section(Experiment::Parisi);
        let back = ExperimentConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
    }
}
