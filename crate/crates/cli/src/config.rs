use std::fmt;
use std::path::Path;

use entdyn_core::analytic::BellKind;
use entdyn_core::concurrence::{ConvexRoofConfig, LowerBoundConfig, QuasiPureGate};
use entdyn_core::lindblad::{EnvironmentModel, IntegratorConfig, Ladder};
use entdyn_core::{CVector, HilbertDims, PureState, C64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::oracle::{OracleArgs, OracleId};

/// A complex amplitude written either as a real number or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

impl Amplitude {
    pub fn value(self) -> C64 {
        match self {
            Self::Real(x) => C64::new(x, 0.0),
            Self::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    /// `a|m₁m₂⟩ + b|n₁n₂⟩`.
    TwoTerm { a: Amplitude, b: Amplitude, m: [usize; 2], n: [usize; 2] },
    /// A Bell state in the two lowest levels of each party.
    Bell { bell: String },
    /// Explicit amplitudes in `|n m⟩ ↦ n·d₂ + m` order; normalised on load.
    Amplitudes {
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
    },
}

impl StateSpec {
    pub fn build(&self, dims: HilbertDims) -> Result<PureState> {
        Ok(match self {
            Self::TwoTerm { a, b, m, n } => {
                PureState::two_term(dims, a.value(), b.value(), (m[0], m[1]), (n[0], n[1]))?
            }
            Self::Bell { bell } => bell_kind(bell)?.state(dims)?,
            Self::Amplitudes { re, im } => {
                if !im.is_empty() && im.len() != re.len() {
                    return Err(CliError::Config(format!(
                        "state.im has {} entries but state.re has {}",
                        im.len(),
                        re.len()
                    )));
                }
                let amp = CVector::from_iterator(
                    re.len(),
                    re.iter().enumerate().map(|(i, &x)| C64::new(x, im.get(i).copied().unwrap_or(0.0))),
                );
                PureState::normalized(dims, amp)?
            }
        })
    }
}

fn bell_kind(name: &str) -> Result<BellKind> {
    BellKind::from_name(name).ok_or_else(|| CliError::Config(format!("unknown Bell state '{name}'")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Dephasing,
    Thermal,
    ZeroTemperature,
    InfiniteTemperature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderSpec {
    QubitSigma,
    #[default]
    Bosonic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// `Γ`, or `Γ̃` for the infinite-temperature channel.
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default)]
    pub nbar: f64,
    #[serde(default)]
    pub ladder: LadderSpec,
}

fn one() -> f64 {
    1.0
}

impl ModelSpec {
    pub fn build(&self) -> Result<EnvironmentModel> {
        let model = match self.kind {
            ModelKind::Dephasing => EnvironmentModel::dephasing(self.gamma),
            ModelKind::Thermal => EnvironmentModel::thermal(self.gamma, self.nbar),
            ModelKind::ZeroTemperature => EnvironmentModel::zero_temperature(self.gamma),
            ModelKind::InfiniteTemperature => EnvironmentModel::infinite_temperature(self.gamma),
        };
        let ladder = match self.ladder {
            LadderSpec::QubitSigma => Ladder::QubitSigma,
            LadderSpec::Bosonic => Ladder::BosonicTruncated,
        };
        let model = model.with_ladder(ladder);
        model.validate()?;
        Ok(model)
    }

    fn is_zero_temperature(&self) -> bool {
        match self.kind {
            ModelKind::ZeroTemperature => true,
            ModelKind::Thermal => self.nbar == 0.0,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t_max: f64,
    #[serde(default = "default_points")]
    pub n_points: usize,
}

fn default_points() -> usize {
    200
}

impl Default for TimeSpec {
    fn default() -> Self {
        Self { t_max: 1.0, n_points: default_points() }
    }
}

/// A requested output column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", untagged)]
pub enum EstimatorId {
    Numeric(NumericEstimator),
    Oracle(OracleId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericEstimator {
    Wootters,
    LowerOptimized,
    Quasipure,
    Upper,
    Block,
}

impl NumericEstimator {
    pub fn name(self) -> &'static str {
        match self {
            Self::Wootters => "wootters",
            Self::LowerOptimized => "lower_optimized",
            Self::Quasipure => "quasipure",
            Self::Upper => "upper",
            Self::Block => "block",
        }
    }
}

impl EstimatorId {
    pub const WOOTTERS: Self = Self::Numeric(NumericEstimator::Wootters);
    pub const LOWER: Self = Self::Numeric(NumericEstimator::LowerOptimized);
    pub const QUASIPURE: Self = Self::Numeric(NumericEstimator::Quasipure);
    pub const UPPER: Self = Self::Numeric(NumericEstimator::Upper);
    pub const BLOCK: Self = Self::Numeric(NumericEstimator::Block);

    pub fn name(self) -> &'static str {
        match self {
            Self::Numeric(e) => e.name(),
            Self::Oracle(o) => o.name(),
        }
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendSpec {
    #[default]
    Adaptive,
    Superoperator,
    FixedRk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSpec {
    pub backend: BackendSpec,
    pub abs_tol: f64,
    /// Step of the fixed RK4 backend.
    pub step: f64,
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        Self { backend: BackendSpec::default(), abs_tol: IntegratorConfig::default().abs_tol, step: 1e-3 }
    }
}

impl IntegratorSpec {
    pub fn build(&self) -> IntegratorConfig {
        let base = match self.backend {
            BackendSpec::Adaptive => IntegratorConfig::default(),
            BackendSpec::Superoperator => IntegratorConfig::superoperator(),
            BackendSpec::FixedRk4 => IntegratorConfig::fixed_rk4(self.step),
        };
        IntegratorConfig { abs_tol: self.abs_tol, ..base }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LowerSpec {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for LowerSpec {
    fn default() -> Self {
        let d = LowerBoundConfig::default();
        Self { restarts: d.restarts, max_iters: d.max_iters, tol: d.tol }
    }
}

impl LowerSpec {
    pub fn build(&self, seed: u64) -> LowerBoundConfig {
        LowerBoundConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            tol: self.tol,
            seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UpperSpec {
    pub restarts: usize,
    pub polish: usize,
    pub extra_columns: usize,
    pub max_sweeps: usize,
    pub tol: f64,
}

impl Default for UpperSpec {
    fn default() -> Self {
        let d = ConvexRoofConfig::default();
        Self {
            restarts: d.restarts,
            polish: d.polish,
            extra_columns: d.extra_columns,
            max_sweeps: d.max_sweeps,
            tol: d.tol,
        }
    }
}

impl UpperSpec {
    pub fn build(&self, seed: u64) -> ConvexRoofConfig {
        ConvexRoofConfig {
            restarts: self.restarts,
            polish: self.polish,
            extra_columns: self.extra_columns,
            max_sweeps: self.max_sweeps,
            tol: self.tol,
            seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuasiPureSpec {
    pub min_gap: f64,
    pub min_leading: f64,
}

impl Default for QuasiPureSpec {
    fn default() -> Self {
        let g = QuasiPureGate::default();
        Self { min_gap: g.min_gap, min_leading: g.min_leading }
    }
}

impl QuasiPureSpec {
    pub fn build(&self) -> QuasiPureGate {
        QuasiPureGate { min_gap: self.min_gap, min_leading: self.min_leading }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlockSpec {
    /// Upper level of the `{0, m}` block; the top shared level when absent.
    pub m: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExportSpec {
    /// Number of `mu_i` columns; all eigenvalues when absent.
    pub eigenvalues: Option<usize>,
    /// Rows whose boundary population exceeds this are flagged.
    pub boundary_threshold: f64,
}

impl Default for ExportSpec {
    fn default() -> Self {
        Self { eigenvalues: None, boundary_threshold: 1e-3 }
    }
}

/// One run: an initial state, an environment, a time grid and the columns to compute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub dims: [usize; 2],
    pub state: StateSpec,
    pub model: ModelSpec,
    #[serde(default)]
    pub time: TimeSpec,
    pub estimators: Vec<EstimatorId>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub integrator: IntegratorSpec,
    #[serde(default)]
    pub lower: LowerSpec,
    #[serde(default)]
    pub upper: UpperSpec,
    #[serde(default)]
    pub quasipure: QuasiPureSpec,
    #[serde(default)]
    pub block: BlockSpec,
    #[serde(default)]
    pub export: ExportSpec,
}

impl Scenario {
    /// Parses TOML text, applying `key=value` overrides (dotted keys) first.
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table =
            text.parse().map_err(|e: toml::de::Error| CliError::Config(format!("invalid scenario: {e}")))?;
        for item in overrides {
            apply_override(&mut table, item)?;
        }
        let scenario: Scenario = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(format!("invalid scenario: {e}")))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text, overrides).map_err(|e| match e {
            CliError::Config(message) => CliError::Parse { path: path.to_path_buf(), message },
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::Config(format!("cannot serialise scenario: {e}")))
    }

    pub fn hilbert_dims(&self) -> Result<HilbertDims> {
        Ok(HilbertDims::new(self.dims[0], self.dims[1])?)
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        let t = &self.time;
        if !(t.t_max >= 0.0 && t.t_max.is_finite()) {
            return Err(CliError::Config(format!("time.t_max must be finite and ≥ 0, got {}", t.t_max)));
        }
        if t.n_points == 0 {
            return Err(CliError::Config("time.n_points must be ≥ 1".into()));
        }
        Ok(entdyn_core::lindblad::linear_grid(t.t_max, t.n_points))
    }

    /// Checks every estimator against the dimensions, state and model. Runs
    /// before any propagation.
    pub fn validate(&self) -> Result<()> {
        let dims = self.hilbert_dims()?;
        self.state.build(dims)?;
        self.model.build()?;
        self.times()?;
        if self.estimators.is_empty() {
            return Err(CliError::Config("no estimators requested".into()));
        }
        for (i, e) in self.estimators.iter().enumerate() {
            if self.estimators[..i].contains(e) {
                return Err(CliError::Config(format!("estimator '{e}' requested twice")));
            }
            match e {
                EstimatorId::Numeric(NumericEstimator::Wootters) if dims.d1() != 2 || dims.d2() != 2 => {
                    return Err(CliError::Config(format!(
                        "wootters needs two qubits, scenario has dims {:?}",
                        self.dims
                    )));
                }
                EstimatorId::Numeric(NumericEstimator::Block) => {
                    let m = self.block_level();
                    if m == 0 || m >= dims.min_local() {
                        return Err(CliError::Config(format!("block.m = {m} must lie in 1..{}", dims.min_local())));
                    }
                }
                EstimatorId::Oracle(o) => {
                    self.oracle_args(*o)?;
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn block_level(&self) -> usize {
        self.block.m.unwrap_or_else(|| self.dims[0].min(self.dims[1]).saturating_sub(1))
    }

    /// Oracle parameters drawn from the state and model, or a configuration
    /// error if the oracle does not describe this family.
    pub fn oracle_args(&self, oracle: OracleId) -> Result<OracleArgs> {
        let mismatch = |why: &str| {
            Err(CliError::Config(format!("oracle '{oracle}' does not apply to scenario '{}': {why}", self.name)))
        };
        let m = &self.model;
        let model_ok = match oracle {
            OracleId::BellDephasing | OracleId::TwoTermDephasing => m.kind == ModelKind::Dephasing,
            OracleId::BellZeroTemperature | OracleId::ZeroT0mM0 | OracleId::ZeroT00mm => m.is_zero_temperature(),
            OracleId::BellThermal => matches!(m.kind, ModelKind::Thermal | ModelKind::ZeroTemperature),
            OracleId::BellInfiniteTemperature => m.kind == ModelKind::InfiniteTemperature,
        };
        if !model_ok {
            return mismatch(&format!("model kind is {:?}", m.kind));
        }
        if m.ladder == LadderSpec::QubitSigma && !matches!(oracle, OracleId::BellDephasing | OracleId::TwoTermDephasing)
        {
            // σ± and the bosonic ladder agree on qubits, so only the dimension matters here
            if self.dims != [2, 2] {
                return mismatch("qubit ladder on a qudit");
            }
        }
        let mut args = OracleArgs { gamma: m.gamma, nbar: m.nbar, ..OracleArgs::default() };
        match (&self.state, oracle) {
            (
                StateSpec::Bell { bell },
                OracleId::BellDephasing
                | OracleId::BellZeroTemperature
                | OracleId::BellThermal
                | OracleId::BellInfiniteTemperature,
            ) => {
                args.kind = bell_kind(bell)?;
                if m.kind == ModelKind::ZeroTemperature {
                    args.nbar = 0.0;
                }
            }
            (StateSpec::TwoTerm { a, b, m: lm, n: ln }, OracleId::TwoTermDephasing) => {
                (args.a, args.b, args.m, args.n) = (a.value(), b.value(), (lm[0], lm[1]), (ln[0], ln[1]));
            }
            (StateSpec::TwoTerm { a, b, m: lm, n: ln }, OracleId::ZeroT0mM0) => {
                if !(lm[0] == 0 && ln[1] == 0 && lm[1] == ln[0] && lm[1] > 0) {
                    return mismatch("state is not a|0m⟩ + b|m0⟩");
                }
                (args.a, args.b, args.m, args.n) = (a.value(), b.value(), (0, lm[1]), (lm[1], 0));
            }
            (StateSpec::TwoTerm { a, b, m: lm, n: ln }, OracleId::ZeroT00mm) => {
                if !(lm == &[0, 0] && ln[0] == ln[1] && ln[0] > 0) {
                    return mismatch("state is not a|00⟩ + b|mm⟩");
                }
                (args.a, args.b, args.m, args.n) = (a.value(), b.value(), (0, 0), (ln[0], ln[0]));
            }
            _ => return mismatch("initial state belongs to a different family"),
        }
        Ok(args)
    }
}

/// Sets `a.b.c = value` in a TOML table. The value is parsed as TOML and kept
/// as a bare string if that fails.
fn apply_override(table: &mut toml::Table, item: &str) -> Result<()> {
    let (key, raw) =
        item.split_once('=').ok_or_else(|| CliError::Config(format!("override '{item}' is not key=value")))?;
    let value = parse_value(raw.trim());
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("malformed override key '{key}'")));
    }
    let (last, path) = parts.split_last().expect("split yields at least one part");
    let mut cursor = table;
    for p in path {
        let entry = cursor.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cursor =
            entry.as_table_mut().ok_or_else(|| CliError::Config(format!("override '{key}': '{p}' is not a table")))?;
    }
    cursor.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
