use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use entdyn_core::analytic::{
    bell_dephasing, bell_infinite_temperature, bell_thermal, bell_zero_temperature, two_term_dephasing, zero_t_00mm,
    zero_t_0m_m0, BellKind, ThermalParams,
};
use entdyn_core::C64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Closed-form curves that can be evaluated on a grid or attached to a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleId {
    BellDephasing,
    BellZeroTemperature,
    BellThermal,
    BellInfiniteTemperature,
    TwoTermDephasing,
    #[serde(rename = "zero_t_0m_m0")]
    ZeroT0mM0,
    #[serde(rename = "zero_t_00mm")]
    ZeroT00mm,
}

impl OracleId {
    pub const ALL: [OracleId; 7] = [
        Self::BellDephasing,
        Self::BellZeroTemperature,
        Self::BellThermal,
        Self::BellInfiniteTemperature,
        Self::TwoTermDephasing,
        Self::ZeroT0mM0,
        Self::ZeroT00mm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::BellDephasing => "bell_dephasing",
            Self::BellZeroTemperature => "bell_zero_temperature",
            Self::BellThermal => "bell_thermal",
            Self::BellInfiniteTemperature => "bell_infinite_temperature",
            Self::TwoTermDephasing => "two_term_dephasing",
            Self::ZeroT0mM0 => "zero_t_0m_m0",
            Self::ZeroT00mm => "zero_t_00mm",
        }
    }

    /// Value at time `t`.
    pub fn eval(self, args: &OracleArgs, t: f64) -> Result<f64> {
        let g = args.gamma;
        Ok(match self {
            Self::BellDephasing => bell_dephasing(t, g),
            Self::BellZeroTemperature => bell_zero_temperature(args.kind, t, g),
            Self::BellThermal => bell_thermal(args.kind, t, ThermalParams::new(g, args.nbar)?)?,
            Self::BellInfiniteTemperature => bell_infinite_temperature(t, g),
            Self::TwoTermDephasing => two_term_dephasing(args.a, args.b, args.m, args.n, t, g),
            Self::ZeroT0mM0 => zero_t_0m_m0(args.a, args.b, args.level()?, t, g),
            Self::ZeroT00mm => zero_t_00mm(args.a, args.b, args.level()?, t, g),
        })
    }

    pub fn eval_grid(self, args: &OracleArgs, times: &[f64]) -> Result<Vec<f64>> {
        times.iter().map(|&t| self.eval(args, t)).collect()
    }
}

impl fmt::Display for OracleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OracleId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|o| o.name() == s).ok_or_else(|| CliError::Config(format!("unknown oracle '{s}'")))
    }
}

/// Parameters shared by all oracles. Each formula reads only the ones it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleArgs {
    pub kind: BellKind,
    /// `Γ`, or `Γ̃` for the infinite-temperature curve.
    pub gamma: f64,
    pub nbar: f64,
    pub a: C64,
    pub b: C64,
    /// Local levels `(m₁, m₂)` of the first term.
    pub m: (usize, usize),
    /// Local levels `(n₁, n₂)` of the second term.
    pub n: (usize, usize),
}

impl Default for OracleArgs {
    fn default() -> Self {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { kind: BellKind::PsiPlus, gamma: 1.0, nbar: 0.0, a: s, b: s, m: (0, 1), n: (1, 0) }
    }
}

impl OracleArgs {
    /// The single excited level `m` of the `|0m⟩+|m0⟩` and `|00⟩+|mm⟩` families.
    fn level(&self) -> Result<usize> {
        match (self.m, self.n) {
            ((0, m), (k, 0)) if m == k && m > 0 => Ok(m),
            ((0, 0), (m, k)) if m == k && m > 0 => Ok(m),
            _ => Err(CliError::Config(format!("levels {:?}, {:?} do not name a single level m", self.m, self.n))),
        }
    }

    /// Reads `key=value` pairs such as `gamma=1,nbar=0.1,kind=phi_plus,a=0.5,m=2`.
    ///
    /// `m` alone sets the excited level of the zero-temperature families.
    /// `a` and `b` are real, and `b` defaults to `√(1−a²)` when only `a` is given.
    pub fn from_pairs(pairs: &BTreeMap<String, String>, oracle: OracleId) -> Result<Self> {
        let mut args = Self::default();
        let num = |k: &str, v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| CliError::Config(format!("parameter {k}: '{v}' is not a number")))
        };
        let idx = |k: &str, v: &str| -> Result<usize> {
            v.parse::<usize>().map_err(|_| CliError::Config(format!("parameter {k}: '{v}' is not a level index")))
        };
        let mut b_given = false;
        for (k, v) in pairs {
            match k.as_str() {
                "gamma" | "gamma_tilde" => args.gamma = num(k, v)?,
                "nbar" => args.nbar = num(k, v)?,
                "kind" | "bell" => {
                    args.kind =
                        BellKind::from_name(v).ok_or_else(|| CliError::Config(format!("unknown Bell state '{v}'")))?
                }
                "a" => args.a = C64::new(num(k, v)?, 0.0),
                "b" => {
                    args.b = C64::new(num(k, v)?, 0.0);
                    b_given = true;
                }
                "m" => {
                    let m = idx(k, v)?;
                    (args.m, args.n) = match oracle {
                        OracleId::ZeroT00mm => ((0, 0), (m, m)),
                        _ => ((0, m), (m, 0)),
                    };
                }
                "m1" => args.m.0 = idx(k, v)?,
                "m2" => args.m.1 = idx(k, v)?,
                "n1" => args.n.0 = idx(k, v)?,
                "n2" => args.n.1 = idx(k, v)?,
                other => return Err(CliError::Config(format!("unknown oracle parameter '{other}'"))),
            }
        }
        if pairs.contains_key("a") && !b_given {
            let rest = 1.0 - args.a.norm_sqr();
            if rest < 0.0 {
                return Err(CliError::Config(format!("|a| = {} exceeds 1", args.a.norm())));
            }
            args.b = C64::new(rest.sqrt(), 0.0);
        }
        Ok(args)
    }
}

/// Splits `k=v,k=v` into a map; an empty string gives an empty map.
pub fn parse_pairs(s: &str) -> Result<BTreeMap<String, String>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::Config(format!("expected key=value, got '{p}'")))
        })
        .collect()
}
