//! Run configuration: JSON config file, then command-line overrides.
//!
//! The output directory and thread count are resolved here but never echoed
//! into reports, so outputs do not depend on where or how wide a run was.

use std::fs;
use std::path::{Path, PathBuf};

use schatten_core::funcalc::Descriptor;
use schatten_core::{EstimatorConfig, KernelParams};
use serde::{Deserialize, Serialize};

use crate::error::{io_error, LabError, LabResult};

pub const OUT_ENV: &str = "SCHATTEN_LAB_OUT";
pub const DEFAULT_OUT: &str = "schatten-lab-out";

pub const DEFAULT_P_GRID: [f64; 7] = [1.1, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0];
pub const DEFAULT_N_GRID: [usize; 4] = [2, 4, 8, 16];
pub const DEFAULT_S_GRID: [f64; 9] = [-20.0, -10.0, -5.0, -1.0, 0.0, 1.0, 5.0, 10.0, 20.0];

/// The stock functions: identity, `|x|`, a kinked piecewise-linear map and
/// `sin`.
pub fn stock_functions() -> Vec<Descriptor> {
    vec![
        Descriptor::Identity,
        Descriptor::AbsoluteValue,
        Descriptor::PiecewiseLinear {
            breakpoints: vec![-1.0, 0.5, 2.0],
            slopes: vec![0.3, -1.0, 0.8, 1.0],
            offset: 0.0,
        },
        Descriptor::ScaledSine {
            amplitude: 1.0,
            frequency: 1.0,
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteParams {
    /// Exponents of the Lipschitz, decomposition and consistency cells. Values
    /// outside `(1, ∞)` only enter the Lipschitz suite, as contrast rows.
    #[serde(with = "exponents")]
    pub p_grid: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub functions: Vec<Descriptor>,
    /// Largest perturbation size, relative to the spectral scale of `A`.
    pub perturbation_scale: f64,
    /// `ε` used to make monotone parts strictly increasing before decomposing f.
    pub strictify_epsilon: f64,
    pub growth_p_grid: Vec<f64>,
    pub growth_n_grid: Vec<usize>,
    pub s_grid: Vec<f64>,
    /// Size of the growth fit behind each `C_p` bound.
    pub bound_growth_n: usize,
    pub reconstruction_cases: usize,
    pub reduction_cases: usize,
    pub restriction_pairs: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            p_grid: DEFAULT_P_GRID.to_vec(),
            n_grid: DEFAULT_N_GRID.to_vec(),
            trials: 100,
            functions: stock_functions(),
            perturbation_scale: 1.0,
            strictify_epsilon: 1e-6,
            growth_p_grid: vec![1.5, 2.0, 4.0],
            growth_n_grid: vec![8, 16, 32],
            s_grid: DEFAULT_S_GRID.to_vec(),
            bound_growth_n: 16,
            reconstruction_cases: 20,
            reduction_cases: 10,
            restriction_pairs: 20,
        }
    }
}

impl SuiteParams {
    pub fn validate(&self) -> LabResult<()> {
        let bad = |msg: &str| Err(LabError::Config(msg.to_owned()));
        if self.p_grid.is_empty() || self.n_grid.is_empty() || self.functions.is_empty() {
            return bad("p_grid, n_grid and functions must be non-empty");
        }
        if self.p_grid.iter().any(|&p| !(p >= 1.0)) {
            return bad("every p must be at least 1");
        }
        if self
            .growth_p_grid
            .iter()
            .any(|&p| !(p > 1.0 && p.is_finite()))
        {
            return bad("growth exponents must lie in (1, inf)");
        }
        if self
            .n_grid
            .iter()
            .chain(&self.growth_n_grid)
            .any(|&n| n == 0)
            || self.bound_growth_n == 0
        {
            return bad("matrix sizes must be positive");
        }
        if self.trials == 0 {
            return bad("trials must be positive");
        }
        if !(self.perturbation_scale > 0.0 && self.perturbation_scale.is_finite()) {
            return bad("perturbation_scale must be positive");
        }
        if !(self.strictify_epsilon > 0.0 && self.strictify_epsilon.is_finite()) {
            return bad("strictify_epsilon must be positive");
        }
        if self.s_grid.is_empty() || self.s_grid.iter().any(|s| !s.is_finite()) {
            return bad("s_grid must be non-empty and finite");
        }
        Ok(())
    }

    /// `p_grid` restricted to `(1, ∞)`.
    pub fn interior_p_grid(&self) -> Vec<f64> {
        self.p_grid
            .iter()
            .copied()
            .filter(|&p| p > 1.0 && p.is_finite())
            .collect()
    }
}

/// Exponent lists in JSON: numbers, with `"inf"` standing for `p = ∞`.
mod exponents {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Exponent {
        Finite(f64),
        Named(String),
    }

    pub fn serialize<S: Serializer>(values: &[f64], serializer: S) -> Result<S::Ok, S::Error> {
        values
            .iter()
            .map(|&p| {
                if p.is_finite() {
                    Exponent::Finite(p)
                } else {
                    Exponent::Named("inf".into())
                }
            })
            .collect::<Vec<_>>()
            .serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Exponent>::deserialize(deserializer)?
            .into_iter()
            .map(|e| match e {
                Exponent::Finite(p) => Ok(p),
                Exponent::Named(name) => super::parse_exponent(&name).map_err(D::Error::custom),
            })
            .collect()
    }
}

/// Parses an exponent, accepting `inf` for `p = ∞`.
pub fn parse_exponent(text: &str) -> Result<f64, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        other => other
            .parse::<f64>()
            .map_err(|e| format!("bad exponent {text:?}: {e}")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
    pub estimator: EstimatorConfig,
    pub kernel: KernelParams,
    pub suite: SuiteParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            out: None,
            threads: None,
            estimator: EstimatorConfig::default(),
            kernel: KernelParams::default(),
            suite: SuiteParams::default(),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> LabResult<Self> {
        let text = fs::read_to_string(path).map_err(io_error(path))?;
        serde_json::from_str(&text)
            .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
    }

    /// `--out`, then the config file, then `$SCHATTEN_LAB_OUT`, then
    /// `./schatten-lab-out`.
    pub fn output_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    pub fn validate(&self) -> LabResult<()> {
        self.estimator.validate()?;
        self.kernel.validate()?;
        self.suite.validate()?;
        if self.threads == Some(0) {
            return Err(LabError::Config("threads must be positive".into()));
        }
        Ok(())
    }

    /// The resolved configuration as echoed into reports.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_fills_defaults() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"seed": 7, "estimator": {"starts": 4}, "suite": {"n_grid": [3]}}"#,
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.estimator.starts, 4);
        assert_eq!(cfg.estimator.max_iters, 500);
        assert_eq!(cfg.suite.n_grid, vec![3]);
        assert_eq!(cfg.suite.trials, 100);
    }

    #[test]
    fn echo_round_trips_without_out_and_threads() {
        let cfg = RunConfig {
            seed: 3,
            out: Some("elsewhere".into()),
            threads: Some(4),
            ..RunConfig::default()
        };
        let echo = cfg.echo();
        assert!(echo.get("out").is_none() && echo.get("threads").is_none());
        let back: RunConfig = serde_json::from_value(echo).unwrap();
        assert_eq!(
            back,
            RunConfig {
                out: None,
                threads: None,
                ..cfg
            }
        );
    }

    #[test]
    fn functions_parse_from_descriptors() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"suite": {"functions": [{"kind": "absolute-value"}, {"kind": "piecewise-linear", "breakpoints": [0], "slopes": [0, 1]}]}}"#,
        )
        .unwrap();
        assert_eq!(cfg.suite.functions.len(), 2);
    }

    #[test]
    fn infinite_exponent_survives_the_echo() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"suite": {"p_grid": [1, 2.5, "inf"]}}"#).unwrap();
        assert_eq!(cfg.suite.p_grid, vec![1.0, 2.5, f64::INFINITY]);
        assert_eq!(
            cfg.echo()["suite"]["p_grid"],
            serde_json::json!([1.0, 2.5, "inf"])
        );
        assert_eq!(cfg.suite.interior_p_grid(), vec![2.5]);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_values() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"sed": 1}"#).is_err());
        let mut cfg = RunConfig::default();
        cfg.suite.p_grid = vec![0.5];
        assert!(cfg.validate().is_err());
    }
}
