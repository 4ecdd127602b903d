//! The JSON run configuration.

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// A complex number as `[re, im]`.
pub type Cx = [f64; 2];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub ensemble: EnsembleSpec,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub giambelli: Option<GiambelliSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<RatioSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSpec>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        if cfg.ensemble.a().is_empty() {
            return Err(CliError::Config("ensemble.a must not be empty".into()));
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnsembleSpec {
    GueExt { a: Vec<f64> },
    ChgueExt { a: Vec<f64>, nu: f64 },
}

impl EnsembleSpec {
    pub fn a(&self) -> &[f64] {
        match self {
            Self::GueExt { a } | Self::ChgueExt { a, .. } => a,
        }
    }

    pub fn nu(&self) -> Option<f64> {
        match self {
            Self::GueExt { .. } => None,
            Self::ChgueExt { nu, .. } => Some(*nu),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    /// Points on the auxiliary `s`-path; the family default when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes_line: Option<usize>,
    /// Trapezoidal points of the `circle` ratio provider.
    pub nodes_circle: usize,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self { nodes_line: None, nodes_circle: 64, mc_samples: 100_000, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative gap between the two partition-function formulas.
    pub zcheck: f64,
    /// Relative Giambelli and h-determinant gaps.
    pub giambelli: f64,
    /// Relative agreement with the quadrature oracle and equal-ratio provider.
    pub agreement: f64,
    /// Relative agreement of the special-case paths with the general formula.
    pub special: f64,
    /// Monte Carlo agreement, in standard errors.
    pub mc_sigmas: f64,
    /// Absolute deviation of the kernel trace from `N`.
    pub kernel_trace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { zcheck: 1e-8, giambelli: 1e-8, agreement: 1e-6, special: 1e-8, mc_sigmas: 3.0, kernel_trace: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub format: Format,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GiambelliSpec {
    #[serde(default = "default_max_boxes")]
    pub max_boxes: usize,
    /// Particle numbers; each run uses the first `N` entries of `ensemble.a`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
}

fn default_max_boxes() -> usize {
    6
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provider {
    /// The general residue-sum formula; always the reference.
    Formula,
    /// Equal-ratio determinant of single ratios (needs `M = L`).
    EqualRatio,
    /// Product determinant (needs `L = 0`).
    Product,
    /// Bordered determinant (needs `L = 1`, `M ≥ 2`).
    Bordered,
    /// Inverse moment path (needs `M = 0`, `L = 1`).
    Inverse,
    /// Contour integrals around the parameters on a circle.
    Circle,
    Quadrature,
    Mc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioSpec {
    #[serde(default)]
    pub zs: Vec<Cx>,
    #[serde(default)]
    pub ys: Vec<Cx>,
    /// Every applicable provider except `circle` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub providers: Option<Vec<Provider>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match *self {
            Self::Values(ref v) => v.clone(),
            Self::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![start],
                _ => (0..count).map(|k| start + (stop - start) * k as f64 / (count - 1) as f64).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SMode {
    Quadrature,
    Transform,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub x: Grid,
    pub y: Grid,
    #[serde(default = "yes")]
    pub trace: bool,
    /// Quadrature for GUE, the exact transform for chiral GUE when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_integration: Option<SMode>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Mc,
    Quadrature,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    /// Optional ratio `∏ D(z) / ∏ D(y)` estimated next to the mean trace.
    #[serde(default)]
    pub zs: Vec<Cx>,
    #[serde(default)]
    pub ys: Vec<Cx>,
}

fn default_methods() -> Vec<Method> {
    vec![Method::Mc, Method::Quadrature]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_sections() {
        let cfg = RunConfig::parse(r#"{"schema_version": 1, "ensemble": {"kind": "gue_ext", "a": [0.1]}}"#).unwrap();
        assert_eq!(cfg.numerics.mc_samples, 100_000);
        assert_eq!(cfg.tolerances.mc_sigmas, 3.0);
        assert_eq!(cfg.output.format, Format::Json);
        assert!(cfg.ratio.is_none());
    }

    #[test]
    fn ensemble_kinds() {
        let cfg =
            RunConfig::parse(r#"{"schema_version": 1, "ensemble": {"kind": "chgue_ext", "a": [0.1], "nu": 2}}"#).unwrap();
        assert_eq!(cfg.ensemble.nu(), Some(2.0));
        assert!(RunConfig::parse(r#"{"schema_version": 1, "ensemble": {"kind": "gue", "a": [0.1]}}"#).is_err());
        assert!(RunConfig::parse(r#"{"schema_version": 1, "ensemble": {"kind": "gue_ext", "a": []}}"#).is_err());
    }

    #[test]
    fn grids() {
        let g: Grid = serde_json::from_str(r#"{"start": 0, "stop": 1, "count": 5}"#).unwrap();
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g: Grid = serde_json::from_str("[2, 3]").unwrap();
        assert_eq!(g.points(), vec![2.0, 3.0]);
        let g: Grid = serde_json::from_str(r#"{"start": 0, "stop": 1, "count": 1}"#).unwrap();
        assert_eq!(g.points(), vec![0.0]);
    }
}
