//! Suite configuration, read from TOML.
//!
//! ```toml
//! suite = "taylor-order"   # optional; `--suite` wins
//! seed = 7
//! format = "json"          # or "csv"
//!
//! [chart]                  # optional; suites fall back to their own sweep
//! name = "pseudo-sphere"   # flat | stereographic | pseudo-sphere | warped | user
//! K = 1.0
//! dim = 2
//! signature = [1, 1]
//!
//! [tolerances]
//! algebraic = 1e-12
//! differential = 1e-6
//!
//! [sweep]
//! curvatures = [1.0, -1.0]
//! dims = [2, 3]
//! signatures = ["euclidean", "lorentzian"]
//!
//! [algebra]
//! p = 1
//! q = 3
//! ```
//!
//! A user chart lists its metric components as expressions:
//!
//! ```toml
//! [chart]
//! name = "user"
//! dim = 2
//! signature = [1, 1]
//! coordinates = ["x", "y"]
//! constants = { eps = 0.4 }
//! components = [["1 + eps*y^2", "0"], ["0", "1 + eps*x^2"]]
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::CliError;

/// Environment variable overriding the default algebraic tolerance.
pub const TOLERANCE_ENV: &str = "RNC_DEFAULT_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown format '{other}' (json or csv)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignatureKind {
    Euclidean,
    Lorentzian,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub name: String,
    #[serde(default, alias = "K", alias = "k")]
    pub curvature: Option<f64>,
    pub dim: Option<usize>,
    pub signature: Option<Vec<i64>>,
    /// Base point for normal charts.
    pub origin: Option<Vec<f64>>,
    /// Strength of the warped chart.
    pub eps: Option<f64>,
    pub coordinates: Option<Vec<String>>,
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
    pub components: Option<Vec<Vec<String>>>,
    /// Half-width of the box sampled when validating a user chart.
    pub sample_radius: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    pub algebraic: Option<f64>,
    pub differential: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub curvatures: Option<Vec<f64>>,
    pub dims: Option<Vec<usize>>,
    pub signatures: Option<Vec<SignatureKind>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub p: usize,
    pub q: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub format: Format,
    pub chart: Option<ChartSpec>,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    #[serde(default)]
    pub sweep: Sweep,
    pub algebra: Option<AlgebraSpec>,
}

fn default_seed() -> u64 {
    0x5eed
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suite: None,
            seed: default_seed(),
            format: Format::Json,
            chart: None,
            tolerances: ToleranceSpec::default(),
            sweep: Sweep::default(),
            algebra: None,
        }
    }
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [("algebraic", self.tolerances.algebraic), ("differential", self.tolerances.differential)] {
            if let Some(t) = v {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(CliError::Config(format!("tolerance {name} must be positive, got {t}")));
                }
            }
        }
        if let Some(a) = self.algebra {
            if a.p + a.q < 2 || a.p + a.q > 8 {
                return Err(CliError::Config(format!("algebra needs 2 ≤ p+q ≤ 8, got {}", a.p + a.q)));
            }
        }
        Ok(())
    }

    /// Configured value, else `RNC_DEFAULT_TOL`, else the library default.
    pub fn algebraic_tolerance(&self) -> Result<f64, CliError> {
        if let Some(t) = self.tolerances.algebraic {
            return Ok(t);
        }
        match std::env::var(TOLERANCE_ENV) {
            Ok(s) => s
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|t| *t > 0.0 && t.is_finite())
                .ok_or_else(|| CliError::Config(format!("{TOLERANCE_ENV}='{s}' is not a positive number"))),
            Err(_) => Ok(rnc_core::tolerance::ALGEBRAIC),
        }
    }

    pub fn differential_tolerance(&self) -> f64 {
        self.tolerances.differential.unwrap_or(rnc_core::tolerance::DIFFERENTIAL)
    }
}
