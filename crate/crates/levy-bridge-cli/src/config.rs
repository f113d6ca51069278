use levy_bridge::io::SCHEMA_VERSION;
use levy_bridge::{Grid1D, NoiseKind};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const EXPERIMENTS: [&str; 7] = ["evolve", "bridge", "simulate", "markov-test", "kernels", "jumprate", "acceptance"];

/// Complete description of one run; together with the binary version it fixes every output byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: String,
    pub kind: Option<String>,
    pub m: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub grid_n: Option<usize>,
    /// [x_min, x_max]
    pub domain: Option<[f64; 2]>,
    pub times: Vec<f64>,
    pub seed: u64,
    pub eps: Option<f64>,
    pub paths: Option<usize>,
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    pub psi0: Option<String>,
    pub s: Vec<f64>,
    pub p_range: Option<[f64; 2]>,
    pub points: Option<usize>,
    pub set: Option<[f64; 2]>,
    pub band: Option<[f64; 2]>,
    pub mode: Option<String>,
    pub problem: Option<String>,
    pub criteria: Vec<usize>,
    pub tolerances: BTreeMap<String, f64>,
    pub output_dir: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: String::new(),
            kind: None,
            m: 1.0,
            d: 1.0,
            grid_n: None,
            domain: None,
            times: Vec::new(),
            seed: 0,
            eps: None,
            paths: None,
            horizon: None,
            psi0: None,
            s: Vec::new(),
            p_range: None,
            points: None,
            set: None,
            band: None,
            mode: None,
            problem: None,
            criteria: Vec::new(),
            tolerances: BTreeMap::new(),
            output_dir: "out".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let c: Self = serde_json::from_str(text).map_err(|e| ConfigError(format!("config parse error: {e}")))?;
        if c.schema_version != SCHEMA_VERSION {
            return Err(ConfigError(format!("unsupported schema_version {} (expected {SCHEMA_VERSION})", c.schema_version)));
        }
        if !EXPERIMENTS.contains(&c.experiment.as_str()) {
            return Err(ConfigError(format!("unknown experiment `{}`; expected one of {}", c.experiment, EXPERIMENTS.join(", "))));
        }
        Ok(c)
    }

    pub fn tol(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    pub fn noise_kind(&self, default: &str) -> Result<NoiseKind, ConfigError> {
        let k = match self.kind.as_deref().unwrap_or(default) {
            "gaussian" | "heat" => NoiseKind::Gaussian { d: self.d },
            "cauchy" => NoiseKind::Cauchy,
            "relativistic" => NoiseKind::Relativistic { m: self.m },
            other => return Err(ConfigError(format!("unknown kind `{other}`"))),
        };
        k.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(k)
    }

    /// Grid from `domain`/`grid_n`, falling back to the given default.
    pub fn grid(&self, default: Grid1D) -> Result<Grid1D, ConfigError> {
        let [a, b] = self.domain.unwrap_or([default.x_min, default.x_max]);
        Grid1D::new(a, b, self.grid_n.unwrap_or(default.n)).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn times_or(&self, default: &[f64]) -> Vec<f64> {
        if self.times.is_empty() {
            default.to_vec()
        } else {
            self.times.clone()
        }
    }
}

pub fn default_grid(kind: NoiseKind) -> Grid1D {
    match kind {
        NoiseKind::Gaussian { .. } => Grid1D { x_min: -40.0, x_max: 40.0, n: 1024 },
        NoiseKind::Cauchy => Grid1D::default_cauchy(),
        NoiseKind::Relativistic { .. } => Grid1D::default_relativistic(),
    }
}

/// `a,b` or a single half-width `L` (meaning `-L,L`).
pub fn parse_domain(v: &[f64]) -> Result<[f64; 2], ConfigError> {
    match v {
        [l] => Ok([-l.abs(), l.abs()]),
        [a, b] => Ok([*a, *b]),
        _ => Err(ConfigError("domain takes `L` or `a,b`".into())),
    }
}
