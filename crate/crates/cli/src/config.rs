//! TOML run configuration. Unknown keys are rejected everywhere.

use serde::{Deserialize, Serialize};

use hardball::dynamics::{ProcessKind, SimParams, State};
use hardball::estimators::AnnealSegment;
use hardball::geometry::{Configuration, ReducedConfiguration};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub params: ParamsConfig,
    pub simulate: Option<SimulateConfig>,
    pub invariant: Option<InvariantConfig>,
    pub hit: Option<HitConfig>,
    pub gap: Option<GapConfig>,
    pub anneal: Option<AnnealConfig>,
    pub verify: Option<VerifyConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub a: f64,
    #[serde(default = "one")]
    pub r: f64,
    pub d: usize,
    pub n: usize,
    pub dt: Option<f64>,
    #[serde(default = "one")]
    pub t_max: f64,
    #[serde(default)]
    pub seed: u64,
    pub max_projection_sweeps: Option<usize>,
    pub contact_band: Option<f64>,
    pub feasibility_tol: Option<f64>,
    pub strict_dt: Option<bool>,
}

fn one() -> f64 {
    1.0
}

impl ParamsConfig {
    pub fn to_params(&self) -> SimParams {
        let mut p = SimParams::new(self.a, self.r, self.d, self.n).with_t_max(self.t_max).with_seed(self.seed);
        if let Some(dt) = self.dt {
            p = p.with_dt(dt);
        }
        if let Some(s) = self.max_projection_sweeps {
            p.max_projection_sweeps = s;
        }
        if let Some(b) = self.contact_band {
            p.contact_band = b;
        }
        if let Some(t) = self.feasibility_tol {
            p.feasibility_tol = t;
        }
        if let Some(s) = self.strict_dt {
            p.strict_dt = s;
        }
        p
    }
}

/// Initial state of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitConfig {
    Scalar { value: f64 },
    /// Ball centers; recentered for the reduced system.
    Points { points: Vec<Vec<f64>> },
    /// Unit-side contact triangle (three balls).
    Equilateral,
    /// Isosceles three-ball state with the given energy.
    Stretched { energy: f64 },
    Median { u1: Vec<f64>, u23: Vec<f64> },
}

impl InitConfig {
    pub fn build(&self, kind: ProcessKind, p: &SimParams) -> hardball::Result<State> {
        use hardball::Error;
        let reduced = || -> hardball::Result<ReducedConfiguration> {
            match self {
                InitConfig::Points { points } => ReducedConfiguration::centered(points, p.r),
                InitConfig::Equilateral => ReducedConfiguration::equilateral(p.d, p.r),
                InitConfig::Stretched { energy } => ReducedConfiguration::stretched_triangle(p.d, p.r, *energy),
                _ => Err(Error::Structural(format!("init {self:?} does not describe balls"))),
            }
        };
        match kind {
            ProcessKind::Full => match self {
                InitConfig::Points { points } => Ok(State::Full(Configuration::new(points, p.r)?)),
                _ => Ok(State::Full(reduced()?.embed())),
            },
            ProcessKind::Reduced => Ok(State::Reduced(reduced()?)),
            ProcessKind::MedianPair => match self {
                InitConfig::Median { u1, u23 } => Ok(State::MedianPair {
                    u1: u1.clone(),
                    u23: u23.clone(),
                }),
                _ => Err(Error::Structural("the median pair needs a median init".into())),
            },
            _ => match self {
                InitConfig::Scalar { value } => Ok(State::Scalar(*value)),
                _ => Err(Error::Structural("scalar processes need a scalar init".into())),
            },
        }
    }
}

/// `process` is one of full, reduced, radial, affine, reflected_drift_bm, u_squared, median_pair.
pub fn process_kind(name: &str, c: Option<f64>) -> Result<ProcessKind, String> {
    Ok(match name {
        "full" => ProcessKind::Full,
        "reduced" => ProcessKind::Reduced,
        "radial" => ProcessKind::Radial,
        "affine" => ProcessKind::Affine,
        "reflected_drift_bm" => ProcessKind::ReflectedDriftBm {
            c: c.ok_or("reflected_drift_bm needs the drift c")?,
        },
        "u_squared" => ProcessKind::USquared,
        "median_pair" => ProcessKind::MedianPair,
        other => return Err(format!("unknown process {other:?}")),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub process: String,
    pub c: Option<f64>,
    pub init: InitConfig,
    #[serde(default = "one_u64")]
    pub stride: u64,
    pub cluster_radius: Option<f64>,
    #[serde(default = "one_usize")]
    pub replicates: usize,
}

fn one_u64() -> u64 {
    1
}

fn one_usize() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantConfig {
    pub process: String,
    pub c: Option<f64>,
    pub init: InitConfig,
    pub burn_in: f64,
    pub n_samples: usize,
    #[serde(default = "one_u64")]
    pub stride: u64,
    #[serde(default = "one_usize")]
    pub chains: usize,
    #[serde(default = "default_bins")]
    pub bins: usize,
    /// Energy-excess threshold reported for three-ball states.
    #[serde(default = "default_eta")]
    pub eta: f64,
}

fn default_bins() -> usize {
    hardball::estimators::DEFAULT_BINS
}

fn default_eta() -> f64 {
    0.5
}

fn default_conf() -> f64 {
    0.99
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case", deny_unknown_fields)]
pub enum HitConfig {
    /// Radial process hitting contact.
    Packing {
        init: f64,
        replicates: usize,
        grid: Vec<f64>,
        #[serde(default = "default_conf")]
        conf: f64,
    },
    /// Reduced three-ball system hitting the R-cluster set.
    Cluster {
        init: InitConfig,
        cluster_radius: f64,
        lambda: f64,
        replicates: usize,
        grid: Vec<f64>,
        #[serde(default = "default_conf")]
        conf: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapConfig {
    pub a: Vec<f64>,
    pub window: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnealConfig {
    pub init: InitConfig,
    pub schedule: Vec<AnnealSegment>,
    pub replicates: usize,
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Contact tolerance for two balls, as a fraction of `r`.
    #[serde(default = "default_contact_fraction")]
    pub contact_fraction: f64,
}

fn default_contact_fraction() -> f64 {
    0.01
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Optional short run whose reflection audit must be clean.
    pub process: Option<String>,
    pub c: Option<f64>,
    pub init: Option<InitConfig>,
    #[serde(default = "one_usize")]
    pub replicates: usize,
}
