//! Run configuration: one TOML file, strict schema, every section mirrored
//! by a struct that rejects unknown keys.

use std::path::{Path, PathBuf};

use fracdiff_core::forward::{
    BoundaryData, BoundaryProfile, OrderSpectrum, Scenario, TimeGrid, TimeOperator, WeightFunction,
};
use fracdiff_core::order_recovery::SpaceTimeOrders;
use fracdiff_core::spectral::{EigenSystem, ModalCoefficients};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub domain: DomainConfig,
    pub initial: InitialConfig,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub space: SpaceConfig,
    pub sensor: SensorConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub inversion: InversionConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    Single {
        alpha: f64,
    },
    Spacetime {
        alpha: f64,
        gamma: f64,
    },
    Multiterm {
        alphas: Vec<f64>,
        weights: Vec<f64>,
    },
    /// Piecewise-linear μ; `nodes` defaults to a uniform partition of [0, 1].
    Distributed {
        mu: Vec<f64>,
        #[serde(default)]
        nodes: Option<Vec<f64>>,
        #[serde(default = "default_quad_order")]
        quad_order: usize,
    },
}

fn default_quad_order() -> usize {
    16
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub length: f64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self { length: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialConfig {
    /// amplitude · φ_k
    Mode {
        k: usize,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Smooth bump of the given height supported on (center ± width/2).
    Bump {
        center: f64,
        width: f64,
        height: f64,
    },
    /// Σ c_i x^i
    Polynomial { coefficients: Vec<f64> },
    /// Piecewise-linear through values at uniform nodes of [0, L].
    Samples { values: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    #[serde(default)]
    pub left: ProfileConfig,
    #[serde(default)]
    pub right: ProfileConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileConfig {
    #[default]
    Zero,
    Constant {
        value: f64,
    },
    Bump {
        start: f64,
        end: f64,
        height: f64,
    },
}

impl From<ProfileConfig> for BoundaryProfile {
    fn from(p: ProfileConfig) -> Self {
        match p {
            ProfileConfig::Zero => BoundaryProfile::Zero,
            ProfileConfig::Constant { value } => BoundaryProfile::Constant(value),
            ProfileConfig::Bump { start, end, height } => {
                BoundaryProfile::Bump { start, end, height }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "spacing", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TimeConfig {
    Uniform {
        horizon: f64,
        steps: usize,
    },
    /// t_j = T (j/K)^exponent
    Graded {
        horizon: f64,
        steps: usize,
        exponent: f64,
    },
    /// 0 followed by log-spaced times from t_min to the horizon.
    Log {
        t_min: f64,
        horizon: f64,
        per_decade: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub modes: usize,
    /// Quadrature nodes for projecting the initial data.
    #[serde(default = "default_quad_points")]
    pub quad_points: usize,
    /// Number of uniformly spaced x values in the solution CSV (endpoints included).
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_quad_points() -> usize {
    256
}

fn default_points() -> usize {
    11
}

impl Default for SpaceConfig {
    fn default() -> Self {
        Self {
            modes: 16,
            quad_points: default_quad_points(),
            points: default_points(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorConfig {
    pub x0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default)]
    pub level: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    42
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            level: 0.0,
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out")]
    pub dir: PathBuf,
    #[serde(default = "default_true")]
    pub solution: bool,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_true() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_out(),
            solution: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ShortTime,
    LongTime,
    Spacetime,
    Multiterm,
    Weight,
    /// Multi-term fits for ℓ = 1, 2, 3 side by side.
    Sweep,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ShortTime => "short-time",
            Method::LongTime => "long-time",
            Method::Spacetime => "spacetime",
            Method::Multiterm => "multiterm",
            Method::Weight => "weight",
            Method::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InversionConfig {
    #[serde(default)]
    pub method: Option<Method>,
    /// Observation CSV; defaults to `<out>/observation.csv`.
    #[serde(default)]
    pub data: Option<PathBuf>,
    #[serde(default = "default_ell")]
    pub ell: usize,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "default_starts")]
    pub starts: usize,
    /// Node count of the recovered weight.
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    /// The internal model keeps every `coarsen`-th time node of the data grid.
    #[serde(default = "default_coarsen")]
    pub coarsen: usize,
    /// Modes of the internal model; defaults to `space.modes`.
    #[serde(default)]
    pub modes: Option<usize>,
}

fn default_ell() -> usize {
    2
}

fn default_starts() -> usize {
    8
}

fn default_nodes() -> usize {
    6
}

fn default_coarsen() -> usize {
    1
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            method: None,
            data: None,
            ell: default_ell(),
            epsilon: 0.0,
            starts: default_starts(),
            nodes: default_nodes(),
            coarsen: default_coarsen(),
            modes: None,
        }
    }
}

fn field<T>(name: &str, r: fracdiff_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Config(format!("{name}: {e}")))
}

fn check(name: &str, ok: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name}: {}", msg())))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Canonical TOML form; the hash and the reproducibility contract refer to it.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        hex(&Sha256::digest(self.canonical().as_bytes()))
    }

    /// Builds every core object once so that errors name the offending field.
    pub fn validate(&self) -> Result<(), CliError> {
        let homogeneous = self.boundary_data()?.is_homogeneous();
        match self.model {
            ModelConfig::Single { alpha } => {
                check("model.alpha", alpha > 0.0 && alpha <= 1.0, || {
                    format!("time order must lie in (0, 1], got {alpha}")
                })?;
                if !homogeneous {
                    self.operator()?;
                }
            }
            ModelConfig::Spacetime { alpha, gamma } => {
                field("model", SpaceTimeOrders::new(alpha, gamma))?;
                check("boundary", homogeneous, || {
                    "the space-time model supports homogeneous boundary data only".into()
                })?;
            }
            _ => {
                self.operator()?;
            }
        }
        self.scenario()?;
        check(
            "noise.level",
            self.noise.level >= 0.0 && self.noise.level.is_finite(),
            || {
                format!(
                    "must be a finite nonnegative number, got {}",
                    self.noise.level
                )
            },
        )?;
        check("space.points", self.space.points >= 2, || {
            "at least 2 points required".into()
        })?;
        check("inversion.coarsen", self.inversion.coarsen >= 1, || {
            "must be at least 1".into()
        })?;
        check("inversion.epsilon", self.inversion.epsilon >= 0.0, || {
            format!("must be nonnegative, got {}", self.inversion.epsilon)
        })?;
        Ok(())
    }

    /// The L1-stepped operator; the single-term and space-time models are
    /// otherwise solved exactly, so this is only needed with boundary data.
    pub fn operator(&self) -> Result<TimeOperator, CliError> {
        Ok(match &self.model {
            ModelConfig::Single { alpha } | ModelConfig::Spacetime { alpha, .. } => {
                TimeOperator::MultiTerm(field("model.alpha", OrderSpectrum::single(*alpha))?)
            }
            ModelConfig::Multiterm { alphas, weights } => TimeOperator::MultiTerm(field(
                "model.alphas",
                OrderSpectrum::new(alphas.clone(), weights.clone()),
            )?),
            ModelConfig::Distributed {
                mu,
                nodes,
                quad_order,
            } => {
                let w = match nodes {
                    Some(n) => WeightFunction::new(n.clone(), mu.clone()),
                    None => WeightFunction::uniform(mu.clone()),
                };
                let mu = field("model.mu", w)?;
                let op = TimeOperator::Distributed {
                    mu,
                    quad_order: *quad_order,
                };
                field("model.quad_order", op.spectrum())?;
                op
            }
        })
    }

    pub fn grid(&self) -> Result<TimeGrid, CliError> {
        field(
            "time",
            match self.time {
                TimeConfig::Uniform { horizon, steps } => TimeGrid::uniform(horizon, steps),
                TimeConfig::Graded {
                    horizon,
                    steps,
                    exponent,
                } => TimeGrid::graded(horizon, steps, exponent),
                TimeConfig::Log {
                    t_min,
                    horizon,
                    per_decade,
                } => TimeGrid::log_spaced(t_min, horizon, per_decade),
            },
        )
    }

    pub fn eigensystem(&self, modes: usize) -> Result<EigenSystem, CliError> {
        field(
            "domain.length",
            EigenSystem::interval(self.domain.length, modes),
        )
    }

    /// Initial data as a function of x, before projection.
    pub fn initial_function(&self) -> Result<Box<dyn Fn(f64) -> f64 + '_>, CliError> {
        let l = self.domain.length;
        Ok(match &self.initial {
            InitialConfig::Mode { k, amplitude } => {
                check("initial.k", *k >= 1, || "mode index starts at 1".into())?;
                let eig = self.eigensystem(*k)?;
                let (k, amp) = (*k, *amplitude);
                Box::new(move |x| amp * eig.phi(k, x))
            }
            InitialConfig::Bump {
                center,
                width,
                height,
            } => {
                check("initial.width", *width > 0.0, || {
                    format!("must be positive, got {width}")
                })?;
                let p = BoundaryProfile::Bump {
                    start: center - width / 2.0,
                    end: center + width / 2.0,
                    height: *height,
                };
                Box::new(move |x| p.eval(x))
            }
            InitialConfig::Polynomial { coefficients } => {
                check("initial.coefficients", !coefficients.is_empty(), || {
                    "empty".into()
                })?;
                Box::new(move |x| coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c))
            }
            InitialConfig::Samples { values } => {
                check("initial.values", values.len() >= 2, || {
                    "at least 2 samples required".into()
                })?;
                let m = values.len() - 1;
                Box::new(move |x| {
                    let s = (x / l * m as f64).clamp(0.0, m as f64);
                    let i = (s.floor() as usize).min(m - 1);
                    let w = s - i as f64;
                    values[i] * (1.0 - w) + values[i + 1] * w
                })
            }
        })
    }

    pub fn coefficients(&self, eig: &EigenSystem) -> Result<ModalCoefficients, CliError> {
        if let InitialConfig::Mode { k, amplitude } = self.initial {
            check("initial.k", k >= 1 && k <= eig.count(), || {
                format!("mode {k} is outside the {} retained modes", eig.count())
            })?;
            return Ok(ModalCoefficients::unit(eig.count(), k).scaled(amplitude));
        }
        let f = self.initial_function()?;
        Ok(eig.project(f, self.space.quad_points))
    }

    pub fn boundary_data(&self) -> Result<BoundaryData, CliError> {
        field(
            "boundary",
            BoundaryData::new(self.boundary.left.into(), self.boundary.right.into()),
        )
    }

    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let eig = self.eigensystem(self.space.modes)?;
        let a = self.coefficients(&eig)?;
        field(
            "sensor.x0",
            Scenario::new(eig, a, self.boundary_data()?, self.grid()?, self.sensor.x0),
        )
    }

    /// The inversion's internal model: coarsened grid, possibly fewer modes.
    pub fn inversion_scenario(&self) -> Result<Scenario, CliError> {
        let modes = self.inversion.modes.unwrap_or(self.space.modes);
        let eig = self.eigensystem(modes)?;
        let a = self.coefficients(&eig)?;
        let grid = field(
            "inversion.coarsen",
            self.grid()?.coarsened(self.inversion.coarsen),
        )?;
        field(
            "sensor.x0",
            Scenario::new(eig, a, self.boundary_data()?, grid, self.sensor.x0),
        )
    }

    pub fn data_path(&self, out: &Path) -> PathBuf {
        self.inversion
            .data
            .clone()
            .unwrap_or_else(|| out.join("observation.csv"))
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
