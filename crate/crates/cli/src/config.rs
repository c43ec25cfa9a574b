//! Experiment configuration: a JSON file, overridden field by field from flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use wire_billiards::CurveSpec;

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub curve: Option<CurveSpec>,
    #[serde(default = "defaults::resolution")]
    pub resolution: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub nice: NiceConfig,
    #[serde(default)]
    pub orbit: OrbitConfig,
    #[serde(default)]
    pub portrait: PortraitConfig,
    #[serde(default)]
    pub lazutkin: LazutkinConfig,
    #[serde(default)]
    pub deficit: DeficitConfig,
    #[serde(default)]
    pub periodic: PeriodicConfig,
    #[serde(default)]
    pub glance: GlanceConfig,
    #[serde(default)]
    pub striction: StrictionConfig,
    #[serde(default)]
    pub gutkin: GutkinConfig,
    #[serde(default)]
    pub ellipsoid: EllipsoidConfig,
}

mod defaults {
    pub fn resolution() -> usize {
        wire_billiards::curve::DEFAULT_RESOLUTION
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NiceConfig {
    pub grid: usize,
    pub margin: f64,
}

impl Default for NiceConfig {
    fn default() -> Self {
        Self {
            grid: wire_billiards::reflection::DEFAULT_NICE_GRID,
            margin: wire_billiards::reflection::DEFAULT_NICE_MARGIN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitMode {
    Nice,
    AllRoots,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitConfig {
    pub x0: f64,
    /// Initial angle; ignored when `y0` is given.
    pub alpha0: f64,
    pub y0: Option<f64>,
    pub steps: usize,
    pub mode: OrbitMode,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        Self {
            x0: 0.0,
            alpha0: 0.3,
            y0: None,
            steps: 1000,
            mode: OrbitMode::Nice,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PortraitConfig {
    pub orbits: usize,
    pub steps: usize,
    /// Initial angles are spread evenly over `(0, alpha_max]`.
    pub alpha_max: f64,
}

impl Default for PortraitConfig {
    fn default() -> Self {
        Self {
            orbits: 16,
            steps: 500,
            alpha_max: 1.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LazutkinConfig {
    pub alphas: Vec<f64>,
    pub points: usize,
}

impl Default for LazutkinConfig {
    fn default() -> Self {
        Self {
            alphas: (3..=12).map(|j| 2.0 * 2f64.powi(-j)).collect(),
            points: 16,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeficitConfig {
    pub x_start: f64,
    /// Defaults to a quarter of the curve after `x_start`.
    pub x_end: Option<f64>,
    pub ns: Vec<usize>,
}

impl Default for DeficitConfig {
    fn default() -> Self {
        Self {
            x_start: 0.0,
            x_end: None,
            ns: vec![32, 64, 128, 256],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PeriodicConfig {
    pub p: usize,
    pub q: usize,
}

impl Default for PeriodicConfig {
    fn default() -> Self {
        Self { p: 1, q: 3 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GlanceConfig {
    pub x0: f64,
    pub alpha0: f64,
    pub steps: usize,
    pub companion_samples: usize,
}

impl Default for GlanceConfig {
    fn default() -> Self {
        Self {
            x0: 0.0,
            alpha0: 0.05,
            steps: 10_000,
            companion_samples: 100,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrictionConfig {
    /// Raw-parameter shift of the family; when absent the family is fitted from
    /// an orbit started at angle `alpha0`.
    pub d: Option<f64>,
    pub samples: usize,
    pub alpha0: f64,
    pub orbit_steps: usize,
    pub modes: usize,
}

impl Default for StrictionConfig {
    fn default() -> Self {
        Self {
            d: None,
            samples: 64,
            alpha0: 0.4,
            orbit_steps: 4000,
            modes: 48,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GutkinConfig {
    pub m: u32,
}

impl Default for GutkinConfig {
    fn default() -> Self {
        Self { m: 4 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EllipsoidConfig {
    pub axes: Vec<f64>,
    pub lambda: f64,
    pub tau: f64,
    /// Start point, projected onto M_0.
    pub x: Vec<f64>,
    /// Start direction, projected onto the tangent space.
    pub v: Vec<f64>,
    pub tolerance: f64,
}

impl Default for EllipsoidConfig {
    fn default() -> Self {
        Self {
            axes: vec![2.0, 1.5, 1.0],
            lambda: 0.3,
            tau: 0.5,
            x: vec![1.2, 0.7, 0.4],
            v: vec![0.3, -0.5, 0.8],
            tolerance: wire_billiards::ellipsoid::FLOW_TOLERANCE,
        }
    }
}

/// Sets `value` at a dotted path, creating objects on the way.
pub fn set_path(root: &mut Value, path: &str, value: Value) {
    let mut node = root;
    let mut parts = path.split('.').peekable();
    while let Some(part) = parts.next() {
        if !node.is_object() {
            *node = Value::Object(Map::new());
        }
        let map = node.as_object_mut().expect("object");
        if parts.peek().is_none() {
            map.insert(part.to_string(), value);
            return;
        }
        node = map.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

impl ExperimentConfig {
    /// Deserializes with field paths in error messages, then checks value ranges.
    pub fn from_value(value: Value) -> Result<Self, CliError> {
        let config: Self = serde_path_to_error::deserialize(value)
            .map_err(|e| CliError::Schema(format!("field `{}`: {}", e.path(), e.inner())))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(CliError::Schema(format!("field `{name}`: must be positive, got {v}")))
            }
        };
        let at_least = |name: &str, v: usize, min: usize| {
            if v >= min {
                Ok(())
            } else {
                Err(CliError::Schema(format!("field `{name}`: must be at least {min}, got {v}")))
            }
        };
        at_least("resolution", self.resolution, 64)?;
        at_least("nice.grid", self.nice.grid, 16)?;
        positive("nice.margin", self.nice.margin)?;
        positive("orbit.alpha0", self.orbit.alpha0)?;
        positive("portrait.alpha_max", self.portrait.alpha_max)?;
        at_least("portrait.orbits", self.portrait.orbits, 1)?;
        at_least("lazutkin.points", self.lazutkin.points, 1)?;
        for (i, a) in self.lazutkin.alphas.iter().enumerate() {
            positive(&format!("lazutkin.alphas[{i}]"), *a)?;
        }
        positive("glance.alpha0", self.glance.alpha0)?;
        at_least("striction.samples", self.striction.samples, 1)?;
        positive("striction.alpha0", self.striction.alpha0)?;
        positive("ellipsoid.tolerance", self.ellipsoid.tolerance)?;
        if let Some(spec) = &self.curve {
            spec.validate().map_err(|e| CliError::Schema(format!("field `curve`: {e}")))?;
        }
        Ok(())
    }

    pub fn curve_spec(&self) -> Result<&CurveSpec, CliError> {
        self.curve
            .as_ref()
            .ok_or_else(|| CliError::Schema("field `curve`: required by this subcommand".into()))
    }

    /// SHA-256 of the resolved configuration, defaults included. The output
    /// path is left out so that copies written elsewhere share a digest.
    pub fn digest(&self) -> String {
        let mut key = self.clone();
        key.out = None;
        let canonical = serde_json::to_string(&key).expect("config serializes");
        format!("{:x}", Sha256::digest(canonical.as_bytes()))
    }
}
