use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RmseSelection;
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Progression};

/// Growth factor used for non-uniform layouts when none is given.
pub const DEFAULT_GROWTH: f64 = 1.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeName {
    Uniform,
    Arithmetic,
    Geometric,
}

impl SchemeName {
    pub fn name(self) -> &'static str {
        match self {
            SchemeName::Uniform => "uniform",
            SchemeName::Arithmetic => "arithmetic",
            SchemeName::Geometric => "geometric",
        }
    }
}

impl std::str::FromStr for SchemeName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(SchemeName::Uniform),
            "arithmetic" => Ok(SchemeName::Arithmetic),
            "geometric" => Ok(SchemeName::Geometric),
            other => Err(Error::Config(format!(
                "unknown scheme {other:?} (expected uniform, arithmetic or geometric)"
            ))),
        }
    }
}

/// Serializable description of one linear array.
///
/// ```toml
/// scheme = "geometric"
/// M = 8
/// array_length_half_wavelengths = 10
/// growth = 1.3
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub scheme: SchemeName,
    #[serde(rename = "M")]
    pub sensors: usize,
    pub array_length_half_wavelengths: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<f64>,
}

impl GeometrySpec {
    pub fn uniform(sensors: usize) -> Self {
        Self {
            scheme: SchemeName::Uniform,
            sensors,
            array_length_half_wavelengths: sensors.saturating_sub(1) as f64,
            growth: None,
        }
    }

    pub fn geometric(sensors: usize, length_hw: f64, growth: f64) -> Self {
        Self {
            scheme: SchemeName::Geometric,
            sensors,
            array_length_half_wavelengths: length_hw,
            growth: Some(growth),
        }
    }

    pub fn growth_or_default(&self) -> f64 {
        self.growth.unwrap_or(DEFAULT_GROWTH)
    }

    pub fn build(&self) -> Result<ArrayGeometry> {
        let hw = self.array_length_half_wavelengths;
        match self.scheme {
            SchemeName::Uniform => {
                if hw.fract() != 0.0 || hw < 0.0 {
                    return Err(Error::Geometry(format!(
                        "uniform array length must be a whole number of half-wavelengths, got {hw}"
                    )));
                }
                ArrayGeometry::uniform_linear(self.sensors, hw as usize)
            }
            SchemeName::Arithmetic => ArrayGeometry::nonuniform_progressive(
                self.sensors,
                hw / 2.0,
                Progression::Arithmetic,
                self.growth_or_default(),
            ),
            SchemeName::Geometric => ArrayGeometry::nonuniform_progressive(
                self.sensors,
                hw / 2.0,
                Progression::Geometric,
                self.growth_or_default(),
            ),
        }
    }

    /// Short identifier, e.g. `uniform-M11` or `geometric1.3-M8`.
    pub fn label(&self) -> String {
        match self.scheme {
            SchemeName::Uniform => format!("uniform-M{}", self.sensors),
            s => format!("{}{}-M{}", s.name(), self.growth_or_default(), self.sensors),
        }
    }
}

/// Full description of one Monte-Carlo sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub geometries: Vec<GeometrySpec>,
    pub theta_true_deg: f64,
    pub snr_db_list: Vec<f64>,
    pub snapshots: usize,
    pub trials: usize,
    pub resolution_deg: f64,
    pub master_seed: u64,
    #[serde(default)]
    pub rmse_mode: RmseSelection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::table1()
    }
}

impl ExperimentConfig {
    /// Array length 10 half-wavelengths, source at 60°: uniform M=11 against
    /// geometric M=8 and M=5.
    pub fn table1() -> Self {
        Self {
            geometries: vec![
                GeometrySpec::uniform(11),
                GeometrySpec::geometric(8, 10.0, DEFAULT_GROWTH),
                GeometrySpec::geometric(5, 10.0, DEFAULT_GROWTH),
            ],
            theta_true_deg: 60.0,
            snr_db_list: vec![-5.0, 0.0, 5.0, 10.0],
            snapshots: 200,
            trials: 100,
            resolution_deg: 0.01,
            master_seed: 1,
            rmse_mode: RmseSelection::Both,
        }
    }

    /// Array length 11 half-wavelengths, source at 50°: uniform M=12 against
    /// geometric M=9 and M=6.
    pub fn table2() -> Self {
        Self {
            geometries: vec![
                GeometrySpec::uniform(12),
                GeometrySpec::geometric(9, 11.0, DEFAULT_GROWTH),
                GeometrySpec::geometric(6, 11.0, DEFAULT_GROWTH),
            ],
            theta_true_deg: 50.0,
            ..Self::table1()
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.snapshots == 0 {
            return Err(Error::Config("snapshots must be at least 1".into()));
        }
        if !(self.resolution_deg > 0.0 && self.resolution_deg < 90.0) {
            return Err(Error::Config(format!(
                "resolution_deg must be in (0, 90), got {}",
                self.resolution_deg
            )));
        }
        if !(self.theta_true_deg >= self.resolution_deg
            && self.theta_true_deg <= 180.0 - self.resolution_deg)
        {
            return Err(Error::Config(format!(
                "theta_true_deg {} is outside the search sector",
                self.theta_true_deg
            )));
        }
        if self.snr_db_list.iter().any(|s| s.is_nan()) {
            return Err(Error::Config("snr_db_list contains NaN".into()));
        }
        Ok(())
    }
}

/// Command-line overrides applied on top of a base config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub theta_deg: Option<f64>,
    pub snr_db: Vec<f64>,
    pub sensors: Vec<usize>,
    pub length_hw: Option<f64>,
    pub scheme: Option<SchemeName>,
    pub growth: Option<f64>,
    pub snapshots: Option<usize>,
    pub trials: Option<usize>,
    pub resolution_deg: Option<f64>,
    pub seed: Option<u64>,
    pub rmse_mode: Option<RmseSelection>,
}

impl ConfigOverrides {
    fn touches_geometry(&self) -> bool {
        !self.sensors.is_empty()
            || self.length_hw.is_some()
            || self.scheme.is_some()
            || self.growth.is_some()
    }

    /// Apply the overrides. Any geometry flag rebuilds the geometry list: one
    /// entry per sensor count at the common length, uniform where `M − 1`
    /// equals the length in half-wavelengths and geometric otherwise, unless
    /// `scheme` forces one scheme for all.
    pub fn apply(&self, mut cfg: ExperimentConfig) -> Result<ExperimentConfig> {
        if let Some(v) = self.theta_deg {
            cfg.theta_true_deg = v;
        }
        if !self.snr_db.is_empty() {
            cfg.snr_db_list = self.snr_db.clone();
        }
        if let Some(v) = self.snapshots {
            cfg.snapshots = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.resolution_deg {
            cfg.resolution_deg = v;
        }
        if let Some(v) = self.seed {
            cfg.master_seed = v;
        }
        if let Some(v) = self.rmse_mode {
            cfg.rmse_mode = v;
        }

        if self.touches_geometry() {
            let sensors: Vec<usize> = if self.sensors.is_empty() {
                cfg.geometries.iter().map(|g| g.sensors).collect()
            } else {
                self.sensors.clone()
            };
            let length_hw = match (self.length_hw, cfg.geometries.first()) {
                (Some(l), _) => l,
                (None, Some(g)) => g.array_length_half_wavelengths,
                (None, None) => {
                    return Err(Error::Config("--length-hw is required without a geometry list".into()))
                }
            };
            let fallback_growth = |m: usize| {
                cfg.geometries
                    .iter()
                    .find(|g| g.sensors == m)
                    .and_then(|g| g.growth)
            };
            cfg.geometries = sensors
                .iter()
                .map(|&m| {
                    let scheme = self.scheme.unwrap_or(if (m as f64 - 1.0) == length_hw {
                        SchemeName::Uniform
                    } else {
                        SchemeName::Geometric
                    });
                    let growth = match scheme {
                        SchemeName::Uniform => None,
                        _ => Some(self.growth.or(fallback_growth(m)).unwrap_or(DEFAULT_GROWTH)),
                    };
                    GeometrySpec {
                        scheme,
                        sensors: m,
                        array_length_half_wavelengths: length_hw,
                        growth,
                    }
                })
                .collect();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
