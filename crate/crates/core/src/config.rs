//! Run configuration: one TOML document plus command-line overrides.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::citygen::{BuiltUpParams, Environment, GenConfig};
use crate::error::{Error, Result};
use crate::montecarlo::{default_angles, AltitudePolicy, Scenario, SweepConfig, DEFAULT_BIN_WIDTH};
use crate::pathloss::{VegPolicy, VegetationParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub n_cities: usize,
    pub angles: Vec<f64>,
    pub bin_width: f64,
    /// Constant ABS altitude; per-angle altitude when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_altitude: Option<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            n_cities: 30,
            angles: default_angles(),
            bin_width: DEFAULT_BIN_WIDTH,
            fixed_altitude: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub environment: Option<Environment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub scenarios: Vec<String>,
    /// Tree counts for the density sweep; empty skips it.
    pub densities: Vec<usize>,
    pub include_streetlights: bool,
    /// Fixed ABS altitude for path loss against elevation (m).
    pub pl_theta_altitude: f64,
    pub gen: GenConfig,
    pub sweep: SweepSection,
    pub vegetation: VegetationParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            environment: Some(Environment::Urban),
            alpha: None,
            beta: None,
            gamma: None,
            scenarios: vec!["buildings-only".into(), "trees".into(), "full".into()],
            densities: vec![0, 100, 200, 400],
            include_streetlights: false,
            pl_theta_altitude: 100.0,
            gen: GenConfig::default(),
            sweep: SweepSection::default(),
            vegetation: VegetationParams::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::domain(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    /// Preset parameters with any explicit `alpha`/`beta`/`gamma` on top.
    pub fn params(&self) -> Result<BuiltUpParams> {
        let base = match (self.environment, self.alpha, self.beta, self.gamma) {
            (Some(env), ..) => env.params(),
            (None, Some(_), Some(_), Some(_)) => BuiltUpParams {
                alpha: 0.0,
                beta: 0.0,
                gamma: 0.0,
            },
            (None, ..) => {
                return Err(Error::domain(
                    "give an environment preset or all of alpha, beta and gamma",
                ))
            }
        };
        BuiltUpParams::new(
            self.alpha.unwrap_or(base.alpha),
            self.beta.unwrap_or(base.beta),
            self.gamma.unwrap_or(base.gamma),
        )
    }

    /// Name used for output directories and fit rows.
    pub fn label(&self) -> String {
        let custom = self.alpha.is_some() || self.beta.is_some() || self.gamma.is_some();
        match (self.environment, custom) {
            (Some(env), false) => env.name().to_string(),
            (Some(env), true) => format!("{}-custom", env.name()),
            (None, _) => "custom".to_string(),
        }
    }

    pub fn scenarios(&self) -> Result<Vec<Scenario>> {
        self.scenarios.iter().map(|s| Scenario::parse(s)).collect()
    }

    pub fn sweep(&self) -> Result<SweepConfig> {
        let cfg = SweepConfig {
            n_cities: self.sweep.n_cities,
            angles: self.sweep.angles.clone(),
            altitude: match self.sweep.fixed_altitude {
                Some(h_abs) => AltitudePolicy::Fixed { h_abs },
                None => AltitudePolicy::PerAngle,
            },
            scenarios: self.scenarios()?,
            bin_width: self.sweep.bin_width,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn veg_policy(&self) -> VegPolicy {
        VegPolicy {
            seed: self.gen.seed,
            include_streetlights: self.include_streetlights,
            ..VegPolicy::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.gen.validate()?;
        self.sweep()?;
        self.vegetation.validate()?;
        if self.densities.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::domain("densities must be sorted ascending"));
        }
        if !(self.pl_theta_altitude > self.gen.h_gu) {
            return Err(Error::domain("pl_theta_altitude must exceed the user height"));
        }
        Ok(())
    }

    /// SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}
