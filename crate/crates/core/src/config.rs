//! Run configuration: defaults, `key = value` files, and flag overrides.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::ExtractParams;
use crate::hough::HoughParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[default]
    Straight,
    Hough,
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "straight" => Ok(Algorithm::Straight),
            "hough" => Ok(Algorithm::Hough),
            _ => Err(Error::argument(format!("unknown algorithm {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Config {
    pub algorithm: Algorithm,
    pub extract: ExtractParams,
    pub hough: HoughParams,
    pub noise_sigma: f64,
    pub rng_seed: u64,
    pub threads: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Straight,
            extract: ExtractParams::default(),
            hough: HoughParams::default(),
            noise_sigma: 0.0,
            rng_seed: 0,
            threads: None,
        }
    }
}

/// Optional settings, as read from a file or from flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub algorithm: Option<Algorithm>,
    pub threshold: Option<f64>,
    pub bins: Option<usize>,
    #[serde(alias = "window-radius")]
    pub window_radius: Option<f64>,
    #[serde(alias = "max-gap")]
    pub max_gap: Option<i64>,
    #[serde(alias = "uncertainty-radius")]
    pub uncertainty_radius: Option<f64>,
    #[serde(alias = "position-range")]
    pub position_range: Option<f64>,
    pub grid: Option<usize>,
    #[serde(alias = "min-length")]
    pub min_length: Option<u32>,
    pub zoom: Option<bool>,
    pub sigma: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

impl Overrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::format("config", e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn apply(&self, c: &mut Config) {
        if let Some(v) = self.algorithm {
            c.algorithm = v;
        }
        if let Some(v) = self.threshold {
            c.extract.threshold = v;
        }
        if let Some(v) = self.bins {
            c.extract.histogram.bins = v;
        }
        if let Some(v) = self.window_radius {
            c.extract.histogram.window_radius = v;
        }
        if let Some(v) = self.max_gap {
            c.extract.map.max_gap = v;
            c.hough.max_gap = v as f64;
        }
        if let Some(v) = self.uncertainty_radius {
            c.extract.map.uncertainty_radius = v;
        }
        if let Some(v) = self.position_range {
            c.extract.map.position_range = v;
        }
        if let Some(v) = self.grid {
            c.extract.map.grid = v;
        }
        if let Some(v) = self.min_length {
            c.extract.min_length = v;
            c.hough.min_length = v as f64;
        }
        if let Some(v) = self.zoom {
            c.extract.map.zoom = v;
        }
        if let Some(v) = self.sigma {
            c.noise_sigma = v;
        }
        if let Some(v) = self.seed {
            c.rng_seed = v;
        }
        if let Some(v) = self.threads {
            c.threads = Some(v);
        }
    }
}

impl Config {
    /// Defaults, then the file, then the flags.
    pub fn resolve(file: Option<&Overrides>, flags: &Overrides) -> Config {
        let mut c = Config::default();
        if let Some(f) = file {
            f.apply(&mut c);
        }
        flags.apply(&mut c);
        c
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.extract.threshold > 0.0) {
            return Err(Error::argument("threshold must be positive"));
        }
        self.extract.histogram.validate()?;
        self.extract.map.validate()?;
        if self.threads == Some(0) {
            return Err(Error::argument("threads must be at least 1"));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::argument("sigma must be non-negative"));
        }
        Ok(())
    }
}
