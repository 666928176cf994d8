//! Versioned TOML configuration for extraction and reporting.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::annotation::AGE_GROUP_EDGES;
use crate::contrast::ContrastConfig;
use crate::diversity::{BinPolicy, EvennessBase};
use crate::error::{Error, Result};
use crate::features::Dimension;
use crate::preprocess::{QualityPolicy, RectifyFrame};
use crate::skin::ItaConfig;
use crate::symmetry::{SymmetryAnchors, SymmetryConfig};

pub const CONFIG_VERSION: u32 = 1;

fn version() -> u32 {
    CONFIG_VERSION
}

fn check_version(v: u32) -> Result<()> {
    if v != CONFIG_VERSION {
        return Err(Error::Config(format!("unsupported config version {v}")));
    }
    Ok(())
}

fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractConfig {
    #[serde(default = "version")]
    pub version: u32,
    pub quality: QualityPolicy,
    pub rectify: RectifyFrame,
    pub symmetry_anchors: SymmetryAnchors,
    pub symmetry: SymmetryConfig,
    pub contrast: ContrastConfig,
    pub ita: ItaConfig,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            quality: QualityPolicy::default(),
            rectify: RectifyFrame::default(),
            symmetry_anchors: SymmetryAnchors::default(),
            symmetry: SymmetryConfig::default(),
            contrast: ContrastConfig::default(),
            ita: ItaConfig::default(),
        }
    }
}

impl ExtractConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let c: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let c: Self = load(path)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        check_version(self.version)?;
        self.quality.validate()?;
        if self.rectify.width == 0 || self.rectify.height == 0 {
            return Err(Error::Config("rectified frame must be non-empty".into()));
        }
        if self.rectify.left_eye.distance(self.rectify.right_eye) == 0.0 {
            return Err(Error::Config("eye anchors coincide".into()));
        }
        if !(self.contrast.outer_scale > 1.0) {
            return Err(Error::Config("contrast outer_scale must exceed 1".into()));
        }
        if self.ita.smoothing_window.is_multiple_of(2) || !(self.ita.peak_bin_width > 0.0) {
            return Err(Error::Config("ITA window must be odd and bin width positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BinConfig {
    #[serde(default = "version")]
    pub version: u32,
    /// Policy for dimensions without a built-in or explicit one.
    pub default_policy: BinPolicy,
    pub evenness: EvennessBase,
    pub overrides: BTreeMap<Dimension, BinPolicy>,
}

impl Default for BinConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            default_policy: BinPolicy::EqualWidth(6),
            evenness: EvennessBase::Nominal,
            overrides: BTreeMap::new(),
        }
    }
}

impl BinConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let c: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let c: Self = load(path)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        check_version(self.version)?;
        self.default_policy.validate()?;
        for p in self.overrides.values() {
            p.validate()?;
        }
        Ok(())
    }

    pub fn policy_for(&self, d: Dimension) -> BinPolicy {
        if let Some(p) = self.overrides.get(&d) {
            return p.clone();
        }
        match d {
            Dimension::Ita => BinPolicy::EqualWidth(7),
            Dimension::AgePred | Dimension::AgeLabel => BinPolicy::FixedEdges(AGE_GROUP_EDGES.to_vec()),
            Dimension::GenderLabel => BinPolicy::FixedEdges(vec![0.0, 0.5, 1.0]),
            Dimension::PoseSigned => BinPolicy::FixedEdges(vec![-1.5, -0.5, 0.5, 1.5]),
            _ => self.default_policy.clone(),
        }
    }
}
