//! Run configuration: one JSON document with a bath section (`spectral` or
//! `preset`), `pointer`, `object`, `coupling`, `oracle`, `run` and `output`.

use std::path::{Path, PathBuf};

use qmeasure::bathmodel::{BathSpec, PresetName};
use qmeasure::measurement::ObjectSpec;
use qmeasure::oracle::BathMode;
use qmeasure::PointerModel;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(u32),
    Many(Vec<u32>),
}

impl OneOrMany {
    pub fn to_vec(&self) -> Vec<u32> {
        match self {
            OneOrMany::One(m) => vec![*m],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralSection {
    pub m: OneOrMany,
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    pub tau_max: Option<f64>,
    pub grid_points: Option<usize>,
}

fn default_cutoff() -> f64 {
    5.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetSection {
    pub name: PresetName,
    pub tau_c: Option<f64>,
    pub tau_max: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    pub epsilon: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub modes: Vec<BathMode>,
    #[serde(default = "default_n_fock")]
    pub n_fock: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    pub times: Option<Vec<f64>>,
    #[serde(default = "half")]
    pub s: f64,
    #[serde(default = "minus_half")]
    pub s_prime: f64,
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub x_prime: f64,
}

fn default_n_fock() -> usize {
    30
}
fn default_steps() -> usize {
    2000
}
fn default_tolerance() -> f64 {
    1e-3
}
fn half() -> f64 {
    0.5
}
fn minus_half() -> f64 {
    -0.5
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spectral: Option<SpectralSection>,
    pub preset: Option<PresetSection>,
    pub pointer: Option<PointerModel>,
    pub object: Option<ObjectSpec>,
    pub coupling: Option<CouplingSection>,
    pub oracle: Option<OracleSection>,
    #[serde(default)]
    pub run: Value,
    #[serde(default)]
    pub output: OutputSection,
}

/// The bath named by the config, with the spectral exponent list expanded.
#[derive(Debug, Clone)]
pub enum BathChoice {
    Spectral { ms: Vec<u32>, cutoff: f64, tau_max: Option<f64>, grid_points: Option<usize> },
    Preset(BathSpec),
}

impl BathChoice {
    /// Single bath spec; fails for a spectral section listing several `m`.
    pub fn single(&self) -> Result<BathSpec, CliError> {
        match self {
            BathChoice::Preset(spec) => Ok(spec.clone()),
            BathChoice::Spectral { ms, cutoff, tau_max, grid_points } => match ms.as_slice() {
                [m] => Ok(BathSpec::Spectral { m: *m, cutoff: *cutoff, tau_max: *tau_max, grid_points: *grid_points }),
                _ => Err(CliError::Config(format!(
                    "this command needs a single spectral exponent, got {ms:?}"
                ))),
            },
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        if let Some(p) = &cfg.pointer {
            p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(cfg)
    }

    /// The bath source section; `None` when neither is present.
    pub fn bath(&self) -> Result<Option<BathChoice>, CliError> {
        match (&self.spectral, &self.preset) {
            (Some(_), Some(_)) => Err(CliError::Config("give exactly one of `spectral` and `preset`".into())),
            (Some(s), None) => {
                let ms = s.m.to_vec();
                if ms.is_empty() {
                    return Err(CliError::Config("spectral.m must not be empty".into()));
                }
                Ok(Some(BathChoice::Spectral {
                    ms,
                    cutoff: s.cutoff,
                    tau_max: s.tau_max,
                    grid_points: s.grid_points,
                }))
            }
            (None, Some(p)) => Ok(Some(BathChoice::Preset(BathSpec::Preset {
                name: p.name,
                tau_c: p.tau_c,
                tau_max: p.tau_max,
            }))),
            (None, None) => Ok(None),
        }
    }

    /// Command-specific `run` parameters; an absent section gives defaults.
    pub fn run_params<T: DeserializeOwned + Default>(&self) -> Result<T, CliError> {
        match &self.run {
            Value::Null => Ok(T::default()),
            v => serde_json::from_value(v.clone()).map_err(|e| CliError::Config(format!("invalid run section: {e}"))),
        }
    }

    pub fn require<'a, T>(&self, section: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        section.as_ref().ok_or_else(|| CliError::Config(format!("missing `{name}` section")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_valid() {
        let c = RunConfig::parse("{}").unwrap();
        assert!(c.bath().unwrap().is_none());
        assert_eq!(c.output.format, Format::Csv);
    }

    #[test]
    fn rejects_unknown_and_duplicate_sections() {
        assert!(RunConfig::parse(r#"{"bogus": 1}"#).is_err());
        let both = r#"{"spectral":{"m":1},"preset":{"name":"constant"}}"#;
        assert!(RunConfig::parse(both).unwrap().bath().is_err());
        assert!(RunConfig::parse(r#"{"pointer":{"mass":-1,"omega":0.1,"kappa":0,"delta_class":1}}"#).is_err());
    }

    #[test]
    fn spectral_m_list() {
        let c = RunConfig::parse(r#"{"spectral":{"m":[1,3]}}"#).unwrap();
        let b = c.bath().unwrap().unwrap();
        assert!(b.single().is_err());
        let c = RunConfig::parse(r#"{"spectral":{"m":3,"cutoff":4.0}}"#).unwrap();
        let spec = c.bath().unwrap().unwrap().single().unwrap();
        assert_eq!(spec, BathSpec::Spectral { m: 3, cutoff: 4.0, tau_max: None, grid_points: None });
    }
}
