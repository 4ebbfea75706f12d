//! TOML run configuration and artifact writing.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use pride_core::{GenConfig, LearnerConfig, ModelConfig, TieBreak};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub generate: GenConfig,
    pub model: ModelConfig,
    pub learner: LearnerConfig,
    pub audit: AuditSection,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            generate: GenConfig::default(),
            model: ModelConfig::default(),
            learner: LearnerConfig { tie_break: TieBreak::MostExcluding, ..Default::default() },
            audit: AuditSection::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditSection {
    /// Attributes never reported as the top driver.
    pub exclude: Vec<String>,
    pub length_weighted: bool,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config> {
        let Some(path) = path else { return Ok(Config::default()) };
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// What gets written next to an artifact: the stage, its arguments and the
/// fully resolved configuration.
#[derive(Debug, Serialize)]
pub struct Resolved<'a> {
    pub stage: &'a str,
    pub args: BTreeMap<&'a str, String>,
    pub config: &'a Config,
}

pub fn sidecar_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.file_name().unwrap_or_default().to_os_string();
    name.push(".config.toml");
    artifact.with_file_name(name)
}

/// Writes `bytes` to a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Writes the artifact and its resolved-config sidecar.
pub fn write_artifact(path: &Path, bytes: &[u8], resolved: &Resolved<'_>) -> Result<()> {
    write_atomic(path, bytes)?;
    let text = toml::to_string(resolved).context("serializing the resolved config")?;
    write_atomic(&sidecar_path(path), text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let cfg = Config::default();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(toml::from_str::<Config>(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg: Config = toml::from_str("[model]\nepochs = 7\n[learner]\ntie_break = \"lowest-index\"\n").unwrap();
        assert_eq!(cfg.model.epochs, 7);
        assert_eq!(cfg.model.hidden_units, ModelConfig::default().hidden_units);
        assert_eq!(cfg.learner.tie_break, TieBreak::LowestIndex);
        assert_eq!(cfg.generate, GenConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<Config>("[model]\nepoch = 7\n").is_err());
    }

    #[test]
    fn sidecar_sits_next_to_the_artifact() {
        assert_eq!(sidecar_path(Path::new("out/p.lp")), PathBuf::from("out/p.lp.config.toml"));
    }
}
