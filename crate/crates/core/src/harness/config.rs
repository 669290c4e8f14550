use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::detector::{BaselinePopulation, RuleSet};
use crate::mimicry::MimicConfig;
use crate::profile::{BootstrapCriteria, Property};
use crate::simulator::{Scenario, SkillModel, SkillPopulation};

use super::HarnessError;

/// Gate thresholds as written in the config; `min_samples` overrides the
/// per-property defaults.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateConfig {
    pub min_hours: f64,
    pub min_matches: usize,
    pub min_wins: usize,
    pub min_samples: BTreeMap<String, usize>,
}

impl Default for GateConfig {
    fn default() -> Self {
        let d = BootstrapCriteria::default();
        Self {
            min_hours: d.min_hours,
            min_matches: d.min_matches,
            min_wins: d.min_wins,
            min_samples: BTreeMap::new(),
        }
    }
}

impl GateConfig {
    pub fn criteria(&self) -> Result<BootstrapCriteria, HarnessError> {
        let mut c = BootstrapCriteria {
            min_hours: self.min_hours,
            min_matches: self.min_matches,
            min_wins: self.min_wins,
            ..BootstrapCriteria::default()
        };
        for (k, &n) in &self.min_samples {
            let p: Property = k
                .parse()
                .map_err(|e| HarnessError::Config(format!("gate.min_samples: {e}")))?;
            c.min_samples.insert(p, n);
        }
        c.validate().map_err(|e| HarnessError::Config(format!("gate: {e}")))?;
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationConfig {
    pub skill: SkillPopulation,
    pub matches: usize,
    pub seed: u64,
    /// Target false-flag rate per rule on the population.
    pub fpr: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            skill: SkillPopulation::default(),
            matches: 1000,
            seed: 99,
            fpr: 0.001,
        }
    }
}

impl CalibrationConfig {
    pub fn population(&self) -> BaselinePopulation {
        BaselinePopulation {
            skill: self.skill.clone(),
            matches: self.matches,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerConfig {
    pub id: String,
    pub skill: Option<SkillModel>,
    /// TOML file holding a skill model, relative to the config file.
    pub skill_file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out: PathBuf,
    #[serde(default)]
    pub scenario: Scenario,
    #[serde(default)]
    pub gate: GateConfig,
    #[serde(default = "defaults::record_matches")]
    pub record_matches: usize,
    #[serde(default = "defaults::experiment_matches")]
    pub experiment_matches: usize,
    #[serde(default)]
    pub controller: MimicConfig,
    #[serde(default)]
    pub rules: RuleSet,
    #[serde(default = "defaults::alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub calibration: CalibrationConfig,
    pub players: Vec<PlayerConfig>,
}

mod defaults {
    pub fn record_matches() -> usize {
        20
    }
    pub fn experiment_matches() -> usize {
        15
    }
    pub fn alpha() -> f64 {
        0.01
    }
}

/// A player with its skill model resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Player {
    pub id: String,
    pub skill: SkillModel,
}

/// A parsed config together with the digest of its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub players: Vec<Player>,
    pub criteria: BootstrapCriteria,
    pub sha256: String,
}

impl LoadedConfig {
    pub fn from_path(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// `base` resolves relative `skill_file` entries.
    pub fn parse(text: &str, base: &Path) -> Result<Self, HarnessError> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        let sha256 = hex::encode(Sha256::digest(text.as_bytes()));
        let players = config
            .players
            .iter()
            .map(|p| resolve_player(p, base))
            .collect::<Result<Vec<_>, _>>()?;
        let criteria = config.gate.criteria()?;
        let loaded = Self {
            config,
            players,
            criteria,
            sha256,
        };
        loaded.validate()?;
        Ok(loaded)
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let c = &self.config;
        let cfg = |m: String| Err(HarnessError::Config(m));
        if self.players.is_empty() {
            return cfg("players: at least one player is required".into());
        }
        for (i, p) in self.players.iter().enumerate() {
            if p.id.is_empty() || !p.id.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-') {
                return cfg(format!("players.id: `{}` must be non-empty ASCII letters, digits, `_` or `-`", p.id));
            }
            if self.players[..i].iter().any(|q| q.id == p.id) {
                return cfg(format!("players.id: duplicate `{}`", p.id));
            }
        }
        if c.record_matches == 0 || c.experiment_matches == 0 {
            return cfg("record_matches and experiment_matches must be positive".into());
        }
        if !(c.alpha > 0.0 && c.alpha < 1.0) {
            return cfg(format!("alpha must lie in (0, 1), got {}", c.alpha));
        }
        if !(c.calibration.fpr > 0.0 && c.calibration.fpr < 1.0) {
            return cfg(format!("calibration.fpr must lie in (0, 1), got {}", c.calibration.fpr));
        }
        c.scenario.validate().map_err(|e| HarnessError::Config(format!("scenario: {e}")))?;
        c.controller.validate().map_err(|e| HarnessError::Config(format!("controller: {e}")))?;
        c.rules.validate().map_err(|e| HarnessError::Config(format!("rules: {e}")))?;
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    pub fn out(&self) -> &Path {
        &self.config.out
    }

    /// Provenance line shared by every emitted file.
    pub fn provenance(&self) -> String {
        format!("config_sha256={} seed={}", self.sha256, self.config.seed)
    }

    pub fn meta(&self) -> BTreeMap<String, String> {
        BTreeMap::from([
            ("config_sha256".to_string(), self.sha256.clone()),
            ("seed".to_string(), self.config.seed.to_string()),
        ])
    }
}

fn resolve_player(p: &PlayerConfig, base: &Path) -> Result<Player, HarnessError> {
    let skill = match (&p.skill, &p.skill_file) {
        (Some(s), None) => s.clone(),
        (None, Some(f)) => {
            let path = base.join(f);
            let text = fs::read_to_string(&path).map_err(|e| {
                HarnessError::Config(format!("players.skill_file: cannot read {}: {e}", path.display()))
            })?;
            toml::from_str(&text)
                .map_err(|e| HarnessError::Config(format!("players.skill_file {}: {e}", path.display())))?
        }
        _ => {
            return Err(HarnessError::Config(format!(
                "players: `{}` needs exactly one of `skill` or `skill_file`",
                p.id
            )))
        }
    };
    skill
        .validate()
        .map_err(|e| HarnessError::Config(format!("players.skill for `{}`: {e}", p.id)))?;
    Ok(Player {
        id: p.id.clone(),
        skill,
    })
}
