//! Player profiles: fifteen behavioural properties estimated from traces,
//! plus the bootstrap recording gate.

mod extract;
mod formulas;
mod persist;
mod property;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::telemetry::{EngagementTrace, Outcome};

pub use extract::{
    extract_choices, extract_samples, extract_shots, extract_timing, path_shape, ChoiceEstimates, PathShape,
    PropertySamples, ShotEstimates, TimingEstimates,
};
pub use formulas::{
    angular_divergence, recoil_compensation, suspiciousness, Compensation, HitSequence, MIN_COMP_DENOMINATOR,
};
pub use persist::{parse_profile, write_profile, PROFILE_VERSION};
pub use property::{PerProperty, Property, Unit};

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("traces belong to different players: `{0}` and `{1}`")]
    MixedPlayers(String, String),
    #[error("invalid bootstrap criteria: {0}")]
    Criteria(String),
    #[error("profile line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Mean of the per-event values of one property.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PropertyEstimate {
    /// Present iff `n >= 1`.
    pub value: Option<f64>,
    /// Sample standard deviation; present iff `n >= 2`.
    pub sd: Option<f64>,
    pub n: usize,
}

impl PropertyEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self::default();
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = (n >= 2).then(|| {
            let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
            (ss / (n - 1) as f64).sqrt()
        });
        Self {
            value: Some(mean),
            sd,
            n,
        }
    }

    /// Standard error of the mean, when defined.
    pub fn std_error(&self) -> Option<f64> {
        self.sd.map(|sd| sd / (self.n as f64).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapCriteria {
    pub min_hours: f64,
    pub min_matches: usize,
    pub min_wins: usize,
    pub min_samples: BTreeMap<Property, usize>,
}

impl Default for BootstrapCriteria {
    fn default() -> Self {
        let min_samples = Property::ALL
            .into_iter()
            .map(|p| (p, if p.is_rare() { 10 } else { 30 }))
            .collect();
        Self {
            min_hours: 12.0,
            min_matches: 16,
            min_wins: 10,
            min_samples,
        }
    }
}

impl BootstrapCriteria {
    pub fn validate(&self) -> Result<(), ProfileError> {
        if !(self.min_hours > 0.0 && self.min_hours.is_finite()) {
            return Err(ProfileError::Criteria(format!("min_hours must be positive, got {}", self.min_hours)));
        }
        if self.min_matches == 0 || self.min_wins == 0 {
            return Err(ProfileError::Criteria("min_matches and min_wins must be positive".into()));
        }
        if let Some((p, _)) = self.min_samples.iter().find(|(_, &n)| n == 0) {
            return Err(ProfileError::Criteria(format!("min_samples for {p} must be positive")));
        }
        Ok(())
    }

    pub fn min_samples_for(&self, p: Property) -> usize {
        self.min_samples.get(&p).copied().unwrap_or(if p.is_rare() { 10 } else { 30 })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RejectReason {
    InsufficientHours { have: f64, need: f64 },
    InsufficientMatches { have: usize, need: usize },
    InsufficientWins { have: usize, need: usize },
    InsufficientSamples { property: Property, have: usize, need: usize },
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::InsufficientHours { have, need } => write!(f, "insufficient hours: {have:.2} < {need}"),
            RejectReason::InsufficientMatches { have, need } => write!(f, "insufficient matches: {have} < {need}"),
            RejectReason::InsufficientWins { have, need } => write!(f, "insufficient wins: {have} < {need}"),
            RejectReason::InsufficientSamples { property, have, need } => {
                write!(f, "insufficient samples: {property} has {have} < {need}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BootstrapStatus {
    Accepted,
    Rejected(Vec<RejectReason>),
}

impl BootstrapStatus {
    pub fn is_accepted(&self) -> bool {
        matches!(self, BootstrapStatus::Accepted)
    }
}

/// Aggregated properties of one player.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerProfile {
    pub player_id: String,
    pub estimates: PerProperty<PropertyEstimate>,
    /// Mean absolute vertical offset of aim paths (radians).
    pub arch_height: PropertyEstimate,
    pub hit_parts: [u64; 7],
    pub aimed_parts: [u64; 7],
    pub matches: usize,
    pub hours: f64,
    pub wins: usize,
    pub gate: BootstrapStatus,
}

impl PlayerProfile {
    pub fn get(&self, p: Property) -> &PropertyEstimate {
        &self.estimates[p]
    }

    pub fn value(&self, p: Property) -> Option<f64> {
        self.estimates[p].value
    }

    pub fn p_reload(&self) -> Option<f64> {
        self.value(Property::A6)
    }

    pub fn p_above(&self) -> Option<f64> {
        self.value(Property::A8)
    }

    /// Builds a profile from already extracted samples.
    pub fn from_samples(
        player_id: &str,
        samples: &PropertySamples,
        matches: usize,
        hours: f64,
        wins: usize,
        criteria: &BootstrapCriteria,
    ) -> Self {
        let estimates = PerProperty::from_fn(|p| samples.estimate(p));
        let mut reasons = Vec::new();
        if hours < criteria.min_hours {
            reasons.push(RejectReason::InsufficientHours {
                have: hours,
                need: criteria.min_hours,
            });
        }
        if matches < criteria.min_matches {
            reasons.push(RejectReason::InsufficientMatches {
                have: matches,
                need: criteria.min_matches,
            });
        }
        if wins < criteria.min_wins {
            reasons.push(RejectReason::InsufficientWins {
                have: wins,
                need: criteria.min_wins,
            });
        }
        for p in Property::ALL {
            let need = criteria.min_samples_for(p);
            let have = estimates[p].n;
            if have < need {
                reasons.push(RejectReason::InsufficientSamples { property: p, have, need });
            }
        }
        Self {
            player_id: player_id.to_string(),
            estimates,
            arch_height: samples.arch_height(),
            hit_parts: samples.hit_parts,
            aimed_parts: samples.aimed_parts,
            matches,
            hours,
            wins,
            gate: if reasons.is_empty() {
                BootstrapStatus::Accepted
            } else {
                BootstrapStatus::Rejected(reasons)
            },
        }
    }
}

fn check_same_player(traces: &[EngagementTrace]) -> Result<&str, ProfileError> {
    let Some(first) = traces.first() else {
        return Ok("");
    };
    if let Some(other) = traces.iter().find(|t| t.player_id != first.player_id) {
        return Err(ProfileError::MixedPlayers(first.player_id.clone(), other.player_id.clone()));
    }
    Ok(&first.player_id)
}

/// Samples of all traces, merged in trace order.
pub fn collect_samples(traces: &[EngagementTrace]) -> PropertySamples {
    let per: Vec<PropertySamples> = traces.iter().map(extract_samples).collect();
    PropertySamples::merged(&per)
}

/// Aggregates a player's traces into a gated profile.
pub fn build_profile(traces: &[EngagementTrace], criteria: &BootstrapCriteria) -> Result<PlayerProfile, ProfileError> {
    criteria.validate()?;
    let player = check_same_player(traces)?;
    let samples = collect_samples(traces);
    let hours = traces.iter().map(|t| t.duration).sum::<f64>() / 3600.0;
    let wins = traces.iter().filter(|t| t.outcome == Outcome::Won).count();
    Ok(PlayerProfile::from_samples(player, &samples, traces.len(), hours, wins, criteria))
}
