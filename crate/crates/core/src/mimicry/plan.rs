//! Randomised adjustment of profile properties towards an improvement
//! objective.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::profile::{PlayerProfile, Property, Unit};

use super::MimicError;

/// Relative improvement the assistance aims for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImprovementObjective {
    pub target_gain: f64,
    /// Headline metric the gain is reported on.
    #[serde(with = "property_id")]
    pub metric: Property,
}

impl Default for ImprovementObjective {
    fn default() -> Self {
        Self {
            target_gain: 0.05,
            metric: Property::A2,
        }
    }
}

impl ImprovementObjective {
    pub fn validate(&self) -> Result<(), MimicError> {
        if !(self.target_gain > 0.0 && self.target_gain < 0.5) {
            return Err(MimicError::Config(format!(
                "target_gain must lie in (0, 0.5), got {}",
                self.target_gain
            )));
        }
        Ok(())
    }
}

mod property_id {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::profile::Property;

    pub fn serialize<S: Serializer>(p: &Property, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(p.id())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Property, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Improve,
    Degrade,
    Unchanged,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Improve => "improve",
            Decision::Degrade => "degrade",
            Decision::Unchanged => "unchanged",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionWeights {
    pub p_improve: f64,
    pub p_degrade: f64,
    pub p_unchanged: f64,
}

impl Default for DecisionWeights {
    fn default() -> Self {
        Self {
            p_improve: 0.6,
            p_degrade: 0.3,
            p_unchanged: 0.1,
        }
    }
}

impl DecisionWeights {
    pub fn validate(&self) -> Result<(), MimicError> {
        let ps = [self.p_improve, self.p_degrade, self.p_unchanged];
        if ps.iter().any(|p| !(0.0..=1.0).contains(p)) || (ps.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(MimicError::Config(format!(
                "decision probabilities must lie in [0, 1] and sum to 1, got {ps:?}"
            )));
        }
        Ok(())
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Decision {
        let u: f64 = rng.random();
        if u < self.p_improve {
            Decision::Improve
        } else if u < self.p_improve + self.p_degrade {
            Decision::Degrade
        } else {
            Decision::Unchanged
        }
    }
}

/// Whether improving a property raises or lowers it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Lower,
    Higher,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanEntry {
    pub property: Property,
    pub direction: Direction,
    /// Recorded profile value.
    pub baseline: f64,
    pub target: f64,
    /// Working value after the draws so far.
    pub current: f64,
    pub step_fraction: f64,
}

impl PlanEntry {
    fn new(property: Property, direction: Direction, baseline: f64, gain: f64, step_fraction: f64) -> Self {
        let raw = match direction {
            Direction::Lower => baseline * (1.0 - gain),
            Direction::Higher => baseline * (1.0 + gain),
        };
        let target = match property.unit() {
            Unit::Probability => raw.clamp(0.0, 1.0),
            _ => raw.max(0.0),
        };
        Self {
            property,
            direction,
            baseline,
            target,
            current: baseline,
            step_fraction,
        }
    }

    pub fn gap(&self) -> f64 {
        self.target - self.current
    }

    /// Share of the distance from baseline to target covered so far, in
    /// `[0, 1]`; zero when target and baseline coincide.
    pub fn progress(&self) -> f64 {
        let span = self.target - self.baseline;
        if span == 0.0 {
            0.0
        } else {
            ((self.current - self.baseline) / span).clamp(0.0, 1.0)
        }
    }

    pub fn apply(&mut self, d: Decision) {
        let step = self.step_fraction * self.gap();
        match d {
            Decision::Improve => self.current += step,
            Decision::Degrade => {
                self.current -= step;
                // never worse than the recorded baseline
                self.current = match self.direction {
                    Direction::Lower => self.current.min(self.baseline),
                    Direction::Higher => self.current.max(self.baseline),
                };
            }
            Decision::Unchanged => {}
        }
    }
}

/// Properties the assistance adjusts, with the sense of improvement.
pub const ADJUSTED: [(Property, Direction); 5] = [
    (Property::A2, Direction::Lower),
    (Property::A3, Direction::Lower),
    (Property::S4, Direction::Higher),
    (Property::S5, Direction::Higher),
    (Property::S6, Direction::Higher),
];

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustmentPlan {
    pub entries: Vec<PlanEntry>,
    pub weights: DecisionWeights,
    /// Number of draws applied.
    pub epochs: u64,
    /// Decisions of the latest draw.
    pub last: Vec<(Property, Decision)>,
}

impl AdjustmentPlan {
    /// Plan at the recorded baseline, before any draw.
    pub fn new(
        profile: &PlayerProfile,
        objective: &ImprovementObjective,
        weights: DecisionWeights,
        step_fraction: f64,
    ) -> Result<Self, MimicError> {
        if !profile.gate.is_accepted() {
            return Err(MimicError::Gate(profile.player_id.clone()));
        }
        objective.validate()?;
        weights.validate()?;
        if !(step_fraction > 0.0 && step_fraction <= 1.0) {
            return Err(MimicError::Config(format!("step_fraction must lie in (0, 1], got {step_fraction}")));
        }
        let entries = ADJUSTED
            .iter()
            .map(|&(p, dir)| {
                let baseline = profile
                    .value(p)
                    .ok_or_else(|| MimicError::Config(format!("profile has no value for {p}")))?;
                Ok(PlanEntry::new(p, dir, baseline, objective.target_gain, step_fraction))
            })
            .collect::<Result<_, MimicError>>()?;
        Ok(Self {
            entries,
            weights,
            epochs: 0,
            last: Vec::new(),
        })
    }

    pub fn entry(&self, p: Property) -> Option<&PlanEntry> {
        self.entries.iter().find(|e| e.property == p)
    }

    pub fn progress(&self, p: Property) -> f64 {
        self.entry(p).map_or(0.0, PlanEntry::progress)
    }

    /// One adjustment epoch: an independent decision per property.
    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> &[(Property, Decision)] {
        self.last.clear();
        for e in &mut self.entries {
            let d = self.weights.draw(rng);
            e.apply(d);
            self.last.push((e.property, d));
        }
        self.epochs += 1;
        &self.last
    }
}

/// A plan for `profile` with the default 60/30/10 weights and a 0.1 step,
/// after its first draw.
pub fn plan_adjustment<R: Rng + ?Sized>(
    profile: &PlayerProfile,
    objective: &ImprovementObjective,
    rng: &mut R,
) -> Result<AdjustmentPlan, MimicError> {
    let mut plan = AdjustmentPlan::new(profile, objective, DecisionWeights::default(), 0.1)?;
    plan.draw(rng);
    Ok(plan)
}
