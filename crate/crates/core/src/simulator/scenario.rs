use serde::{Deserialize, Serialize};

use crate::telemetry::DEFAULT_TICK_RATE;

use super::SimError;

/// Match layout: how many rounds, how many opponents per round, how often
/// the player gets blinded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub rounds: u32,
    /// Relative weights of meeting 1, 2, 3, ... opponents in a round.
    pub opponents_per_round: Vec<f64>,
    /// Probability that a sighting is followed by a blinding grenade.
    pub blind_event_rate: f64,
    pub map_seed: u64,
    pub tick_rate: u32,
    /// Match length bounds in minutes of game time.
    pub match_minutes: (f64, f64),
    /// Half-angle of the lock region, degrees.
    pub lock_region_deg: f64,
    /// Seconds after a sighting before an unkilled opponent escapes.
    pub engagement_timeout: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            rounds: 30,
            opponents_per_round: vec![0.15, 0.3, 0.3, 0.15, 0.1],
            blind_event_rate: 0.08,
            map_seed: 0,
            tick_rate: DEFAULT_TICK_RATE,
            match_minutes: (45.0, 60.0),
            lock_region_deg: 15.0,
            engagement_timeout: 5.0,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<(), SimError> {
        let err = |m: &str| Err(SimError::Config(m.to_string()));
        if self.rounds == 0 {
            return err("rounds must be >= 1");
        }
        if self.opponents_per_round.is_empty()
            || self.opponents_per_round.iter().any(|w| !(*w >= 0.0 && w.is_finite()))
            || self.opponents_per_round.iter().sum::<f64>() <= 0.0
        {
            return err("opponents_per_round must hold non-negative weights with a positive sum");
        }
        if !(0.0..=1.0).contains(&self.blind_event_rate) {
            return err("blind_event_rate must lie in [0, 1]");
        }
        if self.tick_rate == 0 {
            return err("tick_rate must be positive");
        }
        let (lo, hi) = self.match_minutes;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return err("match_minutes must satisfy 0 < min <= max");
        }
        if !(self.lock_region_deg > 0.0 && self.lock_region_deg < 60.0) {
            return err("lock_region_deg must lie in (0, 60)");
        }
        if !(self.engagement_timeout > 0.5 && self.engagement_timeout < 30.0) {
            return err("engagement_timeout must lie in (0.5, 30) seconds");
        }
        // scenes must fit inside a round
        let round_secs = lo * 60.0 / self.rounds as f64;
        let scene_secs = self.engagement_timeout * self.opponents_per_round.len() as f64 + 15.0;
        if round_secs < scene_secs {
            return err("rounds are too short for the configured scenes; raise match_minutes or lower rounds");
        }
        Ok(())
    }

    pub fn lock_region(&self) -> f64 {
        self.lock_region_deg.to_radians()
    }
}
