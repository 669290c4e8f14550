//! Generative model of a simulated player.

use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use super::SimError;

/// Parameters of a simulated human player.
///
/// Times are in seconds, angles in radians, rates in radians per second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkillModel {
    pub reaction_time_mean: f64,
    pub reaction_time_sd: f64,
    /// Stationary standard deviation of hand tremor while tracking.
    pub aim_noise_sd: f64,
    /// Mean angular speed of the fine-aim phase inside the lock region.
    pub aim_speed: f64,
    pub recoil_comp_skill: f64,
    pub p_reload: f64,
    pub p_spiral_above: f64,
    pub arch_height_mean: f64,
    pub move_while_shoot_p: f64,
    /// Probability of waiting for the sights to settle before the first shot.
    pub first_shot_discipline: f64,
    pub one_tap_p: f64,

    /// Speed of the coarse flick towards the lock region.
    #[serde(default = "defaults::flick_speed")]
    pub flick_speed: f64,
    /// Coefficient of variation of fine-aim durations.
    #[serde(default = "defaults::aim_time_cv")]
    pub aim_time_cv: f64,
    /// Mean angle by which the crosshair misses the lock region at sighting.
    #[serde(default = "defaults::crosshair_offset_mean")]
    pub crosshair_offset_mean: f64,
    /// Relative preference for each body part (head, chest, stomach, arm_l,
    /// arm_r, leg_l, leg_r).
    #[serde(default = "defaults::part_weights")]
    pub part_weights: [f64; 7],
    #[serde(default = "defaults::win_rate")]
    pub win_rate: f64,
    /// Mean time a player keeps aiming after the magazine runs dry.
    #[serde(default = "defaults::empty_hold_mean")]
    pub empty_hold_mean: f64,
    /// Mean extra time between letting go of the aim and drawing the
    /// secondary weapon (or starting a reload).
    #[serde(default = "defaults::switch_delay_mean")]
    pub switch_delay_mean: f64,
    /// After a fight the primary is topped up when fewer than this share of
    /// its magazine is left.
    #[serde(default = "defaults::top_up_below")]
    pub top_up_below: f64,
}

mod defaults {
    pub fn flick_speed() -> f64 {
        5.0
    }
    pub fn aim_time_cv() -> f64 {
        0.3
    }
    pub fn crosshair_offset_mean() -> f64 {
        0.25
    }
    pub fn part_weights() -> [f64; 7] {
        [0.30, 0.40, 0.16, 0.03, 0.03, 0.04, 0.04]
    }
    pub fn win_rate() -> f64 {
        0.8
    }
    pub fn empty_hold_mean() -> f64 {
        0.35
    }
    pub fn switch_delay_mean() -> f64 {
        0.3
    }
    pub fn top_up_below() -> f64 {
        0.3
    }
}

impl Default for SkillModel {
    fn default() -> Self {
        Self {
            reaction_time_mean: 0.25,
            reaction_time_sd: 0.05,
            aim_noise_sd: 0.005,
            aim_speed: 0.8,
            recoil_comp_skill: 0.6,
            p_reload: 0.7,
            p_spiral_above: 0.65,
            arch_height_mean: 0.012,
            move_while_shoot_p: 0.25,
            first_shot_discipline: 0.6,
            one_tap_p: 0.2,
            flick_speed: defaults::flick_speed(),
            aim_time_cv: defaults::aim_time_cv(),
            crosshair_offset_mean: defaults::crosshair_offset_mean(),
            part_weights: defaults::part_weights(),
            win_rate: defaults::win_rate(),
            empty_hold_mean: defaults::empty_hold_mean(),
            switch_delay_mean: defaults::switch_delay_mean(),
            top_up_below: defaults::top_up_below(),
        }
    }
}

impl SkillModel {
    pub fn validate(&self) -> Result<(), SimError> {
        let probs = [
            ("recoil_comp_skill", self.recoil_comp_skill),
            ("p_reload", self.p_reload),
            ("p_spiral_above", self.p_spiral_above),
            ("move_while_shoot_p", self.move_while_shoot_p),
            ("first_shot_discipline", self.first_shot_discipline),
            ("one_tap_p", self.one_tap_p),
            ("win_rate", self.win_rate),
            ("top_up_below", self.top_up_below),
        ];
        for (k, v) in probs {
            if !(0.0..=1.0).contains(&v) {
                return Err(SimError::Config(format!("{k} must lie in [0, 1], got {v}")));
            }
        }
        let non_negative = [
            ("reaction_time_mean", self.reaction_time_mean),
            ("reaction_time_sd", self.reaction_time_sd),
            ("aim_noise_sd", self.aim_noise_sd),
            ("arch_height_mean", self.arch_height_mean),
            ("aim_time_cv", self.aim_time_cv),
            ("crosshair_offset_mean", self.crosshair_offset_mean),
            ("empty_hold_mean", self.empty_hold_mean),
            ("switch_delay_mean", self.switch_delay_mean),
        ];
        for (k, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(SimError::Config(format!("{k} must be a finite value >= 0, got {v}")));
            }
        }
        for (k, v) in [("aim_speed", self.aim_speed), ("flick_speed", self.flick_speed)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SimError::Config(format!("{k} must be positive, got {v}")));
            }
        }
        if self.part_weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) || self.part_weights.iter().sum::<f64>() <= 0.0 {
            return Err(SimError::Config("part_weights must be non-negative with a positive sum".into()));
        }
        Ok(())
    }
}

/// Log-normal with the given mean and standard deviation; a point mass at
/// `mean` when `sd` is zero.
pub fn lognormal_mean_sd<R: Rng + ?Sized>(rng: &mut R, mean: f64, sd: f64) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    if sd <= 0.0 {
        return mean;
    }
    let s2 = (1.0 + (sd / mean).powi(2)).ln();
    LogNormal::new(mean.ln() - s2 / 2.0, s2.sqrt())
        .expect("finite parameters")
        .sample(rng)
}

/// Spread of the genuine player population used for rule calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkillPopulation {
    pub centre: SkillModel,
    /// Relative spread applied to each continuous parameter.
    pub spread: f64,
}

impl Default for SkillPopulation {
    fn default() -> Self {
        Self {
            centre: SkillModel::default(),
            spread: 0.2,
        }
    }
}

impl SkillPopulation {
    /// Draws one player. Probabilities are clamped to a plausible band.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SkillModel {
        let c = &self.centre;
        let mut jitter = |v: f64| lognormal_mean_sd(rng, v, v * self.spread);
        let mut m = SkillModel {
            reaction_time_mean: jitter(c.reaction_time_mean),
            reaction_time_sd: jitter(c.reaction_time_sd),
            aim_noise_sd: jitter(c.aim_noise_sd),
            aim_speed: jitter(c.aim_speed),
            recoil_comp_skill: jitter(c.recoil_comp_skill).min(0.95),
            p_reload: jitter(c.p_reload).min(0.95),
            p_spiral_above: jitter(c.p_spiral_above).min(0.95),
            arch_height_mean: jitter(c.arch_height_mean),
            move_while_shoot_p: jitter(c.move_while_shoot_p).min(0.9),
            first_shot_discipline: jitter(c.first_shot_discipline).min(0.95),
            one_tap_p: jitter(c.one_tap_p).min(0.9),
            flick_speed: jitter(c.flick_speed),
            aim_time_cv: jitter(c.aim_time_cv),
            crosshair_offset_mean: jitter(c.crosshair_offset_mean),
            part_weights: c.part_weights,
            win_rate: c.win_rate,
            empty_hold_mean: jitter(c.empty_hold_mean),
            switch_delay_mean: jitter(c.switch_delay_mean),
            top_up_below: c.top_up_below,
        };
        for w in &mut m.part_weights {
            *w = lognormal_mean_sd(rng, *w, *w * self.spread);
        }
        m
    }
}
