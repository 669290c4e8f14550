//! Deterministic, seeded generator of engagement telemetry.

mod engine;
mod hitbox;
mod path;
mod rng;
mod scenario;
mod skill;
mod weapon;

use rayon::prelude::*;
use thiserror::Error;

use crate::telemetry::EngagementTrace;

pub use engine::{
    damage, simulate_match_with, AimInput, Genuine, InputFilter, MatchIds, Phase, Recorder, TickContext, TickRecord,
    WeaponChoice, AIM_ON_FRACTION, HEALTH,
};
pub use hitbox::{Hitbox, PartGeometry};
pub use path::{aim_path, ease, PathStyle};
pub use rng::{derive_seed, RngStream};
pub use scenario::Scenario;
pub use skill::{lognormal_mean_sd, SkillModel, SkillPopulation};
pub use weapon::{recoil_offset, RecoilOffset, WeaponSpec};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// The built-in rifle and pistol.
pub fn default_weapons() -> Vec<WeaponSpec> {
    vec![WeaponSpec::rifle(), WeaponSpec::pistol()]
}

/// One genuine match. The match id is the seed in hex and the player id is
/// `player`.
pub fn simulate_match(
    skill: &SkillModel,
    scenario: &Scenario,
    weapons: &[WeaponSpec],
    seed: u64,
) -> Result<EngagementTrace, SimError> {
    simulate_match_with(&MatchIds::for_seed("player", seed), skill, scenario, weapons, seed, &mut Genuine)
}

/// `n_matches` genuine matches; match `i` is seeded with
/// `derive_seed(base_seed, i)`. Matches run in parallel and come back in
/// index order.
pub fn simulate_campaign(
    player_id: &str,
    skill: &SkillModel,
    scenario: &Scenario,
    weapons: &[WeaponSpec],
    n_matches: usize,
    base_seed: u64,
) -> Result<Vec<EngagementTrace>, SimError> {
    if n_matches == 0 {
        return Err(SimError::Config("a campaign needs at least one match".into()));
    }
    (0..n_matches as u64)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(base_seed, i);
            simulate_match_with(&MatchIds::for_seed(player_id, seed), skill, scenario, weapons, seed, &mut Genuine)
        })
        .collect()
}
