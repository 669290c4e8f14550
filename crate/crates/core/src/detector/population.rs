use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{match_stats, MatchStats};
use super::DetectorError;
use crate::simulator::{derive_seed, simulate_match_with, Genuine, MatchIds, RngStream, Scenario, SkillPopulation, WeaponSpec};

/// Genuine players drawn around a central skill model, one match each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselinePopulation {
    pub skill: SkillPopulation,
    pub matches: usize,
    pub seed: u64,
}

impl BaselinePopulation {
    pub fn stats(&self, scenario: &Scenario, weapons: &[WeaponSpec]) -> Result<Vec<MatchStats>, DetectorError> {
        if self.matches == 0 {
            return Err(DetectorError::Config("a population needs at least one match".into()));
        }
        let streams = RngStream::new(self.seed);
        (0..self.matches as u64)
            .into_par_iter()
            .map(|i| {
                let skill = self.skill.sample(&mut streams.stream("population", i));
                skill.validate().map_err(DetectorError::Simulation)?;
                let seed = derive_seed(self.seed, i);
                let ids = MatchIds::for_seed(format!("pop{i:04}"), seed);
                let trace = simulate_match_with(&ids, &skill, scenario, weapons, seed, &mut Genuine)?;
                Ok(match_stats(&trace))
            })
            .collect()
    }
}
