//! Detectors for assisted play: fixed threshold rules and per-property
//! distribution tests against a player's own recorded profile.

mod camouflage;
mod population;
mod rules;
mod shift;
mod stats;

use thiserror::Error;

use crate::profile::{extract_samples, BootstrapCriteria, PropertySamples};
use crate::simulator::SimError;
use crate::telemetry::EngagementTrace;

pub use camouflage::{camouflage, chi_square_homogeneity, clustered_chi_square, proportion_test, CamouflageReport, ChiSquareTest};
pub use population::BaselinePopulation;
pub use rules::{calibrate_rules, quantile, rule_scan, scan_trace, Rule, RuleFlag, RuleSet, ScanResult};
pub use shift::{distribution_shift, engagement_samples, holm, mann_whitney, MannWhitney, PropertyTest, ShiftReport, PER_SHOT};
pub use stats::{match_stats, max_snap_speed, stats_from_samples, MatchStats, Support};

#[derive(Debug, Error)]
pub enum DetectorError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Simulation(#[from] SimError),
}

/// Both detectors' view of one match. `baseline` should come from
/// [`engagement_samples`] over the recorded matches.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchVerdict {
    pub scan: ScanResult,
    pub shift: ShiftReport,
}

impl MatchVerdict {
    pub fn flagged(&self) -> bool {
        self.scan.flagged() || self.shift.flagged()
    }
}

pub fn evaluate_match(
    trace: &EngagementTrace,
    baseline: &PropertySamples,
    rules: &RuleSet,
    alpha: f64,
    criteria: &BootstrapCriteria,
) -> Result<MatchVerdict, DetectorError> {
    let stats = stats_from_samples(&trace.match_id, &extract_samples(trace), max_snap_speed(trace));
    let window = engagement_samples(std::slice::from_ref(trace));
    Ok(MatchVerdict {
        scan: rule_scan(&stats, rules),
        shift: distribution_shift(&window, baseline, alpha, criteria)?,
    })
}
