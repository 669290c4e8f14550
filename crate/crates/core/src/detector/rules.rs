//! Threshold rules in the style of conventional server-side anti-cheat.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::stats::{match_stats, MatchStats, Support};
use super::DetectorError;
use crate::telemetry::EngagementTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSet {
    pub max_s3: f64,
    pub max_s4: f64,
    pub max_s5: f64,
    /// Seconds.
    pub min_time_to_kill: f64,
    /// Radians per second.
    pub max_aim_snap_speed: f64,
    /// Samples a ratio or mean needs before its rule may fire.
    pub min_support: usize,
}

impl Default for RuleSet {
    /// The thresholds shipped in `configs/experiment.toml`.
    fn default() -> Self {
        Self {
            max_s3: 0.1174,
            max_s4: 0.8756,
            max_s5: 0.9768,
            min_time_to_kill: 0.8291,
            max_aim_snap_speed: 12.479,
            min_support: 20,
        }
    }
}

impl RuleSet {
    pub fn validate(&self) -> Result<(), DetectorError> {
        let vals = [
            self.max_s3,
            self.max_s4,
            self.max_s5,
            self.min_time_to_kill,
            self.max_aim_snap_speed,
        ];
        if vals.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(DetectorError::Config("rule thresholds must be finite and positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    S3,
    S4,
    S5,
    TimeToKill,
    SnapSpeed,
}

impl Rule {
    pub const ALL: [Rule; 5] = [Rule::S3, Rule::S4, Rule::S5, Rule::TimeToKill, Rule::SnapSpeed];

    pub fn id(self) -> &'static str {
        match self {
            Rule::S3 => "max_s3",
            Rule::S4 => "max_s4",
            Rule::S5 => "max_s5",
            Rule::TimeToKill => "min_time_to_kill",
            Rule::SnapSpeed => "max_aim_snap_speed",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleFlag {
    pub rule: Rule,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub match_id: String,
    pub flags: Vec<RuleFlag>,
}

impl ScanResult {
    pub fn flagged(&self) -> bool {
        !self.flags.is_empty()
    }
}

pub fn rule_scan(stats: &MatchStats, rules: &RuleSet) -> ScanResult {
    let mut flags = Vec::new();
    let mut above = |rule, s: Support, threshold: f64| {
        if let Some(v) = s.value.filter(|_| s.n >= rules.min_support) {
            if v > threshold {
                flags.push(RuleFlag {
                    rule,
                    value: v,
                    threshold,
                });
            }
        }
    };
    above(Rule::S3, stats.s3, rules.max_s3);
    above(Rule::S4, stats.s4, rules.max_s4);
    above(Rule::S5, stats.s5, rules.max_s5);
    let ttk = stats.time_to_kill;
    if let Some(v) = ttk.value.filter(|_| ttk.n >= rules.min_support) {
        if v < rules.min_time_to_kill {
            flags.push(RuleFlag {
                rule: Rule::TimeToKill,
                value: v,
                threshold: rules.min_time_to_kill,
            });
        }
    }
    if stats.max_snap_speed > rules.max_aim_snap_speed {
        flags.push(RuleFlag {
            rule: Rule::SnapSpeed,
            value: stats.max_snap_speed,
            threshold: rules.max_aim_snap_speed,
        });
    }
    ScanResult {
        match_id: stats.match_id.clone(),
        flags,
    }
}

pub fn scan_trace(trace: &EngagementTrace, rules: &RuleSet) -> ScanResult {
    rule_scan(&match_stats(trace), rules)
}

/// Linear-interpolation quantile of unsorted data.
pub fn quantile(xs: &[f64], q: f64) -> Option<f64> {
    if xs.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let h = q * (v.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Some(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}

/// Thresholds at the `1 - false_positive_rate` quantile of a genuine
/// population (the lower quantile for time to kill).
pub fn calibrate_rules(
    population: &[MatchStats],
    false_positive_rate: f64,
    min_support: usize,
) -> Result<RuleSet, DetectorError> {
    if !(false_positive_rate > 0.0 && false_positive_rate < 0.5) {
        return Err(DetectorError::Config(format!(
            "false_positive_rate must lie in (0, 0.5), got {false_positive_rate}"
        )));
    }
    let upper = 1.0 - false_positive_rate;
    let col = |f: &dyn Fn(&MatchStats) -> Support| -> Vec<f64> {
        population
            .iter()
            .map(f)
            .filter(|s| s.n >= min_support)
            .filter_map(|s| s.value)
            .collect()
    };
    let need = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| DetectorError::Config(format!("no supported population values for {name}")))
    };
    let snaps: Vec<f64> = population.iter().map(|s| s.max_snap_speed).collect();
    let rules = RuleSet {
        max_s3: need("s3", quantile(&col(&|s| s.s3), upper))?,
        max_s4: need("s4", quantile(&col(&|s| s.s4), upper))?,
        max_s5: need("s5", quantile(&col(&|s| s.s5), upper))?,
        min_time_to_kill: need("time to kill", quantile(&col(&|s| s.time_to_kill), false_positive_rate))?,
        max_aim_snap_speed: need("snap speed", quantile(&snaps, upper))?,
        min_support,
    };
    rules.validate()?;
    Ok(rules)
}
