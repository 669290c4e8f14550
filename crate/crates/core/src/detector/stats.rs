//! Per-match summary statistics that rule-based detectors look at.

use crate::profile::{extract_samples, Property, PropertySamples};
use crate::telemetry::{engagements, EngagementTrace, EventKind};

/// A mean with the number of samples behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub value: Option<f64>,
    pub n: usize,
}

impl Support {
    fn of(xs: &[f64]) -> Self {
        Self {
            value: (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64),
            n: xs.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchStats {
    pub match_id: String,
    pub s3: Support,
    pub s4: Support,
    pub s5: Support,
    /// Mean seconds from sighting to kill.
    pub time_to_kill: Support,
    /// Fastest view rotation between consecutive ticks while approaching
    /// a target (rad/s).
    pub max_snap_speed: f64,
}

/// Fastest one-tick rotation among a trace's approach samples, counting the
/// gaze at each sighting as the first sample.
pub fn max_snap_speed(trace: &EngagementTrace) -> f64 {
    let rate = trace.tick_rate as f64;
    let mut best = 0.0f64;
    for eng in engagements(trace) {
        let mut prev = None;
        for ev in eng.events(trace) {
            let gaze = match ev.kind {
                EventKind::SightingStart { gaze, .. } | EventKind::AimSample { gaze } => gaze,
                _ => continue,
            };
            if let Some((t, g)) = prev {
                if ev.tick == t + 1 {
                    best = best.max(gaze.angle_to(&g) * rate);
                }
            }
            prev = Some((ev.tick, gaze));
        }
    }
    best
}

pub fn stats_from_samples(match_id: &str, samples: &PropertySamples, max_snap_speed: f64) -> MatchStats {
    MatchStats {
        match_id: match_id.to_string(),
        s3: Support::of(samples.get(Property::S3)),
        s4: Support::of(samples.get(Property::S4)),
        s5: Support::of(samples.get(Property::S5)),
        time_to_kill: Support::of(samples.get(Property::A2)),
        max_snap_speed,
    }
}

pub fn match_stats(trace: &EngagementTrace) -> MatchStats {
    stats_from_samples(&trace.match_id, &extract_samples(trace), max_snap_speed(trace))
}
