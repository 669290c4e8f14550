use std::fmt;

use super::engagement::engagements;
use super::event::{EngagementTrace, EventKind, Tick};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    TickOrder,
    HitWithoutShot,
    KillWithoutHit,
    BlindNesting,
    /// `t1 < t'1 < t'2 < t2` does not hold for an engagement.
    EngagementOrder,
    NonUnitDirection,
    Header,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub tick: Option<Tick>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tick {
            Some(t) => write!(f, "tick {t}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: ViolationKind, tick: Option<Tick>, message: String) {
        self.violations.push(Violation { kind, tick, message });
    }
}

/// Checks every trace invariant. Violations are reported, never raised.
pub fn validate_trace(trace: &EngagementTrace) -> ValidationReport {
    let mut report = ValidationReport::default();

    if trace.tick_rate == 0 {
        report.push(ViolationKind::Header, None, "tick rate must be positive".into());
    }
    if !trace.duration.is_finite() || trace.duration < 0.0 {
        report.push(ViolationKind::Header, None, format!("invalid duration {}", trace.duration));
    }

    let mut prev_tick: Option<Tick> = None;
    // Tick of a ShotFired not yet matched by a Hit.
    let mut open_shot: Option<Tick> = None;
    let mut blinded: Option<Tick> = None;
    let mut in_engagement = false;
    let mut hits_in_engagement = 0usize;

    for ev in &trace.events {
        if let Some(p) = prev_tick {
            if ev.tick < p {
                report.push(
                    ViolationKind::TickOrder,
                    Some(ev.tick),
                    format!("{} at tick {} follows tick {}", ev.kind.name(), ev.tick, p),
                );
            }
        }
        prev_tick = Some(ev.tick);

        for (role, v) in ev.kind.directions() {
            if !v.is_finite() || !v.is_unit() {
                report.push(
                    ViolationKind::NonUnitDirection,
                    Some(ev.tick),
                    format!("{} {role} has norm {}", ev.kind.name(), v.norm()),
                );
            }
        }

        match ev.kind {
            EventKind::SightingStart { scale, .. } => {
                in_engagement = true;
                hits_in_engagement = 0;
                if !(scale.is_finite() && scale > 0.0) {
                    report.push(ViolationKind::Header, Some(ev.tick), format!("invalid hitbox scale {scale}"));
                }
            }
            EventKind::ShotFired { .. } => open_shot = Some(ev.tick),
            EventKind::Hit { .. } => {
                if open_shot == Some(ev.tick) {
                    open_shot = None;
                    hits_in_engagement += 1;
                } else {
                    report.push(
                        ViolationKind::HitWithoutShot,
                        Some(ev.tick),
                        format!("Hit at tick {} has no ShotFired at the same tick", ev.tick),
                    );
                }
            }
            EventKind::Kill => {
                if !in_engagement || hits_in_engagement == 0 {
                    report.push(
                        ViolationKind::KillWithoutHit,
                        Some(ev.tick),
                        format!("Kill at tick {} without a preceding Hit in its engagement", ev.tick),
                    );
                }
            }
            EventKind::BlindStart => {
                if let Some(open) = blinded {
                    report.push(
                        ViolationKind::BlindNesting,
                        Some(ev.tick),
                        format!("BlindStart while already blinded since tick {open}"),
                    );
                }
                blinded = Some(ev.tick);
            }
            EventKind::BlindEnd => {
                if blinded.take().is_none() {
                    report.push(ViolationKind::BlindNesting, Some(ev.tick), "BlindEnd without BlindStart".into());
                }
            }
            _ => {}
        }
    }
    if let Some(open) = blinded {
        report.push(
            ViolationKind::BlindNesting,
            Some(open),
            format!("BlindStart at tick {open} is never closed"),
        );
    }

    for eng in engagements(trace) {
        let m = eng.milestones(trace);
        if let (Some(lock), Some(aim), Some(kill)) = (m.lock_enter, m.aim_on, m.kill) {
            if !(m.sighting < lock && lock < aim && aim < kill) {
                report.push(
                    ViolationKind::EngagementOrder,
                    Some(m.sighting),
                    format!(
                        "engagement at tick {} breaks t1 < t'1 < t'2 < t2 (sighting {}, lock {}, aim-on {}, kill {})",
                        m.sighting, m.sighting, lock, aim, kill
                    ),
                );
            }
        }
    }

    report
}
