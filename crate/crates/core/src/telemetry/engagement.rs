//! Splitting a trace into engagements.
//!
//! An engagement runs from a `SightingStart` up to (not including) the next
//! `SightingStart`. It is lethal when it contains a `Kill`. A sighting at the
//! same tick as the previous engagement's kill continues the same scene: the
//! next opponent was already in view when the first one went down.

use super::event::{EngagementTrace, EventKind, GameEvent, Tick};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Engagement {
    /// Index of the opening `SightingStart` in `trace.events`.
    pub start: usize,
    /// One past the last event index.
    pub end: usize,
    /// The sighting happened at the tick of the previous engagement's kill.
    pub chained: bool,
}

impl Engagement {
    pub fn events<'a>(&self, trace: &'a EngagementTrace) -> &'a [GameEvent] {
        &trace.events[self.start..self.end]
    }

    pub fn sighting_tick(&self, trace: &EngagementTrace) -> Tick {
        trace.events[self.start].tick
    }

    /// First occurrence ticks of the four engagement milestones:
    /// sighting, lock-region entry, aim-on and kill.
    pub fn milestones(&self, trace: &EngagementTrace) -> Milestones {
        let mut m = Milestones {
            sighting: self.sighting_tick(trace),
            lock_enter: None,
            aim_on: None,
            kill: None,
        };
        for ev in self.events(trace) {
            match ev.kind {
                EventKind::LockRegionEnter if m.lock_enter.is_none() => m.lock_enter = Some(ev.tick),
                EventKind::AimOn { .. } if m.aim_on.is_none() => m.aim_on = Some(ev.tick),
                EventKind::Kill if m.kill.is_none() => m.kill = Some(ev.tick),
                _ => {}
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Milestones {
    pub sighting: Tick,
    pub lock_enter: Option<Tick>,
    pub aim_on: Option<Tick>,
    pub kill: Option<Tick>,
}

pub fn engagements(trace: &EngagementTrace) -> Vec<Engagement> {
    let starts: Vec<usize> = trace
        .events
        .iter()
        .enumerate()
        .filter(|(_, e)| matches!(e.kind, EventKind::SightingStart { .. }))
        .map(|(i, _)| i)
        .collect();
    let mut out: Vec<Engagement> = Vec::with_capacity(starts.len());
    for (k, &start) in starts.iter().enumerate() {
        let end = starts.get(k + 1).copied().unwrap_or(trace.events.len());
        let chained = out.last().is_some_and(|prev| {
            prev.milestones(trace).kill == Some(trace.events[start].tick)
        });
        out.push(Engagement { start, end, chained });
    }
    out
}
