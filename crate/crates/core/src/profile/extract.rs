//! Per-event observations behind each property.
//!
//! Extraction never fails on incomplete engagements: an engagement missing a
//! timestamp a property needs simply contributes nothing to that property.

use crate::simulator::Hitbox;
use crate::telemetry::{engagements, EngagementTrace, EventKind, GreatCircle, Vec3, WeaponSlot};

use super::formulas::{angular_divergence, recoil_compensation, suspiciousness, HitSequence};
use super::property::{PerProperty, Property};
use super::PropertyEstimate;

/// One aim path between lock-region entry and aim-on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathShape {
    /// Mean signed vertical offset from the start→target great circle.
    pub mean_offset: f64,
    /// Mean absolute vertical offset.
    pub mean_abs_offset: f64,
}

impl PathShape {
    pub fn is_above(&self) -> bool {
        self.mean_offset > 0.0
    }
}

/// Every per-event observation extracted from one or more traces.
///
/// Binary properties (a6, a8, s2–s5) hold 1.0/0.0 outcomes so that every
/// property's estimate is the plain mean of its sample list.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PropertySamples {
    pub values: PerProperty<Vec<f64>>,
    /// Per-path mean absolute offset, the arch height observations of a8.
    pub arch_heights: Vec<f64>,
    /// Hits per body part.
    pub hit_parts: [u64; 7],
    /// Hits per body part of each engagement with at least one hit.
    pub hit_part_clusters: Vec<[u64; 7]>,
    /// Body part aimed at on the first aim-on of each engagement.
    pub aimed_parts: [u64; 7],
    /// Compensation terms skipped for a zero denominator.
    pub comp_warnings: usize,
}

impl PropertySamples {
    pub fn get(&self, p: Property) -> &[f64] {
        &self.values[p]
    }

    pub fn n(&self, p: Property) -> usize {
        self.values[p].len()
    }

    pub fn estimate(&self, p: Property) -> PropertyEstimate {
        PropertyEstimate::from_samples(&self.values[p])
    }

    pub fn arch_height(&self) -> PropertyEstimate {
        PropertyEstimate::from_samples(&self.arch_heights)
    }

    /// Appends another sample set; the result is independent of merge order
    /// up to the order of the sample lists.
    pub fn merge(&mut self, other: &PropertySamples) {
        for p in Property::ALL {
            self.values[p].extend_from_slice(&other.values[p]);
        }
        self.arch_heights.extend_from_slice(&other.arch_heights);
        self.hit_part_clusters.extend_from_slice(&other.hit_part_clusters);
        for i in 0..7 {
            self.hit_parts[i] += other.hit_parts[i];
            self.aimed_parts[i] += other.aimed_parts[i];
        }
        self.comp_warnings += other.comp_warnings;
    }

    pub fn merged<'a>(all: impl IntoIterator<Item = &'a PropertySamples>) -> PropertySamples {
        let mut out = PropertySamples::default();
        for s in all {
            out.merge(s);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingEstimates {
    pub a2: PropertyEstimate,
    pub a3: PropertyEstimate,
    pub a4: PropertyEstimate,
    pub a5: PropertyEstimate,
    pub a7: PropertyEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceEstimates {
    /// P(X = reload) after an emptied primary magazine.
    pub p_reload: PropertyEstimate,
    /// P(Y = above) over aim paths.
    pub p_above: PropertyEstimate,
    pub arch_height: PropertyEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotEstimates {
    pub s2: PropertyEstimate,
    pub s3: PropertyEstimate,
    pub s4: PropertyEstimate,
    pub s5: PropertyEstimate,
    pub s7: PropertyEstimate,
}

pub fn extract_timing(trace: &EngagementTrace) -> TimingEstimates {
    let s = extract_samples(trace);
    TimingEstimates {
        a2: s.estimate(Property::A2),
        a3: s.estimate(Property::A3),
        a4: s.estimate(Property::A4),
        a5: s.estimate(Property::A5),
        a7: s.estimate(Property::A7),
    }
}

pub fn extract_choices(trace: &EngagementTrace) -> ChoiceEstimates {
    let s = extract_samples(trace);
    ChoiceEstimates {
        p_reload: s.estimate(Property::A6),
        p_above: s.estimate(Property::A8),
        arch_height: s.arch_height(),
    }
}

pub fn extract_shots(trace: &EngagementTrace) -> ShotEstimates {
    let s = extract_samples(trace);
    ShotEstimates {
        s2: s.estimate(Property::S2),
        s3: s.estimate(Property::S3),
        s4: s.estimate(Property::S4),
        s5: s.estimate(Property::S5),
        s7: s.estimate(Property::S7),
    }
}

/// Shape of an aim path relative to the great circle through its endpoints.
/// `None` when the endpoints coincide, are antipodal, or there are fewer than
/// two samples.
pub fn path_shape(samples: &[Vec3]) -> Option<PathShape> {
    let (first, last) = (samples.first()?, samples.last()?);
    if samples.len() < 2 {
        return None;
    }
    let gc = GreatCircle::through(*first, *last)?;
    let n = samples.len() as f64;
    let (sum, sum_abs) = samples.iter().fold((0.0, 0.0), |(s, sa), p| {
        let o = gc.offset_of(p);
        (s + o, sa + o.abs())
    });
    Some(PathShape {
        mean_offset: sum / n,
        mean_abs_offset: sum_abs / n,
    })
}

struct ShotRecord {
    gaze: Vec3,
    moving: bool,
    hit: Option<(bool, Vec3)>,
}

/// Extracts every per-event observation from one trace.
pub fn extract_samples(trace: &EngagementTrace) -> PropertySamples {
    let mut out = PropertySamples::default();
    let rate = trace.tick_rate as f64;
    let secs = |ticks: u64| ticks as f64 / rate;

    let engs = engagements(trace);
    let mut prev_kill: Option<u64> = None;
    for eng in &engs {
        let evs = eng.events(trace);
        let m = eng.milestones(trace);
        let EventKind::SightingStart { gaze: a, target, scale } = evs[0].kind else {
            unreachable!("engagements open with a sighting")
        };
        let hitbox = Hitbox::new(target, scale);
        let nearest = hitbox.nearest(&a).clone();

        if let Ok(d) = angular_divergence(&a, &nearest.center) {
            out.values[Property::A1].push(d);
        }
        if let Some(kill) = m.kill {
            out.values[Property::A2].push(secs(kill - m.sighting));
        }
        if let (Some(lock), Some(aim)) = (m.lock_enter, m.aim_on) {
            if aim >= lock {
                out.values[Property::A3].push(secs(aim - lock));
                let path: Vec<Vec3> = evs
                    .iter()
                    .filter(|e| e.tick >= lock && e.tick <= aim)
                    .filter_map(|e| match e.kind {
                        EventKind::AimSample { gaze } => Some(gaze),
                        _ => None,
                    })
                    .collect();
                if let Some(shape) = path_shape(&path) {
                    out.values[Property::A8].push(if shape.is_above() { 1.0 } else { 0.0 });
                    out.arch_heights.push(shape.mean_abs_offset);
                }
            }
        }
        if eng.chained {
            if let (Some(t2), Some(aim)) = (prev_kill, m.aim_on) {
                if aim >= t2 {
                    out.values[Property::A4].push(secs(aim - t2));
                }
            }
        }
        prev_kill = m.kill;

        // Shots and hits, paired by tick.
        let mut shots: Vec<ShotRecord> = Vec::new();
        let mut kill_seen = false;
        let mut hits_before_kill: Vec<bool> = Vec::new();
        let mut cluster = [0u64; 7];
        for ev in evs {
            match ev.kind {
                EventKind::ShotFired { gaze, moving } => shots.push(ShotRecord { gaze, moving, hit: None }),
                EventKind::Hit { part, critical, dir } => {
                    if let Some(last) = shots.last_mut() {
                        if last.hit.is_none() {
                            last.hit = Some((critical, dir));
                        }
                    }
                    out.hit_parts[part.index()] += 1;
                    cluster[part.index()] += 1;
                    out.values[Property::S3].push(if part == nearest.part { 1.0 } else { 0.0 });
                    if !kill_seen {
                        hits_before_kill.push(critical);
                    }
                }
                EventKind::Kill => kill_seen = true,
                _ => {}
            }
        }
        if cluster.iter().any(|&c| c > 0) {
            out.hit_part_clusters.push(cluster);
        }
        if let Some(part) = evs.iter().find_map(|e| match e.kind {
            EventKind::AimOn { part } => Some(part),
            _ => None,
        }) {
            out.aimed_parts[part.index()] += 1;
        }

        if kill_seen {
            if let Ok(v) = suspiciousness(&HitSequence::new(hits_before_kill)) {
                out.values[Property::S1].push(v);
            }
        }
        for s in &shots {
            let hit = if s.hit.is_some() { 1.0 } else { 0.0 };
            out.values[Property::S4].push(hit);
            if s.moving {
                out.values[Property::S2].push(hit);
            }
        }
        if let Some(first) = shots.first() {
            out.values[Property::S5].push(if first.hit.is_some() { 1.0 } else { 0.0 });
            if let Some((_, c1)) = first.hit {
                out.values[Property::S7].push(a.angle_to(&c1));
            }
        }
        let pairs: Vec<(Vec3, Vec3)> = shots
            .iter()
            .filter_map(|s| s.hit.map(|(_, dir)| (s.gaze, dir)))
            .collect();
        if let Ok(c) = recoil_compensation(&a, &pairs) {
            out.comp_warnings += c.skipped;
            if c.skipped < pairs.len() {
                out.values[Property::S6].push(c.value);
            }
        }
    }

    weapon_handling(trace, &mut out);
    out
}

/// a5, a6 and a7 follow magazine state across engagement boundaries.
fn weapon_handling(trace: &EngagementTrace, out: &mut PropertySamples) {
    let rate = trace.tick_rate as f64;
    let mut weapon = WeaponSlot::Primary;
    // (tick emptied, weapon emptied)
    let mut awaiting_aim_off: Option<u64> = None;
    let mut awaiting_action: Option<(u64, WeaponSlot)> = None;

    for ev in &trace.events {
        match ev.kind {
            EventKind::MagazineEmpty => {
                awaiting_aim_off = Some(ev.tick);
                awaiting_action = Some((ev.tick, weapon));
            }
            EventKind::AimOff => {
                if let Some(t) = awaiting_aim_off.take() {
                    out.values[Property::A5].push((ev.tick - t) as f64 / rate);
                }
            }
            EventKind::Kill | EventKind::SightingStart { .. } => awaiting_aim_off = None,
            EventKind::Reload => {
                if let Some((_, emptied)) = awaiting_action.take() {
                    if emptied == WeaponSlot::Primary {
                        out.values[Property::A6].push(1.0);
                    }
                }
            }
            EventKind::WeaponSwitch { to } => {
                if let Some((t, emptied)) = awaiting_action.take() {
                    if emptied == WeaponSlot::Primary && to == WeaponSlot::Secondary {
                        out.values[Property::A6].push(0.0);
                        out.values[Property::A7].push((ev.tick - t) as f64 / rate);
                    }
                }
                weapon = to;
            }
            _ => {}
        }
    }
}
