//! Hand-built micro-traces and a brute-force recomputation of the properties
//! straight from their definitions. The oracle never calls the extractor; it
//! works from the engagement descriptions the traces were built from.

#![allow(dead_code)]

use aimmimic::profile::Property;
use aimmimic::simulator::Hitbox;
use aimmimic::telemetry::{BodyPart, EngagementTrace, EventKind, Outcome, Vec3, WeaponSlot};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const RATE: f64 = 64.0;

#[derive(Debug, Clone)]
pub struct Shot {
    pub tick: u64,
    pub gaze: Vec3,
    pub moving: bool,
    pub hit: Option<(BodyPart, Vec3)>,
}

#[derive(Debug, Clone)]
pub enum AfterEmpty {
    Reload(u64),
    Switch(u64),
}

#[derive(Debug, Clone)]
pub struct MicroEngagement {
    pub sighting: u64,
    pub gaze: Vec3,
    pub target: Vec3,
    pub lock: Option<u64>,
    pub path: Vec<(u64, Vec3)>,
    pub aim_on: Option<(u64, BodyPart)>,
    pub shots: Vec<Shot>,
    pub kill: Option<u64>,
    /// (tick emptied, aim-off tick, what followed)
    pub empty: Option<(u64, u64, AfterEmpty)>,
}

/// Serialises descriptions into a trace, in tick order.
pub fn build_trace(id: &str, engs: &[MicroEngagement]) -> EngagementTrace {
    let mut t = EngagementTrace::new(id, "micro", Outcome::Won, 60.0);
    for e in engs {
        t.push(e.sighting, EventKind::SightingStart { gaze: e.gaze, target: e.target, scale: 1.0 });
        if let Some(l) = e.lock {
            t.push(l, EventKind::LockRegionEnter);
        }
        for &(tick, gaze) in &e.path {
            t.push(tick, EventKind::AimSample { gaze });
        }
        if let Some((a, part)) = e.aim_on {
            t.push(a, EventKind::AimOn { part });
        }
        for s in &e.shots {
            t.push(s.tick, EventKind::ShotFired { gaze: s.gaze, moving: s.moving });
            if let Some((part, dir)) = s.hit {
                t.push(s.tick, EventKind::Hit { part, critical: part == BodyPart::Head, dir });
            }
        }
        if let Some(k) = e.kill {
            t.push(k, EventKind::Kill);
        }
        if let Some((te, off, ref after)) = e.empty {
            t.push(te, EventKind::MagazineEmpty);
            t.push(off, EventKind::AimOff);
            match *after {
                AfterEmpty::Reload(r) => t.push(r, EventKind::Reload),
                AfterEmpty::Switch(s) => {
                    t.push(s, EventKind::WeaponSwitch { to: WeaponSlot::Secondary });
                    t.push(s + 1, EventKind::WeaponSwitch { to: WeaponSlot::Primary });
                }
            }
        }
    }
    t
}

fn acos_angle(a: &Vec3, b: &Vec3) -> f64 {
    let c = (a.x * b.x + a.y * b.y + a.z * b.z)
        / ((a.x * a.x + a.y * a.y + a.z * a.z).sqrt() * (b.x * b.x + b.y * b.y + b.z * b.z).sqrt());
    c.clamp(-1.0, 1.0).acos()
}

fn euclid(a: &Vec3, b: &Vec3) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2) + (a.z - b.z).powi(2)).sqrt()
}

/// Per-event values of every property the oracle covers, in engagement order.
pub fn oracle(engs: &[MicroEngagement]) -> Vec<(Property, Vec<f64>)> {
    let mut out: Vec<(Property, Vec<f64>)> = [
        Property::A1,
        Property::A2,
        Property::A3,
        Property::A4,
        Property::A5,
        Property::A6,
        Property::A7,
        Property::S1,
        Property::S4,
        Property::S5,
        Property::S6,
        Property::S7,
    ]
    .into_iter()
    .map(|p| (p, Vec::new()))
    .collect();
    let mut push = |p: Property, v: f64| out.iter_mut().find(|(q, _)| *q == p).unwrap().1.push(v);

    let mut prev_kill = None;
    for e in engs {
        let hb = Hitbox::new(e.target, 1.0);
        let nearest = hb
            .parts()
            .iter()
            .map(|p| acos_angle(&e.gaze, &p.center))
            .fold(f64::INFINITY, f64::min);
        push(Property::A1, nearest);
        if let Some(k) = e.kill {
            push(Property::A2, (k - e.sighting) as f64 / RATE);
        }
        if let (Some(l), Some((a, _))) = (e.lock, e.aim_on) {
            push(Property::A3, (a - l) as f64 / RATE);
        }
        if let (Some(k), Some((a, _))) = (prev_kill, e.aim_on) {
            if k == e.sighting {
                push(Property::A4, (a - k) as f64 / RATE);
            }
        }
        prev_kill = e.kill;

        if e.kill.is_some() {
            let crit: Vec<bool> = e.shots.iter().filter_map(|s| s.hit.map(|(p, _)| p == BodyPart::Head)).collect();
            let v = match crit.iter().position(|&c| c) {
                Some(i) => 1.0 / (i + 1) as f64,
                None => 0.0,
            };
            push(Property::S1, v);
        }
        for s in &e.shots {
            push(Property::S4, if s.hit.is_some() { 1.0 } else { 0.0 });
        }
        if let Some(first) = e.shots.first() {
            push(Property::S5, if first.hit.is_some() { 1.0 } else { 0.0 });
            if let Some((_, c1)) = first.hit {
                push(Property::S7, acos_angle(&e.gaze, &c1));
            }
        }
        let hits: Vec<&Shot> = e.shots.iter().filter(|s| s.hit.is_some()).collect();
        if !hits.is_empty() {
            let comp: f64 = hits
                .iter()
                .map(|s| euclid(&e.gaze, &s.gaze) / acos_angle(&e.gaze, &s.hit.unwrap().1).max(1e-6))
                .sum();
            push(Property::S6, comp);
        }
        if let Some((te, off, ref after)) = e.empty {
            push(Property::A5, (off - te) as f64 / RATE);
            match *after {
                AfterEmpty::Reload(_) => push(Property::A6, 1.0),
                AfterEmpty::Switch(s) => {
                    push(Property::A6, 0.0);
                    push(Property::A7, (s - te) as f64 / RATE);
                }
            }
        }
    }
    out
}

fn dir_near(rng: &mut ChaCha8Rng, centre: &Vec3, spread: f64) -> Vec3 {
    let (y, p) = centre.yaw_pitch();
    Vec3::from_yaw_pitch(y + rng.random_range(-spread..spread), p + rng.random_range(-spread..spread))
}

fn engagement(rng: &mut ChaCha8Rng, sighting: u64, chained: bool) -> (MicroEngagement, u64) {
    let target = Vec3::from_yaw_pitch(rng.random_range(-3.0..3.0), rng.random_range(-0.3..0.3));
    let (ty, tp) = target.yaw_pitch();
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let gaze = Vec3::from_yaw_pitch(ty + sign * rng.random_range(0.1..0.5), tp + rng.random_range(-0.2..0.2));
    let hb = Hitbox::new(target, 1.0);

    let mut e = MicroEngagement {
        sighting,
        gaze,
        target,
        lock: None,
        path: Vec::new(),
        aim_on: None,
        shots: Vec::new(),
        kill: None,
        empty: None,
    };
    let mut t = sighting;
    if rng.random_bool(0.85) {
        t += rng.random_range(1..30);
        e.lock = Some(t);
        for _ in 0..rng.random_range(0..3) {
            t += rng.random_range(1..4);
            e.path.push((t, dir_near(rng, &target, 0.05)));
        }
        if rng.random_bool(0.85) {
            t += rng.random_range(1..25);
            e.aim_on = Some((t, BodyPart::ALL[rng.random_range(0..7)]));
        }
    }
    let n_shots = rng.random_range(if chained { 1..3 } else { 1..5 });
    for _ in 0..n_shots {
        t += rng.random_range(1..10);
        let hit = rng.random_bool(0.6).then(|| {
            let part = BodyPart::ALL[rng.random_range(0..7)];
            (part, dir_near(rng, &hb.part(part).center, 0.002))
        });
        e.shots.push(Shot { tick: t, gaze: dir_near(rng, &gaze, 0.05), moving: rng.random_bool(0.3), hit });
    }
    let any_hit = e.shots.iter().any(|s| s.hit.is_some());
    if any_hit && e.aim_on.is_some() && rng.random_bool(0.7) {
        // The kill lands on the last hit; later shots are dropped.
        let last = e.shots.iter().rposition(|s| s.hit.is_some()).unwrap();
        e.shots.truncate(last + 1);
        t = e.shots[last].tick + u64::from(rng.random_bool(0.5));
        e.kill = Some(t);
    } else if rng.random_bool(0.6) {
        let te = t + rng.random_range(0..3);
        let off = te + rng.random_range(1..40);
        let act = off + rng.random_range(1..20);
        e.empty = Some((te, off, if rng.random_bool(0.6) { AfterEmpty::Reload(act) } else { AfterEmpty::Switch(act) }));
        t = act + 1;
    }
    (e, t)
}

fn event_count(e: &MicroEngagement) -> usize {
    let empty = match e.empty {
        Some((_, _, AfterEmpty::Reload(_))) => 3,
        Some((_, _, AfterEmpty::Switch(_))) => 4,
        None => 0,
    };
    1 + e.lock.is_some() as usize
        + e.path.len()
        + e.aim_on.is_some() as usize
        + e.shots.iter().map(|s| 1 + s.hit.is_some() as usize).sum::<usize>()
        + e.kill.is_some() as usize
        + empty
}

/// Random micro-trace of at most 20 events: one engagement, sometimes
/// followed by a chained one starting at the kill tick.
pub fn random_micro(seed: u64) -> Vec<MicroEngagement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let start = rng.random_range(0..100);
        let (first, end) = engagement(&mut rng, start, false);
        let mut engs = vec![first.clone()];
        if let Some(k) = first.kill {
            if rng.random_bool(0.6) {
                engs.push(engagement(&mut rng, k, true).0);
            } else if rng.random_bool(0.5) {
                let gap = rng.random_range(5..50);
                engs.push(engagement(&mut rng, end + gap, false).0);
            }
        }
        if engs.iter().map(event_count).sum::<usize>() <= 20 {
            return engs;
        }
    }
}
