//! Tick loop turning a skill model into a trace.
//!
//! Each tick the simulated human produces a raw aim input, an
//! [`InputFilter`] may rewrite it, and the engine applies the result and
//! emits the events it causes. Genuine play uses the identity filter.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::telemetry::{BodyPart, EngagementTrace, EventKind, GameEvent, GreatCircle, Outcome, Tick, Vec3, WeaponSlot};

use super::hitbox::Hitbox;
use super::path::{aim_path, PathStyle};
use super::rng::RngStream;
use super::scenario::Scenario;
use super::skill::{lognormal_mean_sd, SkillModel};
use super::weapon::WeaponSpec;
use super::SimError;

/// Gaze counts as aimed at a part once within this fraction of its radius.
pub const AIM_ON_FRACTION: f64 = 0.1;
pub const HEALTH: i32 = 100;
const TREMOR_RHO: f64 = 0.85;
const MOVING_NOISE_FACTOR: f64 = 2.5;
const APPROACH_JITTER: f64 = 0.15;
const MAX_PITCH: f64 = 1.4;

pub fn damage(part: BodyPart) -> i32 {
    match part {
        BodyPart::Head => 100,
        BodyPart::Chest => 34,
        BodyPart::Stomach => 30,
        BodyPart::ArmL | BodyPart::ArmR => 25,
        BodyPart::LegL | BodyPart::LegR => 20,
    }
}

/// One tick of aim input: a view-angle change and the trigger state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AimInput {
    pub d_yaw: f64,
    pub d_pitch: f64,
    pub trigger: bool,
}

impl AimInput {
    pub const NONE: AimInput = AimInput {
        d_yaw: 0.0,
        d_pitch: 0.0,
        trigger: false,
    };

    /// Bit-for-bit equality (distinguishes `0.0` from `-0.0`).
    pub fn identical(&self, other: &AimInput) -> bool {
        self.d_yaw.to_bits() == other.d_yaw.to_bits()
            && self.d_pitch.to_bits() == other.d_pitch.to_bits()
            && self.trigger == other.trigger
    }
}

/// Stage of the current engagement from the player's side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Reacting,
    /// Coarse movement towards the lock region.
    Flick,
    /// Inside the lock region, approaching the aimed body part.
    FineAim,
    /// Aimed at the part, shooting when ready.
    Tracking,
    /// Magazine ran dry; still aiming.
    Holding,
    /// Aim released, waiting for a reloaded or drawn weapon.
    Rearming,
}

impl Phase {
    pub fn is_approach(self) -> bool {
        matches!(self, Phase::Reacting | Phase::Flick | Phase::FineAim)
    }
}

/// What a filter can see at one tick.
#[derive(Debug, Clone, Copy)]
pub struct TickContext<'a> {
    pub tick: Tick,
    pub tick_rate: u32,
    pub lock_region: f64,
    /// Current (yaw, pitch) before this tick's input.
    pub gaze: (f64, f64),
    pub opponent: Option<&'a Hitbox>,
    pub aimed_part: Option<BodyPart>,
    pub phase: Option<Phase>,
    pub sighting_tick: Option<Tick>,
    pub lock_tick: Option<Tick>,
    pub aim_on_tick: Option<Tick>,
    pub blinded: bool,
    pub trigger_held: bool,
    pub press_tick: Option<Tick>,
    pub weapon: &'a WeaponSpec,
    /// Loaded, drawn and not reloading.
    pub weapon_usable: bool,
    /// Recoil index of the next bullet if the trigger is (kept) pressed.
    pub next_shot_index: usize,
    pub engagement_shots: u32,
}

impl TickContext<'_> {
    pub fn gaze_dir(&self) -> Vec3 {
        Vec3::from_yaw_pitch(self.gaze.0, self.gaze.1)
    }

    pub fn in_lock_region(&self) -> bool {
        self.opponent
            .is_some_and(|hb| self.gaze_dir().angle_to(&hb.target) <= self.lock_region)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeaponChoice {
    Reload,
    Switch,
}

/// Hook between the simulated human and the game.
pub trait InputFilter {
    fn begin_match(&mut self, _rng: RngStream, _match_id: &str) {}
    fn select_aim_part(&mut self, _tick: Tick, _gaze: &Vec3, _hitbox: &Hitbox, human: BodyPart) -> BodyPart {
        human
    }
    fn filter(&mut self, _ctx: &TickContext, raw: AimInput) -> AimInput {
        raw
    }
    fn weapon_choice(&mut self, _tick: Tick, human: WeaponChoice) -> WeaponChoice {
        human
    }
    /// Events in emission order; called before and after each tick's input.
    fn observe(&mut self, _events: &[GameEvent]) {}
}

impl<F: InputFilter + ?Sized> InputFilter for &mut F {
    fn begin_match(&mut self, rng: RngStream, match_id: &str) {
        (**self).begin_match(rng, match_id)
    }
    fn select_aim_part(&mut self, tick: Tick, gaze: &Vec3, hitbox: &Hitbox, human: BodyPart) -> BodyPart {
        (**self).select_aim_part(tick, gaze, hitbox, human)
    }
    fn filter(&mut self, ctx: &TickContext, raw: AimInput) -> AimInput {
        (**self).filter(ctx, raw)
    }
    fn weapon_choice(&mut self, tick: Tick, human: WeaponChoice) -> WeaponChoice {
        (**self).weapon_choice(tick, human)
    }
    fn observe(&mut self, events: &[GameEvent]) {
        (**self).observe(events)
    }
}

/// Unassisted play.
#[derive(Debug, Clone, Copy, Default)]
pub struct Genuine;

impl InputFilter for Genuine {}

/// Raw and filtered input of one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TickRecord {
    pub tick: Tick,
    pub raw: AimInput,
    pub out: AimInput,
}

/// Wraps a filter and keeps every tick's raw and filtered input.
#[derive(Debug)]
pub struct Recorder<F> {
    pub inner: F,
    pub records: Vec<TickRecord>,
}

impl<F> Recorder<F> {
    pub fn new(inner: F) -> Self {
        Self {
            inner,
            records: Vec::new(),
        }
    }
}

impl<F: InputFilter> InputFilter for Recorder<F> {
    fn begin_match(&mut self, rng: RngStream, match_id: &str) {
        self.inner.begin_match(rng, match_id)
    }
    fn select_aim_part(&mut self, tick: Tick, gaze: &Vec3, hitbox: &Hitbox, human: BodyPart) -> BodyPart {
        self.inner.select_aim_part(tick, gaze, hitbox, human)
    }
    fn filter(&mut self, ctx: &TickContext, raw: AimInput) -> AimInput {
        let out = self.inner.filter(ctx, raw);
        self.records.push(TickRecord {
            tick: ctx.tick,
            raw,
            out,
        });
        out
    }
    fn weapon_choice(&mut self, tick: Tick, human: WeaponChoice) -> WeaponChoice {
        self.inner.weapon_choice(tick, human)
    }
    fn observe(&mut self, events: &[GameEvent]) {
        self.inner.observe(events)
    }
}

/// Identifiers written into the trace header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchIds {
    pub player_id: String,
    pub match_id: String,
}

impl MatchIds {
    pub fn new(player_id: impl Into<String>, match_id: impl Into<String>) -> Self {
        Self {
            player_id: player_id.into(),
            match_id: match_id.into(),
        }
    }

    /// Default match id for a seed.
    pub fn for_seed(player_id: impl Into<String>, seed: u64) -> Self {
        Self::new(player_id, format!("{seed:016x}"))
    }
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a < -PI {
        a += 2.0 * PI;
    }
    a
}

fn delta_to(from: (f64, f64), to: (f64, f64)) -> (f64, f64) {
    (wrap_angle(to.0 - from.0), to.1 - from.1)
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn ticks(seconds: f64, rate: f64) -> Tick {
    (seconds * rate).round().max(1.0) as Tick
}

#[derive(Debug)]
struct Pending {
    slot: WeaponSlot,
    hold_until: Tick,
    action_at: Tick,
    reload: bool,
}

#[derive(Debug)]
struct Press {
    one_tap: bool,
    shots: usize,
    release_at: Tick,
}

#[derive(Debug)]
struct Blind {
    start: Tick,
    end: Tick,
    active: bool,
}

#[derive(Debug)]
struct Plan {
    start_tick: Tick,
    points: Vec<(f64, f64)>,
}

#[derive(Debug)]
struct Eng {
    sighting: Tick,
    hitbox: Hitbox,
    part: BodyPart,
    hp: i32,
    phase: Phase,
    react_until: Tick,
    flick_step: f64,
    plan: Option<Plan>,
    above: bool,
    lock_tick: Option<Tick>,
    aim_on_tick: Option<Tick>,
    reference: (f64, f64),
    disciplined: bool,
    hasty_delay: Tick,
    shots: u32,
    timeout_at: Tick,
    aim: ChaCha8Rng,
    decide: ChaCha8Rng,
}

enum TickOutcome {
    Continue,
    Killed,
    Escaped,
}

struct Engine<'a, F: InputFilter + ?Sized> {
    skill: &'a SkillModel,
    scenario: &'a Scenario,
    weapons: [&'a WeaponSpec; 2],
    filter: &'a mut F,
    rng: RngStream,
    rate: f64,
    lock: f64,
    trace: EngagementTrace,
    observed: usize,
    yaw: f64,
    pitch: f64,
    slot: WeaponSlot,
    ammo: [u32; 2],
    ready_at: Tick,
    next_fire: Tick,
    pending: Option<Pending>,
    empties: u64,
    held: bool,
    press_tick: Option<Tick>,
    spray: usize,
    last_shot: Tick,
    press: Option<Press>,
    moving: bool,
    cooldown_until: Tick,
    blind: Option<Blind>,
    eng: Option<Eng>,
}

fn slot_index(s: WeaponSlot) -> usize {
    match s {
        WeaponSlot::Primary => 0,
        WeaponSlot::Secondary => 1,
    }
}

impl<'a, F: InputFilter + ?Sized> Engine<'a, F> {
    fn emit(&mut self, tick: Tick, kind: EventKind) {
        self.trace.push(tick, kind);
    }

    fn flush(&mut self) {
        if self.observed < self.trace.events.len() {
            self.filter.observe(&self.trace.events[self.observed..]);
            self.observed = self.trace.events.len();
        }
    }

    fn gaze(&self) -> Vec3 {
        Vec3::from_yaw_pitch(self.yaw, self.pitch)
    }

    fn weapon(&self) -> &'a WeaponSpec {
        self.weapons[slot_index(self.slot)]
    }

    fn usable(&self, k: Tick) -> bool {
        self.pending.is_none() && k >= self.ready_at && self.ammo[slot_index(self.slot)] > 0
    }

    fn blinded(&self) -> bool {
        self.blind.as_ref().is_some_and(|b| b.active)
    }

    fn next_shot_index(&self) -> usize {
        let j = if self.held { self.spray + 1 } else { 1 };
        j.min(self.weapon().magazine_size as usize)
    }

    fn run(mut self) -> Result<EngagementTrace, SimError> {
        let mut m = self.rng.stream("match", 0);
        let (lo, hi) = self.scenario.match_minutes;
        let minutes = if hi > lo { m.random_range(lo..hi) } else { lo };
        self.trace.duration = minutes * 60.0;
        self.trace.outcome = if m.random_bool(self.skill.win_rate) {
            Outcome::Won
        } else {
            Outcome::Lost
        };
        let rounds = self.scenario.rounds as u64;
        let round_ticks = (self.trace.duration * self.rate) as u64 / rounds;
        let weights = &self.scenario.opponents_per_round;
        let total_w: f64 = weights.iter().sum();
        for r in 0..rounds {
            let round_start = r * round_ticks;
            let mut rr = self.rng.stream("round", r);
            let mut pick = rr.random_range(0.0..total_w);
            let mut n_opp = weights.len();
            for (i, w) in weights.iter().enumerate() {
                if pick < *w {
                    n_opp = i + 1;
                    break;
                }
                pick -= w;
            }
            let budget = ((self.scenario.engagement_timeout * n_opp as f64 + 12.0) * self.rate) as u64;
            let earliest = round_start + (2.0 * self.rate) as u64;
            let latest = (round_start + round_ticks).saturating_sub(budget).max(earliest);
            let start = rr.random_range(earliest..=latest);
            self.start_round(round_start);
            self.run_scene(start, n_opp as u64, r)?;
        }
        self.flush();
        Ok(self.trace)
    }

    fn start_round(&mut self, tick: Tick) {
        if self.slot == WeaponSlot::Secondary {
            self.emit(tick, EventKind::WeaponSwitch { to: WeaponSlot::Primary });
            self.slot = WeaponSlot::Primary;
            self.ammo[0] = self.weapons[0].magazine_size;
            self.ready_at = tick;
            self.next_fire = tick;
        }
        self.flush();
    }

    fn run_scene(&mut self, start: Tick, n_opp: u64, round: u64) -> Result<(), SimError> {
        let mut k = start;
        let mut opp = 0;
        let mut scene_open = true;
        self.begin_engagement(k, round, opp)?;
        self.flush();
        loop {
            k += 1;
            match self.tick(k)? {
                TickOutcome::Killed => {
                    if opp + 1 < n_opp {
                        opp += 1;
                        self.begin_engagement(k, round, opp)?;
                    } else {
                        scene_open = false;
                    }
                }
                TickOutcome::Escaped => scene_open = false,
                TickOutcome::Continue => {}
            }
            self.flush();
            let idle = self.pending.is_none()
                && k >= self.ready_at
                && !self.held
                && self.blind.is_none()
                && self.press.is_none();
            if !scene_open && self.eng.is_none() && idle {
                let mag = self.weapons[0].magazine_size;
                if self.slot == WeaponSlot::Primary && (self.ammo[0] as f64) < self.skill.top_up_below * mag as f64 {
                    self.emit(k, EventKind::Reload);
                    self.ammo[0] = mag;
                    self.ready_at = k + self.weapons[0].reload_ticks as Tick;
                    self.next_fire = self.next_fire.max(self.ready_at);
                    self.flush();
                }
                return Ok(());
            }
        }
    }

    fn begin_engagement(&mut self, k: Tick, round: u64, index: u64) -> Result<(), SimError> {
        let mut place = self.rng.stream_at("place", &[round, index]);
        let mut decide = self.rng.stream_at("decide", &[round, index]);
        let aim = self.rng.stream_at("aim", &[round, index]);
        let skill = self.skill;

        let extra = if skill.crosshair_offset_mean > 0.0 {
            Exp::new(1.0 / skill.crosshair_offset_mean)
                .expect("positive rate")
                .sample(&mut place)
        } else {
            0.0
        };
        let theta = (self.lock + 0.03 + extra).min(1.2);
        let target_pitch: f64 = place.random_range(-0.12..0.12);
        let dp = (target_pitch - self.pitch).clamp(-0.8 * theta, 0.8 * theta);
        let side = if self.yaw > 0.6 {
            -1.0
        } else if self.yaw < -0.6 {
            1.0
        } else if place.random_bool(0.5) {
            1.0
        } else {
            -1.0
        };
        let tp = self.pitch + dp;
        let mut dy = (theta * theta - dp * dp).sqrt() / ((self.pitch + tp) / 2.0).cos();
        let gaze = self.gaze();
        let mut target = Vec3::from_yaw_pitch(self.yaw + side * dy, tp);
        while gaze.angle_to(&target) < self.lock + 0.02 {
            dy *= 1.1;
            target = Vec3::from_yaw_pitch(self.yaw + side * dy, tp);
        }
        let scale = place.random_range(0.7..1.4);
        let hitbox = Hitbox::new(target, scale);
        self.emit(k, EventKind::SightingStart { gaze, target, scale });

        let total: f64 = skill.part_weights.iter().sum();
        let mut pick = decide.random_range(0.0..total);
        let mut human_part = BodyPart::Chest;
        for p in BodyPart::ALL {
            let w = skill.part_weights[p.index()];
            if pick < w {
                human_part = p;
                break;
            }
            pick -= w;
        }
        let part = self.filter.select_aim_part(k, &gaze, &hitbox, human_part);

        let reaction = lognormal_mean_sd(&mut decide, skill.reaction_time_mean, skill.reaction_time_sd);
        let flick = lognormal_mean_sd(&mut decide, skill.flick_speed, 0.15 * skill.flick_speed);
        let disciplined = decide.random_bool(skill.first_shot_discipline);
        let above = decide.random_bool(skill.p_spiral_above);
        let hasty_delay = decide.random_range(1..=3);

        if self.blind.is_none() && place.random_bool(self.scenario.blind_event_rate) {
            let s = k + place.random_range(1..=30);
            let e = s + place.random_range(32..=96);
            self.blind = Some(Blind {
                start: s,
                end: e,
                active: false,
            });
        }

        self.eng = Some(Eng {
            sighting: k,
            hitbox,
            part,
            hp: HEALTH,
            phase: Phase::Reacting,
            react_until: k + ticks(reaction, self.rate),
            flick_step: flick / self.rate,
            plan: None,
            above,
            lock_tick: None,
            aim_on_tick: None,
            reference: (self.yaw, self.pitch),
            disciplined,
            hasty_delay,
            shots: 0,
            timeout_at: k + ticks(self.scenario.engagement_timeout, self.rate),
            aim,
            decide,
        });
        Ok(())
    }

    /// Fine-aim path from the current gaze, first applied at `start_tick + 1`.
    fn plan_fine_aim(&mut self, start_tick: Tick) -> Result<(), SimError> {
        let skill = self.skill;
        let rate = self.rate;
        let gaze = self.gaze();
        let eng = self.eng.as_mut().expect("engagement active");
        let centre = eng.hitbox.part(eng.part).center;
        let dist = gaze.angle_to(&centre);
        let secs = dist / skill.aim_speed * lognormal_mean_sd(&mut eng.decide, 1.0, skill.aim_time_cv);
        let n = ticks(secs, rate).max(2) as usize;
        let height = lognormal_mean_sd(&mut eng.decide, skill.arch_height_mean, 0.3 * skill.arch_height_mean);
        let style = PathStyle::Arc {
            above: eng.above,
            mean_abs_offset: height,
        };
        let points = aim_path(gaze, centre, n, style)?.iter().map(|p| p.yaw_pitch()).collect();
        eng.plan = Some(Plan { start_tick, points });
        Ok(())
    }

    fn tick(&mut self, k: Tick) -> Result<TickOutcome, SimError> {
        // blinding
        let mut replan = false;
        if let Some(b) = self.blind.as_mut() {
            if !b.active && b.start == k {
                b.active = true;
                self.emit(k, EventKind::BlindStart);
            } else if b.active && b.end == k {
                self.blind = None;
                self.emit(k, EventKind::BlindEnd);
                replan = true;
            }
        }
        if replan && self.eng.as_ref().is_some_and(|e| e.phase == Phase::FineAim) {
            self.plan_fine_aim(k - 1)?;
        }

        // weapon bookkeeping
        if let Some(p) = &self.pending {
            let (hold_until, action_at, slot, reload) = (p.hold_until, p.action_at, p.slot, p.reload);
            if hold_until == k {
                if let Some(eng) = self.eng.as_mut().filter(|e| e.phase == Phase::Holding) {
                    eng.phase = Phase::Rearming;
                    self.emit(k, EventKind::AimOff);
                }
            }
            if action_at == k {
                self.pending = None;
                let choice = match slot {
                    WeaponSlot::Primary => {
                        let human = if reload { WeaponChoice::Reload } else { WeaponChoice::Switch };
                        self.filter.weapon_choice(k, human)
                    }
                    WeaponSlot::Secondary => WeaponChoice::Reload,
                };
                match choice {
                    WeaponChoice::Reload => {
                        self.emit(k, EventKind::Reload);
                        self.ammo[slot_index(self.slot)] = self.weapon().magazine_size;
                        self.ready_at = k + self.weapon().reload_ticks as Tick;
                    }
                    WeaponChoice::Switch => {
                        self.emit(k, EventKind::WeaponSwitch { to: WeaponSlot::Secondary });
                        self.slot = WeaponSlot::Secondary;
                        self.ready_at = k + self.weapon().draw_ticks as Tick;
                    }
                }
                self.next_fire = self.next_fire.max(self.ready_at);
            }
        }
        let usable = self.usable(k);
        if let Some(eng) = self.eng.as_mut() {
            if eng.phase == Phase::Rearming && usable {
                eng.phase = Phase::Tracking;
                eng.reference = eng.hitbox.part(eng.part).center.yaw_pitch();
                let part = eng.part;
                self.emit(k, EventKind::AimOn { part });
            }
        }
        self.flush();

        let raw = self.human_input(k)?;
        let out = {
            let eng = self.eng.as_ref();
            let ctx = TickContext {
                tick: k,
                tick_rate: self.trace.tick_rate,
                lock_region: self.lock,
                gaze: (self.yaw, self.pitch),
                opponent: eng.map(|e| &e.hitbox),
                aimed_part: eng.map(|e| e.part),
                phase: eng.map(|e| e.phase),
                sighting_tick: eng.map(|e| e.sighting),
                lock_tick: eng.and_then(|e| e.lock_tick),
                aim_on_tick: eng.and_then(|e| e.aim_on_tick),
                blinded: self.blinded(),
                trigger_held: self.held,
                press_tick: self.press_tick,
                weapon: self.weapon(),
                weapon_usable: usable,
                next_shot_index: self.next_shot_index(),
                engagement_shots: eng.map_or(0, |e| e.shots),
            };
            self.filter.filter(&ctx, raw)
        };
        if !(out.d_yaw.is_finite() && out.d_pitch.is_finite()) {
            return Err(SimError::Domain(format!("non-finite aim input at tick {k}")));
        }
        self.yaw = wrap_angle(self.yaw + out.d_yaw);
        self.pitch = (self.pitch + out.d_pitch).clamp(-MAX_PITCH, MAX_PITCH);
        let gaze = self.gaze();

        // approach milestones
        let mut new_lock = false;
        if let Some(eng) = self.eng.as_mut() {
            if eng.phase.is_approach() {
                let moved = out.d_yaw != 0.0 || out.d_pitch != 0.0;
                if moved || eng.phase == Phase::FineAim {
                    self.trace.push(k, EventKind::AimSample { gaze });
                }
                let centre = eng.hitbox.part(eng.part);
                if eng.lock_tick.is_none() && gaze.angle_to(&eng.hitbox.target) <= self.lock {
                    eng.lock_tick = Some(k);
                    eng.phase = Phase::FineAim;
                    new_lock = true;
                    self.trace.push(k, EventKind::LockRegionEnter);
                } else if eng.lock_tick.is_some_and(|l| l < k)
                    && gaze.angle_to(&centre.center) <= AIM_ON_FRACTION * centre.radius
                {
                    eng.aim_on_tick = Some(k);
                    eng.phase = Phase::Tracking;
                    eng.reference = centre.center.yaw_pitch();
                    let part = eng.part;
                    self.trace.push(k, EventKind::AimOn { part });
                }
            }
        }
        if new_lock {
            self.plan_fine_aim(k)?;
        }

        // trigger
        if out.trigger && !self.held {
            self.held = true;
            self.press_tick = Some(k);
            self.spray = 0;
            self.emit(k, EventKind::TriggerPress);
        } else if !out.trigger && self.held {
            self.held = false;
            self.emit(k, EventKind::TriggerRelease);
        }

        // firing
        if self.held && self.eng.is_some() && self.usable(k) && k >= self.next_fire {
            let weapon = self.weapon();
            self.spray += 1;
            let j = self.spray.min(weapon.magazine_size as usize);
            let (ry, rp) = super::weapon::recoil_offset(weapon, j)?;
            let bullet = Vec3::from_yaw_pitch(self.yaw + ry, self.pitch + rp);
            self.emit(k, EventKind::ShotFired { gaze, moving: self.moving });
            self.last_shot = k;
            self.next_fire = k + weapon.fire_interval as Tick;
            let si = slot_index(self.slot);
            self.ammo[si] -= 1;
            let eng = self.eng.as_mut().expect("checked above");
            eng.shots += 1;
            let struck = eng.hitbox.struck(&bullet).map(|p| p.part);
            if let Some(part) = struck {
                eng.hp -= damage(part);
                self.trace.push(
                    k,
                    EventKind::Hit {
                        part,
                        critical: part.is_critical(),
                        dir: bullet,
                    },
                );
            }
            let killed = eng.hp <= 0;
            if self.ammo[si] == 0 {
                self.emit(k, EventKind::MagazineEmpty);
                self.on_empty(k);
                if !killed {
                    if let Some(eng) = self.eng.as_mut() {
                        eng.phase = Phase::Holding;
                    }
                }
                self.press = None;
            }
            if killed {
                self.emit(k, EventKind::Kill);
                self.eng = None;
                self.press = None;
                return Ok(TickOutcome::Killed);
            }
        }

        if let Some(eng) = &self.eng {
            if k >= eng.timeout_at {
                if matches!(eng.phase, Phase::Tracking | Phase::Holding) {
                    self.emit(k, EventKind::AimOff);
                }
                self.eng = None;
                self.press = None;
                return Ok(TickOutcome::Escaped);
            }
        }
        Ok(TickOutcome::Continue)
    }

    fn on_empty(&mut self, k: Tick) {
        let mut w = self.rng.stream("weapon", self.empties);
        self.empties += 1;
        let skill = self.skill;
        let hold = ticks(lognormal_mean_sd(&mut w, skill.empty_hold_mean, 0.35 * skill.empty_hold_mean), self.rate);
        let gap = ticks(lognormal_mean_sd(&mut w, skill.switch_delay_mean, 0.35 * skill.switch_delay_mean), self.rate);
        let reload = w.random_bool(skill.p_reload);
        self.pending = Some(Pending {
            slot: self.slot,
            hold_until: k + hold,
            action_at: k + hold + gap,
            reload,
        });
    }

    fn human_input(&mut self, k: Tick) -> Result<AimInput, SimError> {
        let blinded = self.blinded();
        let usable = self.usable(k);
        let lock = self.lock;
        let skill = self.skill;
        let gaze = self.gaze();
        let cur = (self.yaw, self.pitch);
        let next_index = self.next_shot_index();
        let weapon = self.weapon();
        let Some(eng) = self.eng.as_mut() else {
            self.moving = false;
            return Ok(AimInput::NONE);
        };
        // two draws every tick keep noise aligned with the engagement clock
        let noise = (normal(&mut eng.aim), normal(&mut eng.aim));
        if blinded {
            return Ok(AimInput::NONE);
        }
        if eng.phase == Phase::Reacting {
            if k < eng.react_until {
                return Ok(AimInput::NONE);
            }
            eng.phase = Phase::Flick;
        }
        match eng.phase {
            Phase::Reacting => Ok(AimInput::NONE),
            Phase::Flick => {
                let centre = eng.hitbox.part(eng.part).center;
                let remaining = gaze.angle_to(&centre);
                let step = eng.flick_step.min(remaining - 0.5 * lock);
                let Some(gc) = GreatCircle::through(gaze, centre).filter(|_| step > 0.0) else {
                    return Ok(AimInput::NONE);
                };
                let (dy, dp) = delta_to(cur, gc.point(step / remaining, 0.0).yaw_pitch());
                Ok(AimInput {
                    d_yaw: dy,
                    d_pitch: dp,
                    trigger: false,
                })
            }
            Phase::FineAim => {
                let Some(plan) = &eng.plan else {
                    return Ok(AimInput::NONE);
                };
                let n = plan.points.len() - 1;
                let idx = ((k - plan.start_tick) as usize).min(n);
                let (py, pp) = plan.points[idx];
                let amp = APPROACH_JITTER * skill.aim_noise_sd * (PI * idx as f64 / n as f64).sin();
                let jy = amp * noise.0;
                let jp = amp * noise.1;
                let (dy, dp) = delta_to(cur, (py + jy, pp + jp));
                Ok(AimInput {
                    d_yaw: dy,
                    d_pitch: dp,
                    trigger: false,
                })
            }
            Phase::Tracking | Phase::Holding | Phase::Rearming => {
                let centre = eng.hitbox.part(eng.part).center.yaw_pitch();
                let (ry, rp) = weapon.recoil_curve[next_index - 1];
                let reference = (
                    centre.0 - skill.recoil_comp_skill * ry,
                    centre.1 - skill.recoil_comp_skill * rp,
                );
                let factor = if self.moving { MOVING_NOISE_FACTOR } else { 1.0 };
                let sn = skill.aim_noise_sd * (1.0 - TREMOR_RHO * TREMOR_RHO).sqrt() * factor;
                let e_prev = delta_to(eng.reference, cur);
                let want = (
                    reference.0 + TREMOR_RHO * e_prev.0 + sn * noise.0,
                    reference.1 + TREMOR_RHO * e_prev.1 + sn * noise.1,
                );
                eng.reference = reference;
                let (dy, dp) = delta_to(cur, want);

                let mut trigger = false;
                if eng.phase == Phase::Tracking && usable {
                    if let Some(press) = &self.press {
                        let done = if press.one_tap {
                            k >= press.release_at
                        } else {
                            self.spray >= press.shots && k > self.last_shot
                        };
                        if done {
                            let cool = if press.one_tap { 10..=18 } else { 8..=16 };
                            self.cooldown_until = k + eng.decide.random_range(cool);
                            self.press = None;
                            self.moving = false;
                        } else {
                            trigger = true;
                        }
                    } else if k >= self.cooldown_until {
                        let aim_on = eng.aim_on_tick.unwrap_or(k);
                        let ready = if eng.shots > 0 {
                            true
                        } else if eng.disciplined {
                            let part = eng.hitbox.part(eng.part);
                            let err = gaze.angle_to(&part.center);
                            k > aim_on && (err < 0.5 * part.radius || k >= aim_on + 24)
                        } else {
                            k >= aim_on + eng.hasty_delay
                        };
                        if ready {
                            let one_tap = eng.decide.random_bool(skill.one_tap_p);
                            let shots = if one_tap { 1 } else { eng.decide.random_range(3..=8) };
                            self.moving = eng.decide.random_bool(skill.move_while_shoot_p);
                            self.press = Some(Press {
                                one_tap,
                                shots,
                                release_at: k + 2,
                            });
                            trigger = true;
                        }
                    }
                } else {
                    self.press = None;
                    self.moving = false;
                }
                Ok(AimInput {
                    d_yaw: dy,
                    d_pitch: dp,
                    trigger,
                })
            }
        }
    }
}

/// Simulates one match with an arbitrary input filter.
pub fn simulate_match_with<F: InputFilter + ?Sized>(
    ids: &MatchIds,
    skill: &SkillModel,
    scenario: &Scenario,
    weapons: &[WeaponSpec],
    seed: u64,
    filter: &mut F,
) -> Result<EngagementTrace, SimError> {
    skill.validate()?;
    scenario.validate()?;
    let [primary, secondary] = weapons else {
        return Err(SimError::Config(format!(
            "expected a primary and a secondary weapon, got {}",
            weapons.len()
        )));
    };
    primary.validate()?;
    secondary.validate()?;
    let rng = RngStream::new(seed);
    filter.begin_match(rng.child("assist", 0), &ids.match_id);
    let mut trace = EngagementTrace::new(ids.match_id.clone(), ids.player_id.clone(), Outcome::Lost, 0.0);
    trace.tick_rate = scenario.tick_rate;
    let engine = Engine {
        skill,
        scenario,
        weapons: [primary, secondary],
        filter,
        rng,
        rate: scenario.tick_rate as f64,
        lock: scenario.lock_region(),
        trace,
        observed: 0,
        yaw: 0.0,
        pitch: 0.0,
        slot: WeaponSlot::Primary,
        ammo: [primary.magazine_size, secondary.magazine_size],
        ready_at: 0,
        next_fire: 0,
        pending: None,
        empties: 0,
        held: false,
        press_tick: None,
        spray: 0,
        last_shot: 0,
        press: None,
        moving: false,
        cooldown_until: 0,
        blind: None,
        eng: None,
    };
    engine.run()
}
