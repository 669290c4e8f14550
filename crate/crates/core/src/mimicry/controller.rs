//! Adaptive assistance that keeps play inside the owner's recorded profile.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::profile::{PlayerProfile, Property};
use crate::simulator::{lognormal_mean_sd, AimInput, Hitbox, InputFilter, Phase, RngStream, TickContext, WeaponChoice};
use crate::telemetry::{BodyPart, EventKind, GameEvent, Tick, Vec3};

use super::plan::{AdjustmentPlan, Decision, DecisionWeights, ImprovementObjective};
use super::trajectory::{synthesize_trajectory, TrajectoryStyle};
use super::MimicError;

/// When the plan is redrawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Epoch {
    Engagement,
    Match,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MimicConfig {
    pub objective: ImprovementObjective,
    pub decisions: DecisionWeights,
    pub step_fraction: f64,
    pub epoch: Epoch,
    /// Pull towards the aimed part during fine aim per unit of plan progress.
    pub approach_gain: f64,
    /// Pull towards the aimed part per unit of plan progress.
    pub tracking_gain: f64,
    /// Extra pull during sprays per unit of recoil plan progress.
    pub recoil_gain: f64,
    /// Ticks after a press during which input passes untouched.
    pub one_tap_guard_ticks: u64,
    pub post_kill_guard: bool,
    /// Replace fine aim by a synthesized path instead of pulling the
    /// owner's own one.
    pub takeover: bool,
    pub max_weight: f64,
}

impl Default for MimicConfig {
    fn default() -> Self {
        Self {
            objective: ImprovementObjective::default(),
            decisions: DecisionWeights::default(),
            step_fraction: 0.1,
            epoch: Epoch::Engagement,
            approach_gain: 0.25,
            tracking_gain: 0.025,
            recoil_gain: 0.03,
            one_tap_guard_ticks: 3,
            post_kill_guard: true,
            takeover: false,
            max_weight: 0.9,
        }
    }
}

impl MimicConfig {
    pub fn validate(&self) -> Result<(), MimicError> {
        self.objective.validate()?;
        self.decisions.validate()?;
        let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
        if ![self.approach_gain, self.tracking_gain, self.recoil_gain].into_iter().all(finite_nonneg) {
            return Err(MimicError::Config("assist gains must be finite and non-negative".into()));
        }
        if !(0.0..1.0).contains(&self.max_weight) {
            return Err(MimicError::Config(format!("max_weight must lie in [0, 1), got {}", self.max_weight)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AuditKind {
    Plan { property: Property, decision: Decision, working: f64 },
    Takeover { ticks: usize, above: Option<bool> },
    AimPart { part: BodyPart },
    Weapon { choice: WeaponChoice },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditEntry {
    pub match_id: String,
    pub tick: Tick,
    pub kind: AuditKind,
}

impl fmt::Display for AuditEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "match={} tick={} ", self.match_id, self.tick)?;
        match &self.kind {
            AuditKind::Plan {
                property,
                decision,
                working,
            } => write!(f, "plan property={property} decision={decision} working={working:.6}"),
            AuditKind::Takeover { ticks, above } => {
                let side = match above {
                    Some(true) => "above",
                    Some(false) => "below",
                    None => "none",
                };
                write!(f, "takeover ticks={ticks} side={side}")
            }
            AuditKind::AimPart { part } => write!(f, "aim_part part={part}"),
            AuditKind::Weapon { choice } => {
                let c = match choice {
                    WeaponChoice::Reload => "reload",
                    WeaponChoice::Switch => "switch",
                };
                write!(f, "weapon choice={c}")
            }
        }
    }
}

/// Running means of what the assisted play produced.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LiveEstimates {
    pub kills: u64,
    pub kill_time_sum: f64,
    pub shots: u64,
    pub hits: u64,
    pub first_shots: u64,
    pub first_hits: u64,
}

impl LiveEstimates {
    pub fn time_to_kill(&self) -> Option<f64> {
        (self.kills > 0).then(|| self.kill_time_sum / self.kills as f64)
    }

    pub fn hit_ratio(&self) -> Option<f64> {
        (self.shots > 0).then(|| self.hits as f64 / self.shots as f64)
    }

    pub fn first_hit_ratio(&self) -> Option<f64> {
        (self.first_shots > 0).then(|| self.first_hits as f64 / self.first_shots as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Takeover {
    start: Tick,
    points: Vec<(f64, f64)>,
}

/// What the controller knows from the event stream.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AssistState {
    pub last_tick: Option<Tick>,
    pub blinded: bool,
    pub sighting: Option<Tick>,
    pub last_kill: Option<Tick>,
    pub press_tick: Option<Tick>,
    pub engagement_shots: u32,
    pub awaiting_first_hit: bool,
    /// Fine-aim duration (seconds) implied by the working plan.
    pub aim_duration: f64,
    /// Distance left at the start of fine aim.
    pub approach_span: Option<f64>,
    takeover: Option<Takeover>,
    takeover_used: bool,
    pub live: LiveEstimates,
}

pub struct MimicController {
    config: MimicConfig,
    profile: PlayerProfile,
    plan: AdjustmentPlan,
    state: AssistState,
    rng: ChaCha8Rng,
    match_id: String,
    rate: f64,
    audit: Vec<AuditEntry>,
    error: Option<MimicError>,
}

impl MimicController {
    pub fn new(profile: PlayerProfile, config: MimicConfig) -> Result<Self, MimicError> {
        config.validate()?;
        let plan = AdjustmentPlan::new(&profile, &config.objective, config.decisions, config.step_fraction)?;
        for p in [Property::A3, Property::A4, Property::A6, Property::A8] {
            if profile.value(p).is_none() {
                return Err(MimicError::Config(format!("profile has no value for {p}")));
            }
        }
        let state = AssistState {
            aim_duration: profile.value(Property::A3).unwrap_or(0.0),
            ..AssistState::default()
        };
        Ok(Self {
            config,
            profile,
            plan,
            state,
            rng: ChaCha8Rng::seed_from_u64(0),
            match_id: String::new(),
            rate: crate::telemetry::DEFAULT_TICK_RATE as f64,
            audit: Vec::new(),
            error: None,
        })
    }

    pub fn plan(&self) -> &AdjustmentPlan {
        &self.plan
    }

    pub fn state(&self) -> &AssistState {
        &self.state
    }

    pub fn profile(&self) -> &PlayerProfile {
        &self.profile
    }

    pub fn audit(&self) -> &[AuditEntry] {
        &self.audit
    }

    pub fn take_audit(&mut self) -> Vec<AuditEntry> {
        std::mem::take(&mut self.audit)
    }

    /// First sequencing error seen while observing a match, if any.
    pub fn error(&self) -> Option<&MimicError> {
        self.error.as_ref()
    }

    fn log(&mut self, tick: Tick, kind: AuditKind) {
        self.audit.push(AuditEntry {
            match_id: self.match_id.clone(),
            tick,
            kind,
        });
    }

    fn redraw(&mut self, tick: Tick) {
        self.plan.draw(&mut self.rng);
        for i in 0..self.plan.entries.len() {
            let e = &self.plan.entries[i];
            let (property, working) = (e.property, e.current);
            let decision = self.plan.last[i].1;
            self.log(tick, AuditKind::Plan { property, decision, working });
        }
        if let Some(e) = self.plan.entry(Property::A3) {
            self.state.aim_duration = e.current;
        }
    }

    /// Folds observed events into the state. Ticks must not go backwards.
    pub fn update_session(&mut self, events: &[GameEvent]) -> Result<(), MimicError> {
        for ev in events {
            if let Some(last) = self.state.last_tick {
                if ev.tick < last {
                    return Err(MimicError::Sequence { tick: ev.tick, last });
                }
            }
            self.state.last_tick = Some(ev.tick);
            let s = &mut self.state;
            match &ev.kind {
                EventKind::SightingStart { .. } => {
                    s.sighting = Some(ev.tick);
                    s.takeover = None;
                    s.takeover_used = false;
                    s.approach_span = None;
                    s.engagement_shots = 0;
                    s.awaiting_first_hit = false;
                    if self.config.epoch == Epoch::Engagement {
                        self.redraw(ev.tick);
                    }
                }
                EventKind::AimOn { .. } => s.takeover = None,
                EventKind::TriggerPress => s.press_tick = Some(ev.tick),
                EventKind::TriggerRelease => s.press_tick = None,
                EventKind::ShotFired { .. } => {
                    s.live.shots += 1;
                    s.awaiting_first_hit = s.engagement_shots == 0;
                    if s.awaiting_first_hit {
                        s.live.first_shots += 1;
                    }
                    s.engagement_shots += 1;
                }
                EventKind::Hit { .. } => {
                    s.live.hits += 1;
                    if s.awaiting_first_hit {
                        s.live.first_hits += 1;
                    }
                    s.awaiting_first_hit = false;
                }
                EventKind::Kill => {
                    s.last_kill = Some(ev.tick);
                    if let Some(start) = s.sighting {
                        s.live.kills += 1;
                        s.live.kill_time_sum += (ev.tick - start) as f64 / self.rate;
                    }
                }
                EventKind::BlindStart => {
                    s.blinded = true;
                    s.takeover = None;
                }
                EventKind::BlindEnd => s.blinded = false,
                _ => {}
            }
        }
        Ok(())
    }

    fn post_kill_window(&self, tick: Tick) -> bool {
        if !self.config.post_kill_guard {
            return false;
        }
        let Some(kill) = self.state.last_kill else {
            return false;
        };
        let a4 = self.profile.value(Property::A4).unwrap_or(0.0);
        let end = kill + (a4 * self.rate).round() as Tick;
        tick > kill && tick <= end
    }

    /// Whether the raw input must pass through untouched.
    pub fn suppressed(&self, ctx: &TickContext, raw: &AimInput) -> bool {
        if self.state.blinded || ctx.blinded || !ctx.in_lock_region() {
            return true;
        }
        if self.config.one_tap_guard_ticks > 0 && raw.trigger {
            let fresh = match (ctx.trigger_held, ctx.press_tick) {
                (true, Some(p)) => ctx.tick - p < self.config.one_tap_guard_ticks,
                _ => true,
            };
            if fresh {
                return true;
            }
        }
        self.post_kill_window(ctx.tick)
    }

    fn start_takeover(&mut self, ctx: &TickContext, hb: &Hitbox, part: BodyPart) -> Result<(), MimicError> {
        let a3 = self.profile.get(Property::A3);
        let cv = match (a3.value, a3.sd) {
            (Some(m), Some(sd)) if m > 0.0 => sd / m,
            _ => 0.0,
        };
        let mean = self.state.aim_duration.max(1.0 / self.rate);
        let duration = lognormal_mean_sd(&mut self.rng, mean, cv * mean);
        let arch = self.profile.arch_height;
        let height = match (arch.value, arch.sd) {
            (Some(m), Some(sd)) if m > 0.0 => lognormal_mean_sd(&mut self.rng, m, sd),
            (Some(m), _) => m,
            _ => 0.0,
        };
        let style = TrajectoryStyle::Spiral {
            p_above: self.profile.p_above().unwrap_or(0.5),
            arch_height: height,
        };
        let traj = synthesize_trajectory(
            ctx.gaze_dir(),
            hb.part(part).center,
            style,
            duration,
            ctx.tick_rate,
            &mut self.rng,
        )?;
        let ticks = traj.ticks();
        self.log(ctx.tick, AuditKind::Takeover { ticks, above: traj.above });
        self.state.takeover = Some(Takeover {
            start: ctx.tick,
            points: traj.points.iter().map(Vec3::yaw_pitch).collect(),
        });
        Ok(())
    }

    /// Assisted input for one tick.
    pub fn assist_tick(&mut self, ctx: &TickContext, raw: AimInput) -> Result<AimInput, MimicError> {
        self.rate = ctx.tick_rate as f64;
        if self.suppressed(ctx, &raw) {
            return Ok(raw);
        }
        let (Some(hb), Some(part), Some(phase)) = (ctx.opponent, ctx.aimed_part, ctx.phase) else {
            return Ok(raw);
        };
        match phase {
            Phase::FineAim if self.config.takeover => {
                let fresh = ctx.lock_tick.is_some_and(|l| ctx.tick == l + 1);
                if fresh && self.state.takeover.is_none() && !self.state.takeover_used {
                    self.state.takeover_used = true;
                    self.start_takeover(ctx, hb, part)?;
                }
                let Some(t) = &self.state.takeover else {
                    return Ok(raw);
                };
                // the path starts at the gaze of its first tick
                let idx = ((ctx.tick - t.start) as usize + 1).min(t.points.len() - 1);
                let (dy, dp) = delta(ctx.gaze, t.points[idx]);
                Ok(AimInput {
                    d_yaw: dy,
                    d_pitch: dp,
                    trigger: raw.trigger,
                })
            }
            Phase::FineAim => {
                let gamma = 1.0 + self.config.approach_gain * self.plan.progress(Property::A3);
                let centre = hb.part(part).center.yaw_pitch();
                let intended = (ctx.gaze.0 + raw.d_yaw, ctx.gaze.1 + raw.d_pitch);
                let (dy, dp) = delta(centre, intended);
                let d = dy.hypot(dp);
                let span = *self.state.approach_span.get_or_insert(d);
                if gamma <= 1.0 || span <= 0.0 || d <= 0.0 {
                    return Ok(raw);
                }
                // remaining share r of the owner's approach is shown as r^gamma
                let r = (d / span).min(1.0);
                let scale = r.powf(gamma) / r;
                let (oy, op) = delta(ctx.gaze, (centre.0 + scale * dy, centre.1 + scale * dp));
                Ok(AimInput {
                    d_yaw: oy,
                    d_pitch: op,
                    trigger: raw.trigger,
                })
            }
            Phase::Tracking => {
                let progress = if ctx.engagement_shots == 0 {
                    self.plan.progress(Property::S5)
                } else {
                    self.plan.progress(Property::S4)
                };
                let mut w = self.config.tracking_gain * progress;
                if ctx.trigger_held && ctx.next_shot_index >= 2 {
                    w += self.config.recoil_gain * self.plan.progress(Property::S6);
                }
                let w = w.min(self.config.max_weight);
                if w <= 0.0 {
                    return Ok(raw);
                }
                let (ry, rp) = ctx.weapon.recoil_curve[ctx.next_shot_index.max(1) - 1];
                let centre = hb.part(part).center.yaw_pitch();
                let aimed = (ctx.gaze.0 + raw.d_yaw + ry, ctx.gaze.1 + raw.d_pitch + rp);
                let (by, bp) = delta(centre, aimed);
                Ok(AimInput {
                    d_yaw: raw.d_yaw - w * by,
                    d_pitch: raw.d_pitch - w * bp,
                    trigger: raw.trigger,
                })
            }
            _ => Ok(raw),
        }
    }

    fn sample_part(&mut self) -> Option<BodyPart> {
        let total: u64 = self.profile.aimed_parts.iter().sum();
        if total == 0 {
            return None;
        }
        let mut pick = self.rng.random_range(0..total);
        for part in BodyPart::ALL {
            let c = self.profile.aimed_parts[part.index()];
            if pick < c {
                return Some(part);
            }
            pick -= c;
        }
        None
    }
}

fn wrap(a: f64) -> f64 {
    let a = (a + PI).rem_euclid(2.0 * PI) - PI;
    if a == -PI {
        PI
    } else {
        a
    }
}

/// Yaw/pitch step from `from` to `to`, taking the short way round in yaw.
fn delta(from: (f64, f64), to: (f64, f64)) -> (f64, f64) {
    (wrap(to.0 - from.0), to.1 - from.1)
}

impl InputFilter for MimicController {
    fn begin_match(&mut self, rng: RngStream, match_id: &str) {
        self.rng = rng.stream("controller", 0);
        self.match_id = match_id.to_string();
        let live = self.state.live;
        self.state = AssistState {
            aim_duration: self.state.aim_duration,
            live,
            ..AssistState::default()
        };
        if self.config.epoch == Epoch::Match {
            self.redraw(0);
        }
    }

    fn select_aim_part(&mut self, tick: Tick, _gaze: &Vec3, _hitbox: &Hitbox, human: BodyPart) -> BodyPart {
        // the owner's own pick already follows the recorded distribution
        let part = if self.profile.aimed_parts[human.index()] > 0 {
            human
        } else {
            self.sample_part().unwrap_or(human)
        };
        self.log(tick, AuditKind::AimPart { part });
        part
    }

    fn filter(&mut self, ctx: &TickContext, raw: AimInput) -> AimInput {
        match self.assist_tick(ctx, raw) {
            Ok(out) => out,
            Err(e) => {
                self.error.get_or_insert(e);
                raw
            }
        }
    }

    fn weapon_choice(&mut self, tick: Tick, human: WeaponChoice) -> WeaponChoice {
        // the owner's own habit is already the recorded one; only a profile
        // that never shows the chosen action overrides it
        let p = self.profile.p_reload().unwrap_or(0.5).clamp(0.0, 1.0);
        let choice = match human {
            WeaponChoice::Reload if p == 0.0 => WeaponChoice::Switch,
            WeaponChoice::Switch if p == 1.0 => WeaponChoice::Reload,
            h => h,
        };
        self.log(tick, AuditKind::Weapon { choice });
        choice
    }

    fn observe(&mut self, events: &[GameEvent]) {
        if let Err(e) = self.update_session(events) {
            self.error.get_or_insert(e);
        }
    }
}
