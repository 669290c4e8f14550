use std::f64::consts::PI;

use crate::simulator::{AimInput, Hitbox, InputFilter, Phase, TickContext, WeaponChoice};
use crate::telemetry::{BodyPart, GreatCircle, Tick, Vec3};

/// Conventional aimbot: snaps onto the nearest body part one tick after an
/// opponent appears, cancels recoil completely and fires whenever on target.
#[derive(Debug, Clone, Copy, Default)]
pub struct NaiveAimbot;

fn wrap(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

fn step_to(from: (f64, f64), to: (f64, f64)) -> (f64, f64) {
    (wrap(to.0 - from.0), to.1 - from.1)
}

impl InputFilter for NaiveAimbot {
    fn select_aim_part(&mut self, _tick: Tick, gaze: &Vec3, hitbox: &Hitbox, _human: BodyPart) -> BodyPart {
        hitbox.nearest(gaze).part
    }

    fn filter(&mut self, ctx: &TickContext, raw: AimInput) -> AimInput {
        let (Some(hb), Some(part), Some(sighting), Some(phase)) =
            (ctx.opponent, ctx.aimed_part, ctx.sighting_tick, ctx.phase)
        else {
            return raw;
        };
        if ctx.tick <= sighting || !ctx.weapon_usable && !phase.is_approach() {
            return raw;
        }
        let centre = hb.part(part).center;
        let gaze = ctx.gaze_dir();
        if ctx.lock_tick.is_none() {
            // first snap lands halfway inside the lock region
            let remaining = gaze.angle_to(&centre);
            let along = remaining - 0.5 * ctx.lock_region;
            let point = match GreatCircle::through(gaze, centre) {
                Some(gc) if along > 0.0 => gc.point(along / remaining, 0.0),
                _ => centre,
            };
            let (dy, dp) = step_to(ctx.gaze, point.yaw_pitch());
            return AimInput {
                d_yaw: dy,
                d_pitch: dp,
                trigger: false,
            };
        }
        let (ry, rp) = ctx.weapon.recoil_curve[ctx.next_shot_index.max(1) - 1];
        let (cy, cp) = centre.yaw_pitch();
        let (dy, dp) = step_to(ctx.gaze, (cy - ry, cp - rp));
        AimInput {
            d_yaw: dy,
            d_pitch: dp,
            trigger: phase == Phase::Tracking && ctx.weapon_usable,
        }
    }

    fn weapon_choice(&mut self, _tick: Tick, _human: WeaponChoice) -> WeaponChoice {
        WeaponChoice::Switch
    }
}
