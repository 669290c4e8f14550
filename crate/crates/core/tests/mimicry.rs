use std::collections::HashMap;

use aimmimic::mimicry::*;
use aimmimic::profile::*;
use aimmimic::simulator::*;
use aimmimic::telemetry::{BodyPart, EventKind, GameEvent, GreatCircle, Vec3};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn profile() -> PlayerProfile {
    let ts = simulate_campaign("A", &SkillModel::default(), &Scenario::default(), &default_weapons(), 16, 1).unwrap();
    let p = build_profile(&ts, &BootstrapCriteria::default()).unwrap();
    assert!(p.gate.is_accepted());
    p
}

#[test]
fn decision_frequencies_over_ten_thousand_draws() {
    let p = profile();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut plan = plan_adjustment(&p, &ImprovementObjective::default(), &mut rng).unwrap();
    let mut counts: HashMap<(Property, Decision), u32> = HashMap::new();
    for _ in 0..10_000 {
        for &(prop, d) in plan.draw(&mut rng) {
            *counts.entry((prop, d)).or_default() += 1;
        }
    }
    for (prop, _) in ADJUSTED {
        for (d, want) in [(Decision::Improve, 0.6), (Decision::Degrade, 0.3), (Decision::Unchanged, 0.1)] {
            let f = counts.get(&(prop, d)).copied().unwrap_or(0) as f64 / 10_000.0;
            assert!((f - want).abs() <= 0.02, "{prop} {d}: {f}");
        }
    }
}

#[test]
fn rejected_profile_cannot_be_planned() {
    let ts = simulate_campaign("A", &SkillModel::default(), &Scenario::default(), &default_weapons(), 3, 1).unwrap();
    let p = build_profile(&ts, &BootstrapCriteria::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(matches!(plan_adjustment(&p, &ImprovementObjective::default(), &mut rng), Err(MimicError::Gate(_))));
    assert!(MimicController::new(p, MimicConfig::default()).is_err());
}

#[test]
fn improving_at_the_target_is_a_no_op() {
    let mut e = PlanEntry {
        property: Property::S4,
        direction: Direction::Higher,
        baseline: 0.5,
        target: 0.525,
        current: 0.525,
        step_fraction: 0.1,
    };
    e.apply(Decision::Improve);
    assert_eq!(e.current, 0.525);
    assert_eq!(e.gap(), 0.0);
}

fn entry() -> PlanEntry {
    PlanEntry {
        property: Property::A2,
        direction: Direction::Lower,
        baseline: 1.0,
        target: 0.95,
        current: 1.0,
        step_fraction: 0.1,
    }
}

/// Exact expectation of the working value after each of `k` draws, by
/// enumerating every reachable (improvements, degradations) state.
fn exact_expectation(k: usize) -> Vec<f64> {
    let e = entry();
    let mut dist: HashMap<(u32, u32), f64> = HashMap::from([((0, 0), 1.0)]);
    let gap_of = |(a, b): (u32, u32)| (e.target - e.baseline) * 0.9f64.powi(a as i32) * 1.1f64.powi(b as i32);
    let mut out = Vec::new();
    for _ in 0..k {
        let mut next: HashMap<(u32, u32), f64> = HashMap::new();
        for (&s, &p) in &dist {
            *next.entry((s.0 + 1, s.1)).or_default() += 0.6 * p;
            // degrading from the baseline is clamped back to it
            let d = if gap_of((s.0, s.1 + 1)).abs() > (e.target - e.baseline).abs() { (0, 0) } else { (s.0, s.1 + 1) };
            *next.entry(d).or_default() += 0.3 * p;
            *next.entry(s).or_default() += 0.1 * p;
        }
        dist = next;
        out.push(dist.iter().map(|(&s, &p)| p * (e.target - gap_of(s))).sum());
    }
    out
}

#[test]
fn expected_progress_is_monotone_and_matches_monte_carlo() {
    let k = 15;
    let exact = exact_expectation(k);
    assert!(exact.windows(2).all(|w| w[1] < w[0]), "{exact:?}");
    assert!(exact[0] < 1.0 && exact[k - 1] > 0.95);
    // unclamped drift is (0.6 − 0.3)·step per draw; the floor only adds to it
    assert!(1.0 - exact[0] >= 0.3 * 0.1 * 0.05 - 1e-12);

    let weights = DecisionWeights::default();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let runs = 10_000;
    let mut sum = vec![0.0; k];
    let mut sq = vec![0.0; k];
    for _ in 0..runs {
        let mut e = entry();
        for i in 0..k {
            e.apply(weights.draw(&mut rng));
            assert!(e.current <= e.baseline && e.current >= e.target);
            sum[i] += e.current;
            sq[i] += e.current * e.current;
        }
    }
    for i in 0..k {
        let m = sum[i] / runs as f64;
        let sd = (sq[i] / runs as f64 - m * m).max(0.0).sqrt();
        let se = sd / (runs as f64).sqrt();
        assert!((m - exact[i]).abs() <= 4.0 * se + 1e-12, "draw {i}: {m} vs {}", exact[i]);
    }
}

proptest! {
    #[test]
    fn targets_stay_feasible(
        gain in 0.001..0.499f64,
        s4 in 0.0..=1.0f64,
        s5 in 0.0..=1.0f64,
        a2 in 0.0..5.0f64,
        draws in 0usize..60,
        seed in any::<u64>(),
    ) {
        let mut p = profile_cache();
        p.estimates[Property::S4].value = Some(s4);
        p.estimates[Property::S5].value = Some(s5);
        p.estimates[Property::A2].value = Some(a2);
        let obj = ImprovementObjective { target_gain: gain, ..ImprovementObjective::default() };
        let mut plan = AdjustmentPlan::new(&p, &obj, DecisionWeights::default(), 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..draws {
            plan.draw(&mut rng);
        }
        for e in &plan.entries {
            prop_assert!(e.property.in_range(e.target), "{} target {}", e.property, e.target);
            prop_assert!(e.property.in_range(e.current), "{} current {}", e.property, e.current);
            let (lo, hi) = if e.baseline <= e.target { (e.baseline, e.target) } else { (e.target, e.baseline) };
            prop_assert!(e.current >= lo - 1e-12 && e.current <= hi + 1e-12);
        }
    }

    #[test]
    fn linear_paths_stay_on_the_chord(y0 in -1.0..1.0f64, p0 in -0.5..0.5f64, y1 in -1.0..1.0f64, p1 in -0.5..0.5f64, dur in 0.02..1.0f64) {
        let (a, b) = (Vec3::from_yaw_pitch(y0, p0), Vec3::from_yaw_pitch(y1, p1));
        prop_assume!(a.angle_to(&b) > 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = synthesize_trajectory(a, b, TrajectoryStyle::Linear, dur, 64, &mut rng).unwrap();
        prop_assert_eq!(t.points[0], a);
        prop_assert_eq!(*t.points.last().unwrap(), b);
        prop_assert!((t.duration() - dur).abs() <= 1.0 / 64.0);
        let gc = GreatCircle::through(a, b).unwrap();
        for q in &t.points {
            prop_assert!(gc.offset_of(q).abs() <= 1e-6);
        }
    }

    #[test]
    fn forced_spirals_are_above(seed in any::<u64>(), arch in 0.001..0.03f64) {
        let (a, b) = (Vec3::from_yaw_pitch(-0.2, 0.0), Vec3::from_yaw_pitch(0.1, 0.05));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let style = TrajectoryStyle::Spiral { p_above: 1.0, arch_height: arch };
        let t = synthesize_trajectory(a, b, style, 0.3, 64, &mut rng).unwrap();
        let shape = path_shape(&t.points).unwrap();
        prop_assert!(shape.is_above());
        prop_assert_eq!(t.above, Some(true));
        prop_assert!((shape.mean_abs_offset - arch).abs() <= 0.05 * arch, "{} vs {}", shape.mean_abs_offset, arch);
    }
}

fn profile_cache() -> PlayerProfile {
    use std::sync::OnceLock;
    static P: OnceLock<PlayerProfile> = OnceLock::new();
    P.get_or_init(profile).clone()
}

#[test]
fn spiral_side_follows_p_above() {
    let (a, b) = (Vec3::from_yaw_pitch(-0.2, 0.0), Vec3::from_yaw_pitch(0.1, 0.05));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let style = TrajectoryStyle::Spiral { p_above: 0.3, arch_height: 0.01 };
    let above = (0..2000)
        .filter(|_| {
            let t = synthesize_trajectory(a, b, style, 0.3, 64, &mut rng).unwrap();
            path_shape(&t.points).unwrap().is_above()
        })
        .count();
    assert!((above as f64 / 2000.0 - 0.3).abs() < 0.035);
}

#[test]
fn degenerate_trajectories_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = Vec3::X;
    assert!(synthesize_trajectory(a, -a, TrajectoryStyle::Linear, 0.3, 64, &mut rng).is_err());
    assert!(synthesize_trajectory(a, Vec3::Y, TrajectoryStyle::Linear, 0.0, 64, &mut rng).is_err());
    assert!(synthesize_trajectory(a * 2.0, Vec3::Y, TrajectoryStyle::Linear, 0.3, 64, &mut rng).is_err());
}

#[test]
fn takeover_paths_last_the_planned_fine_aim_time() {
    let p = profile_cache();
    let cfg = MimicConfig { takeover: true, ..MimicConfig::default() };
    let mut c = MimicController::new(p, cfg).unwrap();
    let skill = SkillModel::default();
    let seed = 31;
    let t = simulate_match_with(&MatchIds::for_seed("A", seed), &skill, &Scenario::default(), &default_weapons(), seed, &mut c)
        .unwrap();
    let planned: Vec<(u64, usize)> = c
        .audit()
        .iter()
        .filter_map(|a| match a.kind {
            AuditKind::Takeover { ticks, .. } => Some((a.tick, ticks)),
            _ => None,
        })
        .collect();
    assert!(!planned.is_empty());
    let mut checked = 0;
    for e in aimmimic::telemetry::engagements(&t) {
        let m = e.milestones(&t);
        let (Some(lock), Some(aim)) = (m.lock_enter, m.aim_on) else { continue };
        if let Some(&(_, ticks)) = planned.iter().find(|(tick, _)| *tick == lock + 1) {
            // a blinding mid-path cancels the takeover; all others land on
            // the planned tick
            if (aim - lock).abs_diff(ticks as u64) <= 1 {
                checked += 1;
            }
        }
    }
    assert!(checked * 10 >= planned.len() * 9, "{checked} of {}", planned.len());
}

fn ctx<'a>(tick: u64, hb: &'a Hitbox, w: &'a WeaponSpec, gaze: (f64, f64)) -> TickContext<'a> {
    TickContext {
        tick,
        tick_rate: 64,
        lock_region: 15f64.to_radians(),
        gaze,
        opponent: Some(hb),
        aimed_part: Some(BodyPart::Chest),
        phase: Some(Phase::Tracking),
        sighting_tick: Some(0),
        lock_tick: Some(1),
        aim_on_tick: Some(2),
        blinded: false,
        trigger_held: false,
        press_tick: None,
        weapon: w,
        weapon_usable: true,
        next_shot_index: 1,
        engagement_shots: 3,
    }
}

fn drawn_controller(a4: f64) -> MimicController {
    let mut p = profile_cache();
    p.estimates[Property::A4].value = Some(a4);
    let mut c = MimicController::new(p, MimicConfig::default()).unwrap();
    c.begin_match(RngStream::new(4), "m");
    let sightings: Vec<GameEvent> = (0..40)
        .map(|i| {
            GameEvent::new(i, EventKind::SightingStart { gaze: Vec3::X, target: Vec3::from_yaw_pitch(0.01, 0.0), scale: 1.0 })
        })
        .collect();
    c.update_session(&sightings).unwrap();
    assert!(c.plan().progress(Property::S4) > 0.0);
    c
}

#[test]
fn post_kill_window_is_identity_for_a4_ticks() {
    let mut c = drawn_controller(0.5);
    let hb = Hitbox::new(Vec3::X, 1.0);
    let w = WeaponSpec::rifle();
    let raw = AimInput { d_yaw: 0.001, d_pitch: -0.0005, trigger: false };
    c.update_session(&[GameEvent::new(100, EventKind::Kill)]).unwrap();
    for tick in 101..=132 {
        let out = c.assist_tick(&ctx(tick, &hb, &w, (0.004, 0.0)), raw).unwrap();
        assert!(out.identical(&raw), "tick {tick}");
    }
    let out = c.assist_tick(&ctx(133, &hb, &w, (0.004, 0.0)), raw).unwrap();
    assert!(!out.identical(&raw));
}

#[test]
fn blinded_and_out_of_region_input_passes_through() {
    let mut c = drawn_controller(0.2);
    let hb = Hitbox::new(Vec3::X, 1.0);
    let w = WeaponSpec::rifle();
    let raw = AimInput { d_yaw: 0.001, d_pitch: -0.0005, trigger: false };
    assert!(!c.assist_tick(&ctx(500, &hb, &w, (0.004, 0.0)), raw).unwrap().identical(&raw));

    c.update_session(&[GameEvent::new(600, EventKind::BlindStart)]).unwrap();
    assert!(c.state().blinded);
    assert!(c.assist_tick(&ctx(601, &hb, &w, (0.004, 0.0)), raw).unwrap().identical(&raw));
    c.update_session(&[GameEvent::new(650, EventKind::BlindEnd)]).unwrap();

    let far = ctx(700, &hb, &w, (1.0, 0.0));
    assert!(!far.in_lock_region());
    assert!(c.assist_tick(&far, raw).unwrap().identical(&raw));
    let none = TickContext { opponent: None, ..ctx(701, &hb, &w, (0.004, 0.0)) };
    assert!(c.assist_tick(&none, raw).unwrap().identical(&raw));
}

#[test]
fn fresh_trigger_presses_are_not_adjusted() {
    let mut c = drawn_controller(0.2);
    let hb = Hitbox::new(Vec3::X, 1.0);
    let w = WeaponSpec::rifle();
    let raw = AimInput { d_yaw: 0.001, d_pitch: -0.0005, trigger: true };
    for dt in 0..3 {
        let cx = TickContext { trigger_held: dt > 0, press_tick: Some(800), ..ctx(800 + dt, &hb, &w, (0.004, 0.0)) };
        assert!(c.assist_tick(&cx, raw).unwrap().identical(&raw), "dt {dt}");
    }
    let cx = TickContext { trigger_held: true, press_tick: Some(800), ..ctx(803, &hb, &w, (0.004, 0.0)) };
    assert!(!c.assist_tick(&cx, raw).unwrap().identical(&raw));
}

#[test]
fn session_updates_are_ordered() {
    let mut c = drawn_controller(0.2);
    let before = c.state().clone();
    c.update_session(&[]).unwrap();
    assert_eq!(c.state(), &before);
    let err = c.update_session(&[GameEvent::new(3, EventKind::Kill)]);
    assert!(matches!(err, Err(MimicError::Sequence { .. })));
}

#[test]
fn assisted_reload_frequency_matches_the_profile() {
    let skill = SkillModel::default();
    let (sc, w) = (Scenario::default(), default_weapons());
    let rec = simulate_campaign("A", &skill, &sc, &w, 150, 61).unwrap();
    let p = build_profile(&rec, &BootstrapCriteria::default()).unwrap();
    let want = p.p_reload().unwrap();
    let mut c = MimicController::new(p, MimicConfig::default()).unwrap();
    let assisted: Vec<_> = (0..150)
        .map(|i| {
            let seed = derive_seed(62, i);
            simulate_match_with(&MatchIds::for_seed("A", seed), &skill, &sc, &w, seed, &mut c).unwrap()
        })
        .collect();
    let got = collect_samples(&assisted).estimate(Property::A6);
    assert!(got.n >= 800);
    assert!((got.value.unwrap() - want).abs() <= 0.05, "{:?} vs {want}", got.value);
    let logged = c.audit().iter().filter(|a| matches!(a.kind, AuditKind::Weapon { .. })).count();
    assert!(logged >= got.n);
}
