use std::path::Path;
use std::process::Command;

use aimmimic::harness::*;
use aimmimic::profile::Property;

const SKILL: &str = "
[players.skill]
reaction_time_mean = 0.25
reaction_time_sd = 0.05
aim_noise_sd = 0.005
aim_speed = 0.8
recoil_comp_skill = 0.6
p_reload = 0.7
p_spiral_above = 0.65
arch_height_mean = 0.012
move_while_shoot_p = 0.25
first_shot_discipline = 0.6
one_tap_p = 0.2
";

fn config(out: &Path, extra: &str) -> String {
    format!(
        "seed = 3\nout = {:?}\nrecord_matches = 5\nexperiment_matches = 2\n{extra}\n[[players]]\nid = \"A\"\n{SKILL}",
        out.display().to_string()
    )
}

fn load(text: &str, base: &Path) -> LoadedConfig {
    LoadedConfig::parse(text, base).unwrap()
}

#[test]
fn unknown_keys_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let e = LoadedConfig::parse(&config(dir.path(), "speed = 1"), dir.path()).unwrap_err();
    assert!(matches!(e, HarnessError::Config(_)), "{e}");
    assert_eq!(e.exit_code(), 2);
    let e = LoadedConfig::parse(&config(dir.path(), "[rules]\nmax_s9 = 1.0"), dir.path()).unwrap_err();
    assert!(matches!(e, HarnessError::Config(_)), "{e}");
}

#[test]
fn bad_values_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for extra in ["alpha = 1.5", "[controller]\nmax_weight = 2.0", "[gate]\nmin_samples = { z9 = 3 }"] {
        let e = LoadedConfig::parse(&config(dir.path(), extra), dir.path()).unwrap_err();
        assert!(matches!(e, HarnessError::Config(_)), "{extra}: {e}");
    }
    let dup = format!("{}\n[[players]]\nid = \"A\"\n{SKILL}", config(dir.path(), ""));
    assert!(LoadedConfig::parse(&dup, dir.path()).is_err());
}

#[test]
fn missing_skill_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("seed = 1\nout = \"o\"\n[[players]]\nid = \"B\"\nskill_file = \"nope.toml\"\n");
    let e = LoadedConfig::parse(&text, dir.path()).unwrap_err();
    assert!(matches!(e, HarnessError::Config(ref m) if m.contains("nope.toml")), "{e}");
}

#[test]
fn shipped_config_loads() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/experiment.toml");
    let cfg = LoadedConfig::from_path(&root).unwrap();
    assert_eq!(cfg.players.len(), 2);
    assert_eq!(cfg.seed(), 7);
    assert_eq!(cfg.config.record_matches, 20);
    assert_eq!(cfg.config.experiment_matches, 15);
    assert_eq!(cfg.sha256.len(), 64);
    assert!(cfg.provenance().ends_with("seed=7"));
}

#[test]
fn simulate_without_a_profile_is_a_dependency_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = load(&config(dir.path(), ""), dir.path());
    let e = cmd_simulate(&cfg).unwrap_err();
    assert!(matches!(e, HarnessError::Dependency(_)), "{e}");
    assert_eq!(e.exit_code(), 2);
    let e = cmd_report(dir.path()).unwrap_err();
    assert!(matches!(e, HarnessError::Dependency(_)), "{e}");
}

#[test]
fn short_recording_is_rejected_and_blocks_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = load(&config(dir.path(), ""), dir.path());
    let s = cmd_record(&cfg).unwrap();
    assert_eq!(s.findings.len(), 1);
    assert!(s.findings[0].contains("rejected"), "{}", s.findings[0]);
    let layout = Layout::new(dir.path());
    assert!(layout.profile("A").exists());
    assert!(layout.trace_file("A", "record", 4).exists());
    let e = cmd_simulate(&cfg).unwrap_err();
    assert!(matches!(e, HarnessError::Gate(_)), "{e}");
    assert_eq!(e.exit_code(), 1);
}

#[test]
fn relaxed_gate_runs_the_whole_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let extra = "[gate]\nmin_hours = 1.0\nmin_matches = 3\nmin_wins = 1\nmin_samples = { a5 = 1, a6 = 1, a7 = 1, s1 = 1, a4 = 1 }";
    let cfg = load(&config(dir.path(), extra), dir.path());
    let s = cmd_record(&cfg).unwrap();
    assert!(s.findings.is_empty(), "{:?}", s.findings);
    cmd_experiment(&cfg).unwrap();
    let layout = Layout::new(dir.path());
    for name in ["flags", "estimates", "series", "camouflage", "deltas", "summary", "objective"] {
        let (prov, table) = read_csv(&layout.csv(name)).unwrap();
        assert_eq!(prov, cfg.provenance());
        assert!(!table.rows.is_empty(), "{name}");
    }
    let (_, flags) = read_csv(&layout.csv("flags")).unwrap();
    assert_eq!(flags.rows.len(), 3 * 2);
    for p in Property::ALL {
        let svg = std::fs::read_to_string(layout.figure(p)).unwrap();
        assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    }
    assert!(std::fs::read_to_string(layout.audit("A")).unwrap().starts_with("# config_sha256="));
}

#[test]
fn csv_round_trips_awkward_fields() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let mut t = CsvTable::new(&["a", "b"]);
    t.push(vec!["x, y".into(), "say \"hi\"".into()]);
    t.push(vec!["".into(), "line\nbreak".into()]);
    write_csv(&path, "config_sha256=abc seed=1", &t).unwrap();
    let (prov, back) = read_csv(&path).unwrap();
    assert_eq!(prov, "config_sha256=abc seed=1");
    assert_eq!(back, t);
    assert_eq!(back.column("b"), Some(1));
    std::fs::write(&path, "a,b\n1,2\n").unwrap();
    assert!(matches!(read_csv(&path), Err(HarnessError::Parse { .. })));
}

#[test]
fn charts_of_empty_series_still_render() {
    let svg = render_chart("a2 time to kill", "config_sha256=0 seed=0", 0, &[]);
    assert!(svg.contains("</svg>"));
    let one = ChartSeries { label: "A genuine".into(), condition: "genuine".into(), points: vec![(1, 0.5)] };
    let svg = render_chart("a2", "p", 1, &[one]);
    assert!(svg.contains("A genuine"));
}

#[test]
fn seeds_are_distinct_per_player_and_phase() {
    assert_ne!(record_seed(7, 0), experiment_seed(7, 0));
    assert_ne!(experiment_seed(7, 0), experiment_seed(7, 1));
    assert_eq!(experiment_seed(7, 1), experiment_seed(7, 1));
    assert_eq!("adaptive".parse::<Condition>(), Ok(Condition::Adaptive));
    assert!("bot".parse::<Condition>().is_err());
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("c.toml");
    std::fs::write(&cfg_path, config(&dir.path().join("out"), "")).unwrap();
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_aimmimic"))
            .args(args)
            .arg("--config")
            .arg(&cfg_path)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(run(&["simulate"]), Some(2));
    assert_eq!(run(&["record"]), Some(1));
    assert_eq!(run(&["simulate"]), Some(1));
    assert_eq!(run(&["nonsense"]), Some(2));
}
