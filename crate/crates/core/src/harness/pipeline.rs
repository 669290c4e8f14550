use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::detector::{calibrate_rules, camouflage, engagement_samples, evaluate_match, RuleSet};
use crate::mimicry::{Direction, MimicController, NaiveAimbot, ADJUSTED};
use crate::profile::{build_profile, collect_samples, parse_profile, write_profile, PlayerProfile, Property};
use crate::simulator::{default_weapons, derive_seed, simulate_match_with, Genuine, InputFilter, MatchIds};
use crate::telemetry::{parse_trace, write_trace_string, EngagementTrace};

use super::config::{LoadedConfig, Player};
use super::report::{fmt_num, read_csv, write_csv, CsvTable};
use super::svg::{render_chart, ChartSeries};
use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    Genuine,
    Naive,
    Adaptive,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::Genuine, Condition::Naive, Condition::Adaptive];

    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Genuine => "genuine",
            Condition::Naive => "naive",
            Condition::Adaptive => "adaptive",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Condition::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown condition `{s}`"))
    }
}

/// Base seed of player `index`'s recording campaign.
pub fn record_seed(seed: u64, index: usize) -> u64 {
    derive_seed(derive_seed(seed, index as u64), 0)
}

/// Base seed of player `index`'s experiment; every condition replays the
/// same match seeds.
pub fn experiment_seed(seed: u64, index: usize) -> u64 {
    derive_seed(derive_seed(seed, index as u64), 1)
}

/// Paths under the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    /// `set` is `record` or a condition label.
    pub fn trace_dir(&self, player: &str, set: &str) -> PathBuf {
        self.root.join("traces").join(player).join(set)
    }

    pub fn trace_file(&self, player: &str, set: &str, index: usize) -> PathBuf {
        self.trace_dir(player, set).join(format!("{index:03}.trace"))
    }

    pub fn profile(&self, player: &str) -> PathBuf {
        self.root.join("profiles").join(format!("{player}.profile"))
    }

    pub fn audit(&self, player: &str) -> PathBuf {
        self.root.join("audit").join(format!("{player}.log"))
    }

    pub fn csv(&self, name: &str) -> PathBuf {
        self.root.join(format!("{name}.csv"))
    }

    pub fn figure(&self, property: Property) -> PathBuf {
        self.root.join("figures").join(format!("{property}.svg"))
    }

    pub fn rules(&self) -> PathBuf {
        self.root.join("rules.toml")
    }
}

/// What a command did; `findings` turn into exit status 1.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub messages: Vec<String>,
    pub findings: Vec<String>,
}

impl RunSummary {
    fn extend(&mut self, other: RunSummary) {
        self.messages.extend(other.messages);
        self.findings.extend(other.findings);
    }
}

pub(super) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub(super) fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, contents).map_err(io_err(path))
}

fn fresh_dir(dir: &Path) -> Result<(), HarnessError> {
    if dir.exists() {
        fs::remove_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn write_traces(cfg: &LoadedConfig, player: &str, set: &str, traces: &mut [EngagementTrace]) -> Result<(), HarnessError> {
    let layout = Layout::new(cfg.out());
    fresh_dir(&layout.trace_dir(player, set))?;
    for (i, t) in traces.iter_mut().enumerate() {
        t.meta = cfg.meta();
        write_file(&layout.trace_file(player, set, i), &write_trace_string(t)?)?;
    }
    Ok(())
}

/// Traces of one set in file name order.
pub(super) fn read_traces(layout: &Layout, player: &str, set: &str) -> Result<Vec<EngagementTrace>, HarnessError> {
    let dir = layout.trace_dir(player, set);
    let entries = fs::read_dir(&dir).map_err(|e| {
        HarnessError::Dependency(format!("no `{set}` traces for player `{player}` in {}: {e}", dir.display()))
    })?;
    let mut paths = entries
        .map(|e| e.map(|e| e.path()).map_err(io_err(&dir)))
        .collect::<Result<Vec<_>, _>>()?;
    paths.retain(|p| p.extension().is_some_and(|x| x == "trace"));
    paths.sort();
    if paths.is_empty() {
        return Err(HarnessError::Dependency(format!("{} holds no traces", dir.display())));
    }
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(io_err(p))?;
            parse_trace(&text).map_err(|e| HarnessError::Parse {
                path: p.clone(),
                message: e.to_string(),
            })
        })
        .collect()
}

fn campaign<F, M>(player: &Player, cfg: &LoadedConfig, label: &str, base: u64, n: usize, make: M) -> Result<Vec<EngagementTrace>, HarnessError>
where
    F: InputFilter,
    M: Fn() -> F + Sync,
{
    let weapons = default_weapons();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(base, i as u64);
            let ids = MatchIds::new(player.id.clone(), format!("{label}{i:03}"));
            Ok(simulate_match_with(&ids, &player.skill, &cfg.config.scenario, &weapons, seed, &mut make())?)
        })
        .collect()
}

/// Runs each player's genuine recording campaign and writes the traces and
/// the gated profile.
pub fn cmd_record(cfg: &LoadedConfig) -> Result<RunSummary, HarnessError> {
    let layout = Layout::new(cfg.out());
    let mut summary = RunSummary::default();
    for (k, player) in cfg.players.iter().enumerate() {
        let n = cfg.config.record_matches;
        let mut traces = campaign(player, cfg, "record", record_seed(cfg.seed(), k), n, || Genuine)?;
        write_traces(cfg, &player.id, "record", &mut traces)?;
        let profile = build_profile(&traces, &cfg.criteria)?;
        write_file(&layout.profile(&player.id), &write_profile(&profile, &cfg.meta()))?;
        let line = format!(
            "player {}: {} matches, {:.1} h, {} wins, gate {}",
            player.id,
            profile.matches,
            profile.hours,
            profile.wins,
            gate_text(&profile)
        );
        if profile.gate.is_accepted() {
            summary.messages.push(line);
        } else {
            summary.findings.push(line);
        }
    }
    Ok(summary)
}

fn gate_text(p: &PlayerProfile) -> String {
    match &p.gate {
        crate::profile::BootstrapStatus::Accepted => "accepted".into(),
        crate::profile::BootstrapStatus::Rejected(rs) => {
            let reasons: Vec<String> = rs.iter().map(|r| r.to_string()).collect();
            format!("rejected ({})", reasons.join("; "))
        }
    }
}

fn load_profile(layout: &Layout, player: &str) -> Result<PlayerProfile, HarnessError> {
    let path = layout.profile(player);
    let text = fs::read_to_string(&path).map_err(|e| {
        HarnessError::Dependency(format!("profile {} ({e}); run `record` first", path.display()))
    })?;
    let (profile, _) = parse_profile(&text).map_err(|e| HarnessError::Parse {
        path: path.clone(),
        message: e.to_string(),
    })?;
    if !profile.gate.is_accepted() {
        return Err(HarnessError::Gate(format!("player {}: {}", player, gate_text(&profile))));
    }
    Ok(profile)
}

/// Plays the genuine, naive and adaptive conditions from the recorded
/// profiles and writes their traces and the assistance audit logs.
pub fn cmd_simulate(cfg: &LoadedConfig) -> Result<RunSummary, HarnessError> {
    let layout = Layout::new(cfg.out());
    let profiles = cfg
        .players
        .iter()
        .map(|p| load_profile(&layout, &p.id))
        .collect::<Result<Vec<_>, _>>()?;
    let mut summary = RunSummary::default();
    let n = cfg.config.experiment_matches;
    for (k, (player, profile)) in cfg.players.iter().zip(profiles).enumerate() {
        let base = experiment_seed(cfg.seed(), k);
        let mut genuine = campaign(player, cfg, "genuine", base, n, || Genuine)?;
        write_traces(cfg, &player.id, "genuine", &mut genuine)?;
        let mut naive = campaign(player, cfg, "naive", base, n, || NaiveAimbot)?;
        write_traces(cfg, &player.id, "naive", &mut naive)?;

        let mut controller = MimicController::new(profile, cfg.config.controller.clone())?;
        let weapons = default_weapons();
        let mut audit = format!("# {}\n", cfg.provenance());
        let mut adaptive = Vec::with_capacity(n);
        for i in 0..n {
            let ids = MatchIds::new(player.id.clone(), format!("adaptive{i:03}"));
            let seed = derive_seed(base, i as u64);
            let t = simulate_match_with(&ids, &player.skill, &cfg.config.scenario, &weapons, seed, &mut controller)?;
            if let Some(e) = controller.error() {
                return Err(HarnessError::Mimic(e.clone()));
            }
            for entry in controller.take_audit() {
                audit.push_str(&entry.to_string());
                audit.push('\n');
            }
            adaptive.push(t);
        }
        write_traces(cfg, &player.id, "adaptive", &mut adaptive)?;
        write_file(&layout.audit(&player.id), &audit)?;
        summary
            .messages
            .push(format!("player {}: {n} matches per condition simulated", player.id));
    }
    Ok(summary)
}

/// Runs both detectors over every condition and the camouflage tests over
/// the adaptive one. Writes `flags`, `estimates`, `series` and
/// `camouflage` tables.
pub fn cmd_detect(cfg: &LoadedConfig) -> Result<RunSummary, HarnessError> {
    let layout = Layout::new(cfg.out());
    let prov = cfg.provenance();
    let mut flags = CsvTable::new(&["player", "condition", "match", "scan_rules", "shift_properties", "flagged"]);
    let mut estimates = CsvTable::new(&["player", "condition", "property", "value", "n"]);
    let mut series = CsvTable::new(&["player", "condition", "match", "property", "value"]);
    let mut camo = CsvTable::new(&["player", "test", "statistic", "dof", "p", "rejected"]);
    let mut summary = RunSummary::default();

    for player in &cfg.players {
        let recorded = read_traces(&layout, &player.id, "record")?;
        let baseline = engagement_samples(&recorded);
        for cond in Condition::ALL {
            let traces = read_traces(&layout, &player.id, cond.as_str())?;
            let verdicts = traces
                .par_iter()
                .map(|t| evaluate_match(t, &baseline, &cfg.config.rules, cfg.config.alpha, &cfg.criteria))
                .collect::<Result<Vec<_>, _>>()?;
            let mut flagged = 0;
            for (i, (t, v)) in traces.iter().zip(&verdicts).enumerate() {
                let rules: Vec<&str> = v.scan.flags.iter().map(|f| f.rule.id()).collect();
                let props: Vec<&str> = v.shift.rejected().map(|t| t.property.id()).collect();
                flags.push(vec![
                    player.id.clone(),
                    cond.to_string(),
                    (i + 1).to_string(),
                    rules.join(";"),
                    props.join(";"),
                    v.flagged().to_string(),
                ]);
                if v.flagged() {
                    flagged += 1;
                }
                let samples = collect_samples(std::slice::from_ref(t));
                for p in Property::ALL {
                    if let Some(x) = samples.estimate(p).value {
                        series.push(vec![
                            player.id.clone(),
                            cond.to_string(),
                            (i + 1).to_string(),
                            p.to_string(),
                            fmt_num(x),
                        ]);
                    }
                }
            }
            let pooled = collect_samples(&traces);
            for p in Property::ALL {
                let e = pooled.estimate(p);
                estimates.push(vec![
                    player.id.clone(),
                    cond.to_string(),
                    p.to_string(),
                    e.value.map(fmt_num).unwrap_or_default(),
                    e.n.to_string(),
                ]);
            }
            let line = format!("player {} {cond}: {flagged}/{} matches flagged", player.id, traces.len());
            if flagged > 0 && cond != Condition::Naive {
                summary.findings.push(line);
            } else {
                summary.messages.push(line);
            }
            if cond == Condition::Adaptive {
                let report = camouflage(&collect_samples(&recorded), &pooled)?;
                for (name, test) in [
                    ("body_parts", report.body_parts),
                    ("p_reload", report.p_reload),
                    ("p_above", report.p_above),
                ] {
                    camo.push(vec![
                        player.id.clone(),
                        name.to_string(),
                        fmt_num(test.statistic),
                        test.dof.to_string(),
                        fmt_num(test.p),
                        test.rejects(cfg.config.alpha).to_string(),
                    ]);
                }
            }
        }
    }
    write_csv(&layout.csv("flags"), &prov, &flags)?;
    write_csv(&layout.csv("estimates"), &prov, &estimates)?;
    write_csv(&layout.csv("series"), &prov, &series)?;
    write_csv(&layout.csv("camouflage"), &prov, &camo)?;
    Ok(summary)
}

fn parse_num(path: &Path, s: &str) -> Result<f64, HarnessError> {
    s.parse().map_err(|_| HarnessError::Parse {
        path: path.to_path_buf(),
        message: format!("`{s}` is not a number"),
    })
}

fn pct(x: f64, reference: f64) -> Option<f64> {
    (reference != 0.0).then(|| 100.0 * (x - reference) / reference)
}

/// Turns the detector tables under `out` into `deltas`, `summary`,
/// `objective` and one figure per property. Pure function of the tables.
pub fn cmd_report(out: &Path) -> Result<RunSummary, HarnessError> {
    let layout = Layout::new(out);
    let need = |name: &str| {
        let path = layout.csv(name);
        if path.exists() {
            read_csv(&path)
        } else {
            Err(HarnessError::Dependency(format!("{} missing; run `detect` first", path.display())))
        }
    };
    let (prov, flags) = need("flags")?;
    let (_, estimates) = need("estimates")?;
    let (_, series) = need("series")?;

    let mut players: Vec<String> = Vec::new();
    for row in flags.rows.iter().chain(&estimates.rows) {
        let p = &row[0];
        if !players.contains(p) {
            players.push(p.clone());
        }
    }

    let est_path = layout.csv("estimates");
    let col = |t: &CsvTable, name: &str| t.column(name).ok_or_else(|| HarnessError::Parse {
        path: layout.root.clone(),
        message: format!("column `{name}` missing"),
    });
    let (ep, ec, eprop, eval) = (col(&estimates, "player")?, col(&estimates, "condition")?, col(&estimates, "property")?, col(&estimates, "value")?);
    let estimate = |player: &str, cond: Condition, p: Property| -> Result<Option<f64>, HarnessError> {
        let row = estimates
            .rows
            .iter()
            .find(|r| r[ep] == player && r[ec] == cond.as_str() && r[eprop] == p.id());
        match row {
            Some(r) if !r[eval].is_empty() => parse_num(&est_path, &r[eval]).map(Some),
            _ => Ok(None),
        }
    };

    let mut header = vec!["property".to_string(), "description".to_string()];
    for p in &players {
        header.push(format!("{p}_adaptive_pct"));
        header.push(format!("{p}_naive_pct"));
    }
    let mut deltas = CsvTable::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for prop in Property::ALL {
        let mut row = vec![prop.to_string(), prop.description().to_string()];
        for p in &players {
            let g = estimate(p, Condition::Genuine, prop)?;
            for cond in [Condition::Adaptive, Condition::Naive] {
                let d = g.zip(estimate(p, cond, prop)?).and_then(|(g, x)| pct(x, g));
                row.push(d.map(fmt_pct).unwrap_or_default());
            }
        }
        deltas.push(row);
    }

    let (fp, fc, ff, fs, fsh) = (col(&flags, "player")?, col(&flags, "condition")?, col(&flags, "flagged")?, col(&flags, "scan_rules")?, col(&flags, "shift_properties")?);
    let mut summary_t = CsvTable::new(&["player", "condition", "matches", "scan_flagged", "shift_flagged", "flagged", "flag_rate"]);
    let mut result = RunSummary::default();
    for p in &players {
        for cond in Condition::ALL {
            let rows: Vec<_> = flags.rows.iter().filter(|r| r[fp] == *p && r[fc] == cond.as_str()).collect();
            let n = rows.len();
            let scan = rows.iter().filter(|r| !r[fs].is_empty()).count();
            let shift = rows.iter().filter(|r| !r[fsh].is_empty()).count();
            let flagged = rows.iter().filter(|r| r[ff] == "true").count();
            let rate = if n == 0 { 0.0 } else { flagged as f64 / n as f64 };
            summary_t.push(vec![
                p.clone(),
                cond.to_string(),
                n.to_string(),
                scan.to_string(),
                shift.to_string(),
                flagged.to_string(),
                fmt_num(rate),
            ]);
        }
    }

    let mut objective = CsvTable::new(&["player", "property", "description", "direction", "adaptive_pct"]);
    for p in &players {
        for (prop, dir) in ADJUSTED {
            let g = estimate(p, Condition::Genuine, prop)?;
            let a = estimate(p, Condition::Adaptive, prop)?;
            objective.push(vec![
                p.clone(),
                prop.to_string(),
                prop.description().to_string(),
                match dir {
                    Direction::Lower => "lower".to_string(),
                    Direction::Higher => "higher".to_string(),
                },
                g.zip(a).and_then(|(g, a)| pct(a, g)).map(fmt_pct).unwrap_or_default(),
            ]);
        }
    }

    write_csv(&layout.csv("deltas"), &prov, &deltas)?;
    write_csv(&layout.csv("summary"), &prov, &summary_t)?;
    write_csv(&layout.csv("objective"), &prov, &objective)?;

    let (sp, sc, sm, sprop, sv) = (col(&series, "player")?, col(&series, "condition")?, col(&series, "match")?, col(&series, "property")?, col(&series, "value")?);
    let series_path = layout.csv("series");
    let mut n_matches = 0u32;
    let mut points = Vec::with_capacity(series.rows.len());
    for r in &series.rows {
        let m: u32 = r[sm].parse().map_err(|_| HarnessError::Parse {
            path: series_path.clone(),
            message: format!("bad match index `{}`", r[sm]),
        })?;
        n_matches = n_matches.max(m);
        points.push((r[sp].as_str(), r[sc].as_str(), r[sprop].as_str(), m, parse_num(&series_path, &r[sv])?));
    }
    for prop in Property::ALL {
        let mut lines: Vec<ChartSeries> = Vec::new();
        for &(player, cond, p, m, v) in &points {
            if p != prop.id() {
                continue;
            }
            let label = format!("{player} {cond}");
            match lines.iter_mut().find(|s| s.label == label) {
                Some(s) => s.points.push((m, v)),
                None => lines.push(ChartSeries {
                    label,
                    condition: cond.to_string(),
                    points: vec![(m, v)],
                }),
            }
        }
        let title = format!("{} {}", prop.id(), prop.description());
        write_file(&layout.figure(prop), &render_chart(&title, &prov, n_matches, &lines))?;
    }
    result.messages.push(format!("report written to {}", out.display()));
    Ok(result)
}

fn fmt_pct(x: f64) -> String {
    format!("{x:.3}")
}

/// Simulate, detect and report in one go.
pub fn cmd_experiment(cfg: &LoadedConfig) -> Result<RunSummary, HarnessError> {
    let mut s = cmd_simulate(cfg)?;
    s.extend(cmd_detect(cfg)?);
    s.extend(cmd_report(cfg.out())?);
    Ok(s)
}

/// Fits rule thresholds on the configured genuine population and writes
/// them as a `[rules]` table.
pub fn cmd_calibrate(cfg: &LoadedConfig) -> Result<RunSummary, HarnessError> {
    let cal = &cfg.config.calibration;
    let stats = cal.population().stats(&cfg.config.scenario, &default_weapons())?;
    let fitted = calibrate_rules(&stats, cal.fpr, cfg.config.rules.min_support)?;
    let text = format!("# {}\n[rules]\n{}", cfg.provenance(), rules_toml(&fitted));
    let path = Layout::new(cfg.out()).rules();
    write_file(&path, &text)?;
    Ok(RunSummary {
        messages: vec![format!("{} matches; rules written to {}", cal.matches, path.display())],
        findings: Vec::new(),
    })
}

fn rules_toml(r: &RuleSet) -> String {
    format!(
        "max_s3 = {:.4}\nmax_s4 = {:.4}\nmax_s5 = {:.4}\nmin_time_to_kill = {:.4}\nmax_aim_snap_speed = {:.4}\nmin_support = {}\n",
        r.max_s3, r.max_s4, r.max_s5, r.min_time_to_kill, r.max_aim_snap_speed, r.min_support
    )
}
