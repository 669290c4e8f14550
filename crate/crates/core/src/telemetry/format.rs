//! Line-oriented trace files.
//!
//! ```text
//! v=1 tick_rate=64 match=<id> player=<id> outcome=<won|lost> duration=<s>
//! <tick> <kind> [key=value ...]
//! ```
//!
//! Vectors are written as `x,y,z`. Reals use the shortest representation that
//! parses back to the same `f64`, so a write/read cycle is bit-exact. Every
//! record, including the last, is terminated by `\n`; a missing final newline
//! means the file was truncated.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Read, Write};

use thiserror::Error;

use super::event::{BodyPart, EngagementTrace, EventKind, GameEvent, Outcome, WeaponSlot};
use super::vec3::Vec3;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported schema version {0}")]
    Version(u32),
    #[error("truncated record at line {line} (last complete record: line {last_complete})")]
    Truncated { line: usize, last_complete: usize },
    #[error("cannot write trace: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn vec_str(v: &Vec3) -> String {
    format!("{},{},{}", v.x, v.y, v.z)
}

fn check_id(what: &str, id: &str) -> Result<(), TraceError> {
    if id.is_empty() || id.chars().any(|c| c.is_whitespace() || c == '=') {
        return Err(TraceError::Invalid(format!("{what} id `{id}` must be non-empty without spaces or '='")));
    }
    Ok(())
}

/// Serializes a trace into its text form.
pub fn write_trace_string(trace: &EngagementTrace) -> Result<String, TraceError> {
    check_id("match", &trace.match_id)?;
    check_id("player", &trace.player_id)?;
    for (k, v) in &trace.meta {
        if ["v", "tick_rate", "match", "player", "outcome", "duration"].contains(&k.as_str()) {
            return Err(TraceError::Invalid(format!("meta key `{k}` clashes with a header key")));
        }
        check_id("meta key", k)?;
        if v.is_empty() || v.chars().any(char::is_whitespace) {
            return Err(TraceError::Invalid(format!("meta value `{v}` must be non-empty without spaces")));
        }
    }
    if trace.schema_version != SCHEMA_VERSION {
        return Err(TraceError::Version(trace.schema_version));
    }
    let mut out = String::with_capacity(64 + trace.events.len() * 48);
    writeln!(
        out,
        "v={} tick_rate={} match={} player={} outcome={} duration={}",
        trace.schema_version,
        trace.tick_rate,
        trace.match_id,
        trace.player_id,
        trace.outcome.as_str(),
        trace.duration
    )
    .unwrap();
    if let Some(last) = out.pop() {
        for (k, v) in &trace.meta {
            write!(out, " {k}={v}").unwrap();
        }
        out.push(last);
    }
    for ev in &trace.events {
        write!(out, "{} {}", ev.tick, ev.kind.name()).unwrap();
        match &ev.kind {
            EventKind::SightingStart { gaze, target, scale } => {
                write!(out, " gaze={} target={} scale={}", vec_str(gaze), vec_str(target), scale).unwrap()
            }
            EventKind::AimSample { gaze } => write!(out, " gaze={}", vec_str(gaze)).unwrap(),
            EventKind::AimOn { part } => write!(out, " part={part}").unwrap(),
            EventKind::ShotFired { gaze, moving } => {
                write!(out, " gaze={} moving={}", vec_str(gaze), moving).unwrap()
            }
            EventKind::Hit { part, critical, dir } => {
                write!(out, " part={} critical={} dir={}", part, critical, vec_str(dir)).unwrap()
            }
            EventKind::WeaponSwitch { to } => write!(out, " to={}", to.as_str()).unwrap(),
            _ => {}
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_trace<W: Write>(trace: &EngagementTrace, mut w: W) -> Result<(), TraceError> {
    w.write_all(write_trace_string(trace)?.as_bytes())?;
    Ok(())
}

pub fn read_trace<R: Read>(mut r: R) -> Result<EngagementTrace, TraceError> {
    let mut s = String::new();
    r.read_to_string(&mut s)?;
    parse_trace(&s)
}

struct Fields<'a> {
    line: usize,
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> Fields<'a> {
    fn parse(line: usize, tokens: impl Iterator<Item = &'a str>) -> Result<Self, TraceError> {
        let mut map = BTreeMap::new();
        for tok in tokens {
            let (k, v) = tok.split_once('=').ok_or_else(|| TraceError::Parse {
                line,
                message: format!("expected key=value, found `{tok}`"),
            })?;
            if map.insert(k, v).is_some() {
                return Err(TraceError::Parse {
                    line,
                    message: format!("duplicate key `{k}`"),
                });
            }
        }
        Ok(Self { line, map })
    }

    fn err(&self, message: String) -> TraceError {
        TraceError::Parse {
            line: self.line,
            message,
        }
    }

    fn raw(&mut self, key: &str) -> Result<&'a str, TraceError> {
        self.map.remove(key).ok_or_else(|| self.err(format!("missing key `{key}`")))
    }

    fn get<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, TraceError>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.raw(key)?;
        raw.parse::<T>().map_err(|e| self.err(format!("bad value for `{key}`: {e}")))
    }

    fn vec(&mut self, key: &str) -> Result<Vec3, TraceError> {
        let raw = self.raw(key)?;
        let parts: Vec<&str> = raw.split(',').collect();
        if parts.len() != 3 {
            return Err(self.err(format!("`{key}` must have three components")));
        }
        let mut c = [0.0; 3];
        for (slot, p) in c.iter_mut().zip(&parts) {
            *slot = p.parse::<f64>().map_err(|e| self.err(format!("bad component in `{key}`: {e}")))?;
        }
        Ok(Vec3::new(c[0], c[1], c[2]))
    }

    fn finish(self) -> Result<(), TraceError> {
        if let Some(k) = self.map.keys().next() {
            return Err(self.err(format!("unexpected key `{k}`")));
        }
        Ok(())
    }
}

/// Parses the text form produced by [`write_trace_string`].
pub fn parse_trace(s: &str) -> Result<EngagementTrace, TraceError> {
    let lines: Vec<&str> = s.split_inclusive('\n').collect();
    if lines.is_empty() {
        return Err(TraceError::Parse {
            line: 1,
            message: "empty input, expected header".into(),
        });
    }
    if let Some(last) = lines.last() {
        if !last.ends_with('\n') {
            let line = lines.len();
            return Err(TraceError::Truncated {
                line,
                last_complete: line - 1,
            });
        }
    }

    let header = lines[0].trim_end_matches('\n');
    let mut h = Fields::parse(1, header.split(' ').filter(|t| !t.is_empty()))?;
    let version: u32 = h.get("v")?;
    if version != SCHEMA_VERSION {
        return Err(TraceError::Version(version));
    }
    let tick_rate: u32 = h.get("tick_rate")?;
    if tick_rate == 0 {
        return Err(h.err("tick_rate must be positive".into()));
    }
    let match_id = h.raw("match")?.to_string();
    let player_id = h.raw("player")?.to_string();
    let outcome: Outcome = h.get("outcome")?;
    let duration: f64 = h.get("duration")?;
    let meta = h.map.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();

    let mut events = Vec::with_capacity(lines.len() - 1);
    for (i, raw) in lines.iter().enumerate().skip(1) {
        let line = i + 1;
        let text = raw.trim_end_matches('\n');
        let mut tokens = text.split(' ');
        let tick = tokens
            .next()
            .filter(|t| !t.is_empty())
            .ok_or_else(|| TraceError::Parse {
                line,
                message: "empty record".into(),
            })?
            .parse::<u64>()
            .map_err(|e| TraceError::Parse {
                line,
                message: format!("bad tick: {e}"),
            })?;
        let kind_name = tokens.next().ok_or_else(|| TraceError::Parse {
            line,
            message: "missing event kind".into(),
        })?;
        let mut f = Fields::parse(line, tokens)?;
        let kind = match kind_name {
            "SightingStart" => EventKind::SightingStart {
                gaze: f.vec("gaze")?,
                target: f.vec("target")?,
                scale: f.get("scale")?,
            },
            "AimSample" => EventKind::AimSample { gaze: f.vec("gaze")? },
            "LockRegionEnter" => EventKind::LockRegionEnter,
            "AimOn" => EventKind::AimOn {
                part: f.get::<BodyPart>("part")?,
            },
            "AimOff" => EventKind::AimOff,
            "TriggerPress" => EventKind::TriggerPress,
            "TriggerRelease" => EventKind::TriggerRelease,
            "ShotFired" => EventKind::ShotFired {
                gaze: f.vec("gaze")?,
                moving: f.get("moving")?,
            },
            "Hit" => EventKind::Hit {
                part: f.get::<BodyPart>("part")?,
                critical: f.get("critical")?,
                dir: f.vec("dir")?,
            },
            "Kill" => EventKind::Kill,
            "MagazineEmpty" => EventKind::MagazineEmpty,
            "Reload" => EventKind::Reload,
            "WeaponSwitch" => EventKind::WeaponSwitch {
                to: f.get::<WeaponSlot>("to")?,
            },
            "BlindStart" => EventKind::BlindStart,
            "BlindEnd" => EventKind::BlindEnd,
            other => {
                return Err(TraceError::Parse {
                    line,
                    message: format!("unknown event kind `{other}`"),
                })
            }
        };
        f.finish()?;
        events.push(GameEvent { tick, kind });
    }

    Ok(EngagementTrace {
        schema_version: version,
        tick_rate,
        match_id,
        player_id,
        outcome,
        duration,
        meta,
        events,
    })
}
