//! Versioned text form of a [`PlayerProfile`].
//!
//! ```text
//! profile v=1 player=A
//! meta config=<sha256> seed=7
//! record matches=16 hours=12.5 wins=11
//! gate accepted                      # or: gate rejected wins:9/10 samples:a6:2/10 ...
//! a1 value=0.52 sd=0.11 n=960        # one line per property, `-` when absent
//! ...
//! arch value=0.004 sd=0.002 n=930
//! hit_parts head=120 chest=300 ...
//! aimed_parts head=330 chest=410 ...
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::telemetry::BodyPart;

use super::{BootstrapStatus, PerProperty, PlayerProfile, ProfileError, Property, PropertyEstimate, RejectReason};

pub const PROFILE_VERSION: u32 = 1;

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

fn estimate_line(out: &mut String, key: &str, e: &PropertyEstimate) {
    writeln!(out, "{key} value={} sd={} n={}", opt(e.value), opt(e.sd), e.n).unwrap();
}

fn parts_line(out: &mut String, key: &str, counts: &[u64; 7]) {
    out.push_str(key);
    for p in BodyPart::ALL {
        write!(out, " {}={}", p, counts[p.index()]).unwrap();
    }
    out.push('\n');
}

fn reason_token(r: &RejectReason) -> String {
    match r {
        RejectReason::InsufficientHours { have, need } => format!("hours:{have}/{need}"),
        RejectReason::InsufficientMatches { have, need } => format!("matches:{have}/{need}"),
        RejectReason::InsufficientWins { have, need } => format!("wins:{have}/{need}"),
        RejectReason::InsufficientSamples { property, have, need } => format!("samples:{property}:{have}/{need}"),
    }
}

/// Renders a profile with provenance metadata (`key=value`, no spaces).
pub fn write_profile(profile: &PlayerProfile, meta: &BTreeMap<String, String>) -> String {
    let mut out = String::new();
    writeln!(out, "profile v={PROFILE_VERSION} player={}", profile.player_id).unwrap();
    out.push_str("meta");
    for (k, v) in meta {
        write!(out, " {k}={v}").unwrap();
    }
    out.push('\n');
    writeln!(
        out,
        "record matches={} hours={} wins={}",
        profile.matches, profile.hours, profile.wins
    )
    .unwrap();
    match &profile.gate {
        BootstrapStatus::Accepted => out.push_str("gate accepted\n"),
        BootstrapStatus::Rejected(reasons) => {
            out.push_str("gate rejected");
            for r in reasons {
                write!(out, " {}", reason_token(r)).unwrap();
            }
            out.push('\n');
        }
    }
    for (p, e) in profile.estimates.iter() {
        estimate_line(&mut out, p.id(), e);
    }
    estimate_line(&mut out, "arch", &profile.arch_height);
    parts_line(&mut out, "hit_parts", &profile.hit_parts);
    parts_line(&mut out, "aimed_parts", &profile.aimed_parts);
    out
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, key: &str) -> Result<Vec<&'a str>, ProfileError> {
        let (i, text) = self.iter.next().ok_or_else(|| ProfileError::Parse {
            line: self.line + 1,
            message: format!("missing `{key}` line"),
        })?;
        self.line = i + 1;
        let mut toks = text.split(' ').filter(|t| !t.is_empty());
        match toks.next() {
            Some(k) if k == key => Ok(toks.collect()),
            other => Err(self.err(format!("expected `{key}`, found `{}`", other.unwrap_or("")))),
        }
    }

    fn err(&self, message: String) -> ProfileError {
        ProfileError::Parse {
            line: self.line,
            message,
        }
    }
}

fn kv<'a>(lines: &Lines, toks: &[&'a str]) -> Result<BTreeMap<&'a str, &'a str>, ProfileError> {
    toks.iter()
        .map(|t| t.split_once('=').ok_or_else(|| lines.err(format!("expected key=value, found `{t}`"))))
        .collect()
}

fn field<T: std::str::FromStr>(lines: &Lines, map: &BTreeMap<&str, &str>, key: &str) -> Result<T, ProfileError> {
    let raw = map.get(key).ok_or_else(|| lines.err(format!("missing `{key}`")))?;
    raw.parse().map_err(|_| lines.err(format!("bad value `{raw}` for `{key}`")))
}

fn opt_field(lines: &Lines, map: &BTreeMap<&str, &str>, key: &str) -> Result<Option<f64>, ProfileError> {
    match map.get(key) {
        Some(&"-") => Ok(None),
        Some(_) => field(lines, map, key).map(Some),
        None => Err(lines.err(format!("missing `{key}`"))),
    }
}

fn parse_estimate(lines: &mut Lines, key: &str) -> Result<PropertyEstimate, ProfileError> {
    let toks = lines.next(key)?;
    let map = kv(lines, &toks)?;
    let e = PropertyEstimate {
        value: opt_field(lines, &map, "value")?,
        sd: opt_field(lines, &map, "sd")?,
        n: field(lines, &map, "n")?,
    };
    if e.value.is_some() != (e.n >= 1) {
        return Err(lines.err(format!("`{key}` value must be present exactly when n >= 1")));
    }
    Ok(e)
}

fn parse_parts(lines: &mut Lines, key: &str) -> Result<[u64; 7], ProfileError> {
    let toks = lines.next(key)?;
    let map = kv(lines, &toks)?;
    let mut out = [0u64; 7];
    for p in BodyPart::ALL {
        out[p.index()] = field(lines, &map, p.as_str())?;
    }
    Ok(out)
}

fn parse_ratio<T: std::str::FromStr>(lines: &Lines, s: &str) -> Result<(T, T), ProfileError> {
    let (a, b) = s.split_once('/').ok_or_else(|| lines.err(format!("bad reason `{s}`")))?;
    match (a.parse(), b.parse()) {
        (Ok(a), Ok(b)) => Ok((a, b)),
        _ => Err(lines.err(format!("bad reason `{s}`"))),
    }
}

fn parse_reason(lines: &Lines, tok: &str) -> Result<RejectReason, ProfileError> {
    let (kind, rest) = tok.split_once(':').ok_or_else(|| lines.err(format!("bad reason `{tok}`")))?;
    Ok(match kind {
        "hours" => {
            let (have, need) = parse_ratio(lines, rest)?;
            RejectReason::InsufficientHours { have, need }
        }
        "matches" => {
            let (have, need) = parse_ratio(lines, rest)?;
            RejectReason::InsufficientMatches { have, need }
        }
        "wins" => {
            let (have, need) = parse_ratio(lines, rest)?;
            RejectReason::InsufficientWins { have, need }
        }
        "samples" => {
            let (p, counts) = rest.split_once(':').ok_or_else(|| lines.err(format!("bad reason `{tok}`")))?;
            let property: Property = p.parse().map_err(|e: String| lines.err(e))?;
            let (have, need) = parse_ratio(lines, counts)?;
            RejectReason::InsufficientSamples { property, have, need }
        }
        other => return Err(lines.err(format!("unknown reason `{other}`"))),
    })
}

/// Parses a profile document, returning the profile and its metadata.
pub fn parse_profile(s: &str) -> Result<(PlayerProfile, BTreeMap<String, String>), ProfileError> {
    let mut lines = Lines {
        iter: s.lines().enumerate(),
        line: 0,
    };
    let toks = lines.next("profile")?;
    let head = kv(&lines, &toks)?;
    let version: u32 = field(&lines, &head, "v")?;
    if version != PROFILE_VERSION {
        return Err(lines.err(format!("unsupported profile version {version}")));
    }
    let player_id: String = field(&lines, &head, "player")?;

    let toks = lines.next("meta")?;
    let meta = kv(&lines, &toks)?
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();

    let toks = lines.next("record")?;
    let rec = kv(&lines, &toks)?;
    let matches = field(&lines, &rec, "matches")?;
    let hours = field(&lines, &rec, "hours")?;
    let wins = field(&lines, &rec, "wins")?;

    let toks = lines.next("gate")?;
    let gate = match toks.split_first() {
        Some((&"accepted", [])) => BootstrapStatus::Accepted,
        Some((&"rejected", reasons)) => BootstrapStatus::Rejected(
            reasons
                .iter()
                .map(|t| parse_reason(&lines, t))
                .collect::<Result<_, _>>()?,
        ),
        _ => return Err(lines.err("gate must be `accepted` or `rejected ...`".into())),
    };

    let mut estimates = PerProperty::<PropertyEstimate>::default();
    for p in Property::ALL {
        estimates[p] = parse_estimate(&mut lines, p.id())?;
    }
    let arch_height = parse_estimate(&mut lines, "arch")?;
    let hit_parts = parse_parts(&mut lines, "hit_parts")?;
    let aimed_parts = parse_parts(&mut lines, "aimed_parts")?;

    Ok((
        PlayerProfile {
            player_id,
            estimates,
            arch_height,
            hit_parts,
            aimed_parts,
            matches,
            hours,
            wins,
            gate,
        },
        meta,
    ))
}
