use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::vec3::Vec3;

/// Default server tick rate (ticks per second).
pub const DEFAULT_TICK_RATE: u32 = 64;

/// Tick index within a trace. The rate is carried by the owning trace.
pub type Tick = u64;

/// Seven-part hitbox of an opponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BodyPart {
    Head,
    Chest,
    Stomach,
    ArmL,
    ArmR,
    LegL,
    LegR,
}

impl BodyPart {
    pub const ALL: [BodyPart; 7] = [
        BodyPart::Head,
        BodyPart::Chest,
        BodyPart::Stomach,
        BodyPart::ArmL,
        BodyPart::ArmR,
        BodyPart::LegL,
        BodyPart::LegR,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BodyPart::Head => "head",
            BodyPart::Chest => "chest",
            BodyPart::Stomach => "stomach",
            BodyPart::ArmL => "arm_l",
            BodyPart::ArmR => "arm_r",
            BodyPart::LegL => "leg_l",
            BodyPart::LegR => "leg_r",
        }
    }

    /// Head hits are the critical ones.
    pub fn is_critical(self) -> bool {
        self == BodyPart::Head
    }
}

impl fmt::Display for BodyPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BodyPart {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BodyPart::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown body part `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeaponSlot {
    Primary,
    Secondary,
}

impl WeaponSlot {
    pub fn as_str(self) -> &'static str {
        match self {
            WeaponSlot::Primary => "primary",
            WeaponSlot::Secondary => "secondary",
        }
    }
}

impl FromStr for WeaponSlot {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "primary" => Ok(WeaponSlot::Primary),
            "secondary" => Ok(WeaponSlot::Secondary),
            _ => Err(format!("unknown weapon slot `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Won,
    Lost,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Won => "won",
            Outcome::Lost => "lost",
        }
    }
}

impl FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "won" => Ok(Outcome::Won),
            "lost" => Ok(Outcome::Lost),
            _ => Err(format!("unknown outcome `{s}`")),
        }
    }
}

/// What happened at a tick.
///
/// `SightingStart` opens an engagement: `gaze` is the line of gaze when the
/// opponent is first seen, `target` the direction of the opponent's hitbox
/// centre and `scale` the angular size factor of its hitbox layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    SightingStart { gaze: Vec3, target: Vec3, scale: f64 },
    AimSample { gaze: Vec3 },
    LockRegionEnter,
    AimOn { part: BodyPart },
    AimOff,
    TriggerPress,
    TriggerRelease,
    ShotFired { gaze: Vec3, moving: bool },
    Hit { part: BodyPart, critical: bool, dir: Vec3 },
    Kill,
    MagazineEmpty,
    Reload,
    WeaponSwitch { to: WeaponSlot },
    BlindStart,
    BlindEnd,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::SightingStart { .. } => "SightingStart",
            EventKind::AimSample { .. } => "AimSample",
            EventKind::LockRegionEnter => "LockRegionEnter",
            EventKind::AimOn { .. } => "AimOn",
            EventKind::AimOff => "AimOff",
            EventKind::TriggerPress => "TriggerPress",
            EventKind::TriggerRelease => "TriggerRelease",
            EventKind::ShotFired { .. } => "ShotFired",
            EventKind::Hit { .. } => "Hit",
            EventKind::Kill => "Kill",
            EventKind::MagazineEmpty => "MagazineEmpty",
            EventKind::Reload => "Reload",
            EventKind::WeaponSwitch { .. } => "WeaponSwitch",
            EventKind::BlindStart => "BlindStart",
            EventKind::BlindEnd => "BlindEnd",
        }
    }

    /// Direction-role vectors carried by this event.
    pub fn directions(&self) -> Vec<(&'static str, Vec3)> {
        match *self {
            EventKind::SightingStart { gaze, target, .. } => vec![("gaze", gaze), ("target", target)],
            EventKind::AimSample { gaze } | EventKind::ShotFired { gaze, .. } => vec![("gaze", gaze)],
            EventKind::Hit { dir, .. } => vec![("dir", dir)],
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameEvent {
    pub tick: Tick,
    pub kind: EventKind,
}

impl GameEvent {
    pub fn new(tick: Tick, kind: EventKind) -> Self {
        Self { tick, kind }
    }
}

/// Ordered event stream of one player's match.
#[derive(Debug, Clone, PartialEq)]
pub struct EngagementTrace {
    pub schema_version: u32,
    pub tick_rate: u32,
    pub match_id: String,
    pub player_id: String,
    pub outcome: Outcome,
    /// Match length in seconds of game time.
    pub duration: f64,
    /// Extra header keys such as provenance; written after the fixed ones.
    pub meta: BTreeMap<String, String>,
    pub events: Vec<GameEvent>,
}

impl EngagementTrace {
    pub fn new(match_id: impl Into<String>, player_id: impl Into<String>, outcome: Outcome, duration: f64) -> Self {
        Self {
            schema_version: super::format::SCHEMA_VERSION,
            tick_rate: DEFAULT_TICK_RATE,
            match_id: match_id.into(),
            player_id: player_id.into(),
            outcome,
            duration,
            meta: BTreeMap::new(),
            events: Vec::new(),
        }
    }

    pub fn seconds(&self, ticks: u64) -> f64 {
        ticks as f64 / self.tick_rate as f64
    }

    pub fn push(&mut self, tick: Tick, kind: EventKind) {
        self.events.push(GameEvent::new(tick, kind));
    }
}
