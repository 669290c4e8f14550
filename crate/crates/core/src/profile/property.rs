use std::fmt;
use std::str::FromStr;

/// The fifteen profile properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    S7,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Radians,
    Seconds,
    Probability,
    /// Non-negative ratio without an upper bound.
    Ratio,
}

impl Property {
    pub const ALL: [Property; 15] = [
        Property::A1,
        Property::A2,
        Property::A3,
        Property::A4,
        Property::A5,
        Property::A6,
        Property::A7,
        Property::A8,
        Property::S1,
        Property::S2,
        Property::S3,
        Property::S4,
        Property::S5,
        Property::S6,
        Property::S7,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn id(self) -> &'static str {
        match self {
            Property::A1 => "a1",
            Property::A2 => "a2",
            Property::A3 => "a3",
            Property::A4 => "a4",
            Property::A5 => "a5",
            Property::A6 => "a6",
            Property::A7 => "a7",
            Property::A8 => "a8",
            Property::S1 => "s1",
            Property::S2 => "s2",
            Property::S3 => "s3",
            Property::S4 => "s4",
            Property::S5 => "s5",
            Property::S6 => "s6",
            Property::S7 => "s7",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Property::A1 => "Divergence of aiming upon coming into conflict",
            Property::A2 => "Time to kill",
            Property::A3 => "Aiming duration",
            Property::A4 => "Duration between a kill and aiming at another opponent",
            Property::A5 => "Aiming with unloaded weapon",
            Property::A6 => "Switching between primary and secondary weapon",
            Property::A7 => "Time to switch to secondary weapon",
            Property::A8 => "Aiming trajectory/pattern",
            Property::S1 => "Suspiciousness of hits",
            Property::S2 => "Ratio of hits when moving",
            Property::S3 => "Primary body part shot at",
            Property::S4 => "Hit precision",
            Property::S5 => "Hit precision at first shot",
            Property::S6 => "Recoil compensation",
            Property::S7 => "First shot during movement",
        }
    }

    pub fn unit(self) -> Unit {
        match self {
            Property::A1 | Property::S7 => Unit::Radians,
            Property::A2 | Property::A3 | Property::A4 | Property::A5 | Property::A7 => Unit::Seconds,
            Property::A6
            | Property::A8
            | Property::S1
            | Property::S2
            | Property::S3
            | Property::S4
            | Property::S5 => Unit::Probability,
            Property::S6 => Unit::Ratio,
        }
    }

    /// Whether a value is inside the property's feasible range.
    pub fn in_range(self, v: f64) -> bool {
        v.is_finite()
            && match self.unit() {
                Unit::Radians => (0.0..=std::f64::consts::PI).contains(&v),
                Unit::Seconds | Unit::Ratio => v >= 0.0,
                Unit::Probability => (0.0..=1.0).contains(&v),
            }
    }

    /// Properties whose events are rare in a match (weapon handling and
    /// critical hits).
    pub fn is_rare(self) -> bool {
        matches!(self, Property::A5 | Property::A6 | Property::A7 | Property::S1)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| format!("unknown property `{s}`"))
    }
}

/// Per-property storage indexed by [`Property`].
#[derive(Debug, Clone, PartialEq)]
pub struct PerProperty<T>(pub [T; 15]);

impl<T> PerProperty<T> {
    pub fn from_fn(mut f: impl FnMut(Property) -> T) -> Self {
        PerProperty(Property::ALL.map(&mut f))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Property, &T)> {
        Property::ALL.into_iter().zip(self.0.iter())
    }
}

impl<T: Default> Default for PerProperty<T> {
    fn default() -> Self {
        Self::from_fn(|_| T::default())
    }
}

impl<T> std::ops::Index<Property> for PerProperty<T> {
    type Output = T;
    fn index(&self, p: Property) -> &T {
        &self.0[p.index()]
    }
}

impl<T> std::ops::IndexMut<Property> for PerProperty<T> {
    fn index_mut(&mut self, p: Property) -> &mut T {
        &mut self.0[p.index()]
    }
}
