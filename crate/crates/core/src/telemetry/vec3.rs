//! Direction vectors in the shooter's eye frame.
//!
//! The frame is right-handed with `x` forward, `y` to the left and `z` up.
//! Yaw is measured counter-clockwise from `x` around `z`, pitch upward from
//! the `x`/`y` plane.

use std::ops::{Add, Mul, Neg, Sub};

/// Tolerance used for the unit-norm invariant of direction vectors.
pub const UNIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Unit direction for the given yaw and pitch (radians).
    pub fn from_yaw_pitch(yaw: f64, pitch: f64) -> Self {
        let (sy, cy) = yaw.sin_cos();
        let (sp, cp) = pitch.sin_cos();
        Self::new(cp * cy, cp * sy, sp)
    }

    /// Yaw and pitch of this direction. The vector need not be normalized.
    pub fn yaw_pitch(&self) -> (f64, f64) {
        let horizontal = (self.x * self.x + self.y * self.y).sqrt();
        (self.y.atan2(self.x), self.z.atan2(horizontal))
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Returns `None` for the zero vector (or anything with a non-finite norm).
    pub fn normalized(&self) -> Option<Vec3> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(*self * (1.0 / n))
        } else {
            None
        }
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOLERANCE
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Angle between two non-zero vectors in `[0, π]`.
    ///
    /// Uses `atan2(|a×b|, a·b)`, which is numerically stable for nearly
    /// parallel vectors where `acos` loses precision.
    pub fn angle_to(&self, other: &Vec3) -> f64 {
        self.cross(other).norm().atan2(self.dot(other))
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, rhs: f64) -> Vec3 {
        Vec3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// The great circle through two unit directions, with its normal oriented
/// upward so that a positive offset from the circle means "above".
#[derive(Debug, Clone, Copy)]
pub struct GreatCircle {
    pub start: Vec3,
    pub end: Vec3,
    /// Unit normal of the plane through origin, start and end, with `z >= 0`.
    pub up: Vec3,
    /// Angle subtended by the arc from start to end.
    pub span: f64,
}

impl GreatCircle {
    /// `None` when the endpoints coincide or are antipodal (the plane is
    /// undefined in both cases).
    pub fn through(start: Vec3, end: Vec3) -> Option<Self> {
        let normal = start.cross(&end).normalized()?;
        let span = start.angle_to(&end);
        if span < 1e-12 || (std::f64::consts::PI - span) < 1e-9 {
            return None;
        }
        // Orient the normal upward. For a purely vertical chord the normal is
        // horizontal; pick the side to the left of the motion so the sign is
        // still deterministic.
        let up = if normal.z > 1e-12 || (normal.z.abs() <= 1e-12 && normal.y >= 0.0) {
            normal
        } else {
            -normal
        };
        Some(Self {
            start,
            end,
            up,
            span,
        })
    }

    /// Point at fraction `u` along the arc, lifted by `offset` radians toward
    /// `up`. The result is a unit vector whose signed angular distance from the
    /// great circle is exactly `offset`.
    pub fn point(&self, u: f64, offset: f64) -> Vec3 {
        let on_circle = slerp(self.start, self.end, self.span, u);
        let (so, co) = offset.sin_cos();
        on_circle * co + self.up * so
    }

    /// Signed angular distance of `p` from the great circle (positive above).
    pub fn offset_of(&self, p: &Vec3) -> f64 {
        let n = p.norm();
        if n == 0.0 {
            return 0.0;
        }
        (self.up.dot(p) / n).clamp(-1.0, 1.0).asin()
    }
}

fn slerp(a: Vec3, b: Vec3, span: f64, u: f64) -> Vec3 {
    if u <= 0.0 {
        return a;
    }
    if u >= 1.0 {
        return b;
    }
    let s = span.sin();
    let wa = ((1.0 - u) * span).sin() / s;
    let wb = (u * span).sin() / s;
    let p = a * wa + b * wb;
    p.normalized().unwrap_or(a)
}
