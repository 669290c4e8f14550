//! Angular seven-part hitbox shared by the simulator, the profile extractor
//! and the detectors.
//!
//! Parts are circles on the view sphere, placed as yaw/pitch offsets from the
//! opponent's centre direction. All offsets and radii are for a reference
//! distance and are multiplied by the per-sighting `scale`.

use crate::telemetry::{BodyPart, Vec3};

/// (part, yaw offset, pitch offset, radius) at scale 1, in radians.
const LAYOUT: [(BodyPart, f64, f64, f64); 7] = [
    (BodyPart::Head, 0.0, 0.028, 0.0045),
    (BodyPart::Chest, 0.0, 0.012, 0.008),
    (BodyPart::Stomach, 0.0, -0.004, 0.007),
    (BodyPart::ArmL, 0.013, 0.010, 0.004),
    (BodyPart::ArmR, -0.013, 0.010, 0.004),
    (BodyPart::LegL, 0.005, -0.024, 0.0055),
    (BodyPart::LegR, -0.005, -0.024, 0.0055),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartGeometry {
    pub part: BodyPart,
    pub center: Vec3,
    pub radius: f64,
}

/// Hitbox of one opponent as seen from the shooter.
#[derive(Debug, Clone, PartialEq)]
pub struct Hitbox {
    pub target: Vec3,
    pub scale: f64,
    parts: [PartGeometry; 7],
}

impl Hitbox {
    pub fn new(target: Vec3, scale: f64) -> Self {
        let (ty, tp) = target.yaw_pitch();
        let parts = LAYOUT.map(|(part, dy, dp, r)| PartGeometry {
            part,
            center: Vec3::from_yaw_pitch(ty + dy * scale, tp + dp * scale),
            radius: r * scale,
        });
        Self { target, scale, parts }
    }

    pub fn parts(&self) -> &[PartGeometry; 7] {
        &self.parts
    }

    pub fn part(&self, part: BodyPart) -> &PartGeometry {
        &self.parts[part.index()]
    }

    /// Part whose centre is angularly closest to `dir`.
    pub fn nearest(&self, dir: &Vec3) -> &PartGeometry {
        self.parts
            .iter()
            .min_by(|a, b| dir.angle_to(&a.center).total_cmp(&dir.angle_to(&b.center)))
            .expect("layout is non-empty")
    }

    /// Part struck by a shot along `dir`, if any: the closest part whose
    /// circle contains the direction.
    pub fn struck(&self, dir: &Vec3) -> Option<&PartGeometry> {
        self.parts
            .iter()
            .map(|p| (p, dir.angle_to(&p.center)))
            .filter(|(p, d)| *d <= p.radius)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(p, _)| p)
    }

    /// Part whose centre lies within `fraction` of its radius from `dir`.
    pub fn centred_on(&self, dir: &Vec3, fraction: f64) -> Option<&PartGeometry> {
        self.parts
            .iter()
            .find(|p| dir.angle_to(&p.center) <= p.radius * fraction)
    }
}
