//! Per-event measurements behind the profile properties.

use crate::telemetry::Vec3;

use super::ProfileError;

/// Lower clamp for the recoil-compensation denominator (radians).
pub const MIN_COMP_DENOMINATOR: f64 = 1e-6;

/// Angle between the line of gaze `a` and the viewing direction `b`,
/// `δ = arccos(a·b / |a||b|)`, in `[0, π]`.
pub fn angular_divergence(a: &Vec3, b: &Vec3) -> Result<f64, ProfileError> {
    let (na, nb) = (a.norm(), b.norm());
    if !(na > 0.0 && nb > 0.0 && na.is_finite() && nb.is_finite()) {
        return Err(ProfileError::Domain("angular divergence needs two non-zero vectors".into()));
    }
    Ok(a.angle_to(b))
}

/// Hits of one lethal engagement, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HitSequence {
    /// `true` for critical hits.
    pub critical: Vec<bool>,
}

impl HitSequence {
    pub fn new(critical: Vec<bool>) -> Self {
        Self { critical }
    }

    /// 1-based position of the first critical hit.
    pub fn critical_index(&self) -> Option<usize> {
        self.critical.iter().position(|&c| c).map(|i| i + 1)
    }
}

/// `v = 1 / i_c` when the sequence contains a critical hit, `0` otherwise.
pub fn suspiciousness(seq: &HitSequence) -> Result<f64, ProfileError> {
    if seq.critical.is_empty() {
        return Err(ProfileError::Domain("suspiciousness of an empty hit sequence".into()));
    }
    Ok(match seq.critical_index() {
        Some(i) => 1.0 / i as f64,
        None => 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Compensation {
    pub value: f64,
    /// Terms dropped because the hit lay exactly on the initial gaze.
    pub skipped: usize,
}

/// `comp = Σ_j |a − a_j| / D(c_j)` over the shots of one event, with
/// `D(c_j) = ∠(a, c_j)` clamped below by [`MIN_COMP_DENOMINATOR`].
///
/// `shots` holds `(a_j, c_j)`: the gaze when shot `j` was fired and the
/// direction of its hit.
pub fn recoil_compensation(initial_gaze: &Vec3, shots: &[(Vec3, Vec3)]) -> Result<Compensation, ProfileError> {
    if shots.is_empty() {
        return Err(ProfileError::Domain("recoil compensation needs at least one shot".into()));
    }
    let mut value = 0.0;
    let mut skipped = 0;
    for (gaze, hit) in shots {
        let d = initial_gaze.angle_to(hit);
        if d == 0.0 || !d.is_finite() {
            skipped += 1;
            continue;
        }
        value += (*initial_gaze - *gaze).norm() / d.max(MIN_COMP_DENOMINATOR);
    }
    Ok(Compensation { value, skipped })
}
