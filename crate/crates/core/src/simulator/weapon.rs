//! Weapons and their recoil patterns.

use serde::{Deserialize, Serialize};

use super::SimError;

/// Angular offset of one shot relative to the first shot's aim point,
/// `(yaw, pitch)` in radians. Positive pitch is upwards.
pub type RecoilOffset = (f64, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeaponSpec {
    pub name: String,
    pub magazine_size: u32,
    /// Ticks between consecutive shots while the trigger is held.
    pub fire_interval: u32,
    /// Ticks from `Reload` until the weapon fires again.
    pub reload_ticks: u32,
    /// Ticks from switching to this weapon until it fires.
    pub draw_ticks: u32,
    /// Offset of shot `j` (1-based) at index `j - 1`.
    pub recoil_curve: Vec<RecoilOffset>,
}

fn magnitude(o: RecoilOffset) -> f64 {
    o.0.hypot(o.1)
}

/// Linear interpolation through `(shot index, yaw, pitch)` keyframes.
fn piecewise(keys: &[(usize, f64, f64)], len: usize) -> Vec<RecoilOffset> {
    (0..len)
        .map(|i| {
            let k = keys.windows(2).find(|w| i >= w[0].0 && i <= w[1].0).unwrap_or(&keys[keys.len() - 2..]);
            let (i0, y0, p0) = k[0];
            let (i1, y1, p1) = k[1];
            let u = ((i - i0) as f64 / (i1 - i0) as f64).min(1.0);
            (y0 + (y1 - y0) * u, p0 + (p1 - p0) * u)
        })
        .collect()
}

impl WeaponSpec {
    /// Automatic rifle: a steep vertical climb, then a drift to the left and
    /// back while the climb flattens.
    pub fn rifle() -> Self {
        let keys = [
            (0, 0.0, 0.0),
            (9, 0.0, 0.036),
            (17, -0.012, 0.040),
            (29, 0.004, 0.052),
        ];
        Self {
            name: "rifle".into(),
            magazine_size: 30,
            fire_interval: 6,
            reload_ticks: 160,
            draw_ticks: 26,
            recoil_curve: piecewise(&keys, 30),
        }
    }

    /// Semi-automatic pistol with a short, shallow climb.
    pub fn pistol() -> Self {
        let keys = [(0, 0.0, 0.0), (5, 0.0, 0.012), (29, 0.006, 0.030)];
        Self {
            name: "pistol".into(),
            magazine_size: 12,
            fire_interval: 10,
            reload_ticks: 140,
            draw_ticks: 26,
            recoil_curve: piecewise(&keys, 30),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Config(format!("weapon `{}`: {m}", self.name)));
        if self.magazine_size == 0 || self.fire_interval == 0 {
            return bad("magazine_size and fire_interval must be positive".into());
        }
        if self.recoil_curve.len() < self.magazine_size as usize {
            return bad(format!(
                "recoil curve has {} entries for a magazine of {}",
                self.recoil_curve.len(),
                self.magazine_size
            ));
        }
        if self.recoil_curve[0] != (0.0, 0.0) {
            return bad("first recoil entry must be zero".into());
        }
        if self.recoil_curve.iter().any(|o| !(o.0.is_finite() && o.1.is_finite())) {
            return bad("recoil entries must be finite".into());
        }
        if self.recoil_curve.windows(2).any(|w| magnitude(w[1]) < magnitude(w[0])) {
            return bad("recoil magnitude must be non-decreasing".into());
        }
        Ok(())
    }
}

/// Recoil offset of the `shot_index`-th shot of a spray (1-based).
pub fn recoil_offset(weapon: &WeaponSpec, shot_index: usize) -> Result<RecoilOffset, SimError> {
    if shot_index == 0 || shot_index > weapon.magazine_size as usize || shot_index > weapon.recoil_curve.len() {
        return Err(SimError::Domain(format!(
            "shot index {shot_index} outside 1..={} for `{}`",
            weapon.magazine_size, weapon.name
        )));
    }
    Ok(weapon.recoil_curve[shot_index - 1])
}
