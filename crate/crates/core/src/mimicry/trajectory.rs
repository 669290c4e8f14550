use rand::Rng;

use crate::simulator::{aim_path, PathStyle};
use crate::telemetry::Vec3;

use super::MimicError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryStyle {
    Linear,
    /// Arched path; above the chord with probability `p_above`, with mean
    /// absolute offset `arch_height` (radians).
    Spiral { p_above: f64, arch_height: f64 },
}

/// Aim path sampled once per tick, starting at the current gaze.
#[derive(Debug, Clone, PartialEq)]
pub struct AimTrajectory {
    pub points: Vec<Vec3>,
    pub tick_rate: u32,
    /// Side of the chord for spiral paths.
    pub above: Option<bool>,
}

impl AimTrajectory {
    pub fn ticks(&self) -> usize {
        self.points.len() - 1
    }

    pub fn duration(&self) -> f64 {
        self.ticks() as f64 / self.tick_rate as f64
    }
}

pub fn synthesize_trajectory<R: Rng + ?Sized>(
    start: Vec3,
    target: Vec3,
    style: TrajectoryStyle,
    duration: f64,
    tick_rate: u32,
    rng: &mut R,
) -> Result<AimTrajectory, MimicError> {
    if !(duration > 0.0 && duration.is_finite()) || tick_rate == 0 {
        return Err(MimicError::Domain(format!("trajectory duration must be positive, got {duration}")));
    }
    if !start.is_unit() || !target.is_unit() {
        return Err(MimicError::Domain("trajectory endpoints must be unit directions".into()));
    }
    let n = ((duration * tick_rate as f64).round() as usize).max(1);
    let (path_style, above) = match style {
        TrajectoryStyle::Linear => (PathStyle::Linear, None),
        TrajectoryStyle::Spiral { p_above, arch_height } => {
            let above = rng.random_bool(p_above.clamp(0.0, 1.0));
            (
                PathStyle::Arc {
                    above,
                    mean_abs_offset: arch_height.max(0.0),
                },
                Some(above),
            )
        }
    };
    let points = aim_path(start, target, n, path_style).map_err(|e| MimicError::Domain(e.to_string()))?;
    Ok(AimTrajectory {
        points,
        tick_rate,
        above,
    })
}
