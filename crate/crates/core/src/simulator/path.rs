//! Timed aim paths between two view directions.

use std::f64::consts::PI;

use crate::telemetry::{GreatCircle, Vec3};

use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathStyle {
    /// Along the great circle through both endpoints.
    Linear,
    /// Bowed off the great circle, above or below it, with the given mean
    /// absolute offset over the samples (radians).
    Arc { above: bool, mean_abs_offset: f64 },
}

/// Cubic ease-in/ease-out progress.
pub fn ease(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

/// `n + 1` samples from `start` (index 0) to `end` (index `n`), one per
/// tick. Both endpoints are reproduced exactly.
pub fn aim_path(start: Vec3, end: Vec3, n: usize, style: PathStyle) -> Result<Vec<Vec3>, SimError> {
    let n = n.max(1);
    if start.angle_to(&end) < 1e-12 {
        return Ok(vec![start; n + 1]);
    }
    let gc = GreatCircle::through(start, end)
        .ok_or_else(|| SimError::Domain("aim path between antipodal directions is undefined".into()))?;
    let height = match style {
        PathStyle::Arc { above, mean_abs_offset } if n >= 2 => {
            let total: f64 = (0..=n).map(|k| (PI * k as f64 / n as f64).sin()).sum();
            let h = mean_abs_offset * (n + 1) as f64 / total;
            if above {
                h
            } else {
                -h
            }
        }
        _ => 0.0,
    };
    let mut out: Vec<Vec3> = (0..=n)
        .map(|k| {
            let u = k as f64 / n as f64;
            gc.point(ease(u), height * (PI * u).sin())
        })
        .collect();
    out[0] = start;
    out[n] = end;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_exact() {
        let a = Vec3::from_yaw_pitch(0.3, 0.05);
        let b = Vec3::from_yaw_pitch(0.01, 0.02);
        for style in [
            PathStyle::Linear,
            PathStyle::Arc {
                above: true,
                mean_abs_offset: 0.01,
            },
        ] {
            let p = aim_path(a, b, 20, style).unwrap();
            assert_eq!(p.len(), 21);
            assert_eq!(p[0], a);
            assert_eq!(p[20], b);
        }
    }

    #[test]
    fn arc_has_requested_mean_offset() {
        let a = Vec3::from_yaw_pitch(-0.25, 0.0);
        let b = Vec3::X;
        let p = aim_path(
            a,
            b,
            17,
            PathStyle::Arc {
                above: false,
                mean_abs_offset: 0.02,
            },
        )
        .unwrap();
        let gc = GreatCircle::through(a, b).unwrap();
        let offs: Vec<f64> = p.iter().map(|v| gc.offset_of(v)).collect();
        let mean_abs = offs.iter().map(|o| o.abs()).sum::<f64>() / offs.len() as f64;
        assert!((mean_abs - 0.02).abs() < 1e-12);
        assert!(offs.iter().all(|o| *o <= 1e-15));
    }

    #[test]
    fn degenerate_endpoints() {
        let p = aim_path(Vec3::X, Vec3::X, 5, PathStyle::Linear).unwrap();
        assert!(p.iter().all(|v| *v == Vec3::X));
        assert!(aim_path(Vec3::X, -Vec3::X, 5, PathStyle::Linear).is_err());
    }
}
