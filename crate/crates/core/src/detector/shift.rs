//! Per-property two-sample tests of one match against a recorded profile.

use statrs::distribution::{ContinuousCDF, Normal};

use super::DetectorError;
use crate::profile::{extract_samples, BootstrapCriteria, Property, PropertySamples};
use crate::telemetry::{engagements, EngagementTrace};

/// Properties sampled once per shot or hit.
pub const PER_SHOT: [Property; 3] = [Property::S2, Property::S3, Property::S4];

/// Samples of `traces` with the per-shot properties replaced by one mean
/// per engagement, so that shots of one burst do not count as independent.
pub fn engagement_samples(traces: &[EngagementTrace]) -> PropertySamples {
    let mut out = PropertySamples::default();
    for trace in traces {
        out.merge(&extract_samples(trace));
    }
    for p in PER_SHOT {
        out.values[p].clear();
    }
    for trace in traces {
        for eng in engagements(trace) {
            let mut sub = EngagementTrace::new(&*trace.match_id, &*trace.player_id, trace.outcome, trace.duration);
            sub.tick_rate = trace.tick_rate;
            sub.events = eng.events(trace).to_vec();
            let s = extract_samples(&sub);
            for p in PER_SHOT {
                let xs = s.get(p);
                if !xs.is_empty() {
                    out.values[p].push(xs.iter().sum::<f64>() / xs.len() as f64);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    pub u: f64,
    pub z: f64,
    pub p: f64,
}

fn std_normal_sf(z: f64) -> f64 {
    Normal::standard().sf(z)
}

/// Two-sided Mann-Whitney U test with tie correction, normal
/// approximation and continuity correction. `u` counts pairs where the
/// first sample is larger, ties counting one half.
pub fn mann_whitney(x: &[f64], y: &[f64]) -> Result<MannWhitney, DetectorError> {
    if x.is_empty() || y.is_empty() {
        return Err(DetectorError::Domain("Mann-Whitney needs two non-empty samples".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(DetectorError::Domain("Mann-Whitney samples must be finite".into()));
    }
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let mut all: Vec<(f64, bool)> = x.iter().map(|&v| (v, true)).chain(y.iter().map(|&v| (v, false))).collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = all.len();
    let mut rank_sum_x = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        let avg = (i + j) as f64 / 2.0 + 1.0;
        rank_sum_x += avg * all[i..=j].iter().filter(|e| e.1).count() as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let u = rank_sum_x - n1 * (n1 + 1.0) / 2.0;
    let nt = n1 + n2;
    let var = n1 * n2 / 12.0 * ((nt + 1.0) - tie_term / (nt * (nt - 1.0)));
    if !(var > 0.0) {
        return Ok(MannWhitney { u, z: 0.0, p: 1.0 });
    }
    let d = u - n1 * n2 / 2.0;
    let z = d.signum() * (d.abs() - 0.5).max(0.0) / var.sqrt();
    let p = (2.0 * std_normal_sf(z.abs())).min(1.0);
    Ok(MannWhitney { u, z, p })
}

/// Holm step-down adjusted p-values, in input order.
pub fn holm(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
    let mut adj = vec![0.0; m];
    let mut running = 0.0f64;
    for (k, &i) in order.iter().enumerate() {
        running = running.max(((m - k) as f64 * p[i]).min(1.0));
        adj[i] = running;
    }
    adj
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyTest {
    pub property: Property,
    pub n_window: usize,
    pub n_baseline: usize,
    pub test: MannWhitney,
    pub p_adjusted: f64,
    pub rejected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftReport {
    pub alpha: f64,
    pub tests: Vec<PropertyTest>,
    /// Properties with too few samples on either side.
    pub abstained: Vec<Property>,
}

impl ShiftReport {
    pub fn flagged(&self) -> bool {
        self.tests.iter().any(|t| t.rejected)
    }

    pub fn rejected(&self) -> impl Iterator<Item = &PropertyTest> {
        self.tests.iter().filter(|t| t.rejected)
    }
}

/// Tests every property of `window` against `baseline`, Holm-corrected at
/// family level `alpha`. Properties below the sample minimum abstain.
pub fn distribution_shift(
    window: &PropertySamples,
    baseline: &PropertySamples,
    alpha: f64,
    criteria: &BootstrapCriteria,
) -> Result<ShiftReport, DetectorError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(DetectorError::Config(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let mut tested = Vec::new();
    let mut abstained = Vec::new();
    for p in Property::ALL {
        let (w, b) = (window.get(p), baseline.get(p));
        let need = criteria.min_samples_for(p);
        if w.len() < need || b.len() < need {
            abstained.push(p);
            continue;
        }
        tested.push((p, w.len(), b.len(), mann_whitney(w, b)?));
    }
    let adj = holm(&tested.iter().map(|t| t.3.p).collect::<Vec<_>>());
    let tests = tested
        .into_iter()
        .zip(adj)
        .map(|((property, n_window, n_baseline, test), p_adjusted)| PropertyTest {
            property,
            n_window,
            n_baseline,
            test,
            p_adjusted,
            rejected: p_adjusted <= alpha,
        })
        .collect();
    Ok(ShiftReport {
        alpha,
        tests,
        abstained,
    })
}
