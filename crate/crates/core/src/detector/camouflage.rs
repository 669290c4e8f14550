//! Whether assisted play leaves the recorded choice distributions intact.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::DetectorError;
use crate::profile::{Property, PropertySamples};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p: f64,
    /// Divisor applied to the Pearson statistic; 1 for unclustered counts.
    pub design_effect: f64,
}

impl ChiSquareTest {
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p <= alpha
    }
}

/// Pearson chi-square test that two count vectors share one distribution.
/// Categories empty in both are dropped.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> Result<ChiSquareTest, DetectorError> {
    if a.len() != b.len() {
        return Err(DetectorError::Domain("count vectors differ in length".into()));
    }
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(DetectorError::Domain("both samples need at least one count".into()));
    }
    let n = na + nb;
    let mut stat = 0.0;
    let mut k = 0;
    for (&x, &y) in a.iter().zip(b) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        k += 1;
        for (obs, row) in [(x as f64, na), (y as f64, nb)] {
            let e = row * col / n;
            stat += (obs - e).powi(2) / e;
        }
    }
    if k < 2 {
        return Ok(ChiSquareTest {
            statistic: 0.0,
            dof: 0,
            p: 1.0,
            design_effect: 1.0,
        });
    }
    let dof = k - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| DetectorError::Domain(e.to_string()))?;
    Ok(ChiSquareTest {
        statistic: stat,
        dof,
        p: dist.sf(stat),
        design_effect: 1.0,
    })
}

fn totals<C: AsRef<[u64]>>(clusters: &[C], k: usize) -> Result<Vec<u64>, DetectorError> {
    let mut t = vec![0u64; k];
    for c in clusters {
        let c = c.as_ref();
        if c.len() != k {
            return Err(DetectorError::Domain("clusters differ in category count".into()));
        }
        for (t, &x) in t.iter_mut().zip(c) {
            *t += x;
        }
    }
    Ok(t)
}

/// Homogeneity test for counts that arrive in clusters (hits of one
/// engagement). The Pearson statistic is divided by the mean design effect
/// of the cell proportions (first-order Rao-Scott).
pub fn clustered_chi_square<C: AsRef<[u64]>>(a: &[C], b: &[C]) -> Result<ChiSquareTest, DetectorError> {
    let k = a.first().or(b.first()).map_or(0, |c| c.as_ref().len());
    if a.len() < 2 || b.len() < 2 {
        return Err(DetectorError::Domain("each sample needs at least two clusters".into()));
    }
    let (ta, tb) = (totals(a, k)?, totals(b, k)?);
    let plain = chi_square_homogeneity(&ta, &tb)?;
    if plain.dof == 0 {
        return Ok(plain);
    }
    let m_total = (ta.iter().sum::<u64>() + tb.iter().sum::<u64>()) as f64;
    let mut weighted = 0.0;
    for (clusters, t) in [(a, &ta), (b, &tb)] {
        let m_g = t.iter().sum::<u64>() as f64;
        let n_g = clusters.len() as f64;
        let mut inner = 0.0;
        for j in 0..k {
            let col = (ta[j] + tb[j]) as f64;
            if col == 0.0 {
                continue;
            }
            let p_gj = t[j] as f64 / m_g;
            let d = if p_gj > 0.0 && p_gj < 1.0 {
                let ss: f64 = clusters
                    .iter()
                    .map(|c| {
                        let c = c.as_ref();
                        let m_i = c.iter().sum::<u64>() as f64;
                        (c[j] as f64 - p_gj * m_i).powi(2)
                    })
                    .sum();
                let v = n_g / (n_g - 1.0) * ss / (m_g * m_g);
                v / (p_gj * (1.0 - p_gj) / m_g)
            } else {
                1.0
            };
            inner += (1.0 - col / m_total) * d;
        }
        weighted += (1.0 - m_g / m_total) * inner;
    }
    let deff = weighted / plain.dof as f64;
    let deff = if deff > 0.0 && deff.is_finite() { deff } else { 1.0 };
    let statistic = plain.statistic / deff;
    let dist = ChiSquared::new(plain.dof as f64).map_err(|e| DetectorError::Domain(e.to_string()))?;
    Ok(ChiSquareTest {
        statistic,
        dof: plain.dof,
        p: dist.sf(statistic),
        design_effect: deff,
    })
}

/// 2x2 test of two proportions given as 0/1 samples.
pub fn proportion_test(a: &[f64], b: &[f64]) -> Result<ChiSquareTest, DetectorError> {
    let count = |xs: &[f64]| {
        let ones = xs.iter().filter(|&&v| v >= 0.5).count() as u64;
        [ones, xs.len() as u64 - ones]
    };
    chi_square_homogeneity(&count(a), &count(b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CamouflageReport {
    pub body_parts: ChiSquareTest,
    pub p_reload: ChiSquareTest,
    pub p_above: ChiSquareTest,
}

impl CamouflageReport {
    pub fn rejects(&self, alpha: f64) -> bool {
        self.body_parts.rejects(alpha) || self.p_reload.rejects(alpha) || self.p_above.rejects(alpha)
    }
}

/// Hit body parts (clustered by engagement), reload-versus-switch and above-versus-below path choices
/// of assisted play against the recorded samples.
pub fn camouflage(recorded: &PropertySamples, assisted: &PropertySamples) -> Result<CamouflageReport, DetectorError> {
    Ok(CamouflageReport {
        body_parts: clustered_chi_square(&recorded.hit_part_clusters, &assisted.hit_part_clusters)?,
        p_reload: proportion_test(recorded.get(Property::A6), assisted.get(Property::A6))?,
        p_above: proportion_test(recorded.get(Property::A8), assisted.get(Property::A8))?,
    })
}
