use rayon::prelude::*;
use serde::Serialize;

use super::geodesic::integrate_geodesic;
use crate::error::{Error, Result};
use crate::geometry::{cartan_norm, torsion::sphere_directions, MetricField};

/// Running supremum of `‖𝐈‖` over the sampled forward ball of radius `radius`.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthPoint {
    pub radius: f64,
    pub estimate: f64,
    /// Fraction of shot geodesics still inside the chart at this radius.
    pub coverage: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthEstimate {
    pub points: Vec<GrowthPoint>,
    pub directions: usize,
    /// Set when no geodesic reached the largest radius.
    pub note: Option<String>,
}

/// Samples per geodesic between consecutive requested radii.
const SAMPLES_PER_RADIUS: usize = 4;

fn direction_count(n: usize) -> usize {
    match n {
        2 => 16,
        3 => 26,
        _ => 12 * n,
    }
}

/// Estimate `𝓘_p(r) = sup{‖𝐈‖_x : d(p, x) ≤ r}` by shooting unit-speed
/// geodesics from `p`. Distance is the forward arc length along each geodesic.
pub fn growth_estimate(metric: &MetricField, p: &[f64], radii: &[f64]) -> Result<GrowthEstimate> {
    let n = metric.dimension();
    if p.len() != n {
        return Err(Error::Dimension { expected: n, got: p.len() });
    }
    if !metric.domain().contains(p) {
        return Err(Error::OutOfDomain(p.to_vec()));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) || radii.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("radii must be finite, nonnegative and increasing".into()));
    }
    let r_max = radii.last().copied().unwrap_or(0.0);
    let at_p = cartan_norm(metric, p)?.value;
    let dirs = sphere_directions(n, direction_count(n), 0x9e0);
    let samples = SAMPLES_PER_RADIUS * radii.len().max(1);
    // per direction: (reach, [(t, ‖I‖)])
    let shots: Vec<Result<(f64, Vec<(f64, f64)>)>> = dirs
        .par_iter()
        .map(|d| {
            if r_max == 0.0 {
                return Ok((0.0, Vec::new()));
            }
            let speed = metric.value(p, d);
            let y: Vec<f64> = d.iter().map(|v| v / speed).collect();
            let tr = integrate_geodesic(metric, p, &y, (0.0, r_max), 1e-9)?;
            let reach = tr.exit.unwrap_or(r_max);
            let mut out = Vec::with_capacity(samples);
            for j in 1..=samples {
                let t = r_max * j as f64 / samples as f64;
                if t > reach {
                    break;
                }
                // nearest node on the trace
                let k = tr.times.partition_point(|s| *s < t).min(tr.len() - 1);
                let x = &tr.positions[k];
                out.push((tr.times[k], cartan_norm(metric, x)?.value));
            }
            Ok((reach, out))
        })
        .collect();
    let shots = shots.into_iter().collect::<Result<Vec<_>>>()?;
    let points: Vec<GrowthPoint> = radii
        .iter()
        .map(|&r| {
            let estimate = shots
                .iter()
                .flat_map(|(_, s)| s.iter())
                .filter(|(t, _)| *t <= r)
                .map(|(_, v)| *v)
                .fold(at_p, f64::max);
            let alive = shots.iter().filter(|(reach, _)| *reach >= r).count();
            GrowthPoint {
                radius: r,
                estimate,
                coverage: alive as f64 / shots.len() as f64,
            }
        })
        .collect();
    let note = match points.last() {
        Some(last) if last.coverage == 0.0 => Some(format!(
            "every geodesic left the chart before r = {}; larger radii are not sampled",
            last.radius
        )),
        _ => None,
    };
    Ok(GrowthEstimate {
        points,
        directions: dirs.len(),
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{self, RiemannianModel};

    #[test]
    fn riemannian_growth_is_zero() {
        let m = zoo::riemannian(2, &RiemannianModel::HyperbolicDisk).unwrap();
        let g = growth_estimate(&m, &[0.0, 0.0], &[0.5, 1.0]).unwrap();
        assert!(g.points.iter().all(|p| p.estimate < 1e-9));
        assert!(g.note.is_none());
    }

    #[test]
    fn minkowski_growth_is_constant() {
        let m = zoo::minkowski(2, 0.5, &[0.2, 0.0]).unwrap();
        let g = growth_estimate(&m, &[0.0, 0.0], &[0.0, 1.0, 2.0]).unwrap();
        let first = g.points[0].estimate;
        assert!(first > 0.0);
        for p in &g.points {
            assert!((p.estimate - first).abs() < 1e-9 * first);
        }
    }
}
