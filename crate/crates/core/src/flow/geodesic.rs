use std::io::Write;

use nalgebra::{DMatrix, DVector};

use super::chebyshev::{self, Differentiator, NODES};
use super::ode::{self, OdeOptions};
use super::torsion::TorsionTrace;
use crate::error::{Error, Result};
use crate::geometry::{kernels, spray, MetricField};

/// Largest spectral-derivative error estimate accepted, relative to
/// `1 + max |dX/dt|`.
pub const RESOLUTION_TOLERANCE: f64 = 1e-6;

/// A geodesic sampled on Chebyshev–Lobatto nodes of its time interval.
#[derive(Debug, Clone)]
pub struct GeodesicTrace {
    pub times: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    /// `F(σ, σ̇)` at each node.
    pub speeds: Vec<f64>,
    /// `max |F(σ, σ̇) − F(σ₀, σ̇₀)|`.
    pub speed_drift: f64,
    /// Time at which the geodesic left the chart, if it did.
    pub exit: Option<f64>,
    pub tol: f64,
    pub steps: usize,
}

impl GeodesicTrace {
    pub fn dimension(&self) -> usize {
        self.positions[0].len()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Speed drift relative to the initial speed.
    pub fn relative_speed_drift(&self) -> f64 {
        self.speed_drift / self.speeds[0]
    }

    pub(crate) fn differentiator(&self) -> Differentiator {
        Differentiator::new(self.len(), self.start(), self.end())
    }
}

fn geodesic_rhs(metric: &MetricField, state: &[f64]) -> Result<Vec<f64>> {
    let n = metric.dimension();
    let (x, y) = state.split_at(n);
    if !metric.domain().contains(x) {
        return Err(Error::OutOfDomain(x.to_vec()));
    }
    let k = kernels::spray_kernel::<f64>(metric, x, y)?;
    let mut out = Vec::with_capacity(2 * n);
    out.extend_from_slice(y);
    out.extend(k.spray.iter().map(|g| -2.0 * g));
    Ok(out)
}

/// Solve `σ̈ + 2G(σ, σ̇) = 0` from `(x0, y0)` over `t_span`. Leaving the chart
/// ends the trace early with `exit` set; it is not an error.
pub fn integrate_geodesic(
    metric: &MetricField,
    x0: &[f64],
    y0: &[f64],
    t_span: (f64, f64),
    tol: f64,
) -> Result<GeodesicTrace> {
    let n = metric.dimension();
    let start = metric.sample(x0, y0)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let (t0, t1) = t_span;
    let state0: Vec<f64> = start.x.iter().chain(&start.y).copied().collect();
    let sol = ode::integrate(
        |_, s| geodesic_rhs(metric, s),
        |s| metric.domain().contains(&s[..n]),
        t0,
        &state0,
        t1,
        &OdeOptions::with_tolerance(tol),
    )?;
    if !(sol.t_end > t0) {
        return Err(Error::Integrator {
            t: t0,
            reason: "geodesic leaves the domain immediately".into(),
        });
    }
    let times = chebyshev::lobatto_nodes(NODES, t0, sol.t_end);
    let mut positions = Vec::with_capacity(NODES);
    let mut velocities = Vec::with_capacity(NODES);
    let mut speeds = Vec::with_capacity(NODES);
    for &t in &times {
        let s = sol.eval(t);
        speeds.push(metric.value(&s[..n], &s[n..]));
        positions.push(s[..n].to_vec());
        velocities.push(s[n..].to_vec());
    }
    let f0 = speeds[0];
    let speed_drift = speeds.iter().map(|f| (f - f0).abs()).fold(0.0, f64::max);
    Ok(GeodesicTrace {
        times,
        positions,
        velocities,
        speeds,
        speed_drift,
        exit: sol.exit,
        tol,
        steps: sol.steps,
    })
}

/// Nonlinear connection `Nⁱ_j(σ, σ̇)` at every node.
pub(crate) fn connections(metric: &MetricField, trace: &GeodesicTrace) -> Result<Vec<DMatrix<f64>>> {
    trace
        .positions
        .iter()
        .zip(&trace.velocities)
        .map(|(x, y)| Ok(spray(metric, &metric.sample(x, y)?)?.connection))
        .collect()
}

/// Spectral time derivative of a vector field along the trace, with the
/// resolution check.
pub(crate) fn time_derivative(trace: &GeodesicTrace, field: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = trace.differentiator();
    let out = d.apply_vectors(field);
    let scale = 1.0 + out.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    let n = field[0].len();
    let mut estimate: f64 = 0.0;
    for c in 0..n {
        let col: Vec<f64> = field.iter().map(|v| v[c]).collect();
        estimate = estimate.max(chebyshev::derivative_error(&col, trace.start(), trace.end()));
    }
    let tolerance = RESOLUTION_TOLERANCE * scale;
    if estimate > tolerance {
        return Err(Error::Resolution { estimate, tolerance });
    }
    Ok(out)
}

pub(crate) fn covariant_with(connections: &[DMatrix<f64>], field: &[Vec<f64>], derivative: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    derivative
        .into_iter()
        .zip(field)
        .zip(connections)
        .map(|((dx, x), nc)| {
            let nx = nc * DVector::from_row_slice(x);
            dx.iter().zip(nx.iter()).map(|(a, b)| a + b).collect()
        })
        .collect()
}

/// `D_σ̇ Xⁱ = dXⁱ/dt + Nⁱ_j(σ, σ̇) Xʲ` for a field sampled on the trace nodes.
pub fn covariant_derivative_along(
    metric: &MetricField,
    trace: &GeodesicTrace,
    field: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>> {
    if field.len() != trace.len() {
        return Err(Error::Dimension {
            expected: trace.len(),
            got: field.len(),
        });
    }
    if let Some(bad) = field.iter().find(|v| v.len() != trace.dimension()) {
        return Err(Error::Dimension {
            expected: trace.dimension(),
            got: bad.len(),
        });
    }
    let dx = time_derivative(trace, field)?;
    let nc = connections(metric, trace)?;
    Ok(covariant_with(&nc, field, dx))
}

/// Columnar CSV `t, x0.., y0.., phi, residual`. The last two columns are
/// empty without a torsion trace.
pub fn write_trace_csv<W: Write>(out: W, trace: &GeodesicTrace, torsion: Option<&TorsionTrace>) -> Result<()> {
    let n = trace.dimension();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((0..n).map(|i| format!("x{i}")));
    header.extend((0..n).map(|i| format!("y{i}")));
    header.push("phi".into());
    header.push("residual".into());
    w.write_record(&header)?;
    for k in 0..trace.len() {
        let mut row = vec![fmt(trace.times[k])];
        row.extend(trace.positions[k].iter().map(|v| fmt(*v)));
        row.extend(trace.velocities[k].iter().map(|v| fmt(*v)));
        match torsion {
            Some(tt) => {
                row.push(fmt(tt.phi_of_t[k]));
                row.push(fmt(tt.residual_of_t[k]));
            }
            None => {
                row.push(String::new());
                row.push(String::new());
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{self, RiemannianModel};

    #[test]
    fn minkowski_geodesics_are_straight() {
        let m = zoo::minkowski(3, 0.5, &[0.2, 0.0, -0.1]).unwrap();
        let x0 = [0.1, 0.2, -0.3];
        let y0 = [1.0, -0.5, 0.25];
        let tr = integrate_geodesic(&m, &x0, &y0, (0.0, 2.0), 1e-10).unwrap();
        for (t, x) in tr.times.iter().zip(&tr.positions) {
            for i in 0..3 {
                assert!((x[i] - x0[i] - t * y0[i]).abs() < 1e-10);
            }
        }
        assert!(tr.exit.is_none());
    }

    #[test]
    fn sphere_great_circle() {
        // stereographic chart of the unit sphere: the great circle through the
        // south pole along e1 is x(t) = tan(t/2) e1 for the unit-speed start y = e1/2
        let m = zoo::riemannian(2, &RiemannianModel::Sphere).unwrap();
        let tr = integrate_geodesic(&m, &[0.0, 0.0], &[0.5, 0.0], (0.0, std::f64::consts::FRAC_PI_2), 1e-10).unwrap();
        for (t, x) in tr.times.iter().zip(&tr.positions) {
            assert!((x[0] - (t / 2.0).tan()).abs() < 1e-7, "t={t}");
            assert!(x[1].abs() < 1e-12);
        }
        assert!(tr.relative_speed_drift() < 1e-8);
    }

    #[test]
    fn velocity_is_parallel_and_product_rule_holds() {
        let m = zoo::funk_ball_shifted(&[0.3, 0.0]).unwrap();
        let tr = integrate_geodesic(&m, &[0.1, -0.2], &[0.4, 0.7], (0.0, 1.0), 1e-10).unwrap();
        let d = covariant_derivative_along(&m, &tr, &tr.velocities).unwrap();
        assert!(d.iter().flatten().all(|v| v.abs() < 1e-7));
        let tx: Vec<Vec<f64>> = tr
            .times
            .iter()
            .zip(&tr.velocities)
            .map(|(t, y)| y.iter().map(|v| t * v).collect())
            .collect();
        let d = covariant_derivative_along(&m, &tr, &tx).unwrap();
        for (a, b) in d.iter().zip(&tr.velocities) {
            for i in 0..2 {
                assert!((a[i] - b[i]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn slab_geodesic_exits() {
        let m = zoo::incomplete_slab(3).unwrap();
        let tr = integrate_geodesic(&m, &[0.0, 0.0, 0.0], &[1.0, 0.2, 0.0], (0.0, 50.0), 1e-9).unwrap();
        let e = tr.exit.expect("slab geodesics leave the chart");
        assert!(e < 50.0);
        let last = tr.positions.last().unwrap();
        assert!(m.domain().contains(last));
    }

    #[test]
    fn csv_has_expected_columns() {
        let m = zoo::euclidean(2).unwrap();
        let tr = integrate_geodesic(&m, &[0.0, 0.0], &[1.0, 0.0], (0.0, 1.0), 1e-8).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &tr, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,x0,x1,y0,y1,phi,residual\n"));
        assert_eq!(text.lines().count(), NODES + 1);
    }
}
