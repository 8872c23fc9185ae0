//! Integrate a geodesic and write its trace as CSV to standard output.

use finsler::flow::{integrate_geodesic, torsion_trace, write_trace_csv};
use finsler::zoo::MetricSpec;

fn main() -> finsler::Result<()> {
    let spec = std::env::args().nth(1).unwrap_or_else(|| "funk_ball_shifted:a=0.3,0".into());
    let metric = MetricSpec::load(&spec)?.build()?;
    let n = metric.dimension();
    let x = vec![0.0; n];
    let mut y = vec![0.0; n];
    y[0] = 1.0;
    let trace = integrate_geodesic(&metric, &x, &y, (0.0, 1.0), 1e-10)?;
    let torsion = torsion_trace(&metric, &trace).ok();
    write_trace_csv(std::io::stdout().lock(), &trace, torsion.as_ref())?;
    eprintln!("{} steps, speed drift {:.2e}", trace.steps, trace.speed_drift);
    Ok(())
}
