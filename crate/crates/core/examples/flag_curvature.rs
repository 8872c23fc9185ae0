//! Flag curvature of the shifted Funk metric on random flags.

use finsler::geometry::flag_curvature;
use finsler::verify::SamplePlan;
use finsler::zoo;

fn main() -> finsler::Result<()> {
    let metric = zoo::funk_ball_shifted(&[0.3, 0.0, 0.0])?;
    let mut worst: f64 = 0.0;
    for (at, u) in SamplePlan::new(200, 1).flags(&metric)? {
        let k = flag_curvature(&metric, &at, &u)?;
        worst = worst.max((k + 0.25).abs());
    }
    println!("{}: max |K + 1/4| over 200 flags = {worst:.3e}", metric.name());
    Ok(())
}
