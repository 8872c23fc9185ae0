//! S-curvature and distortion through the Busemann-Hausdorff volume.

use finsler::geometry::{distortion, s_curvature, volume_density};
use finsler::zoo;

fn main() -> finsler::Result<()> {
    let funk = zoo::funk_ball_shifted(&[0.0, 0.0])?;
    let slab = zoo::incomplete_slab(3)?;
    for (metric, x, y) in [
        (&funk, vec![0.2, -0.1], vec![1.0, 0.4]),
        (&slab, vec![0.3, 0.1, -0.5], vec![0.2, 1.0, 0.3]),
    ] {
        let at = metric.sample(&x, &y)?;
        let n = metric.dimension() as f64;
        let s = s_curvature(metric, &at)?;
        println!("{}", metric.name());
        println!("  sigma(x)      = {:.12}", volume_density(metric, &x)?);
        println!("  tau(x, y)     = {:.12}", distortion(metric, &at)?);
        println!("  S(x, y)       = {s:.12}");
        println!("  S/((n+1)F)    = {:.12}", s / ((n + 1.0) * metric.value(&x, &y)));
    }
    Ok(())
}
