//! Propagate a Jacobi field with the initial data of the mean Cartan torsion
//! and compare it with the torsion itself.

use finsler::flow::{integrate_geodesic, jacobi_field, torsion_trace};
use finsler::zoo;

fn main() -> finsler::Result<()> {
    let metric = zoo::funk_ball_shifted(&[0.3, 0.0, 0.0])?;
    let x = [0.1, 0.0, -0.1];
    let v = [0.3, 1.0, 0.2];
    let f = metric.value(&x, &v);
    let y: Vec<f64> = v.iter().map(|c| c / f).collect();
    let trace = integrate_geodesic(&metric, &x, &y, (0.0, 1.0), 1e-10)?;
    let tt = torsion_trace(&metric, &trace)?;
    let field = jacobi_field(&metric, &trace, &tt.i_of_t[0], &tt.j_of_t[0])?;
    let gap = field
        .values
        .iter()
        .zip(&tt.i_of_t)
        .map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    println!("max |V(t) - I(t)| = {gap:.3e} (max phi {:.4})", tt.max_phi());
    Ok(())
}
