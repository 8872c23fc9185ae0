//! Mean Cartan torsion along a Funk geodesic: phi, its derivatives and the
//! residual of the Jacobi equation.

use finsler::flow::{integrate_geodesic, torsion_trace};
use finsler::zoo;

fn main() -> finsler::Result<()> {
    let metric = zoo::funk_ball_shifted(&[0.3, 0.0])?;
    let x = [0.1, -0.2];
    let v = [0.6, 0.8];
    let f = metric.value(&x, &v);
    let y: Vec<f64> = v.iter().map(|c| c / f).collect();
    let trace = integrate_geodesic(&metric, &x, &y, (0.0, 1.0), 1e-10)?;
    let tt = torsion_trace(&metric, &trace)?;
    let d2 = tt.phi_second_derivative();
    println!("{:>8} {:>14} {:>14} {:>12}", "t", "phi", "phi''", "residual");
    for k in (0..trace.len()).step_by(32) {
        println!(
            "{:8.4} {:14.10} {:14.10} {:12.3e}",
            trace.times[k], tt.phi_of_t[k], d2[k], tt.residual_of_t[k]
        );
    }
    println!("max interior residual / max phi = {:.3e}", tt.max_interior_residual() / tt.max_phi());
    println!("|DI - J| between the two derivative computations = {:.3e}", tt.di_discrepancy);
    Ok(())
}
