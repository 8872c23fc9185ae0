//! A user-defined metric: implement `MetricFn` once, generically over the
//! scalar type, and every quantity becomes available.

use finsler::geometry::{flag_curvature, mean_cartan, mean_landsberg, Domain, MetricField, MetricFn};
use finsler::jets::Scalar;
use finsler::verify::{universal_invariants, SamplePlan};

/// `F = √(|y|² + k(y₁⁴ + y₂⁴)/|y|²)` with a position-dependent `k`.
struct Bumpy;

impl MetricFn for Bumpy {
    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        let k = (x[0].clone() * x[1].clone()).cos() * 0.1;
        let r2 = y[0].square() + y[1].square();
        let quartic = y[0].square().square() + y[1].square().square();
        let q = r2.clone() + k * quartic / r2;
        q.sqrt()
    }
}

fn main() -> finsler::Result<()> {
    let metric = MetricField::new("bumpy", 2, Domain::ball(2, 1.0), Bumpy)?;
    let at = metric.sample(&[0.3, -0.2], &[1.0, 0.5])?;
    println!("F = {:.12}", metric.value(&at.x, &at.y));
    println!("K = {:.12}", flag_curvature(&metric, &at, &[0.0, 1.0])?);
    println!("|I| = {:.3e}, |J| = {:.3e}", mean_cartan(&metric, &at)?.norm(), mean_landsberg(&metric, &at)?.norm());
    for check in universal_invariants(&metric, &SamplePlan::new(50, 1))? {
        println!("{:28} {:.2e} {}", check.name, check.worst, if check.pass { "ok" } else { "FAIL" });
    }
    Ok(())
}
