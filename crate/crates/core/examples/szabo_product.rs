//! Products of Riemannian factors: the positivity gate and the block
//! identities for the fundamental tensor, determinant and spray.

use finsler::geometry::{flag_curvature, mean_cartan, s_curvature};
use finsler::verify::{ProductParts, SamplePlan};
use finsler::zoo::{self, MetricSpec};

fn main() -> finsler::Result<()> {
    println!("admissible epsilon >= {:.6}", zoo::szabo_epsilon_lower_bound(1e-9));
    match zoo::szabo_epsilon(-0.8) {
        Err(e) => println!("epsilon = -0.8 rejected: {e}"),
        Ok(_) => println!("epsilon = -0.8 unexpectedly accepted"),
    }

    let spec = MetricSpec::load("szabo_epsilon:epsilon=0.5")?;
    let parts = ProductParts::from_spec(&spec).expect("a product spec")?;
    let metric = &parts.metric;
    for (at, u) in SamplePlan::new(5, 11).flags(metric)? {
        let e = parts.errors(&at)?;
        println!(
            "x={:?} K={:+.3e} S={:+.1e} |I|={:.4} identities {:.1e}",
            at.x.iter().map(|v| (v * 1e3).round() / 1e3).collect::<Vec<_>>(),
            flag_curvature(metric, &at, &u)?,
            s_curvature(metric, &at)?,
            mean_cartan(metric, &at)?.norm(),
            e.max()
        );
    }
    Ok(())
}
