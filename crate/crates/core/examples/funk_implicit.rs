//! The Funk metric of a Minkowski norm, defined implicitly, against the
//! closed form and its defining PDE.

use finsler::zoo::{self, EuclideanNorm, RandersNorm};

fn main() -> finsler::Result<()> {
    let implicit = zoo::funk_implicit(2, EuclideanNorm)?;
    let closed = zoo::funk_ball_shifted(&[0.0, 0.0])?;
    let (x, y) = ([0.5, 0.0], [1.0, 0.0]);
    println!("ball: implicit {:.15}, closed form {:.15}", implicit.value(&x, &y), closed.value(&x, &y));

    let randers = zoo::funk_implicit(2, RandersNorm::new(&[0.3, 0.1])?)?;
    for (x, y) in [([0.1, 0.2], [1.0, -0.3]), ([-0.4, 0.3], [0.2, 0.9])] {
        println!(
            "randers x={x:?}: Theta = {:.12}, PDE residual = {:.2e}",
            randers.value(&x, &y),
            zoo::funk_pde_residual(&randers, &x, &y)?
        );
    }
    Ok(())
}
