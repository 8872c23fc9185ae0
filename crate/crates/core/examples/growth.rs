//! Growth of the mean Cartan norm over forward metric balls.

use finsler::flow::growth_estimate;
use finsler::zoo;

fn main() -> finsler::Result<()> {
    let metric = zoo::funk_ball_shifted(&[0.3, 0.0])?;
    let est = growth_estimate(&metric, &[0.0, 0.0], &[0.25, 0.5, 1.0, 2.0])?;
    println!("{} directions", est.directions);
    for p in &est.points {
        println!("r = {:4.2}  sup |I| = {:.6}  coverage {:.2}", p.radius, p.estimate, p.coverage);
    }
    if let Some(note) = &est.note {
        println!("{note}");
    }
    Ok(())
}
