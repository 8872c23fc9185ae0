//! Run the shipped claim suite and print a one-line verdict per claim.

use finsler::verify::{run_suite, ClaimSuite};

fn main() -> finsler::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/claims/acceptance.toml").into());
    let suite = ClaimSuite::load(&path)?;
    let report = run_suite(&suite.claim, 0);
    for c in &report.claims {
        let worst = c.worst.as_ref().map(|w| w.deviation).unwrap_or(f64::NAN);
        println!("{:5} {:40} worst deviation {worst:.2e}", if c.pass { "pass" } else { "FAIL" }, c.id);
    }
    println!("{}/{} passed in {:.1}s", report.passed, report.total, report.runtime_seconds);
    Ok(())
}
