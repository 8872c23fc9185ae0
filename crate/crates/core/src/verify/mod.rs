//! Declarative claims about metrics, evaluated on deterministic sampling
//! plans and reported as JSON or CSV.

mod claim;
pub mod invariants;
mod product;
mod report;
mod run;
pub mod sampling;

pub use claim::{Claim, ClaimSuite, GeodesicPlan, Normalize, Quantity, Target, Tolerance, ToleranceKind};
pub use invariants::{universal_invariants, InvariantCheck};
pub use product::{ProductErrors, ProductParts};
pub use report::{ClaimReport, Stats, SuiteReport, WorstSample};
pub use run::{closed_one_form_check, run_claim, run_suite, CLOSEDNESS_STEP, PHI_FLOOR};
pub use sampling::SamplePlan;
