//! Geodesic flow: integration, covariant differentiation along curves, torsion
//! traces, Jacobi fields and growth of the mean Cartan torsion.

pub mod chebyshev;
mod geodesic;
mod growth;
mod jacobi;
pub mod ode;
mod torsion;

pub use geodesic::{covariant_derivative_along, integrate_geodesic, write_trace_csv, GeodesicTrace, RESOLUTION_TOLERANCE};
pub use growth::{growth_estimate, GrowthEstimate, GrowthPoint};
pub use jacobi::{jacobi_field, jacobi_propagate, JacobiField};
pub use torsion::{torsion_trace, TorsionTrace};
