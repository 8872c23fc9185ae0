//! Pointwise Finsler geometry derived from a single [`MetricField`].

pub mod curvature;
pub(crate) mod kernels;
pub mod metric;
pub mod quadrature;
pub mod spray;
pub mod tensor;
pub mod torsion;
pub mod volume;

pub use curvature::{flag_curvature, riemann, RiemannOperator, DEGENERATE_FLAG_THRESHOLD};
pub use metric::{Domain, DynMetric, MetricField, MetricFn, MetricScalar, TangentSample};
pub use spray::{berwald_defect, spray, spray_jet, SprayData, SprayJet};
pub use tensor::{fundamental_tensor, is_positive_definite, FundamentalTensor};
pub use torsion::{cartan_norm, mean_cartan, mean_landsberg, torsion_bundle, CartanNorm, TorsionBundle, TorsionVector};
pub use volume::{distortion, log_density_derivative, log_density_gradient, s_curvature, volume_density};
