//! Concrete metrics: Riemannian and Minkowski baselines plus every example
//! family, each available as a constructor and as a serializable [`MetricSpec`].

mod funk;
mod minkowski;
mod product;
mod randers;
mod riemannian;
mod slab;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use funk::{
    funk_ball_shifted, funk_implicit, funk_implicit_from_spec, funk_pde_residual, shifted_funk_radius, solve_theta,
    EuclideanNorm, MinkowskiNorm, NormSpec, RandersNorm,
};
pub use minkowski::minkowski;
pub use product::{
    check_profile, positivity_violation, profile_derivatives, quadrant_samples, szabo_epsilon,
    szabo_epsilon_lower_bound, szabo_factors, szabo_product, szabo_product_from_spec, szabo_product_unchecked,
    FactorSpec, LinearProfile, Profile, ProfileDerivatives, ProfileSpec, SzaboProfile,
};
pub use randers::{beta_norm, randers};
pub use riemannian::{euclidean, riemannian, riemannian_factor, RiemannianModel};
pub use slab::incomplete_slab;

use crate::error::{Error, Result};
use crate::geometry::{is_positive_definite, Domain, MetricField};
use crate::verify::sampling;

fn default_slab_dimension() -> usize {
    3
}

/// Serializable description of a zoo metric. The `kind` field selects the
/// family; the remaining fields are its parameters.
///
/// ```toml
/// kind = "funk_ball_shifted"
/// a = [0.3, 0.0, 0.0]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSpec {
    Euclidean {
        dimension: usize,
    },
    Minkowski {
        dimension: usize,
        #[serde(default)]
        quartic: f64,
        #[serde(default)]
        b: Vec<f64>,
    },
    Riemannian {
        dimension: usize,
        model: RiemannianModel,
    },
    Randers {
        dimension: usize,
        #[serde(default)]
        model: RiemannianModel,
        b: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b_gradient: Option<Vec<Vec<f64>>>,
    },
    FunkBallShifted {
        a: Vec<f64>,
    },
    FunkImplicit {
        dimension: usize,
        phi: NormSpec,
    },
    SzaboProduct {
        factor1: FactorSpec,
        factor2: FactorSpec,
        profile: ProfileSpec,
    },
    SzaboEpsilon {
        epsilon: f64,
    },
    IncompleteSlab {
        #[serde(default = "default_slab_dimension")]
        dimension: usize,
    },
}

/// The nine metric families, in catalog order.
pub const KINDS: [&str; 9] = [
    "euclidean",
    "minkowski",
    "riemannian",
    "randers",
    "funk_ball_shifted",
    "funk_implicit",
    "szabo_product",
    "szabo_epsilon",
    "incomplete_slab",
];

impl MetricSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            MetricSpec::Euclidean { .. } => KINDS[0],
            MetricSpec::Minkowski { .. } => KINDS[1],
            MetricSpec::Riemannian { .. } => KINDS[2],
            MetricSpec::Randers { .. } => KINDS[3],
            MetricSpec::FunkBallShifted { .. } => KINDS[4],
            MetricSpec::FunkImplicit { .. } => KINDS[5],
            MetricSpec::SzaboProduct { .. } => KINDS[6],
            MetricSpec::SzaboEpsilon { .. } => KINDS[7],
            MetricSpec::IncompleteSlab { .. } => KINDS[8],
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            MetricSpec::Euclidean { dimension }
            | MetricSpec::Minkowski { dimension, .. }
            | MetricSpec::Riemannian { dimension, .. }
            | MetricSpec::Randers { dimension, .. }
            | MetricSpec::FunkImplicit { dimension, .. }
            | MetricSpec::IncompleteSlab { dimension } => *dimension,
            MetricSpec::FunkBallShifted { a } => a.len(),
            MetricSpec::SzaboProduct { factor1, factor2, .. } => factor1.dimension + factor2.dimension,
            MetricSpec::SzaboEpsilon { .. } => 3,
        }
    }

    /// Construct the metric, enforcing the family's validity conditions.
    pub fn build(&self) -> Result<MetricField> {
        match self {
            MetricSpec::Euclidean { dimension } => euclidean(*dimension),
            MetricSpec::Minkowski { dimension, quartic, b } => minkowski(*dimension, *quartic, b),
            MetricSpec::Riemannian { dimension, model } => riemannian(*dimension, model),
            MetricSpec::Randers {
                dimension,
                model,
                b,
                b_gradient,
            } => randers(*dimension, model, b, b_gradient.as_deref()),
            MetricSpec::FunkBallShifted { a } => funk_ball_shifted(a),
            MetricSpec::FunkImplicit { dimension, phi } => funk_implicit_from_spec(*dimension, phi),
            MetricSpec::SzaboProduct {
                factor1,
                factor2,
                profile,
            } => szabo_product_from_spec(factor1, factor2, profile),
            MetricSpec::SzaboEpsilon { epsilon } => szabo_epsilon(*epsilon),
            MetricSpec::IncompleteSlab { dimension } => incomplete_slab(*dimension),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parse the compact form `kind:key=value;key=value`.
    ///
    /// Values with commas become arrays, numbers and booleans are taken
    /// literally, and a bare word for a nested key (`model`, `phi`, `profile`)
    /// selects that variant. Dotted keys (`profile.epsilon=0.5`) and raw TOML
    /// values (`[...]`, `{...}`) pass through.
    pub fn parse_inline(text: &str) -> Result<Self> {
        let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
        let mut lines = vec![format!("kind = \"{}\"", kind.trim())];
        for pair in rest.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got `{pair}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let nested = matches!(key, "model" | "phi" | "profile");
            let rendered = if value.starts_with('[') || value.starts_with('{') || value.starts_with('"') {
                value.to_string()
            } else if value.contains(',') {
                format!("[{value}]")
            } else if value.parse::<f64>().is_ok() || value == "true" || value == "false" {
                value.to_string()
            } else if nested {
                format!("{{ type = \"{value}\" }}")
            } else {
                format!("\"{value}\"")
            };
            lines.push(format!("{key} = {rendered}"));
        }
        Self::from_toml(&lines.join("\n"))
    }

    /// Read a spec from a file path, or parse it inline when no such file exists.
    pub fn load(arg: &str) -> Result<Self> {
        let path = std::path::Path::new(arg);
        if path.is_file() {
            Self::from_toml(&std::fs::read_to_string(path)?)
        } else {
            Self::parse_inline(arg)
        }
    }
}

/// One representative spec per family.
pub fn catalog() -> Vec<MetricSpec> {
    vec![
        MetricSpec::Euclidean { dimension: 3 },
        MetricSpec::Minkowski {
            dimension: 3,
            quartic: 0.5,
            b: vec![0.2, 0.0, -0.1],
        },
        MetricSpec::Riemannian {
            dimension: 2,
            model: RiemannianModel::HyperbolicDisk,
        },
        MetricSpec::Randers {
            dimension: 2,
            model: RiemannianModel::Flat,
            b: vec![0.5, 0.0],
            b_gradient: None,
        },
        MetricSpec::FunkBallShifted { a: vec![0.3, 0.0, 0.0] },
        MetricSpec::FunkImplicit {
            dimension: 2,
            phi: NormSpec::Randers { b: vec![0.3, 0.1] },
        },
        MetricSpec::SzaboProduct {
            factor1: FactorSpec {
                dimension: 2,
                model: RiemannianModel::HyperbolicDisk,
            },
            factor2: FactorSpec {
                dimension: 1,
                model: RiemannianModel::Flat,
            },
            profile: ProfileSpec::Szabo { epsilon: 0.5 },
        },
        MetricSpec::SzaboEpsilon { epsilon: 0.5 },
        MetricSpec::IncompleteSlab { dimension: 3 },
    ]
}

/// Deterministic points of the domain shrunk by `margin`.
pub(crate) fn domain_points(domain: &Domain, count: usize, margin: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .filter_map(|_| sampling::domain_point(&mut rng, domain, margin).ok())
        .collect()
}

/// Sampled construction-time gate: `F > 0` and `g` positive definite.
pub(crate) fn validate_sampled(metric: &MetricField, points: usize, directions: usize) -> Result<()> {
    let n = metric.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(0xf1a9);
    let xs = domain_points(metric.domain(), points, 0.0, 0xd0);
    for x in &xs {
        for _ in 0..directions {
            let y = sampling::uniform_sphere(&mut rng, n);
            let f = metric.value(x, &y);
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "F is not positive at x = {x:?}, y = {y:?}"
                )));
            }
            if !is_positive_definite(metric, x, &y) {
                return Err(Error::InvalidParameter(format!(
                    "fundamental tensor is not positive definite at x = {x:?}, y = {y:?}"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_round_trips_and_builds() {
        let specs = catalog();
        let kinds: Vec<&str> = specs.iter().map(|s| s.kind()).collect();
        assert_eq!(kinds, KINDS);
        for spec in specs {
            let text = spec.to_toml().unwrap();
            let back = MetricSpec::from_toml(&text).unwrap();
            assert_eq!(spec, back, "{text}");
            let m = back.build().unwrap();
            assert_eq!(m.dimension(), spec.dimension());
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(MetricSpec::from_toml("kind = \"euclidean\"\ndimension = 2\ncolour = 1").is_err());
        assert!(MetricSpec::from_toml("kind = \"nonsense\"").is_err());
    }

    #[test]
    fn inline_specs() {
        assert_eq!(
            MetricSpec::parse_inline("funk_ball_shifted:a=0.3,0,0").unwrap(),
            MetricSpec::FunkBallShifted { a: vec![0.3, 0.0, 0.0] }
        );
        assert_eq!(
            MetricSpec::parse_inline("riemannian:dimension=2;model=hyperbolic_disk").unwrap(),
            MetricSpec::Riemannian {
                dimension: 2,
                model: RiemannianModel::HyperbolicDisk
            }
        );
        assert_eq!(
            MetricSpec::parse_inline("incomplete_slab").unwrap(),
            MetricSpec::IncompleteSlab { dimension: 3 }
        );
        let s = MetricSpec::parse_inline("szabo_product:factor1={dimension=2,model={type=\"hyperbolic_disk\"}};factor2={dimension=1};profile.type=szabo;profile.epsilon=0.5")
            .unwrap();
        assert_eq!(s, catalog()[6]);
    }
}
