use std::path::Path;

use serde::{Deserialize, Serialize};

use super::sampling::SamplePlan;
use crate::error::{Error, Result};
use crate::zoo::MetricSpec;

/// The quantity a claim evaluates at each sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `K(P, y)` on a random flag.
    FlagCurvature,
    /// `S(x, y)`, optionally normalized.
    SCurvature,
    /// `‖𝐈_y‖_𝐠`.
    MeanCartan,
    /// `‖𝐉_y‖_𝐠`.
    MeanLandsberg,
    /// `max(|I_i yⁱ|, |J_i yⁱ|)` against `max(|I|, |J|)·|y|`.
    CartanOrthogonality,
    /// `‖𝐑_y(𝐈_y)‖_𝐠` against `‖𝐑_y‖·‖𝐈_y‖`.
    RiemannCartan,
    /// `𝐠_y(𝐑_y(𝐈_y), 𝐈_y)` against `‖𝐑_y‖·‖𝐈_y‖²`.
    RiemannCartanForm,
    /// `max(‖D²𝐈 + 𝐑(𝐈)‖, ‖V − 𝐈‖)` along a geodesic, where `V` is the Jacobi
    /// field with the initial data of `𝐈`; scale `max φ`.
    JacobiResidual,
    /// `min φ″` along a geodesic, over nodes with `φ > 0`.
    PhiConvexity,
    /// `(max φ − min φ)/max φ` along a geodesic.
    PhiVariation,
    /// Relative error of `det g = h det ḡ₁ det ḡ₂` for product metrics.
    DetIdentity,
    /// Relative error of the spray splitting for product metrics.
    SpraySplit,
    /// Largest relative error of the block formulas for `g_ij`, `I_i` and
    /// `R_ij` of product metrics.
    ProductBlocks,
    /// `Θ_{xᵏ} − ΘΘ_{yᵏ}` for Funk metrics.
    FunkPde,
    /// `max |∂³Gⁱ/∂y³|`.
    BerwaldQuadratic,
    /// Linearity and closedness of `γ = S − (n+1)cF` at each base point.
    ClosedOneForm,
    /// `‖𝐈‖_x − (n+1)/√2·√(1 − √(1 − ‖β‖²_x))` for Randers metrics.
    CartanBound,
}

impl Quantity {
    pub fn name(&self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default()
    }

    /// Whether the quantity is evaluated along geodesics.
    pub fn uses_geodesics(&self) -> bool {
        matches!(self, Quantity::JacobiResidual | Quantity::PhiConvexity | Quantity::PhiVariation)
    }
}

/// What the observed values are compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Target {
    /// Every sample equals `value`.
    Value { value: f64 },
    /// Every sample vanishes.
    Zero,
    /// Every sample is at most `bound`.
    AtMost { bound: f64 },
    /// Every sample is at least `bound`.
    AtLeast { bound: f64 },
    /// Every sample equals the sample mean.
    Constant,
    /// Some sample reaches `bound` (a witness).
    MaxAtLeast { bound: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ToleranceKind {
    #[serde(alias = "abs")]
    Absolute,
    #[serde(alias = "rel")]
    Relative,
}

/// `value` is an absolute bound, or a fraction of the sample's scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerance {
    pub value: f64,
    pub kind: ToleranceKind,
}

impl Tolerance {
    pub fn absolute(value: f64) -> Self {
        Tolerance {
            value,
            kind: ToleranceKind::Absolute,
        }
    }

    pub fn relative(value: f64) -> Self {
        Tolerance {
            value,
            kind: ToleranceKind::Relative,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Tolerance {
            value: self.value * factor,
            kind: self.kind,
        }
    }
}

/// Divisor applied to the observed value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalize {
    #[default]
    None,
    /// `F(x, y)`.
    F,
    /// `(n + 1) F(x, y)`.
    NPlusOneF,
}

/// Geodesic settings for trace-based quantities: unit-speed geodesics from
/// each sample over `[0, span]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicPlan {
    #[serde(default = "default_span")]
    pub span: f64,
    #[serde(default = "default_geodesic_tol")]
    pub tol: f64,
}

fn default_span() -> f64 {
    1.0
}

fn default_geodesic_tol() -> f64 {
    1e-10
}

impl Default for GeodesicPlan {
    fn default() -> Self {
        GeodesicPlan {
            span: default_span(),
            tol: default_geodesic_tol(),
        }
    }
}

/// One declarative check.
///
/// ```toml
/// [[claim]]
/// id = "funk-flag-curvature"
/// statement = "The Funk metric has constant flag curvature -1/4"
/// metric = { kind = "funk_ball_shifted", a = [0.3, 0.0] }
/// quantity = "flag_curvature"
/// target = { kind = "value", value = -0.25 }
/// tolerance = { value = 1e-6, kind = "relative" }
/// samples = { count = 200, seed = 1 }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Claim {
    pub id: String,
    /// The mathematical statement being checked, in words.
    pub statement: String,
    pub metric: MetricSpec,
    pub quantity: Quantity,
    pub target: Target,
    pub tolerance: Tolerance,
    pub samples: SamplePlan,
    #[serde(default, skip_serializing_if = "is_default")]
    pub normalize: Normalize,
    /// The constant `c` of `S = (n+1)cF + γ` for `closed_one_form`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geodesic: Option<GeodesicPlan>,
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

impl Claim {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("claim `{}`: {m}", self.id)));
        if self.id.trim().is_empty() {
            return Err(Error::Config("claim id must be nonempty".into()));
        }
        if self.statement.trim().is_empty() {
            return bad("statement must be nonempty".into());
        }
        if !(self.tolerance.value > 0.0 && self.tolerance.value.is_finite()) {
            return bad(format!("tolerance must be positive, got {}", self.tolerance.value));
        }
        if self.samples.count == 0 {
            return bad("sample count must be positive".into());
        }
        if !(0.0..0.5).contains(&self.samples.margin) {
            return bad(format!("margin must lie in [0, 0.5), got {}", self.samples.margin));
        }
        if let Some(g) = &self.geodesic {
            if !(g.span > 0.0 && g.span.is_finite() && g.tol > 0.0) {
                return bad("geodesic span and tol must be positive".into());
            }
        }
        if self.quantity == Quantity::ClosedOneForm && self.constant.is_none() {
            return bad("closed_one_form needs `constant`".into());
        }
        Ok(())
    }

    pub fn geodesic_plan(&self) -> GeodesicPlan {
        self.geodesic.unwrap_or_default()
    }
}

/// A claim file: a list of `[[claim]]` tables.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimSuite {
    #[serde(default)]
    pub claim: Vec<Claim>,
}

impl ClaimSuite {
    pub fn from_toml(text: &str) -> Result<Self> {
        let suite: ClaimSuite = toml::from_str(text)?;
        for c in &suite.claim {
            c.validate()?;
        }
        let mut ids: Vec<&str> = suite.claim.iter().map(|c| c.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!("duplicate claim id `{}`", w[0])));
        }
        Ok(suite)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: &str = r#"
[[claim]]
id = "k"
statement = "constant flag curvature"
metric = { kind = "funk_ball_shifted", a = [0.3, 0.0] }
quantity = "flag_curvature"
target = { kind = "value", value = -0.25 }
tolerance = { value = 1e-6, kind = "rel" }
samples = { count = 5, seed = 1 }
"#;

    #[test]
    fn parses_and_round_trips() {
        let s = ClaimSuite::from_toml(ONE).unwrap();
        assert_eq!(s.claim.len(), 1);
        assert_eq!(s.claim[0].tolerance.kind, ToleranceKind::Relative);
        assert_eq!(s.claim[0].samples.margin, super::super::sampling::DEFAULT_MARGIN);
        let back = ClaimSuite::from_toml(&s.to_toml().unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_bad_claims() {
        assert!(ClaimSuite::from_toml(&ONE.replace("1e-6", "0.0")).is_err());
        assert!(ClaimSuite::from_toml(&ONE.replace("quantity", "quantiti")).is_err());
        assert!(ClaimSuite::from_toml(&format!("{ONE}{ONE}")).is_err());
        assert!(ClaimSuite::from_toml(&ONE.replace("\"flag_curvature\"", "\"closed_one_form\"")).is_err());
    }

    #[test]
    fn quantity_names() {
        assert_eq!(Quantity::JacobiResidual.name(), "jacobi_residual");
        assert_eq!(Quantity::SCurvature.name(), "s_curvature");
    }
}
