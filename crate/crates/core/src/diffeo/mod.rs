//! Orientation-preserving analytic diffeomorphisms of the interval `[0, 1]`,
//! the circle and the real line, as immutable expression trees.
//!
//! Circle maps are handled through degree-one lifts `F(x + 1) = F(x) + 1`
//! with the circle parametrised by `[0, 1)` (one unit is one full turn); a
//! rotation by `θ` radians lifts to `x ↦ x + θ/2π`. Residuals on the circle
//! are lifted displacements reduced to the nearest integer.
//!
//! Expressions are evaluated by compiling them into a flat list of primitive
//! steps ([`CompiledMap`]). Inverses of the Möbius family and of rigid shifts
//! are closed-form; inverses of sine shears and perturbed maps are computed
//! by a bracketed Newton/bisection search to `1e-14`.

mod bump;
mod fixed;
mod grid;
mod plan;
mod residual;
mod root;
mod sum;
mod text;
mod word;

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use schemars::{JsonSchema, Schema, SchemaGenerator};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decimal::dec17;

pub use bump::{Bump, BumpPoly, TrigBump};
pub use fixed::{fixed_points, fixed_points_on, FixedPoint, FixedPointKind, FixedPointSet};
pub use grid::{Grid, DEFAULT_GRID};
pub use plan::CompiledMap;
pub use residual::{commutator_residual, commutator_sweep, displacement_sweep, identity_residual, Sweep};
pub use text::ParseExprError;
pub use word::{word_evaluate, Assignment, CompiledAssignment, Letter, Word};

/// Largest `|k|` accepted in a `Power` node.
pub const MAX_POWER: i64 = 4096;
/// Largest nesting depth accepted for an expression tree.
pub const MAX_DEPTH: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
pub enum Manifold {
    #[serde(rename = "I")]
    Interval,
    #[serde(rename = "S1")]
    Circle,
    #[serde(rename = "R")]
    Line,
}

impl Manifold {
    pub fn tag(self) -> &'static str {
        match self {
            Manifold::Interval => "I",
            Manifold::Circle => "S1",
            Manifold::Line => "R",
        }
    }

    /// Signed displacement from `x` to `y`; on the circle the lifted
    /// difference reduced to `[-1/2, 1/2]`.
    #[inline]
    pub fn displacement(self, x: f64, y: f64) -> f64 {
        let d = y - x;
        match self {
            Manifold::Circle => d - d.round(),
            _ => d,
        }
    }
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Manifold {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "I" | "interval" => Ok(Manifold::Interval),
            "S1" | "circle" => Ok(Manifold::Circle),
            "R" | "line" => Ok(Manifold::Line),
            other => Err(format!("unknown manifold {other:?} (expected I, S1 or R)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffeoError {
    #[error("point {x} is outside the domain of {manifold}")]
    Domain { x: f64, manifold: Manifold },
    #[error("inversion did not converge for target {target} after {iterations} iterations")]
    InversionFailed { target: f64, iterations: usize },
    #[error("derivative {derivative} at x = {x} is not positive")]
    NonMonotone { x: f64, derivative: f64 },
    #[error("manifold mismatch: {left} vs {right}")]
    TagMismatch { left: Manifold, right: Manifold },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("expression expands to more than {limit} primitive steps")]
    TooLarge { limit: usize },
    #[error("generator {0:?} has no assigned map")]
    Unassigned(String),
}

/// Expression node. The manifold tag lives once, on the enclosing
/// [`DiffeoExpr`]; every node below it shares that tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Identity,
    /// `x ↦ αx / ((α−1)x + 1)` on `[0, 1]`.
    Mobius {
        #[serde(with = "dec17")]
        #[schemars(with = "String")]
        alpha: f64,
    },
    /// Rotation by `theta` radians.
    Rotation {
        #[serde(with = "dec17")]
        #[schemars(with = "String")]
        theta: f64,
    },
    /// `x ↦ ½ sin(a x) + x` on the line.
    SineShear {
        #[serde(with = "dec17")]
        #[schemars(with = "String")]
        a: f64,
    },
    /// `x ↦ x + offset` on the line.
    Translation {
        #[serde(with = "dec17")]
        #[schemars(with = "String")]
        offset: f64,
    },
    /// `x ↦ x + Σ ω(x)`.
    Perturbed { bumps: Vec<Bump> },
    /// `parts[0] ∘ parts[1] ∘ …` (the last part is applied first).
    Compose { parts: Vec<Node> },
    Inverse { of: Box<Node> },
    Power { of: Box<Node>, exponent: i64 },
}

/// A validated expression with its manifold tag.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffeoExpr {
    manifold: Manifold,
    node: Node,
}

/// Wire form of a [`DiffeoExpr`]: the tag at the root, then the tree.
#[derive(Clone, Debug, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ExprDocument {
    pub manifold: Manifold,
    pub expr: Node,
}

impl DiffeoExpr {
    /// Validates `node` against `manifold`.
    pub fn new(manifold: Manifold, node: Node) -> Result<Self, DiffeoError> {
        validate(manifold, &node, 0)?;
        Ok(DiffeoExpr { manifold, node })
    }

    pub fn identity(manifold: Manifold) -> Self {
        DiffeoExpr { manifold, node: Node::Identity }
    }

    pub fn mobius(alpha: f64) -> Result<Self, DiffeoError> {
        Self::new(Manifold::Interval, Node::Mobius { alpha })
    }

    pub fn rotation(theta: f64) -> Result<Self, DiffeoError> {
        Self::new(Manifold::Circle, Node::Rotation { theta })
    }

    pub fn sine_shear(a: f64) -> Result<Self, DiffeoError> {
        Self::new(Manifold::Line, Node::SineShear { a })
    }

    pub fn translation(offset: f64) -> Result<Self, DiffeoError> {
        Self::new(Manifold::Line, Node::Translation { offset })
    }

    pub fn perturbed(manifold: Manifold, bumps: Vec<Bump>) -> Result<Self, DiffeoError> {
        Self::new(manifold, Node::Perturbed { bumps })
    }

    /// `parts[0] ∘ parts[1] ∘ …`.
    pub fn compose(parts: &[DiffeoExpr]) -> Result<Self, DiffeoError> {
        let first = parts
            .first()
            .ok_or_else(|| DiffeoError::InvalidParameter("empty composition".into()))?;
        for p in &parts[1..] {
            ensure_same(first.manifold, p.manifold)?;
        }
        let node = Node::Compose { parts: parts.iter().map(|p| p.node.clone()).collect() };
        Self::new(first.manifold, node)
    }

    pub fn then_apply(&self, outer: &DiffeoExpr) -> Result<Self, DiffeoError> {
        Self::compose(&[outer.clone(), self.clone()])
    }

    pub fn inverse(&self) -> Self {
        let node = match &self.node {
            Node::Inverse { of } => (**of).clone(),
            other => Node::Inverse { of: Box::new(other.clone()) },
        };
        DiffeoExpr { manifold: self.manifold, node }
    }

    pub fn pow(&self, exponent: i64) -> Result<Self, DiffeoError> {
        match exponent {
            0 => Ok(Self::identity(self.manifold)),
            1 => Ok(self.clone()),
            _ => Self::new(
                self.manifold,
                Node::Power { of: Box::new(self.node.clone()), exponent },
            ),
        }
    }

    /// `byⁱ ∘ self ∘ by⁻ⁱ`.
    pub fn conjugate(&self, by: &DiffeoExpr, i: i64) -> Result<Self, DiffeoError> {
        ensure_same(self.manifold, by.manifold)?;
        if i == 0 {
            return Ok(self.clone());
        }
        let p = by.pow(i)?;
        Self::compose(&[p.clone(), self.clone(), p.inverse()])
    }

    /// `[a, b] = a ∘ b ∘ a⁻¹ ∘ b⁻¹`.
    pub fn commutator(a: &DiffeoExpr, b: &DiffeoExpr) -> Result<Self, DiffeoError> {
        Self::compose(&[a.clone(), b.clone(), a.inverse(), b.inverse()])
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn compile(&self) -> Result<CompiledMap<'_>, DiffeoError> {
        CompiledMap::new(self)
    }

    /// Value at `x`. On the circle the result is reduced to `[0, 1)`.
    pub fn evaluate(&self, x: f64) -> Result<f64, DiffeoError> {
        check_domain(self.manifold, x)?;
        let y = self.compile()?.eval_lift(x)?;
        Ok(match self.manifold {
            Manifold::Circle => y.rem_euclid(1.0),
            _ => y,
        })
    }

    /// Derivative at `x` by the chain rule; non-positive values are reported
    /// as an invariant breach.
    pub fn derivative(&self, x: f64) -> Result<f64, DiffeoError> {
        check_domain(self.manifold, x)?;
        let (_, d) = self.compile()?.eval_with_derivative(x)?;
        if d > 0.0 {
            Ok(d)
        } else {
            Err(DiffeoError::NonMonotone { x, derivative: d })
        }
    }

    pub fn to_document(&self) -> ExprDocument {
        ExprDocument { manifold: self.manifold, expr: self.node.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("expression serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, String> {
        serde_json::from_str(s).map_err(|e| e.to_string())
    }

    /// Parses the compact text syntax, e.g. `compose(mobius(2), inv(mobius(3)))`.
    pub fn parse(s: &str) -> Result<Self, ParseExprError> {
        text::parse(s)
    }
}

impl TryFrom<ExprDocument> for DiffeoExpr {
    type Error = DiffeoError;

    fn try_from(doc: ExprDocument) -> Result<Self, Self::Error> {
        DiffeoExpr::new(doc.manifold, doc.expr)
    }
}

impl Serialize for DiffeoExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc<'a> {
            manifold: Manifold,
            expr: &'a Node,
        }
        Doc { manifold: self.manifold, expr: &self.node }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiffeoExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = ExprDocument::deserialize(d)?;
        DiffeoExpr::try_from(doc).map_err(serde::de::Error::custom)
    }
}

impl JsonSchema for DiffeoExpr {
    fn schema_name() -> Cow<'static, str> {
        "DiffeoExpr".into()
    }

    fn json_schema(generator: &mut SchemaGenerator) -> Schema {
        ExprDocument::json_schema(generator)
    }
}

impl fmt::Display for DiffeoExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::write_node(f, self.manifold, &self.node)
    }
}

pub(crate) fn ensure_same(left: Manifold, right: Manifold) -> Result<(), DiffeoError> {
    if left == right {
        Ok(())
    } else {
        Err(DiffeoError::TagMismatch { left, right })
    }
}

pub(crate) fn check_domain(manifold: Manifold, x: f64) -> Result<(), DiffeoError> {
    let ok = match manifold {
        Manifold::Interval => (0.0..=1.0).contains(&x),
        _ => x.is_finite(),
    };
    if ok {
        Ok(())
    } else {
        Err(DiffeoError::Domain { x, manifold })
    }
}

fn invalid(msg: impl Into<String>) -> DiffeoError {
    DiffeoError::InvalidParameter(msg.into())
}

fn expect_tag(node: &str, want: Manifold, got: Manifold) -> Result<(), DiffeoError> {
    if want == got {
        Ok(())
    } else {
        Err(invalid(format!("{node} is only defined on {want}, not {got}")))
    }
}

fn validate(manifold: Manifold, node: &Node, depth: usize) -> Result<(), DiffeoError> {
    if depth > MAX_DEPTH {
        return Err(invalid(format!("expression nested deeper than {MAX_DEPTH}")));
    }
    match node {
        Node::Identity => Ok(()),
        Node::Mobius { alpha } => {
            expect_tag("mobius", Manifold::Interval, manifold)?;
            if alpha.is_finite() && *alpha > 0.0 {
                Ok(())
            } else {
                Err(invalid(format!("Möbius parameter must be positive, got {alpha}")))
            }
        }
        Node::Rotation { theta } => {
            expect_tag("rotation", Manifold::Circle, manifold)?;
            if theta.is_finite() {
                Ok(())
            } else {
                Err(invalid("rotation angle must be finite"))
            }
        }
        Node::SineShear { a } => {
            expect_tag("sine shear", Manifold::Line, manifold)?;
            // f' = 1 + (a/2) cos(ax) stays non-negative only for |a| <= 2.
            if a.is_finite() && *a != 0.0 && a.abs() <= 2.0 {
                Ok(())
            } else {
                Err(invalid(format!("sine shear needs 0 < |a| <= 2, got {a}")))
            }
        }
        Node::Translation { offset } => {
            expect_tag("translation", Manifold::Line, manifold)?;
            if offset.is_finite() {
                Ok(())
            } else {
                Err(invalid("translation offset must be finite"))
            }
        }
        Node::Perturbed { bumps } => validate_bumps(manifold, bumps),
        Node::Compose { parts } => {
            if parts.is_empty() {
                return Err(invalid("empty composition"));
            }
            parts.iter().try_for_each(|p| validate(manifold, p, depth + 1))
        }
        Node::Inverse { of } => validate(manifold, of, depth + 1),
        Node::Power { of, exponent } => {
            if exponent.unsigned_abs() > MAX_POWER as u64 {
                return Err(invalid(format!("power {exponent} exceeds |k| <= {MAX_POWER}")));
            }
            validate(manifold, of, depth + 1)
        }
    }
}

fn validate_bumps(manifold: Manifold, bumps: &[Bump]) -> Result<(), DiffeoError> {
    let mut slope = 0.0;
    for b in bumps {
        b.validate()?;
        match (manifold, b) {
            (Manifold::Interval, Bump::Poly(_)) | (Manifold::Circle, Bump::Trig(_)) => {}
            _ => {
                return Err(invalid(format!(
                    "bump shape does not match manifold {manifold}"
                )))
            }
        }
        slope += b.derivative_bound();
    }
    if manifold == Manifold::Line {
        return Err(invalid("perturbed maps are defined on I and S1 only"));
    }
    if slope >= 1.0 {
        return Err(invalid(format!(
            "bump derivatives sum to {slope}; the map would not be increasing"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
