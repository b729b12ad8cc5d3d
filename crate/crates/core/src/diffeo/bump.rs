use std::f64::consts::TAU;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::DiffeoError;
use crate::decimal::{dec17, dec17_vec};

/// Grid used when a bump's sup norms are measured for validation.
pub(crate) const BUMP_NORM_GRID: usize = 8192;
/// Relative slack applied on top of grid-measured sup norms.
pub(crate) const BUMP_NORM_SLACK: f64 = 1.01;

/// One summand of a perturbed map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Bump {
    Poly(BumpPoly),
    Trig(TrigBump),
}

/// `x ↦ c · xᵏ(1−x)ᵏ · T(x)` on the interval; `T` is stored by its
/// coefficients in ascending powers of `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct BumpPoly {
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub coeff: f64,
    pub stage: u32,
    pub k: u32,
    #[serde(with = "dec17_vec")]
    #[schemars(with = "Vec<String>")]
    pub tail: Vec<f64>,
}

/// `x ↦ c · sin(2π·freq·x + phase)` on a degree-one circle lift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct TrigBump {
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub coeff: f64,
    pub stage: u32,
    pub freq: u32,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub phase: f64,
}

impl BumpPoly {
    pub const MAX_K: u32 = 8;
    pub const MAX_TAIL: usize = 8;

    /// The unscaled shape `xᵏ(1−x)ᵏ T(x)` and its derivative.
    pub fn shape(&self, x: f64) -> (f64, f64) {
        let u = x * (1.0 - x);
        let k = self.k as i32;
        let (t, dt) = horner(&self.tail, x);
        let uk = u.powi(k);
        let duk = if k == 0 {
            0.0
        } else {
            k as f64 * u.powi(k - 1) * (1.0 - 2.0 * x)
        };
        (uk * t, duk * t + uk * dt)
    }

    fn validate(&self) -> Result<(), DiffeoError> {
        if !self.coeff.is_finite() || self.tail.iter().any(|t| !t.is_finite()) {
            return Err(DiffeoError::InvalidParameter("non-finite bump coefficient".into()));
        }
        if self.k == 0 || self.k > Self::MAX_K {
            return Err(DiffeoError::InvalidParameter(format!(
                "bump exponent k = {} outside 1..={}",
                self.k,
                Self::MAX_K
            )));
        }
        if self.tail.is_empty() || self.tail.len() > Self::MAX_TAIL {
            return Err(DiffeoError::InvalidParameter(format!(
                "bump tail polynomial needs 1..={} coefficients",
                Self::MAX_TAIL
            )));
        }
        Ok(())
    }
}

impl TrigBump {
    pub const MAX_FREQ: u32 = 64;

    pub fn shape(&self, x: f64) -> (f64, f64) {
        let w = TAU * self.freq as f64;
        let arg = w * x + self.phase;
        (arg.sin(), w * arg.cos())
    }

    fn validate(&self) -> Result<(), DiffeoError> {
        if !self.coeff.is_finite() || !self.phase.is_finite() {
            return Err(DiffeoError::InvalidParameter("non-finite bump coefficient".into()));
        }
        if self.freq == 0 || self.freq > Self::MAX_FREQ {
            return Err(DiffeoError::InvalidParameter(format!(
                "trigonometric bump frequency {} outside 1..={}",
                self.freq,
                Self::MAX_FREQ
            )));
        }
        Ok(())
    }
}

impl Bump {
    pub fn stage(&self) -> u32 {
        match self {
            Bump::Poly(b) => b.stage,
            Bump::Trig(b) => b.stage,
        }
    }

    pub fn coeff(&self) -> f64 {
        match self {
            Bump::Poly(b) => b.coeff,
            Bump::Trig(b) => b.coeff,
        }
    }

    /// Value and derivative of the scaled bump.
    #[inline]
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let (s, ds) = match self {
            Bump::Poly(b) => b.shape(x),
            Bump::Trig(b) => b.shape(x),
        };
        let c = self.coeff();
        (c * s, c * ds)
    }

    /// Sup of `|ω|` and `|ω'|` over the `n + 1` point grid on `[0, 1]`.
    pub fn grid_sup_norms(&self, n: usize) -> (f64, f64) {
        let n = n.max(1);
        (0..=n).fold((0.0f64, 0.0f64), |(a, b), i| {
            let (v, d) = self.eval(i as f64 / n as f64);
            (a.max(v.abs()), b.max(d.abs()))
        })
    }

    /// Upper bound on `sup |ω'|` used for the monotonicity check: exact for
    /// trigonometric bumps, a slackened fine-grid sup for polynomial ones.
    pub fn derivative_bound(&self) -> f64 {
        match self {
            Bump::Trig(b) => b.coeff.abs() * TAU * b.freq as f64,
            Bump::Poly(_) => self.grid_sup_norms(BUMP_NORM_GRID).1 * BUMP_NORM_SLACK,
        }
    }

    pub(crate) fn validate(&self) -> Result<(), DiffeoError> {
        match self {
            Bump::Poly(b) => b.validate(),
            Bump::Trig(b) => b.validate(),
        }
    }
}

fn horner(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for &c in coeffs.iter().rev() {
        d = d * x + v;
        v = v * x + c;
    }
    (v, d)
}
