use std::f64::consts::TAU;

use super::root::solve_increasing;
use super::sum::exact_sum;
use super::{Bump, DiffeoError, DiffeoExpr, Manifold, Node};

/// Upper bound on the number of primitive steps a compiled map may hold.
pub const MAX_STEPS: usize = 1 << 20;

#[derive(Clone, Copy, Debug)]
enum Step<'a> {
    /// Translation offset on the line, rotation angle (radians) on the circle.
    Shift(f64),
    Mobius { alpha: f64, inverse: bool },
    Shear { a: f64, inverse: bool },
    Perturbed { bumps: &'a [Bump], inverse: bool },
}

/// A [`DiffeoExpr`] flattened into primitive steps, listed in the order
/// they are applied. Consecutive rigid shifts are merged with exactly
/// rounded summation, so shifts that cancel symbolically cancel exactly.
#[derive(Clone, Debug)]
pub struct CompiledMap<'a> {
    manifold: Manifold,
    steps: Vec<Step<'a>>,
}

impl<'a> CompiledMap<'a> {
    pub fn new(e: &'a DiffeoExpr) -> Result<Self, DiffeoError> {
        Self::from_node(e.manifold(), e.node(), false)
    }

    /// Compiles the inverse map of `e`.
    pub fn inverse_of(e: &'a DiffeoExpr) -> Result<Self, DiffeoError> {
        Self::from_node(e.manifold(), e.node(), true)
    }

    pub(crate) fn from_node(
        manifold: Manifold,
        node: &'a Node,
        inverse: bool,
    ) -> Result<Self, DiffeoError> {
        let mut raw = Vec::new();
        push_steps(node, inverse, &mut raw)?;
        Ok(CompiledMap { manifold, steps: fold_shifts(raw) })
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    /// Number of primitive steps.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Value of the map (the lift, on the circle) with no domain check.
    #[inline]
    pub fn eval_lift(&self, x: f64) -> Result<f64, DiffeoError> {
        let mut y = x;
        for step in &self.steps {
            y = self.apply(step, y)?;
        }
        Ok(y)
    }

    /// Value and derivative by the chain rule.
    pub fn eval_with_derivative(&self, x: f64) -> Result<(f64, f64), DiffeoError> {
        let mut y = x;
        let mut d = 1.0;
        for step in &self.steps {
            let (v, dv) = self.apply_with_derivative(step, y)?;
            y = v;
            d *= dv;
        }
        Ok((y, d))
    }

    #[inline]
    fn clamp(&self, y: f64) -> f64 {
        match self.manifold {
            Manifold::Interval => y.clamp(0.0, 1.0),
            _ => y,
        }
    }

    fn shift_amount(&self, s: f64) -> f64 {
        match self.manifold {
            Manifold::Circle => s / TAU,
            _ => s,
        }
    }

    #[inline]
    fn apply(&self, step: &Step<'a>, x: f64) -> Result<f64, DiffeoError> {
        let y = match *step {
            Step::Shift(s) => x + self.shift_amount(s),
            Step::Mobius { alpha, inverse: false } => alpha * x / ((alpha - 1.0) * x + 1.0),
            Step::Mobius { alpha, inverse: true } => x / (alpha - (alpha - 1.0) * x),
            Step::Shear { a, inverse: false } => x + 0.5 * (a * x).sin(),
            Step::Perturbed { bumps, inverse: false } => x + bumps.iter().map(|b| b.eval(x).0).sum::<f64>(),
            Step::Shear { inverse: true, .. } | Step::Perturbed { inverse: true, .. } => {
                self.invert(step, x)?
            }
        };
        Ok(self.clamp(y))
    }

    fn apply_with_derivative(&self, step: &Step<'a>, x: f64) -> Result<(f64, f64), DiffeoError> {
        Ok(match *step {
            Step::Shift(s) => (x + self.shift_amount(s), 1.0),
            Step::Mobius { alpha, inverse } => {
                let den = if inverse { alpha - (alpha - 1.0) * x } else { (alpha - 1.0) * x + 1.0 };
                let y = if inverse { x / den } else { alpha * x / den };
                (self.clamp(y), alpha / (den * den))
            }
            Step::Shear { a, inverse: false } => (x + 0.5 * (a * x).sin(), forward(step, x).1),
            Step::Perturbed { inverse: false, .. } => {
                let (v, d) = forward(step, x);
                (self.clamp(v), d)
            }
            Step::Shear { inverse: true, .. } | Step::Perturbed { inverse: true, .. } => {
                let pre = self.clamp(self.invert(step, x)?);
                let d = forward(step, pre).1;
                (pre, 1.0 / d)
            }
        })
    }

    fn invert(&self, step: &Step<'a>, y: f64) -> Result<f64, DiffeoError> {
        match self.manifold {
            Manifold::Interval => {
                let y = y.clamp(0.0, 1.0);
                solve_increasing(|t| forward(step, t), y, 0.0, 1.0, false)
            }
            // Both shears and circle perturbations move points by less than 1.
            _ => solve_increasing(|t| forward(step, t), y, y - 1.0, y + 1.0, true),
        }
    }
}

/// Forward value and derivative of a step that has no closed-form inverse.
#[inline]
fn forward(step: &Step<'_>, x: f64) -> (f64, f64) {
    match *step {
        Step::Shear { a, .. } => {
            let ax = a * x;
            (x + 0.5 * ax.sin(), 1.0 + 0.5 * a * ax.cos())
        }
        Step::Perturbed { bumps, .. } => {
            let (v, d) = bumps.iter().fold((0.0, 0.0), |(v, d), b| {
                let (bv, bd) = b.eval(x);
                (v + bv, d + bd)
            });
            (x + v, 1.0 + d)
        }
        _ => unreachable!("closed-form steps are evaluated directly"),
    }
}

fn push_steps<'a>(node: &'a Node, inverse: bool, out: &mut Vec<Step<'a>>) -> Result<(), DiffeoError> {
    if out.len() > MAX_STEPS {
        return Err(DiffeoError::TooLarge { limit: MAX_STEPS });
    }
    match node {
        Node::Identity => {}
        Node::Mobius { alpha } => out.push(Step::Mobius { alpha: *alpha, inverse }),
        Node::Rotation { theta } => out.push(Step::Shift(if inverse { -theta } else { *theta })),
        Node::Translation { offset } => out.push(Step::Shift(if inverse { -offset } else { *offset })),
        Node::SineShear { a } => out.push(Step::Shear { a: *a, inverse }),
        Node::Perturbed { bumps } => {
            if !bumps.is_empty() {
                out.push(Step::Perturbed { bumps, inverse })
            }
        }
        Node::Compose { parts } => {
            if inverse {
                for p in parts {
                    push_steps(p, true, out)?;
                }
            } else {
                for p in parts.iter().rev() {
                    push_steps(p, false, out)?;
                }
            }
        }
        Node::Inverse { of } => push_steps(of, !inverse, out)?,
        Node::Power { of, exponent } => {
            let inv = inverse ^ (*exponent < 0);
            for _ in 0..exponent.unsigned_abs() {
                push_steps(of, inv, out)?;
                if out.len() > MAX_STEPS {
                    return Err(DiffeoError::TooLarge { limit: MAX_STEPS });
                }
            }
        }
    }
    Ok(())
}

fn fold_shifts(raw: Vec<Step<'_>>) -> Vec<Step<'_>> {
    let mut out = Vec::with_capacity(raw.len());
    let mut pending: Vec<f64> = Vec::new();
    let flush = |pending: &mut Vec<f64>, out: &mut Vec<Step<'_>>| {
        if !pending.is_empty() {
            let s = exact_sum(pending.drain(..));
            if s != 0.0 {
                out.push(Step::Shift(s));
            }
        }
    };
    for step in raw {
        match step {
            Step::Shift(s) => pending.push(s),
            other => {
                flush(&mut pending, &mut out);
                out.push(other);
            }
        }
    }
    flush(&mut pending, &mut out);
    out
}
