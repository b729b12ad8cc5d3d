//! The stage-by-stage construction of `f = id + Σ ωₘ`.

use std::f64::consts::TAU;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::words::generator_names;
use super::SynthError;
use crate::decimal::dec17;
use crate::diffeo::{Bump, BumpPoly, CompiledAssignment, CompiledMap, DiffeoExpr, Grid, Manifold, TrigBump, Word};

/// Margins at or below this are indistinguishable from rounding.
pub const DEFAULT_MARGIN_FLOOR: f64 = 1e-10;
/// Default basepoint, `1/√2` rounded.
#[allow(clippy::approx_constant)]
pub const DEFAULT_BASEPOINT: f64 = 0.70710678;
/// Safety factor in the denominator of `εₘ`.
pub const EPSILON_SAFETY: f64 = 4.0;
/// Bump shapes tried at a stage before it is declared failed.
pub const SHAPE_ATTEMPTS: u32 = 4;

const NORM_GRID: usize = 8192;
const NORM_SLACK: f64 = 1.01;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct PerturbOptions {
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub basepoint: f64,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub margin_floor: f64,
    /// Grid used to measure the generators' derivative bounds.
    pub grid: usize,
}

impl Default for PerturbOptions {
    fn default() -> Self {
        PerturbOptions { basepoint: DEFAULT_BASEPOINT, margin_floor: DEFAULT_MARGIN_FLOOR, grid: crate::diffeo::DEFAULT_GRID }
    }
}

/// A nonzero stage perturbation with its measured norms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct StageBump {
    pub bump: Bump,
    /// Upper bound on `sup |ωₘ|` (fine-grid sup with slack).
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub sup: f64,
    /// Upper bound on `sup |ωₘ'|`.
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub derivative_sup: f64,
    /// Index of the shape that succeeded, 0 for the first.
    pub attempt: u32,
}

/// Audit record of stage `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct StageRecord {
    pub word: String,
    pub length: usize,
    /// Largest `|c|` allowed for the stage's bump.
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub budget: f64,
    /// `Dₘ = |Wₘ(fₘ, g…)(p) − p|`.
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub margin: f64,
    /// Letter derivative bound `Λ` used for `εₘ`.
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub lipschitz: f64,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bump: Option<StageBump>,
}

/// The full trail of a construction of `f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SynthesisState {
    pub manifold: Manifold,
    pub num_g: usize,
    pub word_len: usize,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub basepoint: f64,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub margin_floor: f64,
    pub words_enumerated: usize,
    pub trivial_words: usize,
    pub pure_g_words: usize,
    pub stages: Vec<StageRecord>,
    #[serde(default)]
    pub rejected_basepoints: Vec<RejectedBasepoint>,
}

/// A basepoint abandoned after a stage failure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RejectedBasepoint {
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub basepoint: f64,
    pub reason: String,
}

impl SynthesisState {
    pub fn bumps(&self) -> Vec<Bump> {
        self.stages.iter().filter_map(|s| s.bump.as_ref().map(|b| b.bump.clone())).collect()
    }

    /// `fₘ`, the sum of the identity and the first `m` stage bumps.
    pub fn partial(&self, m: usize) -> Result<DiffeoExpr, SynthError> {
        let bumps = self.stages[..m.min(self.stages.len())]
            .iter()
            .filter_map(|s| s.bump.as_ref().map(|b| b.bump.clone()))
            .collect();
        f_from_bumps(self.manifold, bumps)
    }

    pub fn f(&self) -> Result<DiffeoExpr, SynthError> {
        self.partial(self.stages.len())
    }

    /// Re-checks the stored schedule: `1 ≥ ε₁ ≥ ε₂ ≥ …`, `Dₘ > 0`,
    /// `sup|ωₘ| < εₘ₋₁/2^{m+1}` and `sup|ωₘ'| < 2^{-(m+1)}`, the recorded
    /// norms against a fresh measurement, and the `εₘ` formula.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut prev = 1.0f64;
        for (i, s) in self.stages.iter().enumerate() {
            let m = i + 1;
            let scale = 0.5f64.powi(m as i32 + 1);
            if !(s.margin > 0.0) {
                return Err(format!("stage {m}: margin {} not positive", s.margin));
            }
            if !(s.epsilon <= prev) {
                return Err(format!("stage {m}: epsilon {} exceeds previous {prev}", s.epsilon));
            }
            let want = prev.min(s.margin / (2.0 * s.length as f64 * s.lipschitz.powi(s.length as i32) * EPSILON_SAFETY));
            if s.epsilon != want {
                return Err(format!("stage {m}: epsilon {} differs from the formula value {want}", s.epsilon));
            }
            if let Some(b) = &s.bump {
                if b.bump.stage() as usize != m {
                    return Err(format!("stage {m}: bump labelled stage {}", b.bump.stage()));
                }
                let (sup, dsup) = measured_norms(&b.bump);
                if sup > b.sup || dsup > b.derivative_sup {
                    return Err(format!("stage {m}: recorded norms below measured ones"));
                }
                if !(b.sup < prev * scale) {
                    return Err(format!("stage {m}: sup |ω| = {} not below {}", b.sup, prev * scale));
                }
                if !(b.derivative_sup < scale) {
                    return Err(format!("stage {m}: sup |ω'| = {} not below {scale}", b.derivative_sup));
                }
            }
            prev = s.epsilon;
        }
        Ok(())
    }
}

fn measured_norms(b: &Bump) -> (f64, f64) {
    match b {
        Bump::Trig(t) => (t.coeff.abs(), b.derivative_bound()),
        Bump::Poly(_) => (b.grid_sup_norms(NORM_GRID).0 * NORM_SLACK, b.derivative_bound()),
    }
}

pub(crate) fn f_from_bumps(manifold: Manifold, bumps: Vec<Bump>) -> Result<DiffeoExpr, SynthError> {
    if bumps.is_empty() {
        Ok(DiffeoExpr::identity(manifold))
    } else {
        Ok(DiffeoExpr::perturbed(manifold, bumps)?)
    }
}

/// Unit-sup bump shape for stage `m`, attempt `a`, and an upper bound on
/// the sup of its derivative.
fn shape(manifold: Manifold, m: usize, attempt: u32) -> (Bump, f64) {
    let frac = |x: f64| x - x.floor();
    match manifold {
        Manifold::Circle => {
            let freq = 1 + attempt;
            let phase = TAU * frac(m as f64 * GOLDEN + attempt as f64 * GOLDEN * GOLDEN);
            let b = Bump::Trig(TrigBump { coeff: 1.0, stage: m as u32, freq, phase });
            (b, TAU * freq as f64)
        }
        _ => {
            let (k, seed) = match attempt {
                0 => (1, m),
                1 => (2, m),
                2 => (3, m),
                _ => (1, m + 7919 * attempt as usize),
            };
            let t1 = 2.0 * frac(seed as f64 * GOLDEN) - 1.0;
            let t2 = 2.0 * frac(seed as f64 * GOLDEN * GOLDEN) - 1.0;
            let raw = Bump::Poly(BumpPoly { coeff: 1.0, stage: m as u32, k, tail: vec![1.0, t1, t2] });
            let (s, ds) = raw.grid_sup_norms(NORM_GRID);
            let tail = vec![1.0 / s, t1 / s, t2 / s];
            (Bump::Poly(BumpPoly { coeff: 1.0, stage: m as u32, k, tail }), ds / s * NORM_SLACK)
        }
    }
}

fn with_coeff(b: &Bump, c: f64) -> Bump {
    let mut b = b.clone();
    match &mut b {
        Bump::Poly(p) => p.coeff = c,
        Bump::Trig(t) => t.coeff = c,
    }
    b
}

/// Largest derivative of the generators and their inverses over `grid`.
fn generator_lipschitz(gens: &[DiffeoExpr], grid: &Grid) -> Result<f64, SynthError> {
    let mut best = 1.0f64;
    for g in gens {
        for map in [CompiledMap::new(g)?, CompiledMap::inverse_of(g)?] {
            for x in grid.points() {
                best = best.max(map.eval_with_derivative(x)?.1);
            }
        }
    }
    Ok(best)
}

struct Evaluator<'a> {
    manifold: Manifold,
    names: &'a [String],
    g_fwd: Vec<CompiledMap<'a>>,
    g_bwd: Vec<CompiledMap<'a>>,
    p: f64,
}

impl Evaluator<'_> {
    fn margin(&self, f: &DiffeoExpr, w: &Word) -> Result<f64, SynthError> {
        let fwd = std::iter::once(CompiledMap::new(f)?).chain(self.g_fwd.iter().cloned()).collect();
        let bwd = std::iter::once(CompiledMap::inverse_of(f)?).chain(self.g_bwd.iter().cloned()).collect();
        let a = CompiledAssignment::from_maps(self.manifold, self.names, fwd, bwd);
        Ok(self.manifold.displacement(self.p, a.eval_word(w, self.p)?).abs())
    }
}

/// Builds `f = id + Σ ωₘ` so that every target word moves the basepoint:
/// stage `m` keeps `ωₘ = 0` when `Wₘ(fₘ₋₁, g…)` already moves `p` by more
/// than the stage budget, and otherwise picks the bump (sign and size from
/// a fixed candidate list) that maximizes the margin `Dₘ`.
///
/// `gens` are `g₁, …, g_N`; each word is over `f` (index 0) and them.
pub fn perturb_f(
    targets: &[Word],
    gens: &[DiffeoExpr],
    manifold: Manifold,
    opts: &PerturbOptions,
) -> Result<(DiffeoExpr, Vec<StageRecord>), SynthError> {
    let p = opts.basepoint;
    if !(p > 0.0 && p < 1.0) {
        return Err(SynthError::InvalidOption(format!("basepoint {p} not in (0, 1)")));
    }
    if manifold == Manifold::Line {
        return Err(SynthError::InvalidOption("synthesis runs on I or S1 only".into()));
    }
    for g in gens {
        crate::diffeo::ensure_same(manifold, g.manifold())?;
    }
    let names = generator_names(gens.len());
    let ev = Evaluator {
        manifold,
        names: &names,
        g_fwd: gens.iter().map(CompiledMap::new).collect::<Result<_, _>>()?,
        g_bwd: gens.iter().map(CompiledMap::inverse_of).collect::<Result<_, _>>()?,
        p,
    };
    let g_lip = generator_lipschitz(gens, &Grid::default_for(manifold, opts.grid))?;
    let floor = opts.margin_floor;

    let mut bumps: Vec<Bump> = Vec::new();
    let mut f = DiffeoExpr::identity(manifold);
    let mut slope_sum = 0.0f64;
    let mut eps = 1.0f64;
    let mut stages = Vec::with_capacity(targets.len());
    for (i, w) in targets.iter().enumerate() {
        let m = i + 1;
        if w.is_empty() {
            return Err(SynthError::InvalidOption("empty target word".into()));
        }
        let word = w.display(&names).to_string();
        let scale = 0.5f64.powi(m as i32 + 1);
        let eta = scale;
        let lam = g_lip.max(1.0 + slope_sum + eta).max(1.0 / (1.0 - slope_sum - eta));
        let budget_for = |dprime: f64| (eps / NORM_SLACK).min(1.0 / dprime) * scale;

        let (default_shape, default_dprime) = shape(manifold, m, 0);
        let mut budget = budget_for(default_dprime);
        let d0 = ev.margin(&f, w)?;
        let mut chosen = None;
        let mut margin = d0;
        if !(d0 > budget.max(floor)) {
            let mut best = (f64::NEG_INFINITY, None);
            for attempt in 0..SHAPE_ATTEMPTS {
                let (unit, dprime) = if attempt == 0 { (default_shape.clone(), default_dprime) } else { shape(manifold, m, attempt) };
                let b = budget_for(dprime);
                best = (f64::NEG_INFINITY, None);
                for c in [b / 2.0, -b / 2.0, b / 4.0, -b / 4.0, b / 8.0, -b / 8.0] {
                    let cand = with_coeff(&unit, c);
                    let mut trial = bumps.clone();
                    trial.push(cand.clone());
                    let d = ev.margin(&f_from_bumps(manifold, trial)?, w)?;
                    if d > best.0 {
                        best = (d, Some((cand, attempt)));
                    }
                }
                budget = b;
                if best.0 > floor {
                    break;
                }
            }
            match best {
                (d, Some((bump, attempt))) if d > floor => {
                    let (sup, derivative_sup) = measured_norms(&bump);
                    slope_sum += derivative_sup;
                    bumps.push(bump.clone());
                    f = f_from_bumps(manifold, bumps.clone())?;
                    margin = d;
                    chosen = Some(StageBump { bump, sup, derivative_sup, attempt });
                }
                (d, _) if budget < floor => {
                    return Err(SynthError::EpsilonUnderflow { stage: m, word, budget, margin: d.max(d0) });
                }
                (d, _) => {
                    return Err(SynthError::StageFailure {
                        stage: m,
                        word,
                        reason: format!(
                            "margin {:e} after {SHAPE_ATTEMPTS} bump shapes (unperturbed {d0:e}); \
                             the basepoint may be periodic for this word",
                            d.max(d0)
                        ),
                    });
                }
            }
        }
        let len = w.len();
        eps = eps.min(margin / (2.0 * len as f64 * lam.powi(len as i32) * EPSILON_SAFETY));
        stages.push(StageRecord { word, length: len, budget, margin, lipschitz: lam, epsilon: eps, bump: chosen });
    }
    Ok((f, stages))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::words::{enumerate_words, TargetPlan};

    fn mobius(alphas: &[f64]) -> Vec<DiffeoExpr> {
        alphas.iter().map(|&a| DiffeoExpr::mobius(a).unwrap()).collect()
    }

    #[test]
    fn empty_list_gives_identity() {
        let (f, st) = perturb_f(&[], &mobius(&[2.0]), Manifold::Interval, &PerturbOptions::default()).unwrap();
        assert_eq!(f, DiffeoExpr::identity(Manifold::Interval));
        assert!(st.is_empty());
    }

    #[test]
    fn single_f_needs_a_bump() {
        let w = Word::parse("f", &generator_names(1)).unwrap();
        let (f, st) = perturb_f(&[w], &mobius(&[2.0]), Manifold::Interval, &PerturbOptions::default()).unwrap();
        let b = st[0].bump.as_ref().unwrap();
        assert!(st[0].margin > 0.0);
        assert!((f.evaluate(DEFAULT_BASEPOINT).unwrap() - DEFAULT_BASEPOINT).abs() == st[0].margin);
        assert_eq!(b.bump.coeff().abs(), st[0].budget / 2.0);
    }

    #[test]
    fn schedule_holds_on_small_run() {
        for manifold in [Manifold::Interval, Manifold::Circle] {
            let gens = match manifold {
                Manifold::Interval => mobius(&[1.9893166972187442, 2.321860395447852]),
                _ => vec![DiffeoExpr::rotation(1.9893166972187442).unwrap(), DiffeoExpr::rotation(2.321860395447852).unwrap()],
            };
            let plan = TargetPlan::new(2, enumerate_words(2, 3).unwrap()).unwrap();
            let targets: Vec<Word> = plan.target_words().cloned().collect();
            let (f, stages) = perturb_f(&targets, &gens, manifold, &PerturbOptions::default()).unwrap();
            let names = generator_names(2);
            let state = SynthesisState {
                manifold,
                num_g: 2,
                word_len: 3,
                basepoint: DEFAULT_BASEPOINT,
                margin_floor: DEFAULT_MARGIN_FLOOR,
                words_enumerated: plan.words.len(),
                trivial_words: 0,
                pure_g_words: 0,
                stages,
                rejected_basepoints: vec![],
            };
            state.check_invariants().unwrap();
            assert_eq!(state.f().unwrap(), f);
            let mut entries = vec![(names[0].clone(), f.clone())];
            entries.extend(names[1..].iter().cloned().zip(gens.iter().cloned()));
            let a = crate::diffeo::Assignment::new(entries).unwrap();
            for (w, s) in targets.iter().zip(&state.stages) {
                let y = crate::diffeo::word_evaluate(w, &a, DEFAULT_BASEPOINT).unwrap();
                assert!(manifold.displacement(DEFAULT_BASEPOINT, y).abs() > s.margin / 2.0, "{}", s.word);
            }
        }
    }

    #[test]
    fn bad_options() {
        let opts = PerturbOptions { basepoint: 1.0, ..Default::default() };
        assert!(perturb_f(&[], &[], Manifold::Interval, &opts).is_err());
    }
}
