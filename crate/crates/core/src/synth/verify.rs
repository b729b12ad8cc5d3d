use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::embed::GeneratorAssignment;
use super::words::{enumerate_words, generator_names, TargetPlan, WordClass};
use super::SynthError;
use crate::decimal::dec17;
use crate::diffeo::{commutator_sweep, Assignment, DiffeoExpr, Grid, Letter, Manifold, Word, DEFAULT_GRID};
use crate::raag::SimpleGraph;

/// Bound on the commutators of the `gₙ` among themselves.
pub const PURE_COMMUTATOR_BOUND: f64 = 1e-12;
/// Agreement required between a product of `gₙ` powers and its closed form.
pub const PRODUCT_ORACLE_BOUND: f64 = 1e-12;
/// Failure messages kept in a report.
pub const MAX_FAILURES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct VerifyOptions {
    pub word_len: usize,
    pub grid: usize,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { word_len: super::embed::DEFAULT_WORD_LEN, grid: DEFAULT_GRID, tol: crate::raag::DEFAULT_TOL }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct PairCheck {
    pub u: usize,
    pub v: usize,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub residual: f64,
    /// Grid point of the largest residual.
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub at: f64,
    pub pass: bool,
}

/// Free abelian checks on the commuting family `gₙ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct AbelianReport {
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub max_commutator: f64,
    pub exponent_bound: u32,
    pub vectors_checked: u64,
    /// Smallest `|Π gₙ^{kₙ}(p) − p|` over nonzero exponent vectors.
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub min_displacement: f64,
    /// Largest gap between a product and its closed form at `p`.
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub max_oracle_error: f64,
    pub pass: bool,
}

/// Margin of one target element: the recorded `D` and the smallest
/// displacement of `p` over the enumerated words equal to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WordMargin {
    pub word: String,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub recorded: f64,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub margin: f64,
    pub words: usize,
}

/// Nontriviality of the words of bounded length in `f, g₁, …`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct FreeProductReport {
    pub word_len: usize,
    pub words_checked: usize,
    pub targets: usize,
    pub trivial_words: usize,
    pub pure_g_words: usize,
    /// Smallest `margin / recorded` over words containing `f`; must exceed 1/2.
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub min_ratio: f64,
    pub worst_word: String,
    /// Smallest displacement among words equal to a nonzero product of `gₙ`.
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub min_pure_g_displacement: f64,
    pub pass: bool,
    pub margins: Vec<WordMargin>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct VerificationReport {
    pub manifold: Manifold,
    pub pass: bool,
    pub options: VerifyOptions,
    pub grid_points: usize,
    /// Scope of the certificate: which words were actually checked.
    pub truncation: String,
    pub structure_ok: bool,
    pub edges: Vec<PairCheck>,
    pub non_edges: Vec<PairCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abelian: Option<AbelianReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_product: Option<FreeProductReport>,
    pub failures: Vec<String>,
}

struct Failures(Vec<String>, usize);

impl Failures {
    fn push(&mut self, msg: impl FnOnce() -> String) {
        self.1 += 1;
        if self.0.len() < MAX_FAILURES {
            self.0.push(msg());
        }
    }
}

/// Checks an assignment against `g`: edges commute to `tol` on the grid,
/// non-edges have a point moved by more than `10·tol`, the `gₙ` generate a
/// free abelian group up to the recorded exponent bound, and every word of
/// length at most `word_len` in `f` and the `gₙ` that is nontrivial in
/// `⟨f⟩ ∗ ℤᴺ` moves the basepoint.
pub fn verify_assignment(a: &GeneratorAssignment, g: &SimpleGraph, opts: &VerifyOptions) -> Result<VerificationReport, SynthError> {
    if &a.graph != g {
        return Err(SynthError::InvalidOption("assignment was built for a different graph".into()));
    }
    if a.h.len() != g.n() {
        return Err(SynthError::InvalidOption(format!("{} maps for {} vertices", a.h.len(), g.n())));
    }
    let mut fails = Failures(Vec::new(), 0);
    let structure_ok = match a.check_structure() {
        Ok(()) => true,
        Err(e) => {
            fails.push(|| format!("structure: {e}"));
            false
        }
    };
    let grid = Grid::default_for(a.manifold, opts.grid);
    let sweep = |pairs: Vec<(usize, usize)>, maps: &[DiffeoExpr]| -> Result<Vec<PairCheck>, SynthError> {
        pairs
            .into_par_iter()
            .map(|(u, v)| {
                let s = commutator_sweep(&maps[u], &maps[v], &grid)?;
                Ok(PairCheck { u, v, residual: s.sup, at: s.at, pass: false })
            })
            .collect()
    };
    let n = g.n();
    let all: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let (edge_pairs, other): (Vec<_>, Vec<_>) = all.into_iter().partition(|&(u, v)| g.has_edge(u, v));
    let mut edges = sweep(edge_pairs, &a.h)?;
    for e in &mut edges {
        e.pass = e.residual < opts.tol;
        if !e.pass {
            fails.push(|| format!("edge {}–{}: commutator residual {:e} ≥ {:e}", e.u, e.v, e.residual, opts.tol));
        }
    }
    let mut non_edges = sweep(other, &a.h)?;
    for e in &mut non_edges {
        e.pass = e.residual > 10.0 * opts.tol;
        if !e.pass {
            fails.push(|| format!("non-edge {}–{}: largest commutator residual {:e} ≤ {:e}", e.u, e.v, e.residual, 10.0 * opts.tol));
        }
    }

    let abelian = if a.g.is_empty() { None } else { Some(abelian_check(a, &grid, opts, &mut fails)?) };
    let free_product = match (&a.f, &a.synthesis) {
        (Some(f), Some(state)) => Some(free_product_check(a, f, state, opts, &mut fails)?),
        (Some(_), None) => {
            fails.push(|| "f present without its construction trail".into());
            None
        }
        _ => None,
    };
    let truncation = match &free_product {
        Some(fp) => format!(
            "free-product condition certified only for the {} words of length ≤ {} in f, g1..g{}",
            fp.words_checked,
            fp.word_len,
            a.g.len()
        ),
        None => "single component: no free-product condition".into(),
    };
    let extra = fails.1.saturating_sub(fails.0.len());
    if extra > 0 {
        fails.0.push(format!("… and {extra} more failures"));
    }
    Ok(VerificationReport {
        manifold: a.manifold,
        pass: fails.1 == 0,
        options: *opts,
        grid_points: grid.len(),
        truncation,
        structure_ok,
        edges,
        non_edges,
        abelian,
        free_product,
        failures: fails.0,
    })
}

fn abelian_check(a: &GeneratorAssignment, grid: &Grid, opts: &VerifyOptions, fails: &mut Failures) -> Result<AbelianReport, SynthError> {
    let n = a.g.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut max_commutator = 0.0f64;
    for (u, v) in pairs {
        let s = commutator_sweep(&a.g[u], &a.g[v], grid)?;
        max_commutator = max_commutator.max(s.sup);
        if !(s.sup < PURE_COMMUTATOR_BOUND) {
            fails.push(|| format!("g{} and g{} commutator residual {:e}", u + 1, v + 1, s.sup));
        }
    }
    let k = a.alphas.as_ref().map_or(0, |s| s.k_bound);
    let side = 2 * k as u64 + 1;
    let total = side.checked_pow(n as u32).filter(|&t| t <= super::alpha::MAX_RELATION_VECTORS);
    let Some(total) = total else {
        return Err(SynthError::TooLarge { what: "exponent check", count: u64::MAX });
    };
    let params: Vec<f64> = a.g.iter().map(closed_form_parameter).collect::<Result<_, _>>()?;
    let names: Vec<String> = (1..=n).map(|i| format!("g{i}")).collect();
    let assignment = Assignment::new(names.iter().cloned().zip(a.g.iter().cloned()).collect())?;
    let compiled = assignment.compile()?;
    let p = a.synthesis.as_ref().map_or(super::perturb::DEFAULT_BASEPOINT, |s| s.basepoint);
    let manifold = a.manifold;
    let zero: u64 = (0..n as u32).map(|i| k as u64 * side.pow(i)).sum();
    let (min_disp, max_err) = (0..total)
        .into_par_iter()
        .filter(|&idx| idx != zero)
        .map(|mut idx| {
            let ks: Vec<i64> = (0..n)
                .map(|_| {
                    let d = (idx % side) as i64 - k as i64;
                    idx /= side;
                    d
                })
                .collect();
            let word = Word::new(ks.iter().enumerate().filter(|(_, &e)| e != 0).map(|(i, &e)| Letter::new(i, e as i32)).collect());
            let y = compiled.eval_word(&word, p)?;
            let oracle = match manifold {
                Manifold::Circle => p + ks.iter().zip(&params).map(|(&e, t)| e as f64 * t).sum::<f64>() / std::f64::consts::TAU,
                _ => {
                    let alpha = ks.iter().zip(&params).map(|(&e, l)| e as f64 * l.ln()).sum::<f64>().exp();
                    alpha * p / ((alpha - 1.0) * p + 1.0)
                }
            };
            let err = manifold.displacement(oracle, y).abs();
            Ok((manifold.displacement(p, y).abs(), err))
        })
        .try_reduce(|| (f64::INFINITY, 0.0), |x, y| Ok((x.0.min(y.0), x.1.max(y.1))))
        .map_err(|e: crate::diffeo::DiffeoError| SynthError::from(e))?;
    let min_displacement = if total > 1 { min_disp } else { f64::INFINITY };
    let ok_disp = min_displacement > 10.0 * opts.tol;
    let ok_err = max_err < PRODUCT_ORACLE_BOUND;
    if !ok_disp {
        fails.push(|| format!("a nonzero product of g powers moves p by only {min_displacement:e}"));
    }
    if !ok_err {
        fails.push(|| format!("products of g powers differ from the closed form by {max_err:e}"));
    }
    Ok(AbelianReport {
        max_commutator,
        exponent_bound: k,
        vectors_checked: total - 1,
        min_displacement,
        max_oracle_error: max_err,
        pass: max_commutator < PURE_COMMUTATOR_BOUND && ok_disp && ok_err,
    })
}

fn closed_form_parameter(g: &DiffeoExpr) -> Result<f64, SynthError> {
    use crate::diffeo::Node;
    match g.node() {
        Node::Mobius { alpha } => Ok(*alpha),
        Node::Rotation { theta } => Ok(*theta),
        _ => Err(SynthError::InvalidOption("generators must be Möbius maps or rotations".into())),
    }
}

fn free_product_check(
    a: &GeneratorAssignment,
    f: &DiffeoExpr,
    state: &super::perturb::SynthesisState,
    opts: &VerifyOptions,
    fails: &mut Failures,
) -> Result<FreeProductReport, SynthError> {
    if opts.word_len > state.word_len {
        return Err(SynthError::InvalidOption(format!(
            "word length {} exceeds the {} used to build f",
            opts.word_len, state.word_len
        )));
    }
    let num_g = a.g.len();
    if state.num_g != num_g {
        return Err(SynthError::InvalidOption("trail and assignment disagree on the number of g".into()));
    }
    let plan = TargetPlan::new(num_g, enumerate_words(num_g, opts.word_len)?)?;
    let names = generator_names(num_g);
    if plan.targets.len() > state.stages.len() {
        return Err(SynthError::InvalidOption("construction trail is shorter than the target list".into()));
    }
    for (t, w) in plan.target_words().enumerate() {
        let shown = w.display(&names).to_string();
        if state.stages[t].word != shown {
            return Err(SynthError::InvalidOption(format!("stage {} records {:?}, expected {shown:?}", t + 1, state.stages[t].word)));
        }
    }
    let assignment = Assignment::new(names.iter().cloned().zip(std::iter::once(f.clone()).chain(a.g.iter().cloned())).collect())?;
    let compiled = assignment.compile()?;
    let p = state.basepoint;
    let manifold = a.manifold;
    let margins: Vec<f64> = plan
        .words
        .par_iter()
        .map(|w| Ok(manifold.displacement(p, compiled.eval_word(w, p)?).abs()))
        .collect::<Result<_, crate::diffeo::DiffeoError>>()?;

    let mut table: Vec<WordMargin> = plan
        .target_words()
        .zip(&state.stages)
        .map(|(w, s)| WordMargin { word: w.display(&names).to_string(), recorded: s.margin, margin: f64::INFINITY, words: 0 })
        .collect();
    let mut min_ratio = f64::INFINITY;
    let mut worst_word = String::new();
    let mut min_pure = f64::INFINITY;
    for ((w, class), &m) in plan.words.iter().zip(&plan.classes).zip(&margins) {
        match *class {
            WordClass::Target(t) => {
                let row = &mut table[t];
                row.margin = row.margin.min(m);
                row.words += 1;
                let ratio = m / row.recorded;
                if !(row.recorded > 0.0 && ratio > 0.5) {
                    fails.push(|| format!("word {}: margin {m:e} not above half of {:e}", w.display(&names), row.recorded));
                }
                if ratio < min_ratio || worst_word.is_empty() {
                    min_ratio = ratio;
                    worst_word = w.display(&names).to_string();
                }
            }
            WordClass::PureG => {
                min_pure = min_pure.min(m);
                if !(m > 10.0 * opts.tol) {
                    fails.push(|| format!("word {} equals a product of g but moves p by only {m:e}", w.display(&names)));
                }
            }
            WordClass::Trivial => {}
        }
    }
    let pass = min_ratio > 0.5 && table.iter().all(|r| r.recorded > 0.0) && min_pure > 10.0 * opts.tol;
    Ok(FreeProductReport {
        word_len: opts.word_len,
        words_checked: plan.words.len(),
        targets: plan.targets.len(),
        trivial_words: plan.count(|c| c == WordClass::Trivial),
        pure_g_words: plan.count(|c| c == WordClass::PureG),
        min_ratio,
        worst_word,
        min_pure_g_displacement: min_pure,
        pass,
        margins: table,
    })
}
