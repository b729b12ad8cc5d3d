use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::alpha::{choose_alphas, AlphaSequence, RELATION_FLOOR};
use super::perturb::{perturb_f, PerturbOptions, RejectedBasepoint, SynthesisState};
use super::words::{enumerate_words, TargetPlan, WordClass};
use super::SynthError;
use crate::diffeo::{DiffeoExpr, Manifold, Word};
use crate::raag::{is_clique_forest, CliqueForest, SimpleGraph};

/// Default maximal word length for the target list.
pub const DEFAULT_WORD_LEN: usize = 6;
/// Default coefficient bound for the independence search.
pub const DEFAULT_ALPHA_K: u32 = 5;
/// Extra basepoints tried after a stage failure.
pub const DEFAULT_BASEPOINT_RETRIES: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SynthOptions {
    pub word_len: usize,
    pub alpha_k: u32,
    pub perturb: PerturbOptions,
    pub basepoint_retries: u32,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            word_len: DEFAULT_WORD_LEN,
            alpha_k: DEFAULT_ALPHA_K,
            perturb: PerturbOptions::default(),
            basepoint_retries: DEFAULT_BASEPOINT_RETRIES,
        }
    }
}

/// Where a vertex sits: `h_v = f^conjugation ∘ g_{slot+1} ∘ f^-conjugation`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct VertexLayout {
    pub vertex: usize,
    pub component: usize,
    pub slot: usize,
    pub conjugation: i64,
}

/// Maps for every vertex of a clique forest, with the ingredients they are
/// built from and the construction trail of `f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct GeneratorAssignment {
    pub manifold: Manifold,
    pub graph: SimpleGraph,
    pub forest: CliqueForest,
    pub layout: Vec<VertexLayout>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<AlphaSequence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<DiffeoExpr>,
    pub g: Vec<DiffeoExpr>,
    pub h: Vec<DiffeoExpr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthesis: Option<SynthesisState>,
}

impl GeneratorAssignment {
    /// Checks that every `h_v` is literally `f^i ∘ g_n ∘ f^-i` for its
    /// recorded layout, and that the layout matches the forest.
    pub fn check_structure(&self) -> Result<(), String> {
        if !self.forest.verify(&self.graph) {
            return Err("forest does not decompose the graph".into());
        }
        let n = self.graph.n();
        if self.layout.len() != n || self.h.len() != n {
            return Err(format!("expected {n} layout entries and maps"));
        }
        let fl = self.forest.layout();
        for (v, l) in self.layout.iter().enumerate() {
            if l.vertex != v || (l.component, l.slot) != fl[v] {
                return Err(format!("layout entry {v} disagrees with the forest"));
            }
            let same_i = self.layout.iter().filter(|o| o.component == l.component).all(|o| o.conjugation == l.conjugation);
            if !same_i {
                return Err(format!("component {} mixes conjugation exponents", l.component));
            }
            let g = self.g.get(l.slot).ok_or_else(|| format!("no g for slot {}", l.slot))?;
            let want = match (&self.f, l.conjugation) {
                (_, 0) => g.clone(),
                (Some(f), i) => g.conjugate(f, i).map_err(|e| e.to_string())?,
                (None, _) => return Err("conjugation requested but f is missing".into()),
            };
            if self.h[v] != want {
                return Err(format!("h for vertex {v} is not the recorded conjugate"));
            }
        }
        for e in self.g.iter().chain(&self.h).chain(&self.f) {
            if e.manifold() != self.manifold {
                return Err("manifold tag mismatch".into());
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("assignment serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, String> {
        let a: GeneratorAssignment = serde_json::from_str(s).map_err(|e| e.to_string())?;
        a.check_structure()?;
        Ok(a)
    }
}

fn basepoint_candidates(p: f64, retries: u32) -> Vec<f64> {
    const STEP: f64 = 0.381_966_011_250_105_1;
    std::iter::once(p)
        .chain((1..=retries).map(|j| {
            let q = (p + j as f64 * STEP).rem_euclid(1.0);
            if (0.05..=0.95).contains(&q) {
                q
            } else {
                (q + 0.5).rem_euclid(1.0)
            }
        }))
        .collect()
}

/// Builds `h_{i,n} = fⁱ gₙ f⁻ⁱ` for a clique forest: component `i` (counted
/// from 1) gets the `i`-th conjugate of the commuting family `g₁, g₂, …`.
/// A graph with a single component needs no `f` and uses the `gₙ` directly.
pub fn synthesize_embedding(g: &SimpleGraph, manifold: Manifold, opts: &SynthOptions) -> Result<GeneratorAssignment, SynthError> {
    if manifold == Manifold::Line {
        return Err(SynthError::Raag(crate::raag::RaagError::UnsupportedManifold(manifold)));
    }
    let forest = is_clique_forest(g).map_err(SynthError::NotEmbeddable)?;
    let num_g = forest.sizes().into_iter().max().unwrap_or(0);
    let alphas = if num_g > 0 { Some(choose_alphas(num_g, opts.alpha_k)?) } else { None };
    if let (Some(a), Manifold::Circle) = (&alphas, manifold) {
        if !(a.min_angle_relation > RELATION_FLOOR) {
            return Err(SynthError::Dependent { minimum: a.min_angle_relation, witness: a.angle_witness.clone() });
        }
    }
    let gens: Vec<DiffeoExpr> = alphas
        .iter()
        .flat_map(|a| a.alphas.iter())
        .map(|&a| match manifold {
            Manifold::Circle => DiffeoExpr::rotation(a),
            _ => DiffeoExpr::mobius(a),
        })
        .collect::<Result<_, _>>()?;

    let needs_f = forest.components.len() > 1;
    let (f, synthesis) = if needs_f {
        let plan = TargetPlan::new(num_g, enumerate_words(num_g, opts.word_len)?)?;
        let targets: Vec<Word> = plan.target_words().cloned().collect();
        let mut rejected = Vec::new();
        let mut outcome = None;
        for p in basepoint_candidates(opts.perturb.basepoint, opts.basepoint_retries) {
            let popts = PerturbOptions { basepoint: p, ..opts.perturb };
            match perturb_f(&targets, &gens, manifold, &popts) {
                Ok(r) => {
                    outcome = Some((p, r));
                    break;
                }
                Err(e @ (SynthError::StageFailure { .. } | SynthError::EpsilonUnderflow { .. })) => {
                    rejected.push((RejectedBasepoint { basepoint: p, reason: e.to_string() }, e));
                }
                Err(e) => return Err(e),
            }
        }
        let Some((p, (f, stages))) = outcome else {
            return Err(rejected.pop().expect("at least one basepoint was tried").1);
        };
        let state = SynthesisState {
            manifold,
            num_g,
            word_len: opts.word_len,
            basepoint: p,
            margin_floor: opts.perturb.margin_floor,
            words_enumerated: plan.words.len(),
            trivial_words: plan.count(|c| c == WordClass::Trivial),
            pure_g_words: plan.count(|c| c == WordClass::PureG),
            stages,
            rejected_basepoints: rejected.into_iter().map(|(r, _)| r).collect(),
        };
        (Some(f), Some(state))
    } else {
        (None, None)
    };

    let mut layout = Vec::with_capacity(g.n());
    let mut h = Vec::with_capacity(g.n());
    for (vertex, (component, slot)) in forest.layout().into_iter().enumerate() {
        let conjugation = if needs_f { component as i64 + 1 } else { 0 };
        let map = match &f {
            Some(f) => gens[slot].conjugate(f, conjugation)?,
            None => gens[slot].clone(),
        };
        layout.push(VertexLayout { vertex, component, slot, conjugation });
        h.push(map);
    }
    Ok(GeneratorAssignment { manifold, graph: g.clone(), forest, layout, alphas, f, g: gens, h, synthesis })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SynthOptions {
        SynthOptions { word_len: 3, ..Default::default() }
    }

    #[test]
    fn single_vertex() {
        let a = synthesize_embedding(&SimpleGraph::complete(1), Manifold::Interval, &small()).unwrap();
        assert!(a.f.is_none() && a.synthesis.is_none());
        assert_eq!(a.h.len(), 1);
        assert_eq!(a.h[0], a.g[0]);
        a.check_structure().unwrap();
    }

    #[test]
    fn two_components() {
        let g = SimpleGraph::complete(2).disjoint_union(&SimpleGraph::complete(3));
        let a = synthesize_embedding(&g, Manifold::Interval, &small()).unwrap();
        assert_eq!(a.h.len(), 5);
        assert_eq!(a.g.len(), 3);
        let conj: Vec<i64> = a.layout.iter().map(|l| l.conjugation).collect();
        assert_eq!(conj, vec![1, 1, 2, 2, 2]);
        a.check_structure().unwrap();
        a.synthesis.as_ref().unwrap().check_invariants().unwrap();
        let back = GeneratorAssignment::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn rejects() {
        assert!(matches!(
            synthesize_embedding(&SimpleGraph::path(3), Manifold::Interval, &small()),
            Err(SynthError::NotEmbeddable(_))
        ));
        assert!(synthesize_embedding(&SimpleGraph::complete(1), Manifold::Line, &small()).is_err());
        let mut a = synthesize_embedding(&SimpleGraph::complete(1).disjoint_union(&SimpleGraph::complete(1)), Manifold::Interval, &small()).unwrap();
        a.h.swap(0, 1);
        assert!(GeneratorAssignment::from_json(&a.to_json()).is_err());
    }

    #[test]
    fn basepoints_stay_inside() {
        for p in basepoint_candidates(crate::synth::DEFAULT_BASEPOINT, 8) {
            assert!(p > 0.0 && p < 1.0);
        }
    }
}
