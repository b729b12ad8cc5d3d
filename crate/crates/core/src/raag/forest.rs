use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{RaagError, SimpleGraph};
use crate::diffeo::Manifold;

/// Partition of a graph's vertices into pairwise-adjacent components with
/// no edges between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct CliqueForest {
    pub components: Vec<Vec<usize>>,
}

impl CliqueForest {
    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.components.iter().map(Vec::len).sum()
    }

    /// `(component index, slot within the component)` for every vertex.
    pub fn layout(&self) -> Vec<(usize, usize)> {
        let mut out = vec![(usize::MAX, usize::MAX); self.vertex_count()];
        for (ci, comp) in self.components.iter().enumerate() {
            for (slot, &v) in comp.iter().enumerate() {
                if v < out.len() {
                    out[v] = (ci, slot);
                }
            }
        }
        out
    }

    /// Re-checks the defining properties against `g`.
    pub fn verify(&self, g: &SimpleGraph) -> bool {
        let layout = self.layout();
        if layout.len() != g.n() || layout.iter().any(|&(c, _)| c == usize::MAX) {
            return false;
        }
        let within = self.components.iter().all(|comp| {
            comp.iter().enumerate().all(|(i, &u)| comp[i + 1..].iter().all(|&v| g.has_edge(u, v)))
        });
        within && g.edges().all(|(u, v)| layout[u].0 == layout[v].0)
    }
}

/// Two vertices of one connected component that are not adjacent, with a
/// path joining them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct MissingEdgeWitness {
    pub u: usize,
    pub v: usize,
    pub path: Vec<usize>,
}

impl MissingEdgeWitness {
    pub fn verify(&self, g: &SimpleGraph) -> bool {
        self.u != self.v
            && !g.has_edge(self.u, self.v)
            && self.path.first() == Some(&self.u)
            && self.path.last() == Some(&self.v)
            && self.path.windows(2).all(|w| g.has_edge(w[0], w[1]))
    }
}

/// Either every component is complete, or a certificate that one is not.
pub fn is_clique_forest(g: &SimpleGraph) -> Result<CliqueForest, MissingEdgeWitness> {
    let components = g.components();
    for comp in &components {
        for (i, &u) in comp.iter().enumerate() {
            if let Some(&v) = comp[i + 1..].iter().find(|&&v| !g.has_edge(u, v)) {
                let path = g.shortest_path(u, v).expect("vertices share a component");
                return Err(MissingEdgeWitness { u, v, path });
            }
        }
    }
    Ok(CliqueForest { components })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Embeddability {
    Embeds { forest: CliqueForest },
    Obstructed { witness: MissingEdgeWitness },
}

/// Decision for a RAAG on the interval or the circle, with its certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct EmbeddingDecision {
    pub manifold: Manifold,
    pub embeddable: bool,
    #[serde(flatten)]
    pub certificate: Embeddability,
}

/// The RAAG of `g` embeds in the analytic diffeomorphisms of `manifold`
/// (interval or circle) iff `g` is a disjoint union of cliques.
pub fn embeddable_raag(g: &SimpleGraph, manifold: Manifold) -> Result<EmbeddingDecision, RaagError> {
    if manifold == Manifold::Line {
        return Err(RaagError::UnsupportedManifold(manifold));
    }
    let certificate = match is_clique_forest(g) {
        Ok(forest) => Embeddability::Embeds { forest },
        Err(witness) => Embeddability::Obstructed { witness },
    };
    Ok(EmbeddingDecision {
        manifold,
        embeddable: matches!(certificate, Embeddability::Embeds { .. }),
        certificate,
    })
}
