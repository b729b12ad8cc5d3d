//! Graphs, the clique-forest decision, normal forms and commutation graphs.

mod commgraph;
mod forest;
mod graph;
mod normal;

use thiserror::Error;

use crate::diffeo::{DiffeoError, Manifold};

pub use commgraph::{
    check_component_completeness, commutation_graph, CommGraphOptions, DEFAULT_POWER_BOUND, DEFAULT_TOL, CommutationGraph, ComponentCheck,
    CompletenessReport, PairResidual,
};
pub use forest::{embeddable_raag, is_clique_forest, CliqueForest, Embeddability, EmbeddingDecision, MissingEdgeWitness};
pub use graph::{GraphError, GraphParseError, SimpleGraph, MAX_VERTICES};
pub use normal::{normal_form, NormalForm, RaagWord, Syllable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RaagError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex {vertex} is not among the {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("no embeddability criterion for manifold {0}")]
    UnsupportedManifold(Manifold),
    #[error(transparent)]
    Diffeo(#[from] DiffeoError),
    #[error("input {index} is numerically the identity (residual {residual:e})")]
    DegenerateInput { index: usize, residual: f64 },
    #[error("empty input")]
    EmptyInput,
    #[error("exponent overflow")]
    Overflow,
}
