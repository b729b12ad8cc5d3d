//! Explicit embeddings of clique-forest RAAGs: the commuting family `gₙ`,
//! the perturbed map `f`, the conjugates `h_{i,n} = fⁱ gₙ f⁻ⁱ`, and their
//! verification.

mod alpha;
mod embed;
mod perturb;
mod verify;
pub mod words;

use thiserror::Error;

use crate::diffeo::DiffeoError;
use crate::raag::{MissingEdgeWitness, RaagError};

pub use alpha::{choose_alphas, AlphaSequence, MAX_RELATION_VECTORS, RELATION_FLOOR};
pub use embed::{
    synthesize_embedding, GeneratorAssignment, SynthOptions, VertexLayout, DEFAULT_ALPHA_K, DEFAULT_BASEPOINT_RETRIES,
    DEFAULT_WORD_LEN,
};
pub use perturb::{
    perturb_f, PerturbOptions, RejectedBasepoint, StageBump, StageRecord, SynthesisState, DEFAULT_BASEPOINT,
    DEFAULT_MARGIN_FLOOR, EPSILON_SAFETY, SHAPE_ATTEMPTS,
};
pub use verify::{
    verify_assignment, AbelianReport, FreeProductReport, PairCheck, VerificationReport, VerifyOptions, WordMargin,
};
pub use words::{enumerate_words, TargetPlan, WordClass};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error("graph is not a disjoint union of cliques: vertices {} and {} share a component but no edge", .0.u, .0.v)]
    NotEmbeddable(MissingEdgeWitness),
    #[error("near relation {minimum:e} with coefficients {witness:?}")]
    Dependent { minimum: f64, witness: Vec<i64> },
    #[error("stage {stage} ({word}): {reason}")]
    StageFailure { stage: usize, word: String, reason: String },
    #[error("stage {stage} ({word}): budget {budget:e} too small to lift margin {margin:e} above the floor")]
    EpsilonUnderflow { stage: usize, word: String, budget: f64, margin: f64 },
    #[error("{what} would need {count} entries")]
    TooLarge { what: &'static str, count: u64 },
    #[error(transparent)]
    Diffeo(#[from] DiffeoError),
    #[error(transparent)]
    Raag(#[from] RaagError),
}
