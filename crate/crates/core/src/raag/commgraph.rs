use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{is_clique_forest, MissingEdgeWitness, RaagError, SimpleGraph};
use crate::decimal::dec17;
use crate::diffeo::{commutator_sweep, identity_residual, DiffeoExpr, Grid, Manifold, DEFAULT_GRID};

/// Commutation tolerance used when none is given.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Largest power tried on the circle when none is given.
pub const DEFAULT_POWER_BOUND: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct CommGraphOptions {
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub tol: f64,
    pub power_bound: u32,
    pub grid: usize,
}

impl Default for CommGraphOptions {
    fn default() -> Self {
        CommGraphOptions { tol: DEFAULT_TOL, power_bound: DEFAULT_POWER_BOUND, grid: DEFAULT_GRID }
    }
}

/// Smallest residual found for one pair, and the power that achieved it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct PairResidual {
    pub u: usize,
    pub v: usize,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub residual: f64,
    pub power: u32,
    pub edge: bool,
}

/// A commutation graph with the parameters it was built under.
///
/// On the circle a missing edge means no commuting powers `m ≤ power_bound`
/// were found, nothing stronger.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct CommutationGraph {
    pub manifold: Manifold,
    pub graph: SimpleGraph,
    pub options: CommGraphOptions,
    pub pairs: Vec<PairResidual>,
}

/// Joins `i` and `j` when `fᵢ` and `fⱼ` commute up to `tol` on the grid; on
/// the circle, when some powers `fᵢᵐ`, `fⱼᵐ` with `m ≤ power_bound` do.
/// Inputs that are numerically the identity are rejected.
pub fn commutation_graph(fs: &[DiffeoExpr], opts: &CommGraphOptions) -> Result<CommutationGraph, RaagError> {
    let Some(first) = fs.first() else {
        return Ok(CommutationGraph {
            manifold: Manifold::Interval,
            graph: SimpleGraph::new(0),
            options: *opts,
            pairs: Vec::new(),
        });
    };
    let manifold = first.manifold();
    for f in fs {
        crate::diffeo::ensure_same(manifold, f.manifold())?;
    }
    let grid = Grid::default_for(manifold, opts.grid);
    for (index, f) in fs.iter().enumerate() {
        let residual = identity_residual(f, &grid)?.sup;
        if residual < opts.tol {
            return Err(RaagError::DegenerateInput { index, residual });
        }
    }
    let max_power = if manifold == Manifold::Circle { opts.power_bound.max(1) } else { 1 };
    let powers: Vec<Vec<DiffeoExpr>> = fs
        .iter()
        .map(|f| (1..=max_power).map(|m| f.pow(m as i64)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let index_pairs: Vec<(usize, usize)> =
        (0..fs.len()).flat_map(|u| (u + 1..fs.len()).map(move |v| (u, v))).collect();
    let pairs = index_pairs
        .par_iter()
        .map(|&(u, v)| {
            let mut best = PairResidual { u, v, residual: f64::INFINITY, power: 1, edge: false };
            for (m, (pu, pv)) in powers[u].iter().zip(&powers[v]).enumerate() {
                let r = commutator_sweep(pu, pv, &grid)?.sup;
                if r < best.residual {
                    best.residual = r;
                    best.power = m as u32 + 1;
                }
                if r < opts.tol {
                    best.edge = true;
                    break;
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>, RaagError>>()?;
    let graph = SimpleGraph::from_edges(fs.len(), pairs.iter().filter(|p| p.edge).map(|p| (p.u, p.v)))?;
    Ok(CommutationGraph { manifold, graph, options: *opts, pairs })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ComponentCheck {
    pub vertices: Vec<usize>,
    pub complete: bool,
}

/// Per-component completeness of a graph, with a witness for the first
/// incomplete component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct CompletenessReport {
    pub pass: bool,
    pub components: Vec<ComponentCheck>,
    pub witness: Option<MissingEdgeWitness>,
}

pub fn check_component_completeness(g: &SimpleGraph) -> CompletenessReport {
    let components: Vec<ComponentCheck> = g
        .components()
        .into_iter()
        .map(|vertices| {
            let complete = vertices
                .iter()
                .enumerate()
                .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| g.has_edge(u, v)));
            ComponentCheck { vertices, complete }
        })
        .collect();
    let witness = is_clique_forest(g).err();
    CompletenessReport { pass: witness.is_none(), components, witness }
}
