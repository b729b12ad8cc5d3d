use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{ensure_same, CompiledMap, DiffeoError, DiffeoExpr, Grid};
use crate::decimal::dec17;

/// Result of a sup-norm sweep: the largest displacement and where it occurred.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Sweep {
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub sup: f64,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub at: f64,
    pub grid_points: usize,
}

/// Sup over `grid` of the displacement `|map(x) − x|` (reduced mod 1 on the circle).
pub fn displacement_sweep(map: &CompiledMap<'_>, grid: &Grid) -> Result<Sweep, DiffeoError> {
    let m = map.manifold();
    let mut best = Sweep { sup: 0.0, at: grid.lo, grid_points: grid.len() };
    for x in grid.points() {
        let r = m.displacement(x, map.eval_lift(x)?).abs();
        if r > best.sup {
            best.sup = r;
            best.at = x;
        }
    }
    Ok(best)
}

/// Sweep of `[e1, e2] = e1 ∘ e2 ∘ e1⁻¹ ∘ e2⁻¹` against the identity.
pub fn commutator_sweep(e1: &DiffeoExpr, e2: &DiffeoExpr, grid: &Grid) -> Result<Sweep, DiffeoError> {
    ensure_same(e1.manifold(), e2.manifold())?;
    let c = DiffeoExpr::commutator(e1, e2)?;
    displacement_sweep(&c.compile()?, grid)
}

/// Grid sup of `|[e1, e2](x) − x|` on the manifold's default grid.
pub fn commutator_residual(e1: &DiffeoExpr, e2: &DiffeoExpr, grid_cells: usize) -> Result<f64, DiffeoError> {
    let grid = Grid::default_for(e1.manifold(), grid_cells);
    Ok(commutator_sweep(e1, e2, &grid)?.sup)
}

/// Grid sup of `|e(x) − x|`; zero up to rounding means `e` is numerically the identity.
pub fn identity_residual(e: &DiffeoExpr, grid: &Grid) -> Result<Sweep, DiffeoError> {
    displacement_sweep(&e.compile()?, grid)
}
