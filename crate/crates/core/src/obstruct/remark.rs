use std::f64::consts::{PI, TAU};

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::decimal::dec17;
use crate::diffeo::{commutator_sweep, DiffeoError, DiffeoExpr, Grid};

/// Cells of the default sampling grid on `[0, 4π]`.
pub const DEFAULT_REMARK_GRID: usize = 2048;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct PowerResidual {
    pub n: u32,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub residual: f64,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub at: f64,
}

/// Commutator residuals for `fₐ(x) = ½ sin(ax) + x` and `gₐ(x) = x + 2π/a`
/// on a window of the line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RemarkReport {
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub a: f64,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub b: f64,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub window_lo: f64,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub window_hi: f64,
    pub grid_points: usize,
    /// `|[fₐ, gₐ]|`, expected to vanish.
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub fa_ga: f64,
    /// `|[f_b, g_b]|`, expected to vanish.
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub fb_gb: f64,
    /// `|[gₐ, g_b]|`, expected to vanish.
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub ga_gb: f64,
    /// `sup |fₐ(x + 2π/a) − fₐ(x) − 2π/a|`.
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub period_defect: f64,
    /// `|[fₐⁿ, f_bⁿ]|` for `n = 1..=n_max`.
    pub powers: Vec<PowerResidual>,
}

/// Samples the commutators of the sine-shear family against its period
/// translations on `[0, 4π]`. `fₐ` and `f_b` each commute with `g_a`
/// respectively `g_b`, and those commute with each other, while powers of
/// `fₐ` and `f_b` may fail to.
pub fn remark_counterexample_suite(a: f64, b: f64, n_max: u32, grid_cells: usize) -> Result<RemarkReport, DiffeoError> {
    if a == b {
        return Err(DiffeoError::InvalidParameter("a and b must differ".into()));
    }
    let fa = DiffeoExpr::sine_shear(a)?;
    let fb = DiffeoExpr::sine_shear(b)?;
    let ga = DiffeoExpr::translation(TAU / a)?;
    let gb = DiffeoExpr::translation(TAU / b)?;
    let grid = Grid::window(0.0, 4.0 * PI, grid_cells);
    let fa_ga = commutator_sweep(&fa, &ga, &grid)?.sup;
    let fb_gb = commutator_sweep(&fb, &gb, &grid)?.sup;
    let ga_gb = commutator_sweep(&ga, &gb, &grid)?.sup;
    let fa_map = fa.compile()?;
    let period = TAU / a;
    let mut period_defect = 0.0f64;
    for x in grid.points() {
        let d = fa_map.eval_lift(x + period)? - fa_map.eval_lift(x)? - period;
        period_defect = period_defect.max(d.abs());
    }
    let mut powers = Vec::new();
    for n in 1..=n_max {
        let s = commutator_sweep(&fa.pow(n as i64)?, &fb.pow(n as i64)?, &grid)?;
        powers.push(PowerResidual { n, residual: s.sup, at: s.at });
    }
    Ok(RemarkReport {
        a,
        b,
        window_lo: grid.lo,
        window_hi: grid.hi,
        grid_points: grid.len(),
        fa_ga,
        fb_gb,
        ga_gb,
        period_defect,
        powers,
    })
}
