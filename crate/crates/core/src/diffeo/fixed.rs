use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{CompiledMap, DiffeoError, DiffeoExpr, Grid, Manifold};
use crate::decimal::dec17;

/// Slope threshold below which `|f'(x) − 1|` marks a fixed point as a
/// possible tangency.
pub const TRANSVERSE_SLOPE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointKind {
    Transverse,
    TangencySuspect,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct FixedPoint {
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub x: f64,
    pub kind: FixedPointKind,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub residual: f64,
}

/// Numerically located fixed points of a map.
///
/// `gap_signs[j]` is the sign of `f − id` on the open gap that precedes
/// `points[j]`; the last entry is the gap after the final point (on the
/// circle the gaps wrap around and there is one per point).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct FixedPointSet {
    pub manifold: Manifold,
    pub points: Vec<FixedPoint>,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub residual_tol: f64,
    pub grid_cells: usize,
    /// Every grid sample was within tolerance of being fixed: the map is the
    /// identity up to rounding and no finite fixed-point set was extracted.
    pub degenerate: bool,
    pub gap_signs: Vec<i8>,
}

impl FixedPointSet {
    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }

    /// True when both sets have the same size and matching points within `tol`.
    pub fn agrees_with(&self, other: &FixedPointSet, tol: f64) -> bool {
        self.points.len() == other.points.len()
            && self.points.iter().zip(&other.points).all(|(a, b)| {
                let d = self.manifold.displacement(a.x, b.x);
                d.abs() <= tol
            })
    }
}

/// Fixed points on the manifold's default grid (`[0, 4π]` for the line).
pub fn fixed_points(e: &DiffeoExpr, grid_cells: usize, tol: f64) -> Result<FixedPointSet, DiffeoError> {
    if grid_cells < 2 {
        return Err(DiffeoError::InvalidParameter("fixed-point grid needs at least 2 cells".into()));
    }
    fixed_points_on(e, &Grid::default_for(e.manifold(), grid_cells), tol)
}

/// Fixed points of `e` on `grid`: sign changes of `f − id` are refined by
/// bisection; samples within `tol` of being fixed are kept and classified by
/// the slope of `f` there, never dropped.
pub fn fixed_points_on(e: &DiffeoExpr, grid: &Grid, tol: f64) -> Result<FixedPointSet, DiffeoError> {
    if !(tol > 0.0) {
        return Err(DiffeoError::InvalidParameter("tolerance must be positive".into()));
    }
    let map = e.compile()?;
    let manifold = e.manifold();
    // Closed sample set; on the circle the last sample is x = 1 ≡ 0.
    let n = grid.cells;
    let xs: Vec<f64> = (0..=n)
        .map(|i| if i == n { grid.hi } else { grid.lo + (grid.hi - grid.lo) * (i as f64 / n as f64) })
        .collect();
    let raw: Vec<f64> = xs
        .iter()
        .map(|&x| map.eval_lift(x).map(|y| y - x))
        .collect::<Result<_, _>>()?;

    // On the circle a fixed point means F(x) − x is an integer; pick the one
    // the displacement comes closest to.
    let shift = match manifold {
        Manifold::Circle => raw
            .iter()
            .copied()
            .min_by(|a, b| (a - a.round()).abs().total_cmp(&(b - b.round()).abs()))
            .map_or(0.0, f64::round),
        _ => 0.0,
    };
    let g = |x: f64| -> Result<f64, DiffeoError> { Ok(map.eval_lift(x)? - x - shift) };
    let gs: Vec<f64> = raw.iter().map(|d| d - shift).collect();
    let near: Vec<bool> = gs.iter().map(|v| v.abs() < tol).collect();

    let mut points = Vec::new();
    if near.iter().all(|&b| b) {
        for (i, &x) in xs.iter().enumerate() {
            if manifold == Manifold::Circle && i == n {
                break;
            }
            points.push(FixedPoint { x, kind: FixedPointKind::TangencySuspect, residual: gs[i].abs() });
        }
        let gap_signs = vec![0; points.len() + usize::from(manifold != Manifold::Circle)];
        return Ok(FixedPointSet {
            manifold,
            points,
            residual_tol: tol,
            grid_cells: n,
            degenerate: true,
            gap_signs,
        });
    }

    let mut i = 0;
    while i <= n {
        if near[i] {
            let start = i;
            while i < n && near[i + 1] {
                i += 1;
            }
            if start == i {
                let x = xs[i];
                let kind = classify(&map, x)?;
                points.push(FixedPoint { x, kind, residual: gs[i].abs() });
            } else {
                for j in start..=i {
                    points.push(FixedPoint {
                        x: xs[j],
                        kind: FixedPointKind::TangencySuspect,
                        residual: gs[j].abs(),
                    });
                }
            }
        } else if i < n && !near[i + 1] {
            let (a, b) = (xs[i], xs[i + 1]);
            if gs[i].signum() != gs[i + 1].signum() {
                let x = bisect(&g, a, b, gs[i], tol)?;
                let kind = classify(&map, x)?;
                points.push(FixedPoint { x, kind, residual: g(x)?.abs() });
            } else {
                // No sign change at the ends: probe the midpoint for a
                // near-tangency or a pair of crossings inside the cell.
                let m = 0.5 * (a + b);
                let gm = g(m)?;
                if gm.abs() < tol {
                    points.push(FixedPoint { x: m, kind: FixedPointKind::TangencySuspect, residual: gm.abs() });
                } else if gm.signum() != gs[i].signum() {
                    for (lo, hi, glo) in [(a, m, gs[i]), (m, b, gm)] {
                        let x = bisect(&g, lo, hi, glo, tol)?;
                        points.push(FixedPoint { x, kind: classify(&map, x)?, residual: g(x)?.abs() });
                    }
                }
            }
        }
        i += 1;
    }

    if manifold == Manifold::Circle {
        // The sample at x = 1 duplicates x = 0.
        points.retain(|p| p.x < grid.hi);
    }
    points.sort_by(|a, b| a.x.total_cmp(&b.x));
    points.dedup_by(|b, a| (b.x - a.x).abs() < tol);

    let max_res = points.iter().map(|p| p.residual).fold(0.0, f64::max);
    let residual_tol = if max_res < tol { tol } else { 2.0 * max_res };
    let gap_signs = gap_signs(&g, grid, manifold, &points)?;
    Ok(FixedPointSet { manifold, points, residual_tol, grid_cells: n, degenerate: false, gap_signs })
}

fn classify(map: &CompiledMap<'_>, x: f64) -> Result<FixedPointKind, DiffeoError> {
    let (_, d) = map.eval_with_derivative(x)?;
    Ok(if (d - 1.0).abs() > TRANSVERSE_SLOPE {
        FixedPointKind::Transverse
    } else {
        FixedPointKind::TangencySuspect
    })
}

fn bisect(
    g: &impl Fn(f64) -> Result<f64, DiffeoError>,
    mut a: f64,
    mut b: f64,
    ga: f64,
    tol: f64,
) -> Result<f64, DiffeoError> {
    let sa = ga.signum();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let gm = g(m)?;
        if gm.abs() < tol || b - a <= tol.min(1e-15 * (1.0 + m.abs())) {
            return Ok(m);
        }
        if gm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

fn gap_signs(
    g: &impl Fn(f64) -> Result<f64, DiffeoError>,
    grid: &Grid,
    manifold: Manifold,
    points: &[FixedPoint],
) -> Result<Vec<i8>, DiffeoError> {
    let sign = |v: f64| -> i8 {
        if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    };
    let mut bounds: Vec<f64> = Vec::with_capacity(points.len() + 2);
    match manifold {
        Manifold::Circle => {
            if points.is_empty() {
                return Ok(vec![sign(g(0.5 * (grid.lo + grid.hi))?)]);
            }
            let last = points[points.len() - 1].x - (grid.hi - grid.lo);
            bounds.push(last);
            bounds.extend(points.iter().map(|p| p.x));
        }
        _ => {
            bounds.push(grid.lo);
            bounds.extend(points.iter().map(|p| p.x));
            bounds.push(grid.hi);
        }
    }
    bounds
        .windows(2)
        .map(|w| g(0.5 * (w[0] + w[1])).map(sign))
        .collect()
}
