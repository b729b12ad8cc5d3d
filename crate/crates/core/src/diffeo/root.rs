use super::DiffeoError;

pub(crate) const INVERSE_TOL: f64 = 1e-14;
pub(crate) const INVERSE_MAX_ITER: usize = 200;

/// Solves `f(x) = target` for a strictly increasing `f` given as
/// `x -> (f(x), f'(x))`, starting from the bracket `[lo, hi]`.
///
/// Bisection keeps the bracket; Newton steps are taken only when they land
/// inside it and shrink fast enough. With `widen` the bracket may grow
/// outward until it straddles the target.
pub(crate) fn solve_increasing<F>(
    f: F,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    widen: bool,
) -> Result<f64, DiffeoError>
where
    F: Fn(f64) -> (f64, f64),
{
    let fail = |iterations| DiffeoError::InversionFailed { target, iterations };
    let g = |x: f64| {
        let (v, d) = f(x);
        (v - target, d)
    };
    let mut g_lo = g(lo).0;
    let mut g_hi = g(hi).0;
    if g_lo.is_nan() || g_hi.is_nan() {
        return Err(fail(0));
    }
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    let mut grown = 0;
    while !(g_lo < 0.0 && g_hi > 0.0) {
        if !widen || grown >= 64 || g_lo > 0.0 && g_hi < 0.0 {
            return Err(fail(0));
        }
        let w = hi - lo;
        if g_lo > 0.0 {
            lo -= w;
            g_lo = g(lo).0;
        }
        if g_hi < 0.0 {
            hi += w;
            g_hi = g(hi).0;
        }
        grown += 1;
    }

    let mut x = 0.5 * (lo + hi);
    let mut step_old = hi - lo;
    let mut step = step_old;
    for it in 0..INVERSE_MAX_ITER {
        let (gx, dgx) = g(x);
        if gx.is_nan() {
            return Err(fail(it));
        }
        if gx == 0.0 {
            return Ok(x);
        }
        if gx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let tol = INVERSE_TOL.max(4.0 * f64::EPSILON * x.abs());
        let newton = x - gx / dgx;
        if dgx > 0.0 && newton > lo && newton < hi && 2.0 * (gx / dgx).abs() <= step_old.abs() {
            step_old = step;
            step = gx / dgx;
            x = newton;
        } else {
            step_old = step;
            step = 0.5 * (hi - lo);
            x = lo + step;
        }
        if step.abs() <= tol || hi - lo <= tol {
            return Ok(x);
        }
    }
    Err(fail(INVERSE_MAX_ITER))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_root() {
        let x = solve_increasing(|x| (x * x * x, 3.0 * x * x), 2.0, 0.0, 2.0, false).unwrap();
        assert!((x - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn flat_derivative_falls_back_to_bisection() {
        // x^3 has zero slope at the root.
        let x = solve_increasing(|x| (x * x * x, 3.0 * x * x), 0.0, -1.0, 0.5, false).unwrap();
        assert!(x.abs() < 1e-4);
    }

    #[test]
    fn widening_finds_far_targets() {
        let x = solve_increasing(|x| (x, 1.0), 10.0, 0.0, 1.0, true).unwrap();
        assert!((x - 10.0).abs() < 1e-14);
        assert!(solve_increasing(|x| (x, 1.0), 10.0, 0.0, 1.0, false).is_err());
    }

    #[test]
    fn decreasing_function_is_rejected() {
        assert!(solve_increasing(|x| (-x, -1.0), 0.5, 0.0, 1.0, true).is_err());
    }
}
