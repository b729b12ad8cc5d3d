use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::SynthError;
use crate::decimal::{dec17, dec17_vec};

/// Relations with magnitude at or below this count as numerically exact.
pub const RELATION_FLOOR: f64 = 1e-9;
/// Largest number of coefficient vectors the exhaustive relation search visits.
pub const MAX_RELATION_VECTORS: u64 = 1 << 31;

/// `αₙ = exp(√pₙ / C)` for the first `N` primes, with the height-bounded
/// relation search that backs their independence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct AlphaSequence {
    #[serde(with = "dec17_vec")]
    #[schemars(with = "Vec<String>")]
    pub alphas: Vec<f64>,
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub scale: f64,
    /// Coefficient bound `K`: vectors with `0 < max |kᵢ| ≤ K` were searched.
    pub k_bound: u32,
    /// `min |Σ kᵢ log αᵢ|` over the searched vectors.
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub min_log_relation: f64,
    pub log_witness: Vec<i64>,
    /// `min |Σ kᵢ αᵢ − 2πj|` over the same vectors and all integers `j`;
    /// relevant when the `αᵢ` are used as rotation angles.
    #[serde(with = "dec17")]
    #[schemars(with = "String")]
    pub min_angle_relation: f64,
    pub angle_witness: Vec<i64>,
}

/// The first `n` primes.
fn primes(n: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out.iter().take_while(|&&p| p * p <= c).all(|&p| !c.is_multiple_of(p)) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Picks `N` values in `(1, π)` and searches all integer vectors with
/// `0 < max |kᵢ| ≤ K` for near-relations among their logarithms (and among
/// the values themselves modulo `2π`). A relation at or below
/// [`RELATION_FLOOR`] is an error.
pub fn choose_alphas(n: usize, k: u32) -> Result<AlphaSequence, SynthError> {
    if n == 0 || k == 0 {
        return Err(SynthError::InvalidOption("choose_alphas needs N ≥ 1 and K ≥ 1".into()));
    }
    let side = 2 * k as u64 + 1;
    let total = u32::try_from(n)
        .ok()
        .and_then(|e| side.checked_pow(e))
        .filter(|&t| t <= MAX_RELATION_VECTORS)
        .ok_or(SynthError::TooLarge { what: "relation search", count: u64::MAX })?;
    let ps = primes(n);
    let scale = 2f64.max((ps[n - 1] as f64).sqrt() / (0.95 * PI.ln()));
    let alphas: Vec<f64> = ps.iter().map(|&p| ((p as f64).sqrt() / scale).exp()).collect();
    let logs: Vec<f64> = alphas.iter().map(|a| a.ln()).collect();

    let decode = |mut idx: u64| -> Vec<i64> {
        (0..n)
            .map(|_| {
                let d = (idx % side) as i64 - k as i64;
                idx /= side;
                d
            })
            .collect()
    };
    // Only vectors whose last nonzero entry is positive: k and −k give the
    // same magnitudes.
    let best = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let ks = decode(idx);
            let lead = ks.iter().rev().find(|&&x| x != 0)?;
            if *lead < 0 {
                return None;
            }
            let lin: f64 = ks.iter().zip(&logs).map(|(&c, l)| c as f64 * l).sum();
            let ang: f64 = ks.iter().zip(&alphas).map(|(&c, a)| c as f64 * a).sum();
            let ang = (ang - TAU * (ang / TAU).round()).abs();
            Some((lin.abs(), ang, idx))
        })
        .fold(
            || ((f64::INFINITY, 0u64), (f64::INFINITY, 0u64)),
            |(l, a), (lin, ang, idx)| (pick(l, (lin, idx)), pick(a, (ang, idx))),
        )
        .reduce(
            || ((f64::INFINITY, 0u64), (f64::INFINITY, 0u64)),
            |(l1, a1), (l2, a2)| (pick(l1, l2), pick(a1, a2)),
        );
    let ((min_log, log_idx), (min_ang, ang_idx)) = best;
    let seq = AlphaSequence {
        alphas,
        scale,
        k_bound: k,
        min_log_relation: min_log,
        log_witness: decode(log_idx),
        min_angle_relation: min_ang,
        angle_witness: decode(ang_idx),
    };
    if !(seq.min_log_relation > RELATION_FLOOR) {
        return Err(SynthError::Dependent { minimum: seq.min_log_relation, witness: seq.log_witness });
    }
    Ok(seq)
}

/// Smaller magnitude wins; ties go to the smaller index so the result does
/// not depend on scheduling.
fn pick(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_are_right() {
        assert_eq!(primes(6), vec![2, 3, 5, 7, 11, 13]);
    }

    #[test]
    fn frozen_values() {
        let s = choose_alphas(3, 5).unwrap();
        assert_eq!(s.scale, 2.056166956838682);
        let want = [1.9893166972187442, 2.321860395447852, 2.966828068068298];
        for (a, w) in s.alphas.iter().zip(want) {
            assert!((a - w).abs() < 1e-15, "{a} vs {w}");
        }
        assert!((s.min_log_relation - 0.004618287475427252).abs() < 1e-12);
        let rel: f64 = s.log_witness.iter().zip(&s.alphas).map(|(&k, a)| k as f64 * a.ln()).sum();
        assert!((rel.abs() - s.min_log_relation).abs() < 1e-15);
        assert!(s.min_angle_relation > RELATION_FLOOR);
    }

    #[test]
    fn single_and_range() {
        let s = choose_alphas(1, 5).unwrap();
        assert_eq!(s.alphas.len(), 1);
        assert_eq!(s.scale, 2.0);
        for n in 1..=6 {
            let s = choose_alphas(n, 2).unwrap();
            assert!(s.alphas.iter().all(|&a| a > 1.0 && a < PI));
            assert!(s.alphas.windows(2).all(|w| w[0] < w[1]));
        }
        assert!(choose_alphas(0, 5).is_err());
        assert!(choose_alphas(3, 0).is_err());
    }
}
