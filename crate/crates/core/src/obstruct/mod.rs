//! Finite searches for the commuting-chain obstruction and the
//! counterexample family on the line.

mod matrix;
mod remark;

use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use matrix::{heisenberg_ball, heisenberg_elements, matrix_ball, parse_oracle, IntMatrix, MatrixOracle, UnipotentMatrix, MAX_BALL};
pub use remark::{remark_counterexample_suite, PowerResidual, RemarkReport, DEFAULT_REMARK_GRID};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObstructError {
    #[error("line {line}: {message}")]
    Input { line: usize, message: String },
    #[error("integer overflow while multiplying matrices")]
    Overflow,
    #[error("ball exceeds {0} elements")]
    TooLarge(usize),
}

/// A finite list of group elements with an exact commutation predicate.
pub trait CommutationOracle: Sync {
    fn len(&self) -> usize;
    fn label(&self, i: usize) -> String;
    fn is_identity(&self, i: usize) -> bool;
    fn commute(&self, a: usize, b: usize) -> bool;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Oracle backed by a precomputed commutation table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableOracle {
    labels: Vec<String>,
    identity: Option<usize>,
    table: Vec<bool>,
}

impl TableOracle {
    pub fn from_fn(labels: Vec<String>, identity: Option<usize>, commute: impl Fn(usize, usize) -> bool) -> Self {
        let n = labels.len();
        let table = (0..n * n).map(|k| commute(k / n, k % n)).collect();
        TableOracle { labels, identity, table }
    }
}

impl CommutationOracle for TableOracle {
    fn len(&self) -> usize {
        self.labels.len()
    }

    fn label(&self, i: usize) -> String {
        self.labels[i].clone()
    }

    fn is_identity(&self, i: usize) -> bool {
        self.identity == Some(i)
    }

    fn commute(&self, a: usize, b: usize) -> bool {
        self.table[a * self.labels.len() + b]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct Element {
    pub index: usize,
    pub label: String,
}

/// One re-checkable statement `[left, right] = 1` (or `≠ 1`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct Fact {
    pub left: String,
    pub right: String,
    pub commute: bool,
}

/// `[g₁,h₁] = [g₂,h₁] = [g₂,h₂] = 1` while `[g₁,h₂] ≠ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ObstructionCertificate {
    pub g1: Element,
    pub g2: Element,
    pub h1: Element,
    pub h2: Element,
    pub facts: Vec<Fact>,
    /// The search covered only the listed elements.
    pub scope: String,
}

impl ObstructionCertificate {
    fn new(o: &dyn CommutationOracle, g1: usize, g2: usize, h1: usize, h2: usize) -> Self {
        let el = |i| Element { index: i, label: o.label(i) };
        let fact = |a: usize, b: usize, c| Fact { left: o.label(a), right: o.label(b), commute: c };
        ObstructionCertificate {
            g1: el(g1),
            g2: el(g2),
            h1: el(h1),
            h2: el(h2),
            facts: vec![fact(g1, h1, true), fact(g2, h1, true), fact(g2, h2, true), fact(g1, h2, false)],
            scope: format!("exhaustive over the {} listed elements", o.len()),
        }
    }

    /// Re-asks the oracle all four facts, and checks the elements are
    /// distinct and non-identity.
    pub fn verify(&self, o: &dyn CommutationOracle) -> bool {
        let ids = [self.g1.index, self.g2.index, self.h1.index, self.h2.index];
        let in_range = ids.iter().all(|&i| i < o.len());
        in_range
            && ids.iter().enumerate().all(|(k, &i)| !o.is_identity(i) && !ids[..k].contains(&i))
            && o.commute(self.g1.index, self.h1.index)
            && o.commute(self.g2.index, self.h1.index)
            && o.commute(self.g2.index, self.h2.index)
            && !o.commute(self.g1.index, self.h2.index)
            && self.facts == Self::new(o, ids[0], ids[1], ids[2], ids[3]).facts
    }
}

/// First quadruple `(g₁, g₂, h₁, h₂)` of distinct non-identity elements, in
/// list order of `g₁`, then `h₁`, `g₂`, `h₂`, with
/// `[g₁,h₁] = [g₂,h₁] = [g₂,h₂] = 1 ≠ [g₁,h₂]`. `None` only means no such
/// quadruple among the listed elements.
pub fn find_centralizer_quadruple(o: &dyn CommutationOracle) -> Option<ObstructionCertificate> {
    let n = o.len();
    let live: Vec<usize> = (0..n).filter(|&i| !o.is_identity(i)).collect();
    let found = live.par_iter().find_map_first(|&g1| {
        for &h1 in &live {
            if h1 == g1 || !o.commute(g1, h1) {
                continue;
            }
            for &g2 in &live {
                if g2 == g1 || g2 == h1 || !o.commute(g2, h1) {
                    continue;
                }
                for &h2 in &live {
                    if h2 == g1 || h2 == g2 || h2 == h1 {
                        continue;
                    }
                    if o.commute(g2, h2) && !o.commute(g1, h2) {
                        return Some((g1, g2, h1, h2));
                    }
                }
            }
        }
        None
    });
    found.map(|(g1, g2, h1, h2)| ObstructionCertificate::new(o, g1, g2, h1, h2))
}

/// Result of looking for a nontrivial central element alongside a
/// non-commuting pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct CenterReport {
    pub nonabelian_with_center: bool,
    /// Non-identity elements commuting with every listed element.
    pub center: Vec<Element>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub non_commuting: Option<(Element, Element)>,
    pub scope: String,
}

pub fn center_nonabelian_check(o: &dyn CommutationOracle) -> CenterReport {
    let n = o.len();
    let el = |i| Element { index: i, label: o.label(i) };
    let center: Vec<Element> =
        (0..n).filter(|&z| !o.is_identity(z) && (0..n).all(|x| o.commute(z, x))).map(el).collect();
    let non_commuting =
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).find(|&(a, b)| !o.commute(a, b)).map(|(a, b)| (el(a), el(b)));
    CenterReport {
        nonabelian_with_center: !center.is_empty() && non_commuting.is_some(),
        center,
        non_commuting,
        scope: format!("center relative to the {n} listed elements"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> TableOracle {
        // Permutations of {0,1,2} as image arrays.
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        let compose = |p: [usize; 3], q: [usize; 3]| [p[q[0]], p[q[1]], p[q[2]]];
        let labels = perms.iter().map(|p| format!("{}{}{}", p[0], p[1], p[2])).collect();
        TableOracle::from_fn(labels, Some(0), |a, b| compose(perms[a], perms[b]) == compose(perms[b], perms[a]))
    }

    fn z2_ball(r: i64) -> TableOracle {
        let pts: Vec<(i64, i64)> = (-r..=r).flat_map(|a| (-r..=r).map(move |b| (a, b))).filter(|(a, b)| a.abs() + b.abs() <= r).collect();
        let id = pts.iter().position(|&p| p == (0, 0));
        TableOracle::from_fn(pts.iter().map(|p| format!("{p:?}")).collect(), id, |_, _| true)
    }

    #[test]
    fn heisenberg_certificate() {
        let b = heisenberg_ball(2).unwrap();
        let c = find_centralizer_quadruple(&b).unwrap();
        assert!(c.verify(&b));
        assert_eq!(
            [c.g1.label.as_str(), c.h1.label.as_str(), c.g2.label.as_str(), c.h2.label.as_str()],
            ["x", "x^-1", "z", "y"]
        );
        let r = center_nonabelian_check(&b);
        assert!(r.nonabelian_with_center);
        assert!(r.center.iter().any(|e| e.label == "z"));
    }

    #[test]
    fn abelian_and_free_have_none() {
        let z2 = z2_ball(3);
        assert!(find_centralizer_quadruple(&z2).is_none());
        assert!(!center_nonabelian_check(&z2).nonabelian_with_center);
        // Two elements, nothing commutes but each with itself.
        let free = TableOracle::from_fn(vec!["a".into(), "b".into()], None, |x, y| x == y);
        assert!(find_centralizer_quadruple(&free).is_none());
    }

    #[test]
    fn symmetric_group() {
        let s = s3();
        let r = center_nonabelian_check(&s);
        assert!(r.center.is_empty());
        assert!(!r.nonabelian_with_center);
    }

    #[test]
    fn center_implies_quadruple_one_step_out() {
        for r in 1..=3 {
            let small = heisenberg_ball(r).unwrap();
            if center_nonabelian_check(&small).nonabelian_with_center {
                let big = heisenberg_ball(r + 1).unwrap();
                assert!(find_centralizer_quadruple(&big).unwrap().verify(&big));
            }
        }
    }

    #[test]
    fn tampered_certificate_fails() {
        let b = heisenberg_ball(2).unwrap();
        let mut c = find_centralizer_quadruple(&b).unwrap();
        std::mem::swap(&mut c.g1, &mut c.h2);
        assert!(!c.verify(&b));
    }
}
