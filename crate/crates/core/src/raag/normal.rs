//! Normal forms in the RAAG of a clique forest, which is the free product
//! of free abelian groups `ℤ^{m₁} ∗ ⋯ ∗ ℤ^{m_k}`, one factor per component.

use std::fmt;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{CliqueForest, RaagError};

/// A word in the vertex generators: `(vertex, exponent)` pairs read left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct RaagWord(pub Vec<(usize, i64)>);

impl RaagWord {
    pub fn inverse(&self) -> RaagWord {
        RaagWord(self.0.iter().rev().map(|&(v, e)| (v, -e)).collect())
    }

    pub fn concat(&self, other: &RaagWord) -> RaagWord {
        RaagWord(self.0.iter().chain(&other.0).copied().collect())
    }
}

/// One factor's contribution: an exponent vector over the component's vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
pub struct Syllable {
    pub component: usize,
    pub exponents: Vec<i64>,
}

/// Alternating syllable sequence: adjacent syllables lie in distinct
/// components and no syllable is zero. Empty exactly for the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct NormalForm {
    pub syllables: Vec<Syllable>,
}

impl NormalForm {
    pub fn is_trivial(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Normal form of the product `self · other`.
    pub fn mul(&self, other: &NormalForm) -> Result<NormalForm, RaagError> {
        let mut stack = self.syllables.clone();
        for s in &other.syllables {
            push_syllable(&mut stack, s.component, |ex| {
                for (a, b) in ex.iter_mut().zip(&s.exponents) {
                    *a = a.checked_add(*b).ok_or(RaagError::Overflow)?;
                }
                Ok(())
            }, s.exponents.len())?;
        }
        Ok(NormalForm { syllables: stack })
    }

    pub fn inverse(&self) -> NormalForm {
        NormalForm {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable { component: s.component, exponents: s.exponents.iter().map(|e| -e).collect() })
                .collect(),
        }
    }
}

fn push_syllable(
    stack: &mut Vec<Syllable>,
    component: usize,
    add: impl FnOnce(&mut Vec<i64>) -> Result<(), RaagError>,
    width: usize,
) -> Result<(), RaagError> {
    match stack.last_mut() {
        Some(top) if top.component == component => {
            add(&mut top.exponents)?;
            if top.exponents.iter().all(|&e| e == 0) {
                stack.pop();
            }
        }
        _ => {
            let mut exponents = vec![0; width];
            add(&mut exponents)?;
            if exponents.iter().any(|&e| e != 0) {
                stack.push(Syllable { component, exponents });
            }
        }
    }
    Ok(())
}

/// Reduces `w` by merging letters of one component into an exponent vector
/// and deleting syllables that become zero, until neighbouring syllables lie
/// in different components.
pub fn normal_form(w: &RaagWord, forest: &CliqueForest) -> Result<NormalForm, RaagError> {
    let layout = forest.layout();
    let mut stack: Vec<Syllable> = Vec::new();
    for &(v, e) in &w.0 {
        if e == 0 {
            continue;
        }
        let &(c, slot) = layout
            .get(v)
            .ok_or(RaagError::VertexOutOfRange { vertex: v, n: layout.len() })?;
        let width = forest.components[c].len();
        push_syllable(&mut stack, c, |ex| {
            ex[slot] = ex[slot].checked_add(e).ok_or(RaagError::Overflow)?;
            Ok(())
        }, width)?;
    }
    Ok(NormalForm { syllables: stack })
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("1");
        }
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "C{}(", s.component)?;
            for (j, e) in s.exponents.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raag::{is_clique_forest, SimpleGraph};
    use proptest::prelude::*;

    fn k2k2() -> CliqueForest {
        let g = SimpleGraph::complete(2).disjoint_union(&SimpleGraph::complete(2));
        is_clique_forest(&g).unwrap()
    }

    #[test]
    fn examples() {
        let f = k2k2();
        // [x0, x1] inside one clique collapses.
        let w = RaagWord(vec![(0, 1), (1, 1), (0, -1), (1, -1)]);
        assert!(normal_form(&w, &f).unwrap().is_trivial());
        // [x0, x2] across components: four syllables.
        let w = RaagWord(vec![(0, 1), (2, 1), (0, -1), (2, -1)]);
        let nf = normal_form(&w, &f).unwrap();
        assert_eq!(nf.syllables.len(), 4);
        assert_eq!(nf.to_string(), "C0(1, 0) C1(1, 0) C0(-1, 0) C1(-1, 0)");
        let w = RaagWord(vec![(0, 2), (0, -2)]);
        assert!(normal_form(&w, &f).unwrap().is_trivial());
        // Cancelling a middle syllable merges its neighbours.
        let w = RaagWord(vec![(0, 1), (2, 1), (2, -1), (1, 3)]);
        assert_eq!(normal_form(&w, &f).unwrap().to_string(), "C0(1, 3)");
    }

    #[test]
    fn errors() {
        let f = k2k2();
        assert!(matches!(
            normal_form(&RaagWord(vec![(9, 1)]), &f),
            Err(RaagError::VertexOutOfRange { vertex: 9, .. })
        ));
        let w = RaagWord(vec![(0, i64::MAX), (1, 1), (0, 1)]);
        assert!(matches!(normal_form(&w, &f), Err(RaagError::Overflow)));
    }

    fn word() -> impl Strategy<Value = RaagWord> {
        proptest::collection::vec((0usize..4, prop_oneof![-3i64..0, 1i64..4]), 0..24).prop_map(RaagWord)
    }

    proptest! {
        #[test]
        fn idempotent_congruence(w1 in word(), w2 in word()) {
            let f = k2k2();
            let n1 = normal_form(&w1, &f).unwrap();
            let n2 = normal_form(&w2, &f).unwrap();
            let as_word = |n: &NormalForm| RaagWord(n.syllables.iter().flat_map(|s| {
                let comp = f.components[s.component].clone();
                comp.into_iter().zip(s.exponents.clone())
            }).collect());
            prop_assert_eq!(normal_form(&as_word(&n1), &f).unwrap(), n1.clone());
            let joint = normal_form(&w1.concat(&w2), &f).unwrap();
            prop_assert_eq!(&joint, &n1.mul(&n2).unwrap());
            prop_assert_eq!(joint, normal_form(&as_word(&n1).concat(&as_word(&n2)), &f).unwrap());
            prop_assert!(normal_form(&w1.concat(&w1.inverse()), &f).unwrap().is_trivial());
            prop_assert_eq!(normal_form(&w1.inverse(), &f).unwrap(), n1.inverse());
        }
    }
}
