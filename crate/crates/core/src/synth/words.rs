//! Words in `f, g₁, …, g_N` and their normal forms in `⟨f⟩ ∗ ℤᴺ`.

use std::collections::HashMap;

use super::SynthError;
use crate::diffeo::{Letter, Word};
use crate::raag::{normal_form, CliqueForest, NormalForm, RaagWord};

/// Generator index of `f`; `gₙ` has index `n`.
pub const F: usize = 0;
/// Largest word list [`enumerate_words`] will build.
pub const MAX_WORDS: u64 = 20_000_000;

/// `f, g1, …, gN`.
pub fn generator_names(num_g: usize) -> Vec<String> {
    std::iter::once("f".to_string()).chain((1..=num_g).map(|n| format!("g{n}"))).collect()
}

/// Number of freely reduced words of length `1..=max_len` over `num_g + 1`
/// generators and their inverses.
pub fn reduced_word_count(num_g: usize, max_len: usize) -> Option<u64> {
    let a = 2 * (num_g as u64 + 1);
    let mut per_len = a;
    let mut total = 0u64;
    for _ in 0..max_len {
        total = total.checked_add(per_len)?;
        per_len = per_len.checked_mul(a - 1)?;
    }
    Some(total)
}

/// Every freely reduced word of length at most `max_len` in `f^{±1}`,
/// `g₁^{±1}`, …, `g_N^{±1}` that contains `f` or `f⁻¹`, shortest first and
/// lexicographic within a length under the letter order
/// `f < f⁻¹ < g₁ < g₁⁻¹ < g₂ < …`.
pub fn enumerate_words(num_g: usize, max_len: usize) -> Result<Vec<Word>, SynthError> {
    if num_g == 0 || max_len == 0 {
        return Err(SynthError::InvalidOption("enumerate_words needs num_g ≥ 1 and max_len ≥ 1".into()));
    }
    match reduced_word_count(num_g, max_len) {
        Some(c) if c <= MAX_WORDS => {}
        c => return Err(SynthError::TooLarge { what: "word list", count: c.unwrap_or(u64::MAX) }),
    }
    let alphabet = 2 * (num_g + 1);
    let mut out = Vec::new();
    let mut layer: Vec<Vec<u16>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * (alphabet - 1));
        for w in &layer {
            for s in 0..alphabet as u16 {
                if w.last().is_some_and(|&t| t ^ 1 == s) {
                    continue;
                }
                let mut v = w.clone();
                v.push(s);
                next.push(v);
            }
        }
        out.extend(next.iter().filter(|w| w.iter().any(|&s| s < 2)).map(|w| symbols_to_word(w)));
        layer = next;
    }
    Ok(out)
}

fn symbols_to_word(symbols: &[u16]) -> Word {
    let mut letters: Vec<Letter> = Vec::new();
    for &s in symbols {
        let generator = (s / 2) as usize;
        let sign = if s % 2 == 0 { 1 } else { -1 };
        match letters.last_mut() {
            Some(l) if l.generator == generator => l.power += sign,
            _ => letters.push(Letter::new(generator, sign)),
        }
    }
    letters.retain(|l| l.power != 0);
    Word::new(letters)
}

/// The forest with `f` alone in one clique and all `gₙ` in another, whose
/// group is `⟨f⟩ ∗ ℤᴺ`.
pub fn word_forest(num_g: usize) -> CliqueForest {
    CliqueForest { components: vec![vec![F], (1..=num_g).collect()] }
}

pub fn word_normal_form(w: &Word, forest: &CliqueForest) -> Result<NormalForm, SynthError> {
    let rw = RaagWord(w.letters.iter().map(|l| (l.generator, l.power as i64)).collect());
    Ok(normal_form(&rw, forest)?)
}

/// How an enumerated word relates to the synthesis targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordClass {
    /// Same element as target `i`.
    Target(usize),
    /// Trivial in `⟨f⟩ ∗ ℤᴺ`.
    Trivial,
    /// Equal to a nonzero element of `ℤᴺ`, i.e. a product of the `gₙ` alone.
    PureG,
}

/// Enumerated words grouped by the element they represent. The first word
/// met for each element containing `f` becomes that element's target.
#[derive(Clone, Debug)]
pub struct TargetPlan {
    pub words: Vec<Word>,
    pub classes: Vec<WordClass>,
    pub targets: Vec<usize>,
}

impl TargetPlan {
    pub fn new(num_g: usize, words: Vec<Word>) -> Result<Self, SynthError> {
        let forest = word_forest(num_g);
        let mut seen: HashMap<NormalForm, usize> = HashMap::new();
        let mut classes = Vec::with_capacity(words.len());
        let mut targets = Vec::new();
        for (i, w) in words.iter().enumerate() {
            let nf = word_normal_form(w, &forest)?;
            let class = if nf.is_trivial() {
                WordClass::Trivial
            } else if nf.syllables.iter().all(|s| s.component != 0) {
                WordClass::PureG
            } else {
                let next = targets.len();
                let t = *seen.entry(nf).or_insert(next);
                if t == next {
                    targets.push(i);
                }
                WordClass::Target(t)
            };
            classes.push(class);
        }
        Ok(TargetPlan { words, classes, targets })
    }

    pub fn target_words(&self) -> impl Iterator<Item = &Word> + '_ {
        self.targets.iter().map(|&i| &self.words[i])
    }

    pub fn count(&self, pred: impl Fn(WordClass) -> bool) -> usize {
        self.classes.iter().filter(|&&c| pred(c)).count()
    }
}
