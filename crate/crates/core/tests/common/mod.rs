//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

/// A letter `vertex^{±1}`.
pub type Sym = (usize, i8);

/// Definitional check: any two vertices joined by a path are adjacent.
/// Components come from a union–find, not from the library.
#[allow(clippy::needless_range_loop)]
pub fn brute_clique_forest(n: usize, adj: &[Vec<bool>]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for u in 0..n {
        for v in u + 1..n {
            if adj[u][v] {
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                parent[a] = b;
            }
        }
    }
    (0..n).all(|u| (u + 1..n).all(|v| find(&mut parent, u) != find(&mut parent, v) || adj[u][v]))
}

/// Deletes a pair `x^ε … x^-ε` whose interior letters all commute with `x`
/// until none is left; the word is trivial exactly when this empties it.
pub fn pair_cancel_trivial(word: &[Sym], commute: impl Fn(usize, usize) -> bool) -> bool {
    let mut w = word.to_vec();
    'outer: loop {
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                let (x, e) = w[i];
                if w[j].0 == x && w[j].1 == -e {
                    w.remove(j);
                    w.remove(i);
                    continue 'outer;
                }
                if !commute(x, w[j].0) {
                    break;
                }
            }
        }
        return w.is_empty();
    }
}

/// Breadth-first search over all words reachable by swapping adjacent
/// commuting letters and deleting adjacent inverse pairs.
pub fn bfs_trivial(word: &[Sym], commute: impl Fn(usize, usize) -> bool) -> bool {
    let mut seen: HashSet<Vec<Sym>> = HashSet::new();
    let mut queue = VecDeque::from([word.to_vec()]);
    seen.insert(word.to_vec());
    while let Some(w) = queue.pop_front() {
        if w.is_empty() {
            return true;
        }
        for i in 0..w.len().saturating_sub(1) {
            let (a, b) = (w[i], w[i + 1]);
            let mut next = None;
            if a.0 == b.0 && a.1 == -b.1 {
                let mut v = w.clone();
                v.drain(i..i + 2);
                next = Some(v);
            }
            for cand in next.into_iter().chain((a.0 != b.0 && commute(a.0, b.0)).then(|| {
                let mut v = w.clone();
                v.swap(i, i + 1);
                v
            })) {
                if seen.insert(cand.clone()) {
                    queue.push_back(cand);
                }
            }
        }
    }
    false
}

/// Decodes `code` as a word of length `len` over `2·verts` symbols.
pub fn decode_word(mut code: u64, len: usize, verts: usize) -> Vec<Sym> {
    let a = 2 * verts as u64;
    (0..len)
        .map(|_| {
            let s = (code % a) as usize;
            code /= a;
            (s / 2, if s.is_multiple_of(2) { 1 } else { -1 })
        })
        .collect()
}
