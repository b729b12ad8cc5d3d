use std::fmt;

use super::{ensure_same, CompiledMap, DiffeoError, DiffeoExpr, Manifold};

/// `generator^power` with `power != 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub power: i32,
}

impl Letter {
    pub fn new(generator: usize, power: i32) -> Self {
        Letter { generator, power }
    }

    pub fn inverse(self) -> Self {
        Letter { generator: self.generator, power: -self.power }
    }
}

/// A word over indexed generators, read as a composition: the rightmost
/// letter acts first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of letters counted with multiplicity (`g^3` has length 3).
    pub fn len(&self) -> usize {
        self.letters.iter().map(|l| l.power.unsigned_abs() as usize).sum()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    /// No zero powers and no two adjacent letters on the same generator.
    pub fn is_reduced(&self) -> bool {
        self.letters.iter().all(|l| l.power != 0)
            && self.letters.windows(2).all(|w| w[0].generator != w[1].generator)
    }

    /// Parses `name`, `name^k` tokens separated by whitespace or `*`.
    /// The literal `1` (or an empty string) is the empty word.
    pub fn parse(text: &str, names: &[String]) -> Result<Word, DiffeoError> {
        let mut letters = Vec::new();
        for tok in text.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
            if tok == "1" {
                continue;
            }
            let (name, power) = match tok.split_once('^') {
                Some((n, p)) => {
                    let p: i32 = p.parse().map_err(|_| {
                        DiffeoError::InvalidParameter(format!("bad exponent in {tok:?}"))
                    })?;
                    (n, p)
                }
                None => (tok, 1),
            };
            let generator = names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| DiffeoError::Unassigned(name.to_string()))?;
            if power != 0 {
                letters.push(Letter { generator, power });
            }
        }
        Ok(Word { letters })
    }

    pub fn display<'w>(&'w self, names: &'w [String]) -> impl fmt::Display + 'w {
        WordDisplay { word: self, names }
    }
}

struct WordDisplay<'w> {
    word: &'w Word,
    names: &'w [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.letters.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.word.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match self.names.get(l.generator) {
                Some(n) => f.write_str(n)?,
                None => write!(f, "x{}", l.generator)?,
            }
            if l.power != 1 {
                write!(f, "^{}", l.power)?;
            }
        }
        Ok(())
    }
}

/// Named generators and the maps assigned to them, all on one manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    manifold: Manifold,
    names: Vec<String>,
    maps: Vec<DiffeoExpr>,
}

impl Assignment {
    pub fn new(entries: Vec<(String, DiffeoExpr)>) -> Result<Self, DiffeoError> {
        let manifold = entries
            .first()
            .map(|(_, e)| e.manifold())
            .ok_or_else(|| DiffeoError::InvalidParameter("empty assignment".into()))?;
        let mut names = Vec::with_capacity(entries.len());
        let mut maps = Vec::with_capacity(entries.len());
        for (name, e) in entries {
            ensure_same(manifold, e.manifold())?;
            if names.contains(&name) {
                return Err(DiffeoError::InvalidParameter(format!("duplicate generator {name:?}")));
            }
            names.push(name);
            maps.push(e);
        }
        Ok(Assignment { manifold, names, maps })
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn maps(&self) -> &[DiffeoExpr] {
        &self.maps
    }

    pub fn get(&self, name: &str) -> Option<&DiffeoExpr> {
        self.names.iter().position(|n| n == name).map(|i| &self.maps[i])
    }

    pub fn compile(&self) -> Result<CompiledAssignment<'_>, DiffeoError> {
        let forward = self.maps.iter().map(CompiledMap::new).collect::<Result<_, _>>()?;
        let backward = self.maps.iter().map(CompiledMap::inverse_of).collect::<Result<_, _>>()?;
        Ok(CompiledAssignment { manifold: self.manifold, names: &self.names, forward, backward })
    }
}

/// Generator maps and their inverses, compiled once for repeated word
/// evaluation.
#[derive(Clone, Debug)]
pub struct CompiledAssignment<'a> {
    manifold: Manifold,
    names: &'a [String],
    forward: Vec<CompiledMap<'a>>,
    backward: Vec<CompiledMap<'a>>,
}

impl<'a> CompiledAssignment<'a> {
    pub fn from_maps(manifold: Manifold, names: &'a [String], forward: Vec<CompiledMap<'a>>, backward: Vec<CompiledMap<'a>>) -> Self {
        CompiledAssignment { manifold, names, forward, backward }
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    /// Applies `word` to `x` on the lift, rightmost letter first.
    pub fn eval_word(&self, word: &Word, x: f64) -> Result<f64, DiffeoError> {
        let mut y = x;
        for l in word.letters.iter().rev() {
            let table = if l.power > 0 { &self.forward } else { &self.backward };
            let map = table.get(l.generator).ok_or_else(|| {
                DiffeoError::Unassigned(
                    self.names.get(l.generator).cloned().unwrap_or_else(|| format!("x{}", l.generator)),
                )
            })?;
            for _ in 0..l.power.unsigned_abs() {
                y = map.eval_lift(y)?;
            }
        }
        Ok(y)
    }

    /// Largest derivative of any generator or inverse generator over `grid`
    /// points, i.e. a grid estimate of the letters' Lipschitz constant.
    pub fn lipschitz_estimate(&self, xs: impl Iterator<Item = f64> + Clone) -> Result<f64, DiffeoError> {
        let mut best: f64 = 0.0;
        for m in self.forward.iter().chain(&self.backward) {
            for x in xs.clone() {
                best = best.max(m.eval_with_derivative(x)?.1.abs());
            }
        }
        Ok(best)
    }
}

/// Evaluates `word` under `assignment` at `x`; on the circle the lifted value
/// is returned.
pub fn word_evaluate(word: &Word, assignment: &Assignment, x: f64) -> Result<f64, DiffeoError> {
    super::check_domain(assignment.manifold(), x)?;
    assignment.compile()?.eval_word(word, x)
}
