//! Exact integer matrix groups: the unipotent Heisenberg group and finite
//! balls in groups generated by invertible 3×3 integer matrices.

use std::collections::{HashMap, VecDeque};

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{CommutationOracle, ObstructError};

/// Largest ball the enumerators will build.
pub const MAX_BALL: usize = 1 << 20;

/// `[[1, a, c], [0, 1, b], [0, 0, 1]]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
pub struct UnipotentMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl UnipotentMatrix {
    pub const IDENTITY: Self = UnipotentMatrix { a: 0, b: 0, c: 0 };
    pub const X: Self = UnipotentMatrix { a: 1, b: 0, c: 0 };
    pub const Y: Self = UnipotentMatrix { a: 0, b: 1, c: 0 };
    pub const Z: Self = UnipotentMatrix { a: 0, b: 0, c: 1 };

    pub fn checked_mul(self, o: Self) -> Option<Self> {
        Some(UnipotentMatrix {
            a: self.a.checked_add(o.a)?,
            b: self.b.checked_add(o.b)?,
            c: self.c.checked_add(o.c)?.checked_add(self.a.checked_mul(o.b)?)?,
        })
    }

    pub fn checked_inverse(self) -> Option<Self> {
        Some(UnipotentMatrix {
            a: self.a.checked_neg()?,
            b: self.b.checked_neg()?,
            c: self.a.checked_mul(self.b)?.checked_sub(self.c)?,
        })
    }

    pub fn to_matrix(self) -> IntMatrix {
        IntMatrix([[1, self.a, self.c], [0, 1, self.b], [0, 0, 1]])
    }
}

/// A 3×3 integer matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
pub struct IntMatrix(pub [[i64; 3]; 3]);

impl IntMatrix {
    pub const IDENTITY: Self = IntMatrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]]);

    pub fn checked_mul(&self, o: &Self) -> Option<Self> {
        let mut out = [[0i64; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut s = 0i64;
                for k in 0..3 {
                    s = s.checked_add(self.0[i][k].checked_mul(o.0[k][j])?)?;
                }
                *cell = s;
            }
        }
        Some(IntMatrix(out))
    }

    /// Product compared exactly in 128-bit arithmetic, immune to overflow.
    pub fn commutes_with(&self, o: &Self) -> bool {
        (0..3).all(|i| {
            (0..3).all(|j| {
                let ab: i128 = (0..3).map(|k| self.0[i][k] as i128 * o.0[k][j] as i128).sum();
                let ba: i128 = (0..3).map(|k| o.0[i][k] as i128 * self.0[k][j] as i128).sum();
                ab == ba
            })
        })
    }

    pub fn checked_det(&self) -> Option<i64> {
        let m = &self.0;
        let minor = |r1: usize, r2: usize, c1: usize, c2: usize| -> Option<i64> {
            m[r1][c1].checked_mul(m[r2][c2])?.checked_sub(m[r1][c2].checked_mul(m[r2][c1])?)
        };
        m[0][0]
            .checked_mul(minor(1, 2, 1, 2)?)?
            .checked_sub(m[0][1].checked_mul(minor(1, 2, 0, 2)?)?)?
            .checked_add(m[0][2].checked_mul(minor(1, 2, 0, 1)?)?)
    }

    /// Integer inverse when the determinant is `±1`.
    pub fn checked_inverse(&self) -> Option<Self> {
        let det = self.checked_det()?;
        if det != 1 && det != -1 {
            return None;
        }
        let m = &self.0;
        let mut out = [[0i64; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                // Cofactor of (j, i), giving the adjugate.
                let r: Vec<usize> = (0..3).filter(|&r| r != j).collect();
                let c: Vec<usize> = (0..3).filter(|&c| c != i).collect();
                let minor = m[r[0]][c[0]].checked_mul(m[r[1]][c[1]])?.checked_sub(m[r[0]][c[1]].checked_mul(m[r[1]][c[0]])?)?;
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                *cell = minor.checked_mul(sign * det)?;
            }
        }
        Some(IntMatrix(out))
    }
}

/// Labelled integer matrices with exact commutation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct MatrixOracle {
    pub labels: Vec<String>,
    pub matrices: Vec<IntMatrix>,
}

impl CommutationOracle for MatrixOracle {
    fn len(&self) -> usize {
        self.matrices.len()
    }

    fn label(&self, i: usize) -> String {
        self.labels[i].clone()
    }

    fn is_identity(&self, i: usize) -> bool {
        self.matrices[i] == IntMatrix::IDENTITY
    }

    fn commute(&self, a: usize, b: usize) -> bool {
        self.matrices[a].commutes_with(&self.matrices[b])
    }
}

fn word_label(letters: &[(usize, i32)], names: &[String]) -> String {
    if letters.is_empty() {
        return "1".into();
    }
    letters
        .iter()
        .map(|&(g, p)| if p == 1 { names[g].clone() } else { format!("{}^{p}", names[g]) })
        .collect::<Vec<_>>()
        .join(" ")
}

fn extend(letters: &[(usize, i32)], g: usize, sign: i32) -> Vec<(usize, i32)> {
    let mut out = letters.to_vec();
    match out.last_mut() {
        Some(l) if l.0 == g => {
            l.1 += sign;
            if l.1 == 0 {
                out.pop();
            }
        }
        _ => out.push((g, sign)),
    }
    out
}

/// Breadth-first ball: all products of at most `radius` generators and
/// inverses, each element labelled by the first word that reached it. Moves
/// are tried in the order `g₁, g₁⁻¹, g₂, g₂⁻¹, …`.
fn ball<T: Copy + Eq + std::hash::Hash>(
    identity: T,
    moves: &[T],
    names: &[String],
    radius: usize,
    mul: impl Fn(T, T) -> Option<T>,
) -> Result<Vec<(T, String)>, ObstructError> {
    let mut seen: HashMap<T, ()> = HashMap::new();
    let mut out = vec![(identity, "1".to_string())];
    seen.insert(identity, ());
    let mut frontier: VecDeque<(T, Vec<(usize, i32)>)> = VecDeque::from([(identity, Vec::new())]);
    for _ in 0..radius {
        let mut next = VecDeque::new();
        while let Some((m, word)) = frontier.pop_front() {
            for (mi, &mv) in moves.iter().enumerate() {
                let prod = mul(m, mv).ok_or(ObstructError::Overflow)?;
                if seen.insert(prod, ()).is_none() {
                    let w = extend(&word, mi / 2, if mi % 2 == 0 { 1 } else { -1 });
                    out.push((prod, word_label(&w, names)));
                    if out.len() > MAX_BALL {
                        return Err(ObstructError::TooLarge(MAX_BALL));
                    }
                    next.push_back((prod, w));
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// Ball of the given word radius in the integral Heisenberg group over the
/// generators `x, y, z` with `z = [x, y]`.
pub fn heisenberg_elements(radius: usize) -> Result<Vec<(UnipotentMatrix, String)>, ObstructError> {
    if radius == 0 {
        return Err(ObstructError::Input { line: 0, message: "radius must be at least 1".into() });
    }
    let gens = [UnipotentMatrix::X, UnipotentMatrix::Y, UnipotentMatrix::Z];
    let mut moves = Vec::new();
    for g in gens {
        moves.push(g);
        moves.push(g.checked_inverse().expect("unit generators"));
    }
    let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    ball(UnipotentMatrix::IDENTITY, &moves, &names, radius, UnipotentMatrix::checked_mul)
}

pub fn heisenberg_ball(radius: usize) -> Result<MatrixOracle, ObstructError> {
    let els = heisenberg_elements(radius)?;
    Ok(MatrixOracle {
        labels: els.iter().map(|(_, l)| l.clone()).collect(),
        matrices: els.iter().map(|(m, _)| m.to_matrix()).collect(),
    })
}

/// Ball in the group generated by invertible integer matrices.
pub fn matrix_ball(gens: &[(String, IntMatrix)], radius: usize) -> Result<MatrixOracle, ObstructError> {
    let mut moves = Vec::new();
    for (name, g) in gens {
        let inv = g.checked_inverse().ok_or_else(|| ObstructError::Input {
            line: 0,
            message: format!("generator {name} has no integer inverse"),
        })?;
        moves.push(*g);
        moves.push(inv);
    }
    let names: Vec<String> = gens.iter().map(|(n, _)| n.clone()).collect();
    let els = ball(IntMatrix::IDENTITY, &moves, &names, radius, |a, b| a.checked_mul(&b))?;
    Ok(MatrixOracle { labels: els.iter().map(|(_, l)| l.clone()).collect(), matrices: els.into_iter().map(|(m, _)| m).collect() })
}

/// Parses an oracle description.
///
/// Each non-comment line is either `label: r1c1 r1c2 r1c3; r2c1 …; r3c1 …`
/// or `radius R`. Without a radius line the labelled matrices are the
/// elements; with one they are generators and the ball of radius `R` is
/// built. `#` starts a comment.
pub fn parse_oracle(text: &str) -> Result<MatrixOracle, ObstructError> {
    let mut entries: Vec<(String, IntMatrix)> = Vec::new();
    let mut radius: Option<(usize, usize)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| ObstructError::Input { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("radius") {
            if radius.is_some() {
                return Err(err("duplicate radius line".into()));
            }
            let r: usize = rest.trim().parse().map_err(|_| err(format!("bad radius {:?}", rest.trim())))?;
            if r == 0 {
                return Err(err("radius must be at least 1".into()));
            }
            radius = Some((r, line));
            continue;
        }
        let (label, body) = content.split_once(':').ok_or_else(|| err("expected `label: matrix` or `radius R`".into()))?;
        let label = label.trim();
        if label.is_empty() || label.chars().any(|c| c.is_whitespace() || c == ':') {
            return Err(err(format!("bad label {label:?}")));
        }
        if entries.iter().any(|(l, _)| l == label) {
            return Err(err(format!("duplicate label {label:?}")));
        }
        let rows: Vec<&str> = body.split(';').collect();
        if rows.len() != 3 {
            return Err(err(format!("expected 3 rows separated by `;`, found {}", rows.len())));
        }
        let mut m = [[0i64; 3]; 3];
        for (r, row) in rows.iter().enumerate() {
            let cells: Vec<&str> = row.split_whitespace().collect();
            if cells.len() != 3 {
                return Err(err(format!("row {} needs 3 integers", r + 1)));
            }
            for (c, cell) in cells.iter().enumerate() {
                m[r][c] = cell.parse().map_err(|_| err(format!("bad integer {cell:?}")))?;
            }
        }
        entries.push((label.to_string(), IntMatrix(m)));
    }
    match radius {
        Some((r, line)) => {
            if entries.is_empty() {
                return Err(ObstructError::Input { line, message: "radius given without generators".into() });
            }
            matrix_ball(&entries, r).map_err(|e| match e {
                ObstructError::Input { message, .. } => ObstructError::Input { line, message },
                other => other,
            })
        }
        None => {
            let (labels, matrices) = entries.into_iter().unzip();
            Ok(MatrixOracle { labels, matrices })
        }
    }
}

impl MatrixOracle {
    /// Text form accepted by [`parse_oracle`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (l, m) in self.labels.iter().zip(&self.matrices) {
            let label: String = l.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect();
            let rows: Vec<String> =
                m.0.iter().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")).collect();
            s.push_str(&format!("{label}: {}\n", rows.join("; ")));
        }
        s
    }
}
