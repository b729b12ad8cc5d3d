//! Compact text syntax for expressions:
//!
//! ```text
//! id(I) | id(S1) | id(R)
//! mobius(α) | rot(θ) | shear(a) | shift(c)
//! perturbed(I, poly(c, stage, k, [t0, t1, ...]), ...)
//! perturbed(S1, trig(c, stage, freq, phase), ...)
//! compose(e1, e2, ...) | inv(e) | pow(e, k)
//! ```

use std::fmt;

use thiserror::Error;

use super::{Bump, BumpPoly, DiffeoError, DiffeoExpr, Manifold, Node, TrigBump, MAX_DEPTH};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("at byte {pos}: {message}")]
pub struct ParseExprError {
    pub pos: usize,
    pub message: String,
}

pub(super) fn write_node(f: &mut fmt::Formatter<'_>, m: Manifold, node: &Node) -> fmt::Result {
    match node {
        Node::Identity => write!(f, "id({m})"),
        Node::Mobius { alpha } => write!(f, "mobius({alpha:?})"),
        Node::Rotation { theta } => write!(f, "rot({theta:?})"),
        Node::SineShear { a } => write!(f, "shear({a:?})"),
        Node::Translation { offset } => write!(f, "shift({offset:?})"),
        Node::Perturbed { bumps } => {
            write!(f, "perturbed({m}")?;
            for b in bumps {
                match b {
                    Bump::Poly(p) => {
                        write!(f, ", poly({:?}, {}, {}, [", p.coeff, p.stage, p.k)?;
                        for (i, t) in p.tail.iter().enumerate() {
                            if i > 0 {
                                f.write_str(", ")?;
                            }
                            write!(f, "{t:?}")?;
                        }
                        f.write_str("])")?;
                    }
                    Bump::Trig(t) => {
                        write!(f, ", trig({:?}, {}, {}, {:?})", t.coeff, t.stage, t.freq, t.phase)?
                    }
                }
            }
            f.write_str(")")
        }
        Node::Compose { parts } => {
            f.write_str("compose(")?;
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_node(f, m, p)?;
            }
            f.write_str(")")
        }
        Node::Inverse { of } => {
            f.write_str("inv(")?;
            write_node(f, m, of)?;
            f.write_str(")")
        }
        Node::Power { of, exponent } => {
            f.write_str("pow(")?;
            write_node(f, m, of)?;
            write!(f, ", {exponent})")
        }
    }
}

pub(super) fn parse(src: &str) -> Result<DiffeoExpr, ParseExprError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let e = p.expr(0)?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

struct Parser<'s> {
    src: &'s [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: impl Into<String>) -> ParseExprError {
        ParseExprError { pos: self.pos, message: message.into() }
    }

    fn lift(&self, e: DiffeoError) -> ParseExprError {
        self.err(e.to_string())
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<&str, ParseExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a name"));
        }
        // Only ASCII was consumed.
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default())
    }

    fn number_token(&mut self) -> Result<&str, ParseExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && matches!(self.src[self.pos], b'0'..=b'9' | b'.' | b'e' | b'E' | b'+' | b'-')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default())
    }

    fn real(&mut self) -> Result<f64, ParseExprError> {
        let start = self.pos;
        let tok = self.number_token()?.to_string();
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(ParseExprError { pos: start, message: format!("bad number {tok:?}") }),
        }
    }

    fn int<T: std::str::FromStr>(&mut self) -> Result<T, ParseExprError> {
        let start = self.pos;
        let tok = self.number_token()?.to_string();
        tok.parse::<T>()
            .map_err(|_| ParseExprError { pos: start, message: format!("bad integer {tok:?}") })
    }

    fn manifold(&mut self) -> Result<Manifold, ParseExprError> {
        let name = self.ident()?.to_string();
        name.parse().map_err(|e: String| self.err(e))
    }

    fn expr(&mut self, depth: usize) -> Result<DiffeoExpr, ParseExprError> {
        if depth > MAX_DEPTH {
            return Err(self.err("expression nested too deeply"));
        }
        let name = self.ident()?.to_string();
        self.expect(b'(')?;
        let e = match name.as_str() {
            "id" => {
                let m = self.manifold()?;
                DiffeoExpr::identity(m)
            }
            "mobius" => {
                let v = self.real()?;
                DiffeoExpr::mobius(v).map_err(|e| self.lift(e))?
            }
            "rot" => {
                let v = self.real()?;
                DiffeoExpr::rotation(v).map_err(|e| self.lift(e))?
            }
            "shear" => {
                let v = self.real()?;
                DiffeoExpr::sine_shear(v).map_err(|e| self.lift(e))?
            }
            "shift" => {
                let v = self.real()?;
                DiffeoExpr::translation(v).map_err(|e| self.lift(e))?
            }
            "perturbed" => {
                let m = self.manifold()?;
                let mut bumps = Vec::new();
                while self.eat(b',') {
                    bumps.push(self.bump()?);
                }
                DiffeoExpr::perturbed(m, bumps).map_err(|e| self.lift(e))?
            }
            "compose" => {
                let mut parts = vec![self.expr(depth + 1)?];
                while self.eat(b',') {
                    parts.push(self.expr(depth + 1)?);
                }
                DiffeoExpr::compose(&parts).map_err(|e| self.lift(e))?
            }
            "inv" => {
                let inner = self.expr(depth + 1)?;
                DiffeoExpr::new(inner.manifold(), Node::Inverse { of: Box::new(inner.node().clone()) })
                    .map_err(|e| self.lift(e))?
            }
            "pow" => {
                let inner = self.expr(depth + 1)?;
                self.expect(b',')?;
                let k: i64 = self.int()?;
                let node = Node::Power { of: Box::new(inner.node().clone()), exponent: k };
                DiffeoExpr::new(inner.manifold(), node).map_err(|e| self.lift(e))?
            }
            other => return Err(self.err(format!("unknown form {other:?}"))),
        };
        self.expect(b')')?;
        Ok(e)
    }

    fn bump(&mut self) -> Result<Bump, ParseExprError> {
        let kind = self.ident()?.to_string();
        self.expect(b'(')?;
        let coeff = self.real()?;
        self.expect(b',')?;
        let stage: u32 = self.int()?;
        self.expect(b',')?;
        let b = match kind.as_str() {
            "poly" => {
                let k: u32 = self.int()?;
                self.expect(b',')?;
                self.expect(b'[')?;
                let mut tail = Vec::new();
                if !self.eat(b']') {
                    tail.push(self.real()?);
                    while self.eat(b',') {
                        if tail.len() > BumpPoly::MAX_TAIL {
                            return Err(self.err("bump tail polynomial too long"));
                        }
                        tail.push(self.real()?);
                    }
                    self.expect(b']')?;
                }
                Bump::Poly(BumpPoly { coeff, stage, k, tail })
            }
            "trig" => {
                let freq: u32 = self.int()?;
                self.expect(b',')?;
                let phase = self.real()?;
                Bump::Trig(TrigBump { coeff, stage, freq, phase })
            }
            other => return Err(self.err(format!("unknown bump shape {other:?}"))),
        };
        self.expect(b')')?;
        Ok(b)
    }
}
