use std::borrow::Cow;
use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use schemars::{JsonSchema, Schema, SchemaGenerator};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest vertex count accepted from text input.
pub const MAX_VERTICES: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
    #[error("duplicate edge {0}–{1}")]
    Duplicate(usize, usize),
    #[error("graph on {0} vertices exceeds the limit of {MAX_VERTICES}")]
    TooLarge(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct GraphParseError {
    pub line: usize,
    pub message: String,
}

/// Finite simple graph on vertices `0..n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
struct GraphDocument {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        SimpleGraph { n, edges: BTreeSet::new() }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooLarge(n));
        }
        let mut g = SimpleGraph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = SimpleGraph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.edges.insert((u, v));
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = SimpleGraph::new(n);
        for u in 1..n {
            g.edges.insert((u - 1, u));
        }
        g
    }

    /// Vertices of `other` are renumbered after those of `self`.
    pub fn disjoint_union(&self, other: &SimpleGraph) -> SimpleGraph {
        let mut g = self.clone();
        g.n += other.n;
        g.edges.extend(other.edges.iter().map(|&(u, v)| (u + self.n, v + self.n)));
        g
    }

    /// Inserts `u–v`; an existing edge is an error.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::Loop(u));
        }
        for w in [u, v] {
            if w >= self.n {
                return Err(GraphError::OutOfRange { vertex: w, n: self.n });
            }
        }
        let e = (u.min(v), u.max(v));
        if !self.edges.insert(e) {
            return Err(GraphError::Duplicate(e.0, e.1));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Sorted adjacency lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Shortest path from `u` to `v` (smallest-index neighbours first), if any.
    pub fn shortest_path(&self, u: usize, v: usize) -> Option<Vec<usize>> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let adj = self.adjacency();
        let mut prev = vec![usize::MAX; self.n];
        prev[u] = u;
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            if x == v {
                break;
            }
            for &w in &adj[x] {
                if prev[w] == usize::MAX {
                    prev[w] = x;
                    queue.push_back(w);
                }
            }
        }
        if prev[v] == usize::MAX {
            return None;
        }
        let mut path = vec![v];
        let mut x = v;
        while x != u {
            x = prev[x];
            path.push(x);
        }
        path.reverse();
        Some(path)
    }

    /// Reads either format: DOT when the first token is `graph`, otherwise an edge list.
    pub fn parse(text: &str) -> Result<Self, GraphParseError> {
        let first = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with("//"));
        match first {
            Some(l) if l.starts_with("graph") || l.starts_with("strict") => Self::parse_dot(text),
            _ => Self::parse_edge_list(text),
        }
    }

    /// Edge-list format: an `n=<count>` header, then one `u v` pair per line.
    /// Blank lines and `#` comments are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphParseError> {
        let mut graph: Option<SimpleGraph> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| GraphParseError { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            match graph.as_mut() {
                None => {
                    let rest = content
                        .strip_prefix('n')
                        .map(str::trim_start)
                        .and_then(|r| r.strip_prefix('='))
                        .ok_or_else(|| err(format!("expected header `n=<count>`, found {content:?}")))?;
                    let n: usize = rest
                        .trim()
                        .parse()
                        .map_err(|_| err(format!("bad vertex count {:?}", rest.trim())))?;
                    if n > MAX_VERTICES {
                        return Err(err(GraphError::TooLarge(n).to_string()));
                    }
                    graph = Some(SimpleGraph::new(n));
                }
                Some(g) => {
                    let mut it = content.split_whitespace();
                    let vertex = |it: &mut std::str::SplitWhitespace<'_>| -> Result<usize, GraphParseError> {
                        let tok = it.next().ok_or_else(|| err(format!("expected `u v`, found {content:?}")))?;
                        tok.parse().map_err(|_| err(format!("bad vertex {tok:?}")))
                    };
                    let u = vertex(&mut it)?;
                    let v = vertex(&mut it)?;
                    if it.next().is_some() {
                        return Err(err(format!("expected exactly two vertices, found {content:?}")));
                    }
                    g.add_edge(u, v).map_err(|e| err(e.to_string()))?;
                }
            }
        }
        graph.ok_or(GraphParseError { line: 0, message: "missing `n=<count>` header".into() })
    }

    /// DOT subset: `graph [name] { ... }` with integer node ids, node
    /// statements `3;` and edge chains `0 -- 1 -- 2;`. No attributes.
    pub fn parse_dot(text: &str) -> Result<Self, GraphParseError> {
        let toks = dot_tokens(text)?;
        let mut i = 0;
        let at = |i: usize| toks.get(i).map(|t| t.line).unwrap_or_else(|| toks.last().map_or(1, |t| t.line));
        let err = |line: usize, message: String| GraphParseError { line, message };
        if toks.get(i).map(|t| t.text.as_str()) == Some("strict") {
            i += 1;
        }
        match toks.get(i).map(|t| t.text.as_str()) {
            Some("graph") => i += 1,
            Some("digraph") => return Err(err(at(i), "directed graphs are not supported".into())),
            _ => return Err(err(at(i), "expected `graph`".into())),
        }
        if toks.get(i).is_some_and(|t| t.text != "{") {
            i += 1; // graph name
        }
        if toks.get(i).map(|t| t.text.as_str()) != Some("{") {
            return Err(err(at(i), "expected `{`".into()));
        }
        i += 1;

        let mut max_id: Option<usize> = None;
        let mut edges: Vec<(usize, usize, usize)> = Vec::new();
        let node_id = |i: usize| -> Result<usize, GraphParseError> {
            let t = toks.get(i).ok_or_else(|| err(at(i), "unexpected end of input".into()))?;
            let v: usize = t.text.parse().map_err(|_| err(t.line, format!("expected a vertex number, found {:?}", t.text)))?;
            if v >= MAX_VERTICES {
                return Err(err(t.line, GraphError::TooLarge(v + 1).to_string()));
            }
            Ok(v)
        };
        loop {
            match toks.get(i).map(|t| t.text.as_str()) {
                None => return Err(err(at(i), "missing closing `}`".into())),
                Some("}") => {
                    i += 1;
                    break;
                }
                Some(";") => {
                    i += 1;
                    continue;
                }
                Some("[") => return Err(err(at(i), "attributes are not supported".into())),
                _ => {}
            }
            let mut prev = node_id(i)?;
            max_id = max_id.max(Some(prev));
            i += 1;
            while toks.get(i).map(|t| t.text.as_str()) == Some("--") {
                let line = at(i);
                i += 1;
                let next = node_id(i)?;
                max_id = max_id.max(Some(next));
                edges.push((prev, next, line));
                prev = next;
                i += 1;
            }
            match toks.get(i).map(|t| t.text.as_str()) {
                Some(";") => i += 1,
                Some("}") => {}
                Some("->") => return Err(err(at(i), "directed edges are not supported".into())),
                Some("[") => return Err(err(at(i), "attributes are not supported".into())),
                Some(other) if toks[i].line == toks[i - 1].line => {
                    return Err(err(at(i), format!("unexpected {other:?}")))
                }
                _ => {}
            }
        }
        if i != toks.len() {
            return Err(err(at(i), "trailing input after `}`".into()));
        }
        let mut g = SimpleGraph::new(max_id.map_or(0, |m| m + 1));
        for (u, v, line) in edges {
            g.add_edge(u, v).map_err(|e| err(line, e.to_string()))?;
        }
        Ok(g)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph G {\n");
        for v in 0..self.n {
            let _ = writeln!(s, "  {v};");
        }
        for (u, v) in self.edges() {
            let _ = writeln!(s, "  {u} -- {v};");
        }
        s.push_str("}\n");
        s
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("n={}\n", self.n);
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }
}

struct DotToken {
    text: String,
    line: usize,
}

fn dot_tokens(text: &str) -> Result<Vec<DotToken>, GraphParseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find("//") {
            Some(p) => &raw[..p],
            None => raw,
        };
        if content.trim_start().starts_with('#') {
            continue;
        }
        let bytes = content.as_bytes();
        let mut j = 0;
        while j < bytes.len() {
            let c = bytes[j];
            if c.is_ascii_whitespace() {
                j += 1;
            } else if matches!(c, b'{' | b'}' | b';' | b'[' | b']' | b',') {
                out.push(DotToken { text: (c as char).to_string(), line });
                j += 1;
            } else if c == b'-' && matches!(bytes.get(j + 1), Some(b'-') | Some(b'>')) {
                out.push(DotToken { text: content[j..j + 2].to_string(), line });
                j += 2;
            } else if c.is_ascii_alphanumeric() || c == b'_' {
                let s = j;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                out.push(DotToken { text: content[s..j].to_string(), line });
            } else {
                let ch = content[j..].chars().next().unwrap_or('?');
                return Err(GraphParseError { line, message: format!("unexpected character {ch:?}") });
            }
        }
    }
    Ok(out)
}

impl Serialize for SimpleGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphDocument { n: self.n, edges: self.edges().map(|(u, v)| [u, v]).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SimpleGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = GraphDocument::deserialize(d)?;
        SimpleGraph::from_edges(doc.n, doc.edges.into_iter().map(|[u, v]| (u, v)))
            .map_err(serde::de::Error::custom)
    }
}

impl JsonSchema for SimpleGraph {
    fn schema_name() -> Cow<'static, str> {
        "SimpleGraph".into()
    }

    fn json_schema(generator: &mut SchemaGenerator) -> Schema {
        GraphDocument::json_schema(generator)
    }
}
