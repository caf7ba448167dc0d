//! File formats: DIMACS max-flow instances, plain edge lists, and demand files.
//!
//! Vertices are 1-indexed in all file formats and 0-indexed in memory.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::graph::{DemandVector, Edge, Graph, GraphError};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn malformed(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Malformed { line, msg: msg.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dimacs,
    EdgeList,
}

/// Picks a format from the file extension: `.dimacs` and `.max` parse as
/// DIMACS, anything else as an edge list.
pub fn detect_format(path: &Path) -> GraphFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("dimacs") | Some("max") => GraphFormat::Dimacs,
        _ => GraphFormat::EdgeList,
    }
}

/// Loads a graph; for DIMACS files also returns the designated `(s, t)` pair
/// when present.
pub fn load_graph(
    path: &Path,
    format: GraphFormat,
) -> Result<(Graph, Option<(usize, usize)>), ParseError> {
    let text = fs::read_to_string(path)?;
    match format {
        GraphFormat::Dimacs => parse_dimacs(&text),
        GraphFormat::EdgeList => Ok((parse_edge_list(&text)?, None)),
    }
}

/// DIMACS max-flow format: `c` comments, `p max <n> <m>`, `n <v> s|t` node
/// designators, and `a <u> <v> <cap>` arcs (read as undirected edges here).
pub fn parse_dimacs(text: &str) -> Result<(Graph, Option<(usize, usize)>), ParseError> {
    let mut n = None;
    let mut edges = Vec::new();
    let mut source = None;
    let mut sink = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("p") => {
                let kind = parts.next().ok_or_else(|| malformed(lineno, "missing problem kind"))?;
                if kind != "max" {
                    return Err(malformed(lineno, format!("unsupported problem kind '{kind}'")));
                }
                let nv: usize = parse_field(parts.next(), lineno, "vertex count")?;
                let _m: usize = parse_field(parts.next(), lineno, "edge count")?;
                n = Some(nv);
            }
            Some("n") => {
                let v: usize = parse_field(parts.next(), lineno, "vertex id")?;
                let role = parts.next().ok_or_else(|| malformed(lineno, "missing node role"))?;
                let v0 = v.checked_sub(1).ok_or_else(|| malformed(lineno, "vertex ids are 1-indexed"))?;
                match role {
                    "s" => source = Some(v0),
                    "t" => sink = Some(v0),
                    other => return Err(malformed(lineno, format!("unknown node role '{other}'"))),
                }
            }
            Some("a") => {
                let u: usize = parse_field(parts.next(), lineno, "tail")?;
                let v: usize = parse_field(parts.next(), lineno, "head")?;
                let cap: f64 = parse_field(parts.next(), lineno, "capacity")?;
                if u == 0 || v == 0 {
                    return Err(malformed(lineno, "vertex ids are 1-indexed"));
                }
                edges.push(Edge::new(u - 1, v - 1, cap));
            }
            Some(other) => {
                return Err(malformed(lineno, format!("unknown line type '{other}'")));
            }
            None => {}
        }
    }
    let n = n.ok_or_else(|| malformed(0, "missing 'p max' header"))?;
    let g = Graph::new(n, edges)?;
    let st = match (source, sink) {
        (Some(s), Some(t)) => Some((s, t)),
        _ => None,
    };
    Ok((g, st))
}

/// Edge list: one `u v cap` triple per line, 1-indexed; `#` starts a comment.
/// The vertex count is the largest id mentioned.
pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut edges = Vec::new();
    let mut n = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let u: usize = parse_field(parts.next(), lineno, "tail")?;
        let v: usize = parse_field(parts.next(), lineno, "head")?;
        let cap: f64 = parse_field(parts.next(), lineno, "capacity")?;
        if u == 0 || v == 0 {
            return Err(malformed(lineno, "vertex ids are 1-indexed"));
        }
        n = n.max(u).max(v);
        edges.push(Edge::new(u - 1, v - 1, cap));
    }
    Ok(Graph::new(n, edges)?)
}

/// Demand file: `vertex value` lines (1-indexed); unlisted vertices get zero.
/// The result must balance.
pub fn parse_demands(text: &str, n: usize) -> Result<DemandVector, ParseError> {
    let mut values = vec![0.0; n];
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let v: usize = parse_field(parts.next(), lineno, "vertex")?;
        let x: f64 = parse_field(parts.next(), lineno, "value")?;
        if v == 0 || v > n {
            return Err(malformed(lineno, format!("vertex {v} out of range 1..={n}")));
        }
        values[v - 1] += x;
    }
    Ok(DemandVector::new(values)?)
}

pub fn load_demands(path: &Path, n: usize) -> Result<DemandVector, ParseError> {
    let text = fs::read_to_string(path)?;
    parse_demands(&text, n)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for e in g.edges() {
        out.push_str(&format!("{} {} {}\n", e.tail + 1, e.head + 1, fmt_cap(e.capacity)));
    }
    out
}

pub fn write_dimacs(g: &Graph, st: Option<(usize, usize)>) -> String {
    let mut out = format!("p max {} {}\n", g.vertex_count(), g.edge_count());
    if let Some((s, t)) = st {
        out.push_str(&format!("n {} s\n", s + 1));
        out.push_str(&format!("n {} t\n", t + 1));
    }
    for e in g.edges() {
        out.push_str(&format!("a {} {} {}\n", e.tail + 1, e.head + 1, fmt_cap(e.capacity)));
    }
    out
}

pub fn write_demands(b: &DemandVector) -> String {
    let mut out = String::new();
    for (v, x) in b.values().iter().enumerate() {
        if *x != 0.0 {
            out.push_str(&format!("{} {}\n", v + 1, x));
        }
    }
    out
}

fn parse_field<T: std::str::FromStr>(
    field: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, ParseError> {
    field
        .ok_or_else(|| malformed(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| malformed(line, format!("bad {what}")))
}

fn fmt_cap(c: f64) -> String {
    if c == c.trunc() && c.abs() < 1e15 {
        format!("{}", c as i64)
    } else {
        format!("{c}")
    }
}
