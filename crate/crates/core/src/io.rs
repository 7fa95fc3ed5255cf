//! Graph files and kinematic points: parsing and emission.
//!
//! Text format (one statement per line, `#` starts a comment):
//!
//! ```text
//! vertices: 3
//! momenta: 2          # optional; defaults to the largest index used
//! e 1: 1 2 mass m1
//! e 2: 1 3
//! e 3: 2 3
//! leg: 1 q1
//! leg: 2 q2
//! ```
//!
//! Vertices are numbered `1..=vertices`.  Edge labels must be distinct and
//! lie in `1..=64`.  The JSON form is
//! `{"vertices": 3, "edges": [[1,2,1],[1,3,0],[2,3,0]], "legs": [[1,1],[2,2]]}`
//! where the third edge entry is the mass index (0 for massless) and edges
//! are labelled `1..=N` in order; an optional `"momenta"` field fixes `Q`.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, FeynmanGraph, Leg, VertexId};
use crate::symanzik::KinPoint;

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

/// Parses either format, dispatching on the first non-blank character.
pub fn parse_graph(input: &str) -> Result<FeynmanGraph> {
    if input.trim_start().starts_with('{') {
        parse_graph_json(input)
    } else {
        parse_graph_text(input)
    }
}

/// A whitespace-separated token with its 1-based column.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        let sep = c.is_whitespace() || c == ':';
        match (sep, start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
        if c == ':' {
            out.push((i + 1, ":"));
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_index(line: usize, (col, tok): (usize, &str), prefix: &str, what: &str) -> Result<u32> {
    let digits = tok.strip_prefix(prefix).unwrap_or(tok);
    digits
        .parse::<u32>()
        .map_err(|_| perr(line, col, format!("expected {what}, found '{tok}'")))
}

struct TextGraph {
    vertices: Option<u32>,
    momenta: Option<u32>,
    edges: Vec<Edge>,
    legs: Vec<(VertexId, u32, usize, usize)>,
}

/// Parses the line-oriented text format.
pub fn parse_graph_text(input: &str) -> Result<FeynmanGraph> {
    let mut tg = TextGraph { vertices: None, momenta: None, edges: Vec::new(), legs: Vec::new() };
    let mut edge_positions = Vec::new();
    for (ln, raw) in input.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        let expect_colon = |i: usize| -> Result<()> {
            match toks.get(i) {
                Some((_, ":")) => Ok(()),
                Some(&(c, t)) => Err(perr(ln, c, format!("expected ':', found '{t}'"))),
                None => Err(perr(ln, line.len() + 1, "expected ':'")),
            }
        };
        let arity = |n: usize| -> Result<()> {
            if toks.len() < n {
                return Err(perr(ln, line.len() + 1, "unexpected end of line"));
            }
            if toks.len() > n {
                let (c, t) = toks[n];
                return Err(perr(ln, c, format!("unexpected token '{t}'")));
            }
            Ok(())
        };
        match toks[0].1 {
            "vertices" | "momenta" => {
                expect_colon(1)?;
                arity(3)?;
                let n = parse_index(ln, toks[2], "", "a count")?;
                let slot = if toks[0].1 == "vertices" { &mut tg.vertices } else { &mut tg.momenta };
                if slot.is_some() {
                    return Err(perr(ln, toks[0].0, format!("duplicate '{}' statement", toks[0].1)));
                }
                *slot = Some(n);
            }
            "e" => {
                if toks.len() < 2 {
                    return Err(perr(ln, line.len() + 1, "expected an edge label"));
                }
                let label = parse_index(ln, toks[1], "", "an edge label")?;
                expect_colon(2)?;
                let n = if toks.len() > 5 { 7 } else { 5 };
                arity(n)?;
                let u = parse_index(ln, toks[3], "", "a vertex")?;
                let v = parse_index(ln, toks[4], "", "a vertex")?;
                let mass = if n == 7 {
                    if toks[5].1 != "mass" {
                        return Err(perr(ln, toks[5].0, format!("expected 'mass', found '{}'", toks[5].1)));
                    }
                    let k = parse_index(ln, toks[6], "m", "a mass index m<k>")?;
                    if k == 0 {
                        return Err(perr(ln, toks[6].0, "mass indices start at 1"));
                    }
                    Some(k)
                } else {
                    None
                };
                edge_positions.push((ln, toks[1].0, toks[3].0, toks[4].0));
                tg.edges.push(Edge { label, u, v, mass });
            }
            "leg" => {
                expect_colon(1)?;
                arity(4)?;
                let v = parse_index(ln, toks[2], "", "a vertex")?;
                let q = parse_index(ln, toks[3], "q", "a momentum q<i>")?;
                if q == 0 {
                    return Err(perr(ln, toks[3].0, "momentum indices start at 1"));
                }
                tg.legs.push((v, q, ln, toks[2].0));
            }
            other => {
                return Err(perr(ln, toks[0].0, format!("unknown statement '{other}'")));
            }
        }
    }
    let n = tg
        .vertices
        .ok_or_else(|| perr(input.lines().count().max(1), 1, "missing 'vertices: N' statement"))?;
    let mut labels = BTreeSet::new();
    for (e, &(ln, lc, uc, vc)) in tg.edges.iter().zip(&edge_positions) {
        if !labels.insert(e.label) {
            return Err(perr(ln, lc, format!("duplicate edge label {}", e.label)));
        }
        if e.label == 0 || e.label > crate::graph::EdgeSet::MAX_LABEL {
            return Err(perr(ln, lc, format!("edge label {} out of range", e.label)));
        }
        for (w, c) in [(e.u, uc), (e.v, vc)] {
            if w == 0 || w > n {
                return Err(perr(ln, c, format!("vertex {w} out of range 1..={n}")));
            }
        }
    }
    for &(v, _, ln, c) in &tg.legs {
        if v == 0 || v > n {
            return Err(perr(ln, c, format!("vertex {v} out of range 1..={n}")));
        }
    }
    let max_q = tg.legs.iter().map(|l| l.1).max().unwrap_or(0);
    let q = tg.momenta.unwrap_or(max_q);
    if q < max_q {
        return Err(Error::InvalidGraph(format!("momentum index {max_q} exceeds 'momenta: {q}'")));
    }
    let legs = tg.legs.iter().map(|&(vertex, q, _, _)| Leg { vertex, momenta: vec![q] }).collect();
    let g = FeynmanGraph::from_parts((1..=n).collect(), tg.edges, legs, q);
    g.validate()?;
    Ok(g)
}

/// The JSON graph document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: u32,
    pub edges: Vec<[u32; 3]>,
    #[serde(default)]
    pub legs: Vec<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momenta: Option<u32>,
}

/// Parses the JSON format.
pub fn parse_graph_json(input: &str) -> Result<FeynmanGraph> {
    let f: GraphFile =
        serde_json::from_str(input).map_err(|e| perr(e.line(), e.column(), e.to_string()))?;
    graph_from_file(&f)
}

/// Converts a JSON document into a graph, checking ranges.
pub fn graph_from_file(f: &GraphFile) -> Result<FeynmanGraph> {
    let n = f.vertices;
    let in_range = |v: u32| v >= 1 && v <= n;
    let mut edges = Vec::with_capacity(f.edges.len());
    for (i, &[u, v, m]) in f.edges.iter().enumerate() {
        if !in_range(u) || !in_range(v) {
            return Err(Error::InvalidGraph(format!("edge {} has a vertex outside 1..={n}", i + 1)));
        }
        edges.push((u, v, if m == 0 { None } else { Some(m) }));
    }
    let mut legs = Vec::with_capacity(f.legs.len());
    for &[v, q] in &f.legs {
        if !in_range(v) {
            return Err(Error::InvalidGraph(format!("leg at vertex {v} outside 1..={n}")));
        }
        if q == 0 {
            return Err(Error::InvalidGraph("momentum indices start at 1".into()));
        }
        legs.push((v, q));
    }
    let max_q = legs.iter().map(|l| l.1).max().unwrap_or(0);
    let q = f.momenta.unwrap_or(max_q);
    if q < max_q {
        return Err(Error::InvalidGraph(format!("momentum index {max_q} exceeds momenta = {q}")));
    }
    FeynmanGraph::with_momenta(1..=n, &edges, &legs, q)
}

/// Vertex renumbering onto `1..=|V|` in increasing order.
fn vertex_numbering(g: &FeynmanGraph) -> impl Fn(VertexId) -> u32 + '_ {
    move |v| g.vertices().binary_search(&v).map(|i| i as u32 + 1).unwrap_or(0)
}

fn needs_momenta_line(g: &FeynmanGraph) -> bool {
    let max_q = g.legs().iter().flat_map(|l| l.momenta.iter().copied()).max().unwrap_or(0);
    g.n_momenta() != max_q
}

/// Emits the text format.  Vertices are renumbered `1..=|V|` in increasing
/// order; for graphs produced by [`parse_graph_text`] the output parses back
/// to an identical graph.
pub fn emit_graph_text(g: &FeynmanGraph) -> String {
    let num = vertex_numbering(g);
    let mut s = format!("vertices: {}\n", g.n_vertices());
    if needs_momenta_line(g) {
        s.push_str(&format!("momenta: {}\n", g.n_momenta()));
    }
    for e in g.edges() {
        s.push_str(&format!("e {}: {} {}", e.label, num(e.u), num(e.v)));
        if let Some(k) = e.mass {
            s.push_str(&format!(" mass m{k}"));
        }
        s.push('\n');
    }
    for l in g.legs() {
        for q in &l.momenta {
            s.push_str(&format!("leg: {} q{}\n", num(l.vertex), q));
        }
    }
    s
}

/// The JSON document of a graph.  Edge labels are not stored: the graph is
/// first relabelled `1..=N` in label order.
pub fn graph_to_file(g: &FeynmanGraph) -> GraphFile {
    let num = vertex_numbering(g);
    GraphFile {
        vertices: g.n_vertices() as u32,
        edges: g.edges().iter().map(|e| [num(e.u), num(e.v), e.mass.unwrap_or(0)]).collect(),
        legs: g
            .legs()
            .iter()
            .flat_map(|l| l.momenta.iter().map(|&q| [num(l.vertex), q]).collect::<Vec<_>>())
            .collect(),
        momenta: needs_momenta_line(g).then(|| g.n_momenta()),
    }
}

/// Emits the JSON format (compact, one line, with trailing newline).
pub fn emit_graph_json(g: &FeynmanGraph) -> String {
    let mut s = serde_json::to_string(&graph_to_file(g)).expect("graph documents serialise");
    s.push('\n');
    s
}

/// Parses a kinematic point `"s1_1=1, s1_2=0.5, msq1=2"`; values may be
/// complex written as `re+imi` (e.g. `1+0.5i`).  Unspecified entries are 0.
pub fn parse_point(text: &str, n_momenta: u32) -> Result<KinPoint> {
    let mut p = KinPoint { n_momenta, ..KinPoint::default() };
    let mut offset = 0;
    for item in text.split(',') {
        let col = offset + 1 + (item.len() - item.trim_start().len());
        offset += item.len() + 1;
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let (name, value) =
            item.split_once('=').ok_or_else(|| perr(1, col, format!("expected name=value, found '{item}'")))?;
        let (name, value) = (name.trim(), value.trim());
        let value = parse_complex(value).ok_or_else(|| perr(1, col, format!("invalid number '{value}'")))?;
        if let Some(k) = name.strip_prefix("msq") {
            let k: u32 = k.parse().map_err(|_| perr(1, col, format!("invalid mass variable '{name}'")))?;
            if k == 0 {
                return Err(perr(1, col, "mass indices start at 1"));
            }
            p.msq.insert(k, value);
        } else if let Some(ij) = name.strip_prefix('s') {
            let parsed = ij.split_once('_').and_then(|(i, j)| Some((i.parse::<u32>().ok()?, j.parse::<u32>().ok()?)));
            let (i, j) = parsed.ok_or_else(|| perr(1, col, format!("invalid invariant '{name}'")))?;
            let (i, j) = (i.min(j), i.max(j));
            if i == 0 || j + 1 > n_momenta {
                return Err(perr(1, col, format!("invariant '{name}' outside s_ij with 1 <= i <= j <= {}", n_momenta.saturating_sub(1))));
            }
            p.s.insert((i, j), value);
        } else {
            return Err(perr(1, col, format!("unknown variable '{name}'")));
        }
    }
    Ok(p)
}

fn parse_complex(s: &str) -> Option<Complex64> {
    if let Ok(x) = s.parse::<f64>() {
        return Some(Complex64::new(x, 0.0));
    }
    let body = s.strip_suffix('i')?;
    // Split at the last sign that is not part of an exponent or the leading sign.
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    match split {
        Some(i) => {
            let re = body[..i].parse::<f64>().ok()?;
            let im_s = &body[i..];
            let im = match im_s {
                "+" => 1.0,
                "-" => -1.0,
                _ => im_s.parse::<f64>().ok()?,
            };
            Some(Complex64::new(re, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                _ => body.parse::<f64>().ok()?,
            };
            Some(Complex64::new(0.0, im))
        }
    }
}

/// Serialises a point as `"s1_1=…, msq1=…"` (real parts only when the
/// imaginary parts vanish).
pub fn emit_point(p: &KinPoint) -> String {
    let fmt = |c: &Complex64| {
        if c.im == 0.0 {
            format!("{}", c.re)
        } else {
            format!("{}{:+}i", c.re, c.im)
        }
    };
    let mut parts: Vec<String> = p.s.iter().map(|((i, j), v)| format!("s{i}_{j}={}", fmt(v))).collect();
    parts.extend(p.msq.iter().map(|(k, v)| format!("msq{k}={}", fmt(v))));
    parts.join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    const DUNCE: &str = "vertices: 3\ne 1: 1 2 mass m1\ne 2: 1 3\ne 3: 2 3\ne 4: 2 3\nleg: 1 q1\nleg: 2 q2\n";

    #[test]
    fn dunce_text_round_trip() {
        let g = parse_graph(DUNCE).unwrap();
        assert_eq!((g.n_vertices(), g.n_edges(), g.n_momenta(), g.n_masses()), (3, 4, 2, 1));
        assert_eq!(emit_graph_text(&g), DUNCE);
        let j = emit_graph_json(&g);
        assert_eq!(parse_graph(&j).unwrap(), g);
        assert_eq!(j, "{\"vertices\":3,\"edges\":[[1,2,1],[1,3,0],[2,3,0],[2,3,0]],\"legs\":[[1,1],[2,2]]}\n");
    }

    #[test]
    fn trivial_graph() {
        let g = parse_graph("vertices: 1\n").unwrap();
        assert_eq!((g.n_vertices(), g.n_edges()), (1, 0));
        assert_eq!(parse_graph("{\"vertices\": 1, \"edges\": []}").unwrap(), g);
    }

    #[test]
    fn legs_in_two_components_are_rejected() {
        let t = "vertices: 4\ne 1: 1 2\ne 2: 3 4\nleg: 1 q1\nleg: 3 q1\n";
        assert!(matches!(parse_graph(t), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_graph("vertices: 2\ne 1: 1 x\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 8)),
            other => panic!("{other:?}"),
        }
        match parse_graph("vertices: 2\nedge 1: 1 2\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 1)),
            other => panic!("{other:?}"),
        }
        match parse_graph("vertices: 2\ne 1: 1 3\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 8)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_graph("{\"vertices\": 2,\n \"edges\": [[1,2]]}"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn comments_and_explicit_momenta() {
        let g = parse_graph("# bubble\nvertices: 2\nmomenta: 2 # extra\ne 1: 1 2\ne 2: 1 2\n").unwrap();
        assert_eq!(g.n_momenta(), 2);
        assert_eq!(parse_graph(&emit_graph_text(&g)).unwrap(), g);
        assert_eq!(parse_graph(&emit_graph_json(&g)).unwrap(), g);
    }

    #[test]
    fn points() {
        let p = parse_point("s1_1=1, msq1=2.5, s1_2=1-0.5i", 3).unwrap();
        assert_eq!(p.s[&(1, 2)], Complex64::new(1.0, -0.5));
        assert_eq!(p.msq[&1], Complex64::new(2.5, 0.0));
        assert_eq!(parse_point(&emit_point(&p), 3).unwrap(), p);
        assert!(parse_point("s2_2=1", 2).is_err());
        assert!(parse_point("x=1", 2).is_err());
    }
}
