//! Canonical keys for Feynman graphs modulo isomorphism and the equivalence
//! relation (merging legs at a vertex, dropping isolated vertices).
//!
//! A key is a printable string that decodes back to a representative graph.
//! Each connected component is canonicalised separately by colour refinement
//! followed by an exhaustive search over the vertex orderings compatible with
//! the refined colour classes; the component keys are then sorted and joined
//! with `" & "`.  The empty graph has key `"1"`.
//!
//! Component key grammar: `v<n>|<u>-<v>[m<k>],...|<vertex>:q<i>[+q<j>...],...|Q<q>`
//! with 0-based vertex positions.  The leg and `Q` parts are present only if
//! the component carries momenta.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{Edge, FeynmanGraph, Leg, VertexId};

/// Key of the empty graph (the unit of the Hopf algebra).
pub const UNIT_KEY: &str = "1";

/// Canonical key of a graph.
pub fn canonical_key(g: &FeynmanGraph) -> String {
    let n = g.normalize_equivalence();
    if n.n_edges() == 0 {
        return UNIT_KEY.to_string();
    }
    let mut keys: Vec<String> = components(&n).iter().map(component_key).collect();
    keys.sort();
    keys.join(" & ")
}

/// Splits a key into component keys (the unit has none).
pub fn key_components(key: &str) -> Vec<&str> {
    if key == UNIT_KEY {
        Vec::new()
    } else {
        key.split(" & ").collect()
    }
}

/// Key of the product (disjoint union) of two keyed graphs.
pub fn multiply_keys(a: &str, b: &str) -> String {
    let mut parts: Vec<&str> = key_components(a);
    parts.extend(key_components(b));
    if parts.is_empty() {
        return UNIT_KEY.to_string();
    }
    parts.sort();
    parts.join(" & ")
}

/// Connected components as separate graphs (legs stay with their component).
fn components(g: &FeynmanGraph) -> Vec<FeynmanGraph> {
    let cm = g.component_map_of(g.all_edges());
    let mut groups: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
    for (&v, &r) in &cm {
        groups.entry(r).or_default().insert(v);
    }
    groups
        .values()
        .map(|vs| {
            let edges: Vec<Edge> = g.edges().iter().filter(|e| vs.contains(&e.u)).cloned().collect();
            let legs: Vec<Leg> = g.legs().iter().filter(|l| vs.contains(&l.vertex)).cloned().collect();
            let q = if legs.is_empty() { 0 } else { g.n_momenta() };
            FeynmanGraph::from_parts(vs.iter().copied().collect(), edges, legs, q)
        })
        .collect()
}

type Encoding = (Vec<(usize, usize, u32)>, Vec<(usize, Vec<u32>)>);

/// Canonical key of a connected graph.
fn component_key(g: &FeynmanGraph) -> String {
    let verts: Vec<VertexId> = g.vertices().to_vec();
    let index: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = verts.len();
    let mut leg_label: Vec<Vec<u32>> = vec![Vec::new(); n];
    for l in g.legs() {
        leg_label[index[&l.vertex]].extend(l.momenta.iter().copied());
    }
    for l in &mut leg_label {
        l.sort_unstable();
    }
    let edges: Vec<(usize, usize, u32)> = g
        .edges()
        .iter()
        .map(|e| (index[&e.u], index[&e.v], e.mass.unwrap_or(0)))
        .collect();

    // Colour refinement with canonical (data-derived) colours.
    let mut loops: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(u, v, m) in &edges {
        if u == v {
            loops[u].push(m);
        }
    }
    for l in &mut loops {
        l.sort_unstable();
    }
    let mut colour: Vec<usize> = rank(&(0..n).map(|i| (leg_label[i].clone(), loops[i].clone())).collect::<Vec<_>>());
    loop {
        let sigs: Vec<(usize, Vec<(usize, u32)>)> = (0..n)
            .map(|i| {
                let mut nb: Vec<(usize, u32)> = Vec::new();
                for &(u, v, m) in &edges {
                    if u == v {
                        continue;
                    }
                    if u == i {
                        nb.push((colour[v], m));
                    } else if v == i {
                        nb.push((colour[u], m));
                    }
                }
                nb.sort_unstable();
                (colour[i], nb)
            })
            .collect();
        let new = rank(&sigs);
        let classes_old = colour.iter().collect::<BTreeSet<_>>().len();
        let classes_new = new.iter().collect::<BTreeSet<_>>().len();
        colour = new;
        if classes_new == classes_old {
            break;
        }
    }

    // Cells in colour order; each vertex gets a position within its cell.
    let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in colour.iter().enumerate() {
        cells.entry(c).or_default().push(i);
    }
    let cells: Vec<Vec<usize>> = cells.into_values().collect();
    let mut best: Option<Encoding> = None;
    let mut pos = vec![0usize; n];
    search(&cells, 0, 0, &mut pos, &edges, &leg_label, &mut best);
    let (enc_edges, enc_legs) = best.expect("at least one ordering");

    let mut s = format!("v{n}|");
    s.push_str(
        &enc_edges
            .iter()
            .map(|&(u, v, m)| if m == 0 { format!("{u}-{v}") } else { format!("{u}-{v}m{m}") })
            .collect::<Vec<_>>()
            .join(","),
    );
    if !enc_legs.is_empty() {
        s.push('|');
        s.push_str(
            &enc_legs
                .iter()
                .map(|(v, qs)| {
                    format!("{v}:{}", qs.iter().map(|q| format!("q{q}")).collect::<Vec<_>>().join("+"))
                })
                .collect::<Vec<_>>()
                .join(","),
        );
        s.push_str(&format!("|Q{}", g.n_momenta()));
    }
    s
}

fn rank<T: Ord + Clone>(items: &[T]) -> Vec<usize> {
    let sorted: Vec<T> = items.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    items.iter().map(|x| sorted.binary_search(x).unwrap()).collect()
}

fn encode(pos: &[usize], edges: &[(usize, usize, u32)], legs: &[Vec<u32>]) -> Encoding {
    let mut e: Vec<(usize, usize, u32)> = edges
        .iter()
        .map(|&(u, v, m)| {
            let (a, b) = (pos[u], pos[v]);
            (a.min(b), a.max(b), m)
        })
        .collect();
    e.sort_unstable();
    let mut l: Vec<(usize, Vec<u32>)> = legs
        .iter()
        .enumerate()
        .filter(|(_, q)| !q.is_empty())
        .map(|(i, q)| (pos[i], q.clone()))
        .collect();
    l.sort();
    (e, l)
}

fn search(
    cells: &[Vec<usize>],
    cell: usize,
    offset: usize,
    pos: &mut Vec<usize>,
    edges: &[(usize, usize, u32)],
    legs: &[Vec<u32>],
    best: &mut Option<Encoding>,
) {
    if cell == cells.len() {
        let enc = encode(pos, edges, legs);
        if best.as_ref().map_or(true, |b| enc < *b) {
            *best = Some(enc);
        }
        return;
    }
    let members = &cells[cell];
    let mut perm: Vec<usize> = (0..members.len()).collect();
    loop {
        for (k, &m) in members.iter().enumerate() {
            pos[m] = offset + perm[k];
        }
        search(cells, cell + 1, offset + members.len(), pos, edges, legs, best);
        if !next_permutation(&mut perm) {
            break;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Decodes a key into a representative graph (edges labelled `1..N` in key
/// order, components placed on consecutive vertex ranges).
pub fn decode_key(key: &str) -> Result<FeynmanGraph> {
    let bad = |m: &str| Error::Parse { line: 1, column: 1, message: format!("bad graph key {key:?}: {m}") };
    let mut vertices = Vec::new();
    let mut edges: Vec<(VertexId, VertexId, Option<u32>)> = Vec::new();
    let mut legs: Vec<(VertexId, Vec<u32>)> = Vec::new();
    let mut n_momenta = 0;
    let mut shift: VertexId = 0;
    for comp in key_components(key) {
        let parts: Vec<&str> = comp.split('|').collect();
        let n: VertexId = parts
            .first()
            .and_then(|p| p.strip_prefix('v'))
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| bad("vertex count"))?;
        vertices.extend(shift..shift + n);
        let edge_part = parts.get(1).ok_or_else(|| bad("edge list"))?;
        for e in edge_part.split(',').filter(|s| !s.is_empty()) {
            let (uv, mass) = match e.split_once('m') {
                Some((uv, m)) => (uv, Some(m.parse::<u32>().map_err(|_| bad("mass"))?)),
                None => (e, None),
            };
            let (u, v) = uv.split_once('-').ok_or_else(|| bad("edge"))?;
            let u: VertexId = u.parse().map_err(|_| bad("edge end"))?;
            let v: VertexId = v.parse().map_err(|_| bad("edge end"))?;
            if u >= n || v >= n {
                return Err(bad("edge end out of range"));
            }
            edges.push((u + shift, v + shift, mass));
        }
        if let Some(leg_part) = parts.get(2) {
            for l in leg_part.split(',').filter(|s| !s.is_empty()) {
                let (v, qs) = l.split_once(':').ok_or_else(|| bad("leg"))?;
                let v: VertexId = v.parse().map_err(|_| bad("leg vertex"))?;
                let qs: Vec<u32> = qs
                    .split('+')
                    .map(|q| q.strip_prefix('q').and_then(|q| q.parse().ok()).ok_or_else(|| bad("momentum")))
                    .collect::<Result<_>>()?;
                legs.push((v + shift, qs));
            }
            n_momenta = parts
                .get(3)
                .and_then(|p| p.strip_prefix('Q'))
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| bad("momentum count"))?;
        }
        shift += n;
    }
    let edges: Vec<Edge> = edges
        .iter()
        .enumerate()
        .map(|(i, &(u, v, mass))| Edge { label: i as u32 + 1, u, v, mass })
        .collect();
    let legs: Vec<Leg> = legs.into_iter().map(|(vertex, momenta)| Leg { vertex, momenta }).collect();
    // Letters of tensor words may carry masses in a component without legs,
    // so only the structural part of the key is checked here.
    Ok(FeynmanGraph::from_parts(vertices, edges, legs, n_momenta))
}

/// Edge and loop numbers `(N, h)` of a keyed graph.
pub fn key_bidegree(key: &str) -> (usize, usize) {
    match decode_key(key) {
        Ok(g) => (g.n_edges(), g.loop_number()),
        Err(_) => (0, 0),
    }
}

/// Whether the keyed graph carries no masses and no momenta (type `(0,0)`).
pub fn key_is_type_00(key: &str) -> bool {
    !key.contains('m') && !key.contains('q')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isomorphic_graphs_share_keys() {
        let a = FeynmanGraph::new([1, 2, 3], &[(1, 2, None), (2, 3, None), (1, 3, Some(1))], &[]).unwrap();
        let b = FeynmanGraph::new([7, 8, 9], &[(9, 7, None), (8, 9, Some(1)), (7, 8, None)], &[]).unwrap();
        assert_eq!(canonical_key(&a), canonical_key(&b));
        let g = decode_key(&canonical_key(&a)).unwrap();
        assert_eq!(canonical_key(&g), canonical_key(&a));
    }

    #[test]
    fn isolated_vertices_and_unit() {
        let a = FeynmanGraph::new([1, 2], &[(1, 1, None)], &[]).unwrap();
        let b = FeynmanGraph::new([1], &[(1, 1, None)], &[]).unwrap();
        assert_eq!(canonical_key(&a), canonical_key(&b));
        let e = FeynmanGraph::new([1], &[], &[]).unwrap();
        assert_eq!(canonical_key(&e), UNIT_KEY);
    }

    #[test]
    fn kinematics_distinguish() {
        let a = FeynmanGraph::new([1, 2], &[(1, 2, Some(1)), (1, 2, None)], &[(1, 1), (2, 2)]).unwrap();
        let b = FeynmanGraph::new([1, 2], &[(1, 2, None), (1, 2, None)], &[(1, 1), (2, 2)]).unwrap();
        assert_ne!(canonical_key(&a), canonical_key(&b));
        assert!(!key_is_type_00(&canonical_key(&a)));
        let d = decode_key(&canonical_key(&a)).unwrap();
        assert_eq!(canonical_key(&d), canonical_key(&a));
    }

    #[test]
    fn products() {
        let t = FeynmanGraph::new([1], &[(1, 1, None)], &[]).unwrap();
        let k = canonical_key(&t);
        let kk = multiply_keys(&k, &k);
        assert_eq!(kk, canonical_key(&t.disjoint_union(&t)));
        assert_eq!(multiply_keys(UNIT_KEY, &k), k);
    }
}
