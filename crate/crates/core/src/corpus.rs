//! Built-in example graphs and a seeded generator of random test graphs.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canon::canonical_key;
use crate::graph::FeynmanGraph;

/// A named example graph.
#[derive(Clone, Debug)]
pub struct NamedGraph {
    pub name: &'static str,
    pub graph: FeynmanGraph,
}

fn build(vertices: &[u32], edges: &[(u32, u32, Option<u32>)], legs: &[(u32, u32)]) -> FeynmanGraph {
    FeynmanGraph::new(vertices.iter().copied(), edges, legs).expect("built-in graphs are valid")
}

/// One-loop self-energy with two edges of equal mass `m_1`.
pub fn bubble() -> FeynmanGraph {
    build(&[1, 2], &[(1, 2, Some(1)), (1, 2, Some(1))], &[(1, 1), (2, 2)])
}

/// The two-loop "dunce cap": a massive edge and a massless edge from vertex
/// 1, closed off by a massless double edge between vertices 2 and 3.
pub fn dunce_cap() -> FeynmanGraph {
    build(&[1, 2, 3], &[(1, 2, Some(1)), (1, 3, None), (2, 3, None), (2, 3, None)], &[(1, 1), (2, 2)])
}

/// Massless square with one external momentum at each corner; edges run
/// top, right, bottom, left and momenta `q_1..q_4` enter clockwise from the
/// top-left corner.
pub fn four_cycle() -> FeynmanGraph {
    build(
        &[1, 2, 3, 4],
        &[(1, 2, None), (2, 3, None), (3, 4, None), (4, 1, None)],
        &[(1, 1), (2, 2), (3, 3), (4, 4)],
    )
}

/// Three massless edges between two vertices, no kinematics.
pub fn three_banana() -> FeynmanGraph {
    build(&[1, 2], &[(1, 2, None), (1, 2, None), (1, 2, None)], &[])
}

/// Massless one-loop triangle without kinematics.
pub fn triangle() -> FeynmanGraph {
    build(&[1, 2, 3], &[(1, 2, None), (2, 3, None), (1, 3, None)], &[])
}

/// One-loop triangle with two massive edges `1, 2` (masses `m_1, m_2`) at
/// vertex 1 and a massless edge `3`; momentum enters at the ends of edge 3.
pub fn two_mass_triangle() -> FeynmanGraph {
    build(&[1, 2, 3], &[(1, 2, Some(1)), (1, 3, Some(2)), (2, 3, None)], &[(2, 1), (3, 2)])
}

/// The wheel with three spokes (complete graph on four vertices), massless,
/// no kinematics.
pub fn wheel3() -> FeynmanGraph {
    build(
        &[0, 1, 2, 3],
        &[(0, 1, None), (0, 2, None), (0, 3, None), (1, 2, None), (2, 3, None), (1, 3, None)],
        &[],
    )
}

/// A single massless self-loop.
pub fn tadpole() -> FeynmanGraph {
    build(&[1], &[(1, 1, None)], &[])
}

/// All built-in example graphs.
pub fn named_graphs() -> Vec<NamedGraph> {
    vec![
        NamedGraph { name: "bubble", graph: bubble() },
        NamedGraph { name: "dunce", graph: dunce_cap() },
        NamedGraph { name: "four-cycle", graph: four_cycle() },
        NamedGraph { name: "banana3", graph: three_banana() },
        NamedGraph { name: "triangle", graph: triangle() },
        NamedGraph { name: "two-mass-triangle", graph: two_mass_triangle() },
        NamedGraph { name: "wheel3", graph: wheel3() },
        NamedGraph { name: "tadpole", graph: tadpole() },
    ]
}

/// Looks up a built-in graph by name.
pub fn named_graph(name: &str) -> Option<FeynmanGraph> {
    named_graphs().into_iter().find(|n| n.name == name).map(|n| n.graph)
}

/// Kinematic type `(Q, M)` of generated graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KinType {
    /// No momenta, no masses.
    Type00,
    /// Two momenta `q_1 = −q_2`, one mass.
    Type21,
    /// Two momenta, two distinct masses.
    Type22,
}

/// Parameters of the random corpus.
#[derive(Clone, Debug)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count: usize,
    pub max_vertices: u32,
    pub max_edges: usize,
    /// Probability that an added edge is a self-loop.
    pub self_loop_rate: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec { seed: 0xC0FFEE, count: 240, max_vertices: 5, max_edges: 7, self_loop_rate: 0.05 }
    }
}

fn random_graph(rng: &mut ChaCha8Rng, spec: &CorpusSpec, kind: KinType) -> FeynmanGraph {
    let n_edges = rng.gen_range(1..=spec.max_edges);
    let max_v = spec.max_vertices.min(n_edges as u32 + 1).max(1);
    let n_v = rng.gen_range(1..=max_v);
    let mut edges: Vec<(u32, u32, Option<u32>)> = Vec::with_capacity(n_edges);
    // A random spanning tree keeps the graph connected.
    for v in 2..=n_v {
        edges.push((rng.gen_range(1..v), v, None));
    }
    while edges.len() < n_edges {
        if n_v == 1 || rng.gen_bool(spec.self_loop_rate) {
            let v = rng.gen_range(1..=n_v);
            edges.push((v, v, None));
        } else {
            let u = rng.gen_range(1..=n_v);
            let mut v = rng.gen_range(1..=n_v);
            while v == u {
                v = rng.gen_range(1..=n_v);
            }
            edges.push((u, v, None));
        }
    }
    edges.shuffle(rng);
    let mut legs = Vec::new();
    if kind != KinType::Type00 {
        let massive = rng.gen_range(1..=n_edges);
        let mut order: Vec<usize> = (0..n_edges).collect();
        order.shuffle(rng);
        for (rank, &i) in order.iter().take(massive).enumerate() {
            let m = match kind {
                KinType::Type22 if rank == 0 => 2,
                KinType::Type22 if rank > 1 => rng.gen_range(1..=2),
                _ => 1,
            };
            edges[i].2 = Some(m);
        }
        if kind == KinType::Type22 && massive == 1 {
            edges[order[0]].2 = Some(1);
        }
        let a = rng.gen_range(1..=n_v);
        let b = if n_v > 1 {
            let mut b = rng.gen_range(1..=n_v);
            while b == a {
                b = rng.gen_range(1..=n_v);
            }
            b
        } else {
            a
        };
        legs.push((a, 1));
        legs.push((b, 2));
    }
    FeynmanGraph::new(1..=n_v, &edges, &legs).expect("generated graphs are valid")
}

/// Connected random graphs, deduplicated up to isomorphism, cycling through
/// the types `(0,0)`, `(2,1)`, `(2,2)`.
pub fn generated_corpus(spec: &CorpusSpec) -> Vec<FeynmanGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let kinds = [KinType::Type00, KinType::Type21, KinType::Type22];
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(spec.count);
    let mut attempts = 0usize;
    while out.len() < spec.count && attempts < spec.count * 200 {
        let kind = kinds[attempts % 3];
        attempts += 1;
        let g = random_graph(&mut rng, spec, kind);
        if seen.insert(canonical_key(&g)) {
            out.push(g);
        }
    }
    out
}

/// The test corpus: built-in examples followed by the default generated
/// corpus, without isomorphic duplicates.
pub fn corpus() -> Vec<FeynmanGraph> {
    let mut seen = BTreeSet::new();
    named_graphs()
        .into_iter()
        .map(|n| n.graph)
        .chain(generated_corpus(&CorpusSpec::default()))
        .filter(|g| seen.insert(canonical_key(g)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_shape() {
        let c = generated_corpus(&CorpusSpec::default());
        assert_eq!(c.len(), 240);
        assert!(c.iter().all(|g| g.n_components() == 1 && g.n_edges() <= 7 && g.n_vertices() <= 5));
        let types: BTreeSet<(u32, u32)> = c.iter().map(|g| (g.n_momenta(), g.n_masses())).collect();
        assert_eq!(types, [(0, 0), (2, 1), (2, 2)].into_iter().collect());
        assert!(c.iter().filter(|g| g.n_edges() <= 6).count() >= 100);
        assert_eq!(generated_corpus(&CorpusSpec::default()), c);
    }

    #[test]
    fn named_graphs_resolve() {
        for n in named_graphs() {
            assert_eq!(named_graph(n.name).unwrap(), n.graph);
        }
        assert!(named_graph("nonexistent").is_none());
    }
}
