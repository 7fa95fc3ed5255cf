//! Combinatorics of the boundary strata of the blown-up graph hypersurface
//! complement: nested chains of motic subgraphs and their product
//! decompositions, the vanishing region of the `E_1` page of the
//! exceptional-locus spectral sequence, and descendant bookkeeping.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::json;

use crate::blowup::{face_poset, Divisor, UnionClosedFamily};
use crate::canon::canonical_key;
use crate::error::Result;
use crate::graph::{EdgeSet, FeynmanGraph};
use crate::hopf::{descendants, Descendant, Word};

/// One factor of a stratum: the graph `γ_i/γ_{i−1}` (or `G/γ_r`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumFactor {
    pub edges: EdgeSet,
    pub n_edges: usize,
    pub loops: usize,
    /// Whether the factor carries masses or momenta.
    pub kinematic: bool,
    pub key: String,
}

/// A stratum indexed by a chain `γ_1 ⊊ … ⊊ γ_r` of strict nonempty motic
/// subgraphs; the stratum is a product of graph hypersurface complements of
/// the successive quotients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumRecord {
    pub chain: Vec<EdgeSet>,
    /// Factors `γ_1, γ_2/γ_1, …, G/γ_r`.
    pub factors: Vec<StratumFactor>,
    pub codimension: usize,
}

fn factor(g: &FeynmanGraph, outer: EdgeSet, inner: EdgeSet) -> StratumFactor {
    let graph = if outer == g.all_edges() { g.clone() } else { g.subgraph(outer) };
    let q = graph.quotient(inner);
    StratumFactor {
        edges: outer.difference(inner),
        n_edges: q.n_edges(),
        loops: q.loop_number(),
        kinematic: q.has_kinematics(),
        key: canonical_key(&q),
    }
}

/// All chains of strict nonempty motic subgraphs (the empty chain first),
/// ordered by length and then lexicographically.
pub fn nested_chains(g: &FeynmanGraph) -> Vec<StratumRecord> {
    let motic = g.motic_subgraphs(false);
    let mut chains: Vec<Vec<EdgeSet>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<EdgeSet>> = vec![Vec::new()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for c in &frontier {
            for &m in &motic {
                if c.last().map_or(true, |&l| l.is_strict_subset(m)) {
                    let mut nc = c.clone();
                    nc.push(m);
                    next.push(nc);
                }
            }
        }
        chains.extend(next.iter().cloned());
        frontier = next;
    }
    chains.sort_by(|a, b| {
        a.len().cmp(&b.len()).then_with(|| {
            let ka: Vec<Vec<u32>> = a.iter().map(|s| s.to_vec()).collect();
            let kb: Vec<Vec<u32>> = b.iter().map(|s| s.to_vec()).collect();
            ka.cmp(&kb)
        })
    });
    chains
        .into_iter()
        .map(|chain| {
            let mut factors = Vec::new();
            let mut prev = EdgeSet::empty();
            for &c in &chain {
                factors.push(factor(g, c, prev));
                prev = c;
            }
            factors.push(factor(g, g.all_edges(), prev));
            StratumRecord { codimension: chain.len(), chain, factors }
        })
        .collect()
}

/// Maximal chain length.
pub fn max_chain_length(g: &FeynmanGraph) -> usize {
    nested_chains(g).iter().map(|r| r.codimension).max().unwrap_or(0)
}

/// Upper bound on chain lengths: `h_G + 1`, or `h_G` without kinematics.
pub fn chain_length_bound(g: &FeynmanGraph) -> usize {
    g.loop_number() + g.has_kinematics() as usize
}

/// Guaranteed-zero region of the `E_1` page: `E_1^{p,q} = 0` for
/// `q ≥ N_G` or `p ≥ h_G + 1` (`p ≥ h_G` without kinematics).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E1Bounds {
    pub p_zero_from: usize,
    pub q_zero_from: usize,
    /// `possibly_nonzero[p][q]` for `0 ≤ p ≤ p_zero_from`, `0 ≤ q ≤ q_zero_from`.
    pub possibly_nonzero: Vec<Vec<bool>>,
}

impl E1Bounds {
    pub fn is_zero(&self, p: usize, q: usize) -> bool {
        p >= self.p_zero_from || q >= self.q_zero_from
    }
}

pub fn e1_vanishing_bounds(g: &FeynmanGraph) -> E1Bounds {
    let p0 = chain_length_bound(g);
    let q0 = g.n_edges();
    let possibly_nonzero = (0..=p0).map(|p| (0..=q0).map(|q| p < p0 && q < q0).collect()).collect();
    E1Bounds { p_zero_from: p0, q_zero_from: q0, possibly_nonzero }
}

/// Descendants of `G` of degree at most `k`.
pub fn descendants_by_degree(g: &FeynmanGraph, k: i64) -> Vec<Descendant> {
    descendants(g).into_iter().filter(|d| d.degree <= k).collect()
}

/// The words mapped into `G` by the face maps: `i_e : G//e → G` for
/// non-tadpole edges and `i_γ : γ ⊗ G/γ → G` for strict nonempty motic `γ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceMap {
    pub kind: String,
    pub along: EdgeSet,
    pub source: Word,
    pub target: Word,
}

pub fn face_map_targets(g: &FeynmanGraph) -> Vec<FaceMap> {
    let target = vec![canonical_key(g)];
    let mut out = Vec::new();
    for e in g.all_edges().iter() {
        if let Some(q) = g.contract_edge(e) {
            out.push(FaceMap {
                kind: "edge".into(),
                along: EdgeSet::singleton(e),
                source: vec![canonical_key(&q)],
                target: target.clone(),
            });
        }
    }
    for gamma in g.motic_subgraphs(false) {
        out.push(FaceMap {
            kind: "subgraph".into(),
            along: gamma,
            source: vec![canonical_key(&g.subgraph(gamma)), canonical_key(&g.quotient(gamma))],
            target: target.clone(),
        });
    }
    out
}

/// Checks that the chains are exactly the faces of the polytope of `B_G`
/// cut out by divisors `D_γ` with `γ` motic.
pub fn chain_face_duality(g: &FeynmanGraph) -> Result<bool> {
    let chains: BTreeSet<BTreeSet<EdgeSet>> =
        nested_chains(g).into_iter().map(|r| r.chain.into_iter().collect()).collect();
    let b = UnionClosedFamily::of_graph(g)?;
    let faces: BTreeSet<BTreeSet<EdgeSet>> = face_poset(&b)
        .faces
        .into_iter()
        .filter(|f| {
            f.divisors.iter().all(|d| match d {
                Divisor::Exc(_) => true,
                Divisor::Coord(e) => g.is_motic_fast(EdgeSet::singleton(*e)),
            })
        })
        .map(|f| f.divisors.iter().map(|d| d.set()).collect())
        .collect();
    Ok(chains == faces)
}

/// JSON table of strata and `E_1` bounds.
pub fn strata_json(g: &FeynmanGraph) -> serde_json::Value {
    let chains = nested_chains(g);
    json!({
        "chains": chains.iter().map(|r| json!({
            "chain": r.chain.iter().map(|s| s.to_vec()).collect::<Vec<_>>(),
            "codimension": r.codimension,
            "factors": r.factors.iter().map(|f| json!({
                "edges": f.edges.to_vec(),
                "n_edges": f.n_edges,
                "loops": f.loops,
                "kinematic": f.kinematic,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "max_chain_length": chains.iter().map(|r| r.codimension).max().unwrap_or(0),
        "chain_length_bound": chain_length_bound(g),
        "e1": serde_json::to_value(e1_vanishing_bounds(g)).unwrap(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn app2() -> FeynmanGraph {
        FeynmanGraph::new([1, 2, 3], &[(1, 2, Some(1)), (1, 3, Some(2)), (2, 3, None)], &[(2, 1), (3, 2)]).unwrap()
    }

    fn dunce() -> FeynmanGraph {
        FeynmanGraph::new([1, 2, 3], &[(1, 2, Some(1)), (1, 3, None), (2, 3, None), (2, 3, None)], &[(1, 1), (2, 2)])
            .unwrap()
    }

    #[test]
    fn app2_chains() {
        let c = nested_chains(&app2());
        let chains: Vec<Vec<EdgeSet>> = c.iter().map(|r| r.chain.clone()).collect();
        assert_eq!(chains, vec![vec![], vec![EdgeSet::from_labels([1, 2])]]);
        let r = &c[1];
        let h: usize = r.factors.iter().map(|f| f.loops).sum();
        assert_eq!(h, 1);
        let e1 = e1_vanishing_bounds(&app2());
        assert!(e1.is_zero(2, 0) && e1.is_zero(0, 3) && !e1.is_zero(1, 2));
        assert!(chain_face_duality(&app2()).unwrap());
    }

    #[test]
    fn dunce_face_maps() {
        let g = dunce();
        let maps = face_map_targets(&g);
        assert_eq!(maps.iter().filter(|m| m.kind == "edge").count(), 4);
        assert_eq!(maps.iter().filter(|m| m.kind == "subgraph").count(), 5);
        assert!(nested_chains(&g)
            .iter()
            .any(|r| r.chain == vec![EdgeSet::from_labels([1]), EdgeSet::from_labels([1, 3, 4])]));
        assert!(chain_face_duality(&g).unwrap());
        for r in nested_chains(&g) {
            assert_eq!(r.factors.iter().map(|f| f.loops).sum::<usize>(), g.loop_number());
        }
    }

    #[test]
    fn trees_have_only_the_empty_chain() {
        let g = FeynmanGraph::new([1, 2, 3], &[(1, 2, None), (2, 3, None)], &[]).unwrap();
        assert_eq!(nested_chains(&g).len(), 1);
    }

    #[test]
    fn low_degree_descendants() {
        for d in descendants_by_degree(&app2(), 0) {
            assert!(d.word.iter().all(|k| crate::canon::key_bidegree(k).0 <= 1));
        }
        assert!(descendants_by_degree(&app2(), 1).iter().any(|d| d.word.len() == 2 && d.degree == 1));
    }
}
