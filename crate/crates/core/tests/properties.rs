//! Property-based invariants on random small Feynman graphs.

use feynmotic::canon::canonical_key;
use feynmotic::checks;
use feynmotic::hopf::Hopf;
use feynmotic::io::{emit_graph_json, emit_graph_text, parse_graph};
use feynmotic::symanzik::{mass_form, phi, psi, xi, CdEvaluator, PolyCache};
use feynmotic::FeynmanGraph;
use proptest::prelude::*;

/// Edge lists and legs before validation.
#[derive(Clone, Debug)]
struct RawGraph {
    n_vertices: u32,
    edges: Vec<(u32, u32, Option<u32>)>,
    legs: Vec<(u32, u32)>,
}

impl RawGraph {
    fn build(&self) -> FeynmanGraph {
        FeynmanGraph::new(1..=self.n_vertices, &self.edges, &self.legs).unwrap()
    }
}

/// Connected graphs with up to 4 vertices and 6 edges; optionally two
/// external momenta and masses from {m1, m2}.
fn raw_graph() -> impl Strategy<Value = RawGraph> {
    (1u32..=4).prop_flat_map(|nv| {
        let tree = proptest::collection::vec(any::<prop::sample::Index>(), (nv - 1) as usize);
        let extra = proptest::collection::vec((1..=nv, 1..=nv), 0..=(6 - (nv - 1) as usize).min(4));
        let masses = proptest::collection::vec(prop_oneof![3 => Just(None), 1 => Just(Some(1u32)), 1 => Just(Some(2u32))], 6);
        let legs = prop_oneof![Just(None), (1..=nv, 1..=nv).prop_map(Some)];
        (Just(nv), tree, extra, masses, legs).prop_map(|(nv, tree, extra, masses, legs)| {
            let mut edges: Vec<(u32, u32, Option<u32>)> = Vec::new();
            for (i, ix) in tree.iter().enumerate() {
                let v = i as u32 + 2;
                edges.push((ix.index(v as usize - 1) as u32 + 1, v, None));
            }
            edges.extend(extra.into_iter().map(|(u, v)| (u, v, None)));
            for (e, m) in edges.iter_mut().zip(masses) {
                e.2 = m;
            }
            let legs = legs.map_or_else(Vec::new, |(a, b)| vec![(a, 1), (b, 2)]);
            RawGraph { n_vertices: nv, edges, legs }
        })
    })
}

/// A relabelling of vertices and a reordering of edges.
fn shuffled(raw: &RawGraph, perm_seed: u64) -> FeynmanGraph {
    let nv = raw.n_vertices as usize;
    let mut vperm: Vec<u32> = (1..=raw.n_vertices).collect();
    let mut eorder: Vec<usize> = (0..raw.edges.len()).collect();
    let mut s = perm_seed;
    let mut next = |n: usize| {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (s >> 33) as usize % n
    };
    for i in (1..nv).rev() {
        vperm.swap(i, next(i + 1));
    }
    for i in (1..eorder.len()).rev() {
        eorder.swap(i, next(i + 1));
    }
    let map = |v: u32| vperm[v as usize - 1] + 10;
    let edges: Vec<_> = eorder.iter().map(|&i| raw.edges[i]).map(|(u, v, m)| (map(v), map(u), m)).collect();
    let legs: Vec<_> = raw.legs.iter().map(|&(v, q)| (map(v), q)).collect();
    FeynmanGraph::new((1..=raw.n_vertices).map(map), &edges, &legs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn text_and_json_round_trip(raw in raw_graph()) {
        let g = raw.build();
        let text = emit_graph_text(&g);
        let back = parse_graph(&text).unwrap();
        prop_assert_eq!(emit_graph_text(&back), text);
        prop_assert_eq!(canonical_key(&back), canonical_key(&g));
        let js = emit_graph_json(&g);
        let back = parse_graph(&js).unwrap();
        prop_assert_eq!(emit_graph_json(&back), js);
        prop_assert_eq!(psi(&back), psi(&g));
    }

    #[test]
    fn canonical_key_ignores_labels(raw in raw_graph(), seed in any::<u64>()) {
        let g = raw.build();
        let h = shuffled(&raw, seed);
        prop_assert_eq!(canonical_key(&g), canonical_key(&h));
        // The polynomials agree up to the edge relabelling, so their term
        // counts and degrees do.
        prop_assert_eq!(psi(&g).n_terms(), psi(&h).n_terms());
        prop_assert_eq!(xi(&g).n_terms(), xi(&h).n_terms());
    }

    #[test]
    fn forest_sums_match_contraction_deletion(raw in raw_graph()) {
        let g = raw.build();
        let mut cd = CdEvaluator::new();
        prop_assert_eq!(psi(&g), cd.psi(&g));
        prop_assert_eq!(phi(&g), cd.phi(&g));
        prop_assert_eq!(xi(&g), &cd.phi(&g) + &(&mass_form(&g) * &cd.psi(&g)));
    }

    #[test]
    fn polynomials_are_homogeneous(raw in raw_graph()) {
        let g = raw.build();
        let h = g.loop_number() as u32;
        prop_assert_eq!(psi(&g).alpha_degree_range(), Some((h, h)));
        if let Some(range) = xi(&g).alpha_degree_range() {
            prop_assert_eq!(range, (h + 1, h + 1));
        }
        prop_assert!(psi(&g).terms().all(|(_, c)| *c == feynmotic::Rational::from_integer(1.into())));
    }

    #[test]
    fn factorization_identities(raw in raw_graph()) {
        let g = raw.build();
        let r = checks::factorization_suite(&g, &mut PolyCache::new()).unwrap();
        prop_assert!(r.ok(), "{:?}", r.failures);
    }

    #[test]
    fn valuation_and_atlas(raw in raw_graph()) {
        let g = raw.build();
        let r = checks::valuation_suite(&g).unwrap();
        prop_assert!(r.ok(), "{:?}", r.failures);
        if g.n_edges() == 0 {
            // No blow-up of an empty coordinate simplex.
            prop_assert!(checks::atlas_suite(&g).is_err());
            return Ok(());
        }
        let r = checks::atlas_suite(&g).unwrap();
        prop_assert!(r.ok(), "{:?}", r.failures);
        let r = checks::affine_suite(&g).unwrap();
        prop_assert!(r.ok(), "{:?}", r.failures);
    }

    #[test]
    fn hopf_and_strata_on_motic_graphs(raw in raw_graph()) {
        let g = raw.build();
        prop_assume!(g.is_motic(g.all_edges()));
        let mut hopf = Hopf::new();
        let r = checks::hopf_suite(&g, &mut hopf);
        prop_assert!(r.ok(), "{:?}", r.failures);
        let r = checks::strata_suite(&g, &mut hopf);
        prop_assert!(r.ok(), "{:?}", r.failures);
    }

    #[test]
    fn convergence_matches_charts(raw in raw_graph(), d in prop::sample::select(vec![2u32, 4, 6])) {
        let g = raw.build();
        let r = checks::convergence_suite(&g, d).unwrap();
        prop_assert!(r.ok(), "{:?}", r.failures);
    }
}
