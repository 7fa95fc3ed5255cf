//! The Feynman graph data model.
//!
//! A [`FeynmanGraph`] consists of vertices, labelled internal edges (self-loops
//! allowed) carrying an optional symbolic mass index, and external legs
//! attached to vertices carrying a multiset of momentum indices `q_1..q_Q`.
//! Momentum conservation `q_1 + … + q_Q = 0` is implicit.
//!
//! Edge subgraphs are plain [`EdgeSet`]s of edge labels; their vertex set is
//! the set of endpoints of the chosen edges.  All kinematic predicates
//! (momentum-, mass- and mass-momentum spanning, motic) are evaluated relative
//! to a parent graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex identifier.
pub type VertexId = u32;
/// Edge label; labels are 1-based and at most [`EdgeSet::MAX_LABEL`].
pub type EdgeLabel = u32;

/// A set of edge labels stored as a 64-bit mask (bit `l-1` ⇔ label `l`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct EdgeSet(u64);

impl EdgeSet {
    /// Largest supported edge label.
    pub const MAX_LABEL: EdgeLabel = 64;

    /// The empty set.
    pub const fn empty() -> Self {
        EdgeSet(0)
    }

    /// Set from a raw bit mask.
    pub const fn from_bits(bits: u64) -> Self {
        EdgeSet(bits)
    }

    /// Raw bit mask.
    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The one-element set `{label}`.
    pub fn singleton(label: EdgeLabel) -> Self {
        debug_assert!((1..=Self::MAX_LABEL).contains(&label));
        EdgeSet(1u64 << (label - 1))
    }

    /// Set from an iterator of labels.
    pub fn from_labels<I: IntoIterator<Item = EdgeLabel>>(labels: I) -> Self {
        labels
            .into_iter()
            .fold(EdgeSet::empty(), |s, l| s.with(l))
    }

    /// Copy of `self` with `label` inserted.
    pub fn with(self, label: EdgeLabel) -> Self {
        EdgeSet(self.0 | EdgeSet::singleton(label).0)
    }

    /// Copy of `self` with `label` removed.
    pub fn without(self, label: EdgeLabel) -> Self {
        EdgeSet(self.0 & !EdgeSet::singleton(label).0)
    }

    pub fn contains(self, label: EdgeLabel) -> bool {
        label >= 1 && label <= Self::MAX_LABEL && self.0 & (1u64 << (label - 1)) != 0
    }

    pub fn union(self, other: Self) -> Self {
        EdgeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        EdgeSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        EdgeSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_strict_subset(self, other: Self) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Smallest label in the set.
    pub fn first(self) -> Option<EdgeLabel> {
        (self.0 != 0).then(|| self.0.trailing_zeros() + 1)
    }

    /// Labels in increasing order.
    pub fn iter(self) -> EdgeSetIter {
        EdgeSetIter(self.0)
    }

    /// Labels in increasing order, collected.
    pub fn to_vec(self) -> Vec<EdgeLabel> {
        self.iter().collect()
    }

    /// All subsets of `self` (including `∅` and `self`), in increasing order
    /// of their bit masks.
    pub fn subsets(self) -> impl Iterator<Item = EdgeSet> {
        let mask = self.0;
        let mut sub: u64 = 0;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = sub;
            sub = sub.wrapping_sub(mask) & mask;
            if sub == 0 {
                done = true;
            }
            Some(EdgeSet(out))
        })
    }

    /// Lexicographic comparison of the increasing label sequences.
    pub fn lex_cmp(self, other: Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for EdgeSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for EdgeSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<EdgeLabel>::deserialize(d)?;
        if let Some(bad) = v.iter().find(|&&l| l == 0 || l > EdgeSet::MAX_LABEL) {
            return Err(serde::de::Error::custom(format!("edge label {bad} out of range")));
        }
        Ok(EdgeSet::from_labels(v))
    }
}

/// Iterator over the labels of an [`EdgeSet`].
pub struct EdgeSetIter(u64);

impl Iterator for EdgeSetIter {
    type Item = EdgeLabel;
    fn next(&mut self) -> Option<EdgeLabel> {
        if self.0 == 0 {
            return None;
        }
        let t = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(t + 1)
    }
}

/// An internal edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub label: EdgeLabel,
    /// Endpoints, stored with `u <= v`.
    pub u: VertexId,
    pub v: VertexId,
    /// Symbolic mass index `k` (mass `m_k`), or `None` for a massless edge.
    pub mass: Option<u32>,
}

impl Edge {
    pub fn is_self_loop(&self) -> bool {
        self.u == self.v
    }
}

/// An external leg: a vertex and the multiset of momentum indices entering it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Leg {
    pub vertex: VertexId,
    /// Sorted multiset of momentum indices (1-based); the leg carries the
    /// formal sum of the corresponding `q_i`.
    pub momenta: Vec<u32>,
}

/// Minimal union-find over dense indices.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; returns `false` if already merged.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// A Feynman graph `(V, E, E^ext)` with masses and momenta.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FeynmanGraph {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    legs: Vec<Leg>,
    n_momenta: u32,
}

/// Result of deleting an edge: a graph-like value that may violate momentum
/// conservation per connected component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deleted {
    pub graph: FeynmanGraph,
    /// `false` when the external legs are split across several components.
    pub is_feynman: bool,
}

impl FeynmanGraph {
    /// Builds a labelled graph whose edges receive labels `1..=N` in the given
    /// order.  Each edge is `(u, v, mass)`; each leg is `(vertex, i)` for the
    /// momentum `q_i`.  The number of independent momenta `Q` is the largest
    /// momentum index that occurs.
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: &[(VertexId, VertexId, Option<u32>)],
        legs: &[(VertexId, u32)],
    ) -> Result<Self> {
        let n_momenta = legs.iter().map(|l| l.1).max().unwrap_or(0);
        Self::with_momenta(vertices, edges, legs, n_momenta)
    }

    /// As [`FeynmanGraph::new`] but with an explicit number of momenta `Q`
    /// (which must be at least the largest momentum index used).
    pub fn with_momenta(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: &[(VertexId, VertexId, Option<u32>)],
        legs: &[(VertexId, u32)],
        n_momenta: u32,
    ) -> Result<Self> {
        if edges.len() > EdgeSet::MAX_LABEL as usize {
            return Err(Error::InvalidGraph(format!(
                "at most {} edges are supported",
                EdgeSet::MAX_LABEL
            )));
        }
        let labelled: Vec<Edge> = edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v, mass))| Edge {
                label: i as EdgeLabel + 1,
                u: u.min(v),
                v: u.max(v),
                mass,
            })
            .collect();
        let legs: Vec<Leg> = legs
            .iter()
            .map(|&(vertex, q)| Leg { vertex, momenta: vec![q] })
            .collect();
        let g = Self::from_parts(vertices.into_iter().collect(), labelled, legs, n_momenta);
        g.validate()?;
        Ok(g)
    }

    /// Assembles a graph from parts without validation; sorts all parts.
    pub(crate) fn from_parts(
        vertices: Vec<VertexId>,
        mut edges: Vec<Edge>,
        mut legs: Vec<Leg>,
        n_momenta: u32,
    ) -> Self {
        let mut vs: BTreeSet<VertexId> = vertices.into_iter().collect();
        for e in &edges {
            vs.insert(e.u);
            vs.insert(e.v);
        }
        for l in &mut legs {
            vs.insert(l.vertex);
            l.momenta.sort_unstable();
        }
        for e in &mut edges {
            if e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
        }
        edges.sort();
        legs.sort();
        FeynmanGraph {
            vertices: vs.into_iter().collect(),
            edges,
            legs,
            n_momenta,
        }
    }

    /// Checks the structural invariants of a Feynman graph.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            if e.label == 0 || e.label > EdgeSet::MAX_LABEL {
                return Err(Error::InvalidGraph(format!("edge label {} out of range", e.label)));
            }
            if !seen.insert(e.label) {
                return Err(Error::InvalidGraph(format!("duplicate edge label {}", e.label)));
            }
            if e.mass == Some(0) {
                return Err(Error::InvalidGraph("mass indices start at 1".into()));
            }
        }
        for l in &self.legs {
            if l.momenta.iter().any(|&q| q == 0 || q > self.n_momenta) {
                return Err(Error::InvalidGraph(format!(
                    "momentum index out of range 1..={} at vertex {}",
                    self.n_momenta, l.vertex
                )));
            }
        }
        let all_vertices: Vec<VertexId> = self.legs.iter().map(|l| l.vertex).collect();
        if !Self::momentum_is_zero(&self.momentum_vector(all_vertices.iter())) {
            return Err(Error::InvalidGraph(
                "external momenta violate momentum conservation (every q_i must enter exactly as often as the others)".into(),
            ));
        }
        // Kinematics (legs and massive edges) must live in one component.
        let comp = self.vertex_component_map();
        let mut kin_components = BTreeSet::new();
        for l in &self.legs {
            kin_components.insert(comp[&l.vertex]);
        }
        if kin_components.len() > 1 {
            return Err(Error::InvalidGraph(
                "external legs lie in more than one connected component".into(),
            ));
        }
        for e in &self.edges {
            if e.mass.is_some() {
                kin_components.insert(comp[&e.u]);
            }
        }
        if kin_components.len() > 1 {
            return Err(Error::InvalidGraph(
                "masses and momenta lie in more than one connected component".into(),
            ));
        }
        Ok(())
    }

    // ----------------------------------------------------------------------
    // Accessors

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// Edges sorted by label.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    /// Number `Q` of momenta of the ambient kinematic space.
    pub fn n_momenta(&self) -> u32 {
        self.n_momenta
    }

    /// Largest mass index in use (`M`).
    pub fn n_masses(&self) -> u32 {
        self.edges.iter().filter_map(|e| e.mass).max().unwrap_or(0)
    }

    /// Number of internal edges `N_G`.
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// The edge with the given label.
    pub fn edge(&self, label: EdgeLabel) -> Option<&Edge> {
        self.edges
            .binary_search_by_key(&label, |e| e.label)
            .ok()
            .map(|i| &self.edges[i])
    }

    /// The set of all edge labels.
    pub fn all_edges(&self) -> EdgeSet {
        EdgeSet::from_labels(self.edges.iter().map(|e| e.label))
    }

    /// Largest edge label (0 for an edgeless graph).
    pub fn max_label(&self) -> EdgeLabel {
        self.edges.iter().map(|e| e.label).max().unwrap_or(0)
    }

    /// Edges that carry a mass.
    pub fn massive_edges(&self) -> EdgeSet {
        EdgeSet::from_labels(self.edges.iter().filter(|e| e.mass.is_some()).map(|e| e.label))
    }

    /// Mass index of an edge (`None` if massless or absent).
    pub fn mass_of(&self, label: EdgeLabel) -> Option<u32> {
        self.edge(label).and_then(|e| e.mass)
    }

    // ----------------------------------------------------------------------
    // Momenta

    /// Coefficient vector `(c_1..c_Q)` of the total momentum `Σ c_i q_i`
    /// entering the given set of vertices.
    pub fn momentum_vector<'a>(&self, vertices: impl IntoIterator<Item = &'a VertexId>) -> Vec<i64> {
        let set: BTreeSet<VertexId> = vertices.into_iter().copied().collect();
        let mut c = vec![0i64; self.n_momenta as usize];
        for l in &self.legs {
            if set.contains(&l.vertex) {
                for &q in &l.momenta {
                    c[q as usize - 1] += 1;
                }
            }
        }
        c
    }

    /// Whether a momentum coefficient vector is zero modulo momentum
    /// conservation (all coefficients equal).
    pub fn momentum_is_zero(c: &[i64]) -> bool {
        c.windows(2).all(|w| w[0] == w[1])
    }

    /// Vertices through which a nonzero total momentum enters.
    pub fn momentum_vertices(&self) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        let per_vertex: BTreeSet<VertexId> = self.legs.iter().map(|l| l.vertex).collect();
        for v in per_vertex {
            if !Self::momentum_is_zero(&self.momentum_vector([v].iter())) {
                out.insert(v);
            }
        }
        out
    }

    /// Whether the graph carries nontrivial momenta.
    pub fn has_momenta(&self) -> bool {
        !self.momentum_vertices().is_empty()
    }

    /// Whether the graph carries masses or nontrivial momenta, i.e. is not
    /// effectively of type `(0,0)`.
    pub fn has_kinematics(&self) -> bool {
        self.has_momenta() || !self.massive_edges().is_empty()
    }

    // ----------------------------------------------------------------------
    // Connectivity and loop numbers

    /// Vertex set `V_γ` of an edge subgraph (endpoints of its edges).
    pub fn vertices_of(&self, gamma: EdgeSet) -> BTreeSet<VertexId> {
        let mut vs = BTreeSet::new();
        for e in &self.edges {
            if gamma.contains(e.label) {
                vs.insert(e.u);
                vs.insert(e.v);
            }
        }
        vs
    }

    fn vertex_index(&self) -> BTreeMap<VertexId, usize> {
        self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect()
    }

    /// Map from each vertex to the smallest vertex of its connected component
    /// in the graph `(V_G, γ)`.
    pub fn component_map_of(&self, gamma: EdgeSet) -> BTreeMap<VertexId, VertexId> {
        let idx = self.vertex_index();
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            if gamma.contains(e.label) {
                uf.union(idx[&e.u], idx[&e.v]);
            }
        }
        self.vertices
            .iter()
            .map(|&v| {
                let r = uf.find(idx[&v]);
                (v, self.vertices[r])
            })
            .collect()
    }

    fn vertex_component_map(&self) -> BTreeMap<VertexId, VertexId> {
        self.component_map_of(self.all_edges())
    }

    /// Number of connected components `κ_G` (isolated vertices included).
    pub fn n_components(&self) -> usize {
        self.vertex_component_map()
            .values()
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Connected components of the edge subgraph `γ` (as edge sets, ordered by
    /// their smallest label).  Isolated vertices are not reported.
    pub fn components_of(&self, gamma: EdgeSet) -> Vec<EdgeSet> {
        let cm = self.component_map_of(gamma);
        let mut by_root: BTreeMap<VertexId, EdgeSet> = BTreeMap::new();
        for e in &self.edges {
            if gamma.contains(e.label) {
                let r = cm[&e.u];
                let s = by_root.entry(r).or_default();
                *s = s.with(e.label);
            }
        }
        let mut out: Vec<EdgeSet> = by_root.into_values().collect();
        out.sort_by_key(|s| s.first());
        out
    }

    /// Number of connected components `κ_γ` of the edge subgraph `γ`.
    pub fn n_components_of(&self, gamma: EdgeSet) -> usize {
        self.components_of(gamma).len()
    }

    /// Loop number `h_G = N_G − |V_G| + κ_G`.
    pub fn loop_number(&self) -> usize {
        self.n_edges() + self.n_components() - self.n_vertices()
    }

    /// Loop number of the edge subgraph `γ`: `|γ| − |V_γ| + κ_γ`.
    pub fn loop_number_of(&self, gamma: EdgeSet) -> usize {
        let gamma = gamma.intersection(self.all_edges());
        gamma.len() + self.n_components_of(gamma) - self.vertices_of(gamma).len()
    }

    /// Whether edge `e` is a self-loop (tadpole).
    pub fn is_tadpole(&self, e: EdgeLabel) -> bool {
        self.edge(e).map(|x| x.is_self_loop()).unwrap_or(false)
    }

    /// Whether deleting `e` disconnects its endpoints.
    pub fn is_bridge(&self, e: EdgeLabel) -> bool {
        self.is_bridge_in(self.all_edges(), e)
    }

    /// Whether `e` is a bridge of the edge subgraph `γ` (with `e ∈ γ`).
    pub fn is_bridge_in(&self, gamma: EdgeSet, e: EdgeLabel) -> bool {
        gamma.contains(e) && self.loop_number_of(gamma.without(e)) == self.loop_number_of(gamma)
    }

    /// Whether every connected component is 2-edge connected, i.e. deleting
    /// any edge drops the loop number.
    pub fn is_1pi(&self) -> bool {
        self.is_1pi_subgraph(self.all_edges())
    }

    /// 1PI test for an edge subgraph.
    pub fn is_1pi_subgraph(&self, gamma: EdgeSet) -> bool {
        let h = self.loop_number_of(gamma);
        gamma.iter().all(|e| self.loop_number_of(gamma.without(e)) < h)
    }

    // ----------------------------------------------------------------------
    // Kinematic predicates

    /// `γ` is momentum-spanning: every vertex with nonzero incoming momentum
    /// lies in `V_γ`, and all of them lie in one connected component of `γ`.
    /// Vacuously true when the graph has no nonzero momenta.
    pub fn is_momentum_spanning(&self, gamma: EdgeSet) -> bool {
        let mv = self.momentum_vertices();
        if mv.is_empty() {
            return true;
        }
        let vg = self.vertices_of(gamma);
        if !mv.iter().all(|v| vg.contains(v)) {
            return false;
        }
        let cm = self.component_map_of(gamma);
        mv.iter().map(|v| cm[v]).collect::<BTreeSet<_>>().len() == 1
    }

    /// `γ` is mass-spanning: it contains every massive edge.
    pub fn is_mass_spanning(&self, gamma: EdgeSet) -> bool {
        self.massive_edges().is_subset(gamma)
    }

    /// `γ` is mass-momentum spanning ("m.m.").
    pub fn is_mm(&self, gamma: EdgeSet) -> bool {
        self.is_mass_spanning(gamma) && self.is_momentum_spanning(gamma)
    }

    /// Whether `γ ⊆ Γ` is mass-momentum spanning *in* `Γ`, where `Γ` is
    /// regarded as a Feynman graph that inherits the kinematics of `G` if it is
    /// m.m. in `G`, and is massless without momenta otherwise.
    pub fn is_mm_in(&self, gamma: EdgeSet, big_gamma: EdgeSet) -> bool {
        if self.is_mm(big_gamma) {
            self.is_mm(gamma)
        } else {
            true
        }
    }

    /// Motic test by the definition: every strict `γ ⊊ Γ` that is m.m. in `Γ`
    /// has `h_γ < h_Γ`.  Exponential in `|Γ|`.
    pub fn is_motic(&self, big_gamma: EdgeSet) -> bool {
        let h = self.loop_number_of(big_gamma);
        let gamma_mm = self.is_mm(big_gamma);
        big_gamma.subsets().filter(|&g| g != big_gamma).all(|g| {
            let mm_in = !gamma_mm || self.is_mm(g);
            !mm_in || self.loop_number_of(g) < h
        })
    }

    /// Motic test by single-edge deletion: for each `e ∈ Γ`, if `Γ∖e` is m.m.
    /// in `Γ` then `h_{Γ∖e} < h_Γ`.
    pub fn is_motic_fast(&self, big_gamma: EdgeSet) -> bool {
        let h = self.loop_number_of(big_gamma);
        let gamma_mm = self.is_mm(big_gamma);
        big_gamma.iter().all(|e| {
            let g = big_gamma.without(e);
            let mm_in = !gamma_mm || self.is_mm(g);
            !mm_in || self.loop_number_of(g) < h
        })
    }

    /// All nonempty motic edge subgraphs, optionally including `E_G` itself,
    /// in lexicographic order of their label sequences.
    pub fn motic_subgraphs(&self, include_self: bool) -> Vec<EdgeSet> {
        let all = self.all_edges();
        let mut out: Vec<EdgeSet> = all
            .subsets()
            .filter(|&g| !g.is_empty() && (include_self || g != all))
            .filter(|&g| self.is_motic_fast(g))
            .collect();
        out.sort_by(|a, b| a.lex_cmp(*b));
        out
    }

    // ----------------------------------------------------------------------
    // Spanning forests

    /// All spanning forests with exactly `k` tree components covering every
    /// vertex (`k ≥ κ_G`), as the edge sets of the forests.
    pub fn spanning_k_trees(&self, k: usize) -> Vec<EdgeSet> {
        let nv = self.n_vertices();
        // The empty graph has exactly one (empty) spanning forest.
        if k > nv || (k == 0 && nv > 0) {
            return Vec::new();
        }
        let size = nv - k;
        let idx = self.vertex_index();
        let ends: Vec<(usize, usize, EdgeLabel)> = self
            .edges
            .iter()
            .filter(|e| !e.is_self_loop())
            .map(|e| (idx[&e.u], idx[&e.v], e.label))
            .collect();
        let mut out = Vec::new();
        let mut chosen = Vec::with_capacity(size);
        fn rec(
            ends: &[(usize, usize, EdgeLabel)],
            start: usize,
            size: usize,
            nv: usize,
            chosen: &mut Vec<usize>,
            out: &mut Vec<EdgeSet>,
        ) {
            if chosen.len() == size {
                let mut uf = UnionFind::new(nv);
                let acyclic = chosen.iter().all(|&i| uf.union(ends[i].0, ends[i].1));
                if acyclic {
                    out.push(EdgeSet::from_labels(chosen.iter().map(|&i| ends[i].2)));
                }
                return;
            }
            let remaining = size - chosen.len();
            for i in start..ends.len() {
                if ends.len() - i < remaining {
                    break;
                }
                // prune early cycles
                chosen.push(i);
                let mut uf = UnionFind::new(nv);
                let ok = chosen.iter().all(|&j| uf.union(ends[j].0, ends[j].1));
                if ok {
                    rec(ends, i + 1, size, nv, chosen, out);
                }
                chosen.pop();
            }
        }
        rec(&ends, 0, size, nv, &mut chosen, &mut out);
        out
    }

    // ----------------------------------------------------------------------
    // Derived graphs

    /// The Feynman graph `(V_γ, γ)` in the sense of edge subgraphs: edges keep
    /// their masses, and the legs of `G` are inherited iff `γ` is
    /// momentum-spanning.
    pub fn edge_subgraph(&self, gamma: EdgeSet) -> FeynmanGraph {
        let legs = if self.is_momentum_spanning(gamma) && self.has_momenta() {
            self.legs.clone()
        } else {
            Vec::new()
        };
        self.restricted(gamma, legs, true)
    }

    /// The Feynman graph `(V_γ, γ)` with the all-or-nothing convention used for
    /// motic subgraphs: it inherits all masses and momenta of `G` if `γ` is
    /// m.m., and is massless without momenta otherwise.
    pub fn subgraph(&self, gamma: EdgeSet) -> FeynmanGraph {
        if self.is_mm(gamma) && self.has_kinematics() {
            let legs = if self.has_momenta() { self.legs.clone() } else { Vec::new() };
            self.restricted(gamma, legs, true)
        } else {
            self.restricted(gamma, Vec::new(), false)
        }
    }

    fn restricted(&self, gamma: EdgeSet, legs: Vec<Leg>, masses: bool) -> FeynmanGraph {
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| gamma.contains(e.label))
            .map(|e| Edge {
                mass: if masses { e.mass } else { None },
                ..e.clone()
            })
            .collect();
        let vs: Vec<VertexId> = self.vertices_of(gamma).into_iter().collect();
        let vset: BTreeSet<VertexId> = vs.iter().copied().collect();
        let legs: Vec<Leg> = legs.into_iter().filter(|l| vset.contains(&l.vertex)).collect();
        let n_momenta = if legs.is_empty() { 0 } else { self.n_momenta };
        FeynmanGraph::from_parts(vs, edges, legs, n_momenta)
    }

    /// The quotient `G/γ`: each connected component of `γ` is contracted to a
    /// vertex (its smallest vertex id).  Remaining edges keep labels and
    /// masses.  Legs are mapped to the contracted vertices; when `γ` is
    /// momentum-spanning all momenta enter one vertex and the legs are dropped.
    pub fn quotient(&self, gamma: EdgeSet) -> FeynmanGraph {
        let gamma = gamma.intersection(self.all_edges());
        let cm = self.component_map_of(gamma);
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| !gamma.contains(e.label))
            .map(|e| Edge {
                label: e.label,
                u: cm[&e.u],
                v: cm[&e.v],
                mass: e.mass,
            })
            .collect();
        let vs: Vec<VertexId> = cm.values().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let (legs, n_momenta) = if self.has_momenta() && self.is_momentum_spanning(gamma) && !gamma.is_empty() {
            (Vec::new(), 0)
        } else {
            (
                self.legs
                    .iter()
                    .map(|l| Leg { vertex: cm[&l.vertex], momenta: l.momenta.clone() })
                    .collect(),
                self.n_momenta,
            )
        };
        FeynmanGraph::from_parts(vs, edges, legs, n_momenta)
    }

    /// `G//γ`: the quotient if `γ` is a forest, `None` (the empty graph) if
    /// `h_γ > 0`.
    pub fn contract_forest(&self, gamma: EdgeSet) -> Option<FeynmanGraph> {
        (self.loop_number_of(gamma) == 0).then(|| self.quotient(gamma))
    }

    /// `G//e`; `None` iff `e` is a tadpole.
    pub fn contract_edge(&self, e: EdgeLabel) -> Option<FeynmanGraph> {
        self.contract_forest(EdgeSet::singleton(e))
    }

    /// `G∖e`: removes the edge and keeps both endpoints.
    pub fn delete(&self, e: EdgeLabel) -> Deleted {
        let edges: Vec<Edge> = self.edges.iter().filter(|x| x.label != e).cloned().collect();
        let graph = FeynmanGraph::from_parts(self.vertices.clone(), edges, self.legs.clone(), self.n_momenta);
        let is_feynman = graph.validate().is_ok() && {
            // momentum conservation per component
            let cm = graph.vertex_component_map();
            let mut per: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
            for (&v, &r) in &cm {
                per.entry(r).or_default().push(v);
            }
            per.values()
                .all(|vs| Self::momentum_is_zero(&graph.momentum_vector(vs.iter())))
        };
        Deleted { graph, is_feynman }
    }

    /// Normal form modulo the equivalence relation on Feynman graphs: legs at
    /// the same vertex are merged into one leg carrying the formal sum of
    /// their momenta, legs with vanishing total momentum are dropped, and
    /// isolated vertices are removed.  Idempotent.
    pub fn normalize_equivalence(&self) -> FeynmanGraph {
        let mut merged: BTreeMap<VertexId, Vec<u32>> = BTreeMap::new();
        for l in &self.legs {
            merged.entry(l.vertex).or_default().extend(l.momenta.iter().copied());
        }
        let legs: Vec<Leg> = merged
            .into_iter()
            .filter(|(v, _)| !Self::momentum_is_zero(&self.momentum_vector([*v].iter())))
            .map(|(vertex, momenta)| Leg { vertex, momenta })
            .collect();
        let n_momenta = if legs.is_empty() { 0 } else { self.n_momenta };
        let vs: Vec<VertexId> = self.vertices_of(self.all_edges()).into_iter().collect();
        FeynmanGraph::from_parts(vs, self.edges.clone(), legs, n_momenta)
    }

    /// Relabels edges to `1..=N` preserving their order.
    pub fn compact_labels(&self) -> FeynmanGraph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| Edge { label: i as EdgeLabel + 1, ..e.clone() })
            .collect();
        FeynmanGraph::from_parts(self.vertices.clone(), edges, self.legs.clone(), self.n_momenta)
    }

    /// Disjoint union; the edges and vertices of `other` are shifted past
    /// those of `self`.  The kinematic space of the result is the larger of
    /// the two.
    pub fn disjoint_union(&self, other: &FeynmanGraph) -> FeynmanGraph {
        let vshift = self.vertices.iter().max().map(|m| m + 1).unwrap_or(0);
        let lshift = self.max_label();
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| Edge {
            label: e.label + lshift,
            u: e.u + vshift,
            v: e.v + vshift,
            mass: e.mass,
        }));
        let mut vertices = self.vertices.clone();
        vertices.extend(other.vertices.iter().map(|v| v + vshift));
        let mut legs = self.legs.clone();
        legs.extend(other.legs.iter().map(|l| Leg { vertex: l.vertex + vshift, momenta: l.momenta.clone() }));
        FeynmanGraph::from_parts(vertices, edges, legs, self.n_momenta.max(other.n_momenta))
    }

    /// Inserts `other` into `self` by identifying the vertex `w` of `other`
    /// with the vertex `v` of `self`.  Edges of `other` are relabelled after
    /// those of `self`; the legs of `other` are discarded.
    pub fn insert_at_vertex(&self, v: VertexId, other: &FeynmanGraph, w: VertexId) -> Result<FeynmanGraph> {
        if !self.vertices.contains(&v) || !other.vertices.contains(&w) {
            return Err(Error::InvalidInput("insertion vertex not present".into()));
        }
        let vshift = self.vertices.iter().max().map(|m| m + 1).unwrap_or(0);
        let map = |x: VertexId| if x == w { v } else { x + vshift };
        let lshift = self.max_label();
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| Edge {
            label: e.label + lshift,
            u: map(e.u),
            v: map(e.v),
            mass: e.mass,
        }));
        let mut vertices = self.vertices.clone();
        vertices.extend(other.vertices.iter().map(|&x| map(x)));
        let g = FeynmanGraph::from_parts(vertices, edges, self.legs.clone(), self.n_momenta);
        g.validate()?;
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dunce() -> FeynmanGraph {
        // L=1, T=2, B=3; edges 1:L-T (m1), 2:L-B, 3:T-B, 4:T-B; legs q1@L, q2@T.
        FeynmanGraph::new(
            [1, 2, 3],
            &[(1, 2, Some(1)), (1, 3, None), (2, 3, None), (2, 3, None)],
            &[(1, 1), (2, 2)],
        )
        .unwrap()
    }

    fn es(v: &[u32]) -> EdgeSet {
        EdgeSet::from_labels(v.iter().copied())
    }

    #[test]
    fn edge_set_basics() {
        let s = es(&[1, 3, 5]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.to_vec(), vec![1, 3, 5]);
        assert_eq!(s.subsets().count(), 8);
        assert!(es(&[1]).lex_cmp(es(&[1, 2])).is_lt());
        assert!(es(&[1, 4]).lex_cmp(es(&[2])).is_lt());
        assert_eq!(EdgeSet::empty().subsets().count(), 1);
    }

    #[test]
    fn loop_numbers() {
        let w3 = FeynmanGraph::new(
            [1, 2, 3, 4],
            &[(1, 2, None), (1, 3, None), (1, 4, None), (2, 3, None), (2, 4, None), (3, 4, None)],
            &[],
        )
        .unwrap();
        assert_eq!(w3.loop_number(), 3);
        assert_eq!(dunce().loop_number(), 2);
        let tad = FeynmanGraph::new([1], &[(1, 1, None)], &[]).unwrap();
        assert_eq!(tad.loop_number(), 1);
    }

    #[test]
    fn quotient_and_contraction() {
        let g = dunce();
        let q = g.quotient(es(&[3, 4]));
        assert_eq!(q.n_edges(), 2);
        assert_eq!(q.loop_number(), 1);
        assert_eq!(q.vertices().len(), 2);
        // {1,2} is a spanning tree of the dunce cap: everything collapses.
        let q = g.quotient(es(&[1, 2]));
        assert_eq!(q.loop_number(), 2);
        assert!(q.legs().is_empty());
        assert_eq!(g.quotient(EdgeSet::empty()), g);
        let c = g.contract_forest(es(&[3])).unwrap();
        assert_eq!(c.n_edges(), 3);
        assert_eq!(c.loop_number(), 2);
        let tad = FeynmanGraph::new([1], &[(1, 1, None)], &[]).unwrap();
        assert!(tad.contract_edge(1).is_none());
    }

    #[test]
    fn deletion() {
        let g = dunce();
        let d = g.delete(3);
        assert!(d.is_feynman);
        assert_eq!(d.graph.loop_number(), 1);
        let tad = FeynmanGraph::new([1], &[(1, 1, None)], &[]).unwrap();
        let d = tad.delete(1);
        assert_eq!(d.graph.n_vertices(), 1);
        assert_eq!(d.graph.n_edges(), 0);
        // bridge with legs on both sides splits momentum
        let path = FeynmanGraph::new([1, 2], &[(1, 2, None)], &[(1, 1), (2, 2)]).unwrap();
        assert!(!path.delete(1).is_feynman);
    }

    #[test]
    fn mm_predicates() {
        let g = dunce();
        assert!(g.is_mm(es(&[1])));
        assert!(!g.is_mm(es(&[3, 4])));
        assert!(g.is_momentum_spanning(es(&[2, 3])));
        assert!(!g.is_momentum_spanning(es(&[2])));
    }

    #[test]
    fn motic_dunce() {
        let g = dunce();
        let m: Vec<Vec<u32>> = g.motic_subgraphs(true).into_iter().map(|s| s.to_vec()).collect();
        let mut expected = vec![vec![1, 2, 3, 4], vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![1], vec![3, 4]];
        expected.sort();
        let mut got = m.clone();
        got.sort();
        assert_eq!(got, expected);
        assert!(!g.is_motic(es(&[2, 3])));
        for s in g.all_edges().subsets() {
            assert_eq!(g.is_motic(s), g.is_motic_fast(s), "{s}");
        }
    }

    #[test]
    fn spanning_forests() {
        let tri = FeynmanGraph::new([1, 2, 3], &[(1, 2, None), (2, 3, None), (1, 3, None)], &[]).unwrap();
        assert_eq!(tri.spanning_k_trees(1).len(), 3);
        assert_eq!(dunce().spanning_k_trees(1).len(), 5);
        let bubble = FeynmanGraph::new([1, 2], &[(1, 2, None), (1, 2, None)], &[]).unwrap();
        assert_eq!(bubble.spanning_k_trees(2), vec![EdgeSet::empty()]);
    }

    #[test]
    fn normalization() {
        let g = FeynmanGraph::new([1, 2, 3], &[(1, 2, None), (1, 2, None)], &[(1, 1), (1, 2), (2, 3)]).unwrap();
        let n = g.normalize_equivalence();
        assert_eq!(n.legs().len(), 2);
        assert_eq!(n.legs()[0].momenta, vec![1, 2]);
        assert_eq!(n.n_vertices(), 2);
        assert_eq!(n.normalize_equivalence(), n);
    }

    #[test]
    fn legs_across_components_rejected() {
        let r = FeynmanGraph::new([1, 2, 3, 4], &[(1, 2, None), (3, 4, None)], &[(1, 1), (3, 2)]);
        assert!(matches!(r, Err(Error::InvalidGraph(_))));
    }
}
