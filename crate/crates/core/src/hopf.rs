//! The motic Hopf algebra: coproduct over motic subgraphs, reduced coproduct
//! powers, coradical degree, antipode, descendants and the (failure of the)
//! differential compatibility of edge contraction.
//!
//! Elements are rational combinations of tensor words whose letters are
//! canonical graph keys (see [`crate::canon`]); the letter `"1"` is the unit.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use serde_json::json;

use crate::canon::{canonical_key, decode_key, key_components, multiply_keys, UNIT_KEY};
use crate::error::Result;
use crate::graph::{EdgeLabel, EdgeSet, FeynmanGraph};
use crate::poly::Rational;

/// A tensor word: a sequence of letters (graph keys).
pub type Word = Vec<String>;

/// A rational linear combination of tensor words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphTensor {
    terms: BTreeMap<Word, Rational>,
}

impl GraphTensor {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The single word `w` with coefficient 1.
    pub fn word(w: Word) -> Self {
        let mut t = Self::zero();
        t.add(w, Rational::one());
        t
    }

    pub fn add(&mut self, w: Word, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add_tensor(&mut self, other: &GraphTensor, scale: &Rational) {
        for (w, c) in &other.terms {
            self.add(w.clone(), c * scale);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    /// Applies a linear map to the letter at position `i` of every word.
    pub fn map_letter<F: FnMut(&str) -> GraphTensor>(&self, i: usize, mut f: F) -> GraphTensor {
        let mut out = GraphTensor::zero();
        for (w, c) in &self.terms {
            let img = f(&w[i]);
            for (iw, ic) in &img.terms {
                let mut nw: Word = w[..i].to_vec();
                nw.extend(iw.iter().cloned());
                nw.extend(w[i + 1..].iter().cloned());
                out.add(nw, c * ic);
            }
        }
        out
    }

    /// Multiplies the letters of every word into one letter.
    pub fn multiply(&self) -> GraphTensor {
        let mut out = GraphTensor::zero();
        for (w, c) in &self.terms {
            let k = w.iter().fold(UNIT_KEY.to_string(), |acc, l| multiply_keys(&acc, l));
            out.add(vec![k], c.clone());
        }
        out
    }

    /// JSON: a list of `{word, coeff}` objects.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(w, c)| json!({"word": w, "coeff": c.to_string()}))
                .collect(),
        )
    }
}

/// Bigrading `(edges, loops)` of a word, summed over letters.
pub fn word_bidegree(w: &Word) -> (usize, usize) {
    w.iter()
        .map(|l| {
            let g = decode_key(l).expect("valid key");
            (g.n_edges(), g.loop_number())
        })
        .fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Degree `Σ (N_{γ_i} − 1)` of a word.
pub fn word_degree(w: &Word) -> i64 {
    w.iter()
        .map(|l| decode_key(l).expect("valid key").n_edges() as i64 - 1)
        .sum()
}

/// Memoising engine for Hopf-algebra operations on keyed graphs.
#[derive(Default)]
pub struct Hopf {
    coproducts: HashMap<String, Vec<(String, String)>>,
    antipodes: HashMap<String, GraphTensor>,
}

impl Hopf {
    pub fn new() -> Self {
        Self::default()
    }

    /// The pairs `(γ, G/γ)` over all motic `γ ⊆ G`, including `∅` and `G`.
    pub fn coproduct_pairs(&mut self, key: &str) -> Vec<(String, String)> {
        if let Some(v) = self.coproducts.get(key) {
            return v.clone();
        }
        let out = if key == UNIT_KEY {
            vec![(UNIT_KEY.to_string(), UNIT_KEY.to_string())]
        } else {
            let g = decode_key(key).expect("valid key");
            coproduct_pairs_of(&g)
        };
        self.coproducts.insert(key.to_string(), out.clone());
        out
    }

    /// `Δ(G)`.
    pub fn coproduct_key(&mut self, key: &str) -> GraphTensor {
        let mut t = GraphTensor::zero();
        for (a, b) in self.coproduct_pairs(key) {
            t.add(vec![a, b], Rational::one());
        }
        t
    }

    /// `Δ′(G) = Δ(G) − 1⊗G − G⊗1` (zero on the unit).
    pub fn reduced_coproduct_key(&mut self, key: &str) -> GraphTensor {
        if key == UNIT_KEY {
            return GraphTensor::zero();
        }
        let mut t = self.coproduct_key(key);
        t.add(vec![UNIT_KEY.into(), key.into()], -Rational::one());
        t.add(vec![key.into(), UNIT_KEY.into()], -Rational::one());
        t
    }

    /// `(Δ′)ⁿ(G)`, iterating on the first letter: `(Δ′ ⊗ id^{⊗(n−1)}) (Δ′)^{n−1}`.
    pub fn reduced_coproduct_power_key(&mut self, key: &str, n: usize) -> GraphTensor {
        let mut t = GraphTensor::word(vec![key.to_string()]);
        for _ in 0..n {
            t = t.map_letter(0, |l| self.reduced_coproduct_key(l));
        }
        t
    }

    /// `(Δ′)ⁿ(G)` iterating on the last letter instead; by coassociativity it
    /// agrees with [`Hopf::reduced_coproduct_power_key`].
    pub fn reduced_coproduct_power_key_right(&mut self, key: &str, n: usize) -> GraphTensor {
        let mut t = GraphTensor::word(vec![key.to_string()]);
        for i in 0..n {
            t = t.map_letter(i, |l| self.reduced_coproduct_key(l));
        }
        t
    }

    /// Least `n ≥ 1` with `(Δ′)ⁿ G = 0` (0 for the unit).
    pub fn coradical_degree_key(&mut self, key: &str) -> usize {
        if key == UNIT_KEY {
            return 0;
        }
        let mut n = 1;
        let mut t = self.reduced_coproduct_key(key);
        while !t.is_zero() {
            n += 1;
            t = t.map_letter(0, |l| self.reduced_coproduct_key(l));
        }
        n
    }

    /// Antipode by the recursion `S(G) = −G − Σ_{∅≠γ⊊G} S(γ)·(G/γ)`.
    pub fn antipode_key(&mut self, key: &str) -> GraphTensor {
        if let Some(s) = self.antipodes.get(key) {
            return s.clone();
        }
        let out = if key == UNIT_KEY {
            GraphTensor::word(vec![UNIT_KEY.to_string()])
        } else {
            let mut s = GraphTensor::zero();
            s.add(vec![key.to_string()], -Rational::one());
            for (a, b) in self.coproduct_pairs(key) {
                if a == UNIT_KEY || b == UNIT_KEY {
                    continue;
                }
                let sa = self.antipode_key(&a);
                for (w, c) in sa.terms() {
                    s.add(vec![multiply_keys(&w[0], &b)], -c.clone());
                }
            }
            s
        };
        self.antipodes.insert(key.to_string(), out.clone());
        out
    }

    /// `m(S ⊗ id)Δ(G)` (should equal `ε(G)·1`).
    pub fn antipode_left_check(&mut self, key: &str) -> GraphTensor {
        let d = self.coproduct_key(key);
        d.map_letter(0, |l| self.antipode_key(l)).multiply()
    }

    /// `m(id ⊗ S)Δ(G)` (should equal `ε(G)·1`).
    pub fn antipode_right_check(&mut self, key: &str) -> GraphTensor {
        let d = self.coproduct_key(key);
        d.map_letter(1, |l| self.antipode_key(l)).multiply()
    }

    /// `(Δ⊗id)Δ(G)` and `(id⊗Δ)Δ(G)`.
    pub fn coassociativity_sides(&mut self, key: &str) -> (GraphTensor, GraphTensor) {
        let d = self.coproduct_key(key);
        let left = d.map_letter(0, |l| self.coproduct_key(l));
        let right = d.map_letter(1, |l| self.coproduct_key(l));
        (left, right)
    }

    /// `(ε⊗id)Δ(G)` and `(id⊗ε)Δ(G)` as single-letter combinations.
    pub fn counit_sides(&mut self, key: &str) -> (GraphTensor, GraphTensor) {
        let d = self.coproduct_key(key);
        let eps = |l: &str| {
            if l == UNIT_KEY {
                GraphTensor::word(vec![])
            } else {
                GraphTensor::zero()
            }
        };
        (d.map_letter(0, eps), d.map_letter(1, eps))
    }
}

/// Pairs `(key(γ), key(G/γ))` over motic `γ ⊆ G` including `∅` and `G`.
pub fn coproduct_pairs_of(g: &FeynmanGraph) -> Vec<(String, String)> {
    let mut out = vec![(UNIT_KEY.to_string(), canonical_key(g))];
    for gamma in g.motic_subgraphs(true) {
        out.push((canonical_key(&g.subgraph(gamma)), canonical_key(&g.quotient(gamma))));
    }
    out
}

/// `Δ(G) = Σ_γ γ ⊗ G/γ` over all motic `γ ⊆ G` (including `∅` and `G`).
pub fn coproduct(g: &FeynmanGraph) -> GraphTensor {
    let mut t = GraphTensor::zero();
    for (a, b) in coproduct_pairs_of(g) {
        t.add(vec![a, b], Rational::one());
    }
    t
}

/// `(Δ′)ⁿ G`.
pub fn reduced_coproduct_power(g: &FeynmanGraph, n: usize) -> GraphTensor {
    Hopf::new().reduced_coproduct_power_key(&canonical_key(g), n)
}

/// Least `n` with `(Δ′)ⁿ G = 0`.
pub fn coradical_degree(g: &FeynmanGraph) -> usize {
    Hopf::new().coradical_degree_key(&canonical_key(g))
}

/// The antipode `S(G)` as a combination of single-letter words.
pub fn antipode(g: &FeynmanGraph) -> GraphTensor {
    Hopf::new().antipode_key(&canonical_key(g))
}

/// A descendant word with its degree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Descendant {
    pub word: Word,
    pub degree: i64,
}

/// Closure of `{G}` under `d_e` (edge quotient of a letter with at least two
/// edges) and `d_γ` (split of a letter along a strict nonempty motic
/// subgraph).  Sorted by degree (descending), then word.
pub fn descendants(g: &FeynmanGraph) -> Vec<Descendant> {
    let start: Word = vec![canonical_key(g)];
    let mut seen: BTreeSet<Word> = BTreeSet::new();
    let mut stack = vec![start];
    let mut letter_moves: HashMap<String, (Vec<String>, Vec<(String, String)>)> = HashMap::new();
    while let Some(w) = stack.pop() {
        if !seen.insert(w.clone()) {
            continue;
        }
        for i in 0..w.len() {
            let moves = letter_moves
                .entry(w[i].clone())
                .or_insert_with(|| letter_descendant_moves(&w[i]))
                .clone();
            for q in moves.0 {
                let mut nw = w.clone();
                nw[i] = q;
                stack.push(nw);
            }
            for (a, b) in moves.1 {
                let mut nw: Word = w[..i].to_vec();
                nw.push(a);
                nw.push(b);
                nw.extend(w[i + 1..].iter().cloned());
                stack.push(nw);
            }
        }
    }
    let mut out: Vec<Descendant> = seen
        .into_iter()
        .map(|word| {
            let degree = word_degree(&word);
            Descendant { word, degree }
        })
        .collect();
    out.sort_by(|a, b| b.degree.cmp(&a.degree).then_with(|| a.word.cmp(&b.word)));
    out
}

/// Images of one letter under the `d_e` and `d_γ` operators.
fn letter_descendant_moves(key: &str) -> (Vec<String>, Vec<(String, String)>) {
    if key == UNIT_KEY {
        return (Vec::new(), Vec::new());
    }
    let g = decode_key(key).expect("valid key");
    let mut edge_moves = BTreeSet::new();
    if g.n_edges() >= 2 {
        for e in g.edges() {
            edge_moves.insert(canonical_key(&g.quotient(EdgeSet::singleton(e.label))));
        }
    }
    let mut split_moves = BTreeSet::new();
    for gamma in g.motic_subgraphs(false) {
        split_moves.insert((canonical_key(&g.subgraph(gamma)), canonical_key(&g.quotient(gamma))));
    }
    (edge_moves.into_iter().collect(), split_moves.into_iter().collect())
}

/// Both sides of `Δ c_e = (c_e ⊗ id + id ⊗ c_e) Δ` on `G`, where
/// `c_e G = G//e` (zero when `e` is a tadpole) and `c_e` acts on the tensor
/// factor containing the edge `e`.
pub fn differential_compat_sides(g: &FeynmanGraph, e: EdgeLabel) -> (GraphTensor, GraphTensor) {
    let mut lhs = GraphTensor::zero();
    if let Some(c) = g.contract_edge(e) {
        lhs = coproduct(&c);
    }
    let mut rhs = GraphTensor::zero();
    let mut pairs: Vec<EdgeSet> = vec![EdgeSet::empty()];
    pairs.extend(g.motic_subgraphs(true));
    for gamma in pairs {
        if gamma.contains(e) {
            let sub = g.subgraph(gamma);
            if let Some(c) = sub.contract_edge(e) {
                rhs.add(vec![canonical_key(&c), canonical_key(&g.quotient(gamma))], Rational::one());
            }
        } else {
            let quo = g.quotient(gamma);
            if let Some(c) = quo.contract_edge(e) {
                rhs.add(vec![canonical_key(&g.subgraph(gamma)), canonical_key(&c)], Rational::one());
            }
        }
    }
    (lhs, rhs)
}

/// Whether `Δ c_e = (c_e ⊗ id + id ⊗ c_e) Δ` holds on `G`.
pub fn check_differential_compat(g: &FeynmanGraph, e: EdgeLabel) -> bool {
    let (l, r) = differential_compat_sides(g, e);
    l == r
}

/// Whether every term of `Δ(G)` has a type-(0,0) letter (all-or-nothing
/// containment of masses and momenta).
pub fn all_or_nothing(t: &GraphTensor) -> bool {
    t.terms().all(|(w, _)| w.iter().any(|l| crate::canon::key_is_type_00(l)))
}

/// Components of a letter as separate keys.
pub fn letter_components(key: &str) -> Vec<String> {
    key_components(key).into_iter().map(str::to_string).collect()
}

/// Decodes a letter.
pub fn letter_graph(key: &str) -> Result<FeynmanGraph> {
    decode_key(key)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn banana(n: usize) -> FeynmanGraph {
        let edges: Vec<_> = (0..n).map(|_| (1, 2, None)).collect();
        FeynmanGraph::new([1, 2], &edges, &[]).unwrap()
    }

    fn tadpole() -> FeynmanGraph {
        FeynmanGraph::new([1], &[(1, 1, None)], &[]).unwrap()
    }

    fn dunce() -> FeynmanGraph {
        FeynmanGraph::new(
            [1, 2, 3],
            &[(1, 2, Some(1)), (1, 3, None), (2, 3, None), (2, 3, None)],
            &[(1, 1), (2, 2)],
        )
        .unwrap()
    }

    #[test]
    fn tadpole_is_primitive() {
        let t = tadpole();
        let d = coproduct(&t);
        let k = canonical_key(&t);
        let mut expect = GraphTensor::zero();
        expect.add(vec![UNIT_KEY.into(), k.clone()], Rational::one());
        expect.add(vec![k.clone(), UNIT_KEY.into()], Rational::one());
        assert_eq!(d, expect);
        assert_eq!(coradical_degree(&t), 1);
        assert_eq!(antipode(&t), {
            let mut s = GraphTensor::zero();
            s.add(vec![k], -Rational::one());
            s
        });
    }

    #[test]
    fn three_banana() {
        let g = banana(3);
        let mut h = Hopf::new();
        let k = canonical_key(&g);
        let red = h.reduced_coproduct_key(&k);
        // three labelled subgraphs, all isomorphic: one word with coefficient 3
        let total: Rational = red.terms().map(|(_, c)| c.clone()).sum();
        assert_eq!(total, Rational::from_integer(3.into()));
        for (w, _) in red.terms() {
            assert_eq!(w[0], canonical_key(&banana(2)));
            assert_eq!(w[1], canonical_key(&tadpole()));
        }
        assert_eq!(h.coradical_degree_key(&k), 2);
        let l = h.antipode_left_check(&k);
        let r = h.antipode_right_check(&k);
        assert!(l.is_zero() && r.is_zero());
        let (a, b) = h.coassociativity_sides(&k);
        assert_eq!(a, b);
    }

    #[test]
    fn dunce_cap_differential_failure() {
        let g = dunce();
        assert!(!check_differential_compat(&g, 1));
        assert!(coradical_degree(&g) <= 3);
        assert!(all_or_nothing(&coproduct(&g)));
    }

    #[test]
    fn type_00_is_compatible() {
        let g = banana(3);
        for e in 1..=3 {
            assert!(check_differential_compat(&g, e));
        }
        let t = tadpole();
        assert!(check_differential_compat(&t, 1));
    }
}
