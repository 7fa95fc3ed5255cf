//! Graph polynomials `Ψ_G`, `Φ_G(q)` and `Ξ_G(q,m)`, contraction–deletion,
//! factorisation remainders and numeric kinematic points.
//!
//! Two independent implementations are provided for `Ψ` and `Φ`: direct
//! enumeration of spanning forests ([`psi`], [`phi`]) and the
//! contraction–deletion recursion with memoisation ([`CdEvaluator`]).
//!
//! Sign convention: squared momenta enter `Φ_G` with a positive sign,
//! `Φ_G = Σ_{T_1 ∪ T_2} (q^{T_1})² ∏_{e ∉ T} α_e`, and the Euclidean region has
//! all `s_I > 0`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeLabel, EdgeSet, FeynmanGraph, VertexId};
use crate::poly::{momentum_square, KinPoly, KinVar, Monomial, Rational};

/// First Symanzik polynomial `Ψ_G = Σ_T ∏_{e ∉ T} α_e` over spanning forests
/// with one tree per connected component (the product convention for
/// disconnected graphs).
pub fn psi(g: &FeynmanGraph) -> KinPoly {
    let all = g.all_edges();
    let mut out = KinPoly::zero();
    for t in g.spanning_k_trees(g.n_components()) {
        out.add_term(alpha_monomial(all.difference(t)), Rational::from_integer(1.into()));
    }
    out
}

/// Second Symanzik polynomial `Φ_G(q)` as a sum over spanning forests with
/// one more tree than `G` has components; each forest contributes the squared
/// momentum flowing between its two halves of the split component.
pub fn phi(g: &FeynmanGraph) -> KinPoly {
    if !g.has_momenta() {
        return KinPoly::zero();
    }
    let all = g.all_edges();
    let mut out = KinPoly::zero();
    for f in g.spanning_k_trees(g.n_components() + 1) {
        let coeff = forest_momentum_square(g, f);
        if coeff.is_zero() {
            continue;
        }
        let mono = KinPoly::from_term(alpha_monomial(all.difference(f)), Rational::from_integer(1.into()));
        out += &(&coeff * &mono);
    }
    out
}

/// `Ξ_G(q,m) = Φ_G(q) + (Σ_e m_e² α_e) Ψ_G`.
pub fn xi(g: &FeynmanGraph) -> KinPoly {
    let p = psi(g);
    &phi(g) + &(&mass_form(g) * &p)
}

/// `Σ_e m_e² α_e` over the massive edges.
pub fn mass_form(g: &FeynmanGraph) -> KinPoly {
    let mut out = KinPoly::zero();
    for e in g.edges() {
        if let Some(k) = e.mass {
            out += &(&KinPoly::kin(KinVar::Msq(k)) * &KinPoly::alpha(e.label));
        }
    }
    out
}

fn alpha_monomial(set: EdgeSet) -> Monomial {
    let n = set.iter().max().unwrap_or(0) as usize;
    let mut a = vec![0u16; n];
    for l in set.iter() {
        a[l as usize - 1] = 1;
    }
    Monomial::new(a, vec![])
}

/// `½ Σ_T (q^T)²` over the trees `T` of a spanning forest `f` of `g`.  For a
/// forest splitting the momentum-carrying component in two this equals
/// `(q^{T_1})²`.
fn forest_momentum_square(g: &FeynmanGraph, f: EdgeSet) -> KinPoly {
    let cm = g.component_map_of(f);
    let mut groups: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for (&v, &r) in &cm {
        groups.entry(r).or_default().push(v);
    }
    let mut total = KinPoly::zero();
    for vs in groups.values() {
        total += &momentum_square(&g.momentum_vector(vs.iter()));
    }
    total.scale(&Rational::new(1.into(), 2.into()))
}

/// Momentum square `(q^V)²` entering a vertex set.
pub fn momentum_square_of(g: &FeynmanGraph, vertices: &BTreeSet<VertexId>) -> KinPoly {
    momentum_square(&g.momentum_vector(vertices.iter()))
}

// ---------------------------------------------------------------------------
// Contraction–deletion

/// The pieces of the contraction–deletion relations
/// `Ψ_G = Ψ⁰_{G∖e} α_e + Ψ_{G//e}` and `Φ_G = Φ⁰_{G∖e} α_e + Φ_{G//e}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CdParts {
    pub psi0: KinPoly,
    pub psi_contracted: KinPoly,
    pub phi0: KinPoly,
    pub phi_contracted: KinPoly,
}

/// Computes the contraction–deletion pieces for edge `e` of a connected graph.
/// `Ψ⁰` is `Ψ_{G∖e}` unless `e` is a bridge (then 0); `Φ⁰` is `Φ_{G∖e}` unless
/// `e` is a bridge, in which case it is `Ψ_{G_1} Ψ_{G_2} (q^{G_1})²`.  The
/// contracted pieces vanish when `e` is a tadpole (`G//e` empty).
pub fn contraction_deletion(g: &FeynmanGraph, e: EdgeLabel) -> Result<CdParts> {
    if g.edge(e).is_none() {
        return Err(Error::InvalidInput(format!("edge {e} not in graph")));
    }
    let (psi_c, phi_c) = match g.contract_edge(e) {
        Some(c) => (psi(&c), phi(&c)),
        None => (KinPoly::zero(), KinPoly::zero()),
    };
    let deleted = g.delete(e).graph;
    let (psi0, phi0) = if g.is_bridge(e) {
        let (g1, g2) = split_at_bridge(g, e);
        let v1: BTreeSet<VertexId> = g1.vertices().iter().copied().collect();
        let q2 = momentum_square(&g.momentum_vector(v1.iter()));
        (KinPoly::zero(), &(&psi(&g1) * &psi(&g2)) * &q2)
    } else {
        (psi(&deleted), phi(&deleted))
    };
    Ok(CdParts { psi0, psi_contracted: psi_c, phi0, phi_contracted: phi_c })
}

/// The two sides of a bridge of a connected graph, as graphs without legs.
fn split_at_bridge(g: &FeynmanGraph, e: EdgeLabel) -> (FeynmanGraph, FeynmanGraph) {
    let rest = g.all_edges().without(e);
    let cm = g.component_map_of(rest);
    let edge = g.edge(e).unwrap();
    let r1 = cm[&edge.u];
    let side = |root: VertexId| -> FeynmanGraph {
        let vs: Vec<VertexId> = cm.iter().filter(|(_, &r)| r == root).map(|(&v, _)| v).collect();
        let vset: BTreeSet<VertexId> = vs.iter().copied().collect();
        let es: Vec<_> = g
            .edges()
            .iter()
            .filter(|x| x.label != e && vset.contains(&x.u))
            .cloned()
            .collect();
        FeynmanGraph::from_parts(vs, es, Vec::new(), 0)
    };
    (side(r1), side(cm[&edge.v]))
}

/// Memoised contraction–deletion evaluator for `Ψ` and `Φ`, independent of
/// spanning-forest enumeration.
#[derive(Default)]
pub struct CdEvaluator {
    psi_memo: HashMap<FeynmanGraph, KinPoly>,
    phi_memo: HashMap<FeynmanGraph, KinPoly>,
}

impl CdEvaluator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Connected pieces (with legs kept on the piece that carries them).
    fn pieces(g: &FeynmanGraph) -> Vec<FeynmanGraph> {
        let cm = g.component_map_of(g.all_edges());
        let mut groups: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for (&v, &r) in &cm {
            groups.entry(r).or_default().push(v);
        }
        groups
            .values()
            .map(|vs| {
                let vset: BTreeSet<VertexId> = vs.iter().copied().collect();
                let es: Vec<_> = g.edges().iter().filter(|x| vset.contains(&x.u)).cloned().collect();
                let legs: Vec<_> = g.legs().iter().filter(|l| vset.contains(&l.vertex)).cloned().collect();
                let q = if legs.is_empty() { 0 } else { g.n_momenta() };
                FeynmanGraph::from_parts(vs.clone(), es, legs, q)
            })
            .collect()
    }

    /// `Ψ_G` by contraction–deletion.
    pub fn psi(&mut self, g: &FeynmanGraph) -> KinPoly {
        if let Some(p) = self.psi_memo.get(g) {
            return p.clone();
        }
        let out = if g.n_edges() == 0 {
            KinPoly::one()
        } else if g.n_components() > 1 {
            Self::pieces(g).iter().fold(KinPoly::one(), |acc, p| &acc * &self.psi(p))
        } else {
            let e = g.edges()[0].label;
            let del = g.delete(e).graph;
            if g.is_tadpole(e) {
                &KinPoly::alpha(e) * &self.psi(&del)
            } else if g.is_bridge(e) {
                self.psi(&g.quotient(EdgeSet::singleton(e)))
            } else {
                &(&KinPoly::alpha(e) * &self.psi(&del)) + &self.psi(&g.quotient(EdgeSet::singleton(e)))
            }
        };
        self.psi_memo.insert(g.clone(), out.clone());
        out
    }

    /// `Φ_G` by contraction–deletion.
    pub fn phi(&mut self, g: &FeynmanGraph) -> KinPoly {
        if let Some(p) = self.phi_memo.get(g) {
            return p.clone();
        }
        let out = if !g.has_momenta() || g.n_edges() == 0 {
            KinPoly::zero()
        } else if g.n_components() > 1 {
            let mut acc = KinPoly::one();
            for p in Self::pieces(g) {
                let f = if p.has_momenta() { self.phi(&p) } else { self.psi(&p) };
                acc = &acc * &f;
            }
            acc
        } else {
            let e = g.edges()[0].label;
            let del = g.delete(e).graph;
            let quot = g.quotient(EdgeSet::singleton(e));
            if g.is_tadpole(e) {
                &KinPoly::alpha(e) * &self.phi(&del)
            } else if g.is_bridge(e) {
                let (g1, g2) = split_at_bridge(g, e);
                let v1: BTreeSet<VertexId> = g1.vertices().iter().copied().collect();
                let q2 = momentum_square(&g.momentum_vector(v1.iter()));
                let a = &(&self.psi(&g1) * &self.psi(&g2)) * &q2;
                &(&KinPoly::alpha(e) * &a) + &self.phi(&quot)
            } else {
                &(&KinPoly::alpha(e) * &self.phi(&del)) + &self.phi(&quot)
            }
        };
        self.phi_memo.insert(g.clone(), out.clone());
        out
    }
}

// ---------------------------------------------------------------------------
// Factorisations

/// Which factorisation identity to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FactorKind {
    /// `Ψ_G = Ψ_γ Ψ_{G/γ} + R`, remainder γ-degree `> h_γ`.
    PsiUV,
    /// `Φ_G = Ψ_γ Φ_{G/γ} + R`, remainder γ-degree `> h_γ`.
    PhiUV,
    /// `Φ_G = Φ_γ Ψ_{G/γ} + R` for momentum-spanning γ, γ-degree `> h_γ + 1`.
    PhiIR,
    /// `Ξ_G = Ψ_γ Ξ_{G/γ} + R`, remainder γ-degree `> h_γ`.
    XiUV,
    /// `Ξ_G = Ξ_γ Ψ_{G/γ} + R` for m.m. γ, remainder γ-degree `> h_γ + 1`.
    XiIR,
}

impl FactorKind {
    pub const ALL: [FactorKind; 5] = [
        FactorKind::PsiUV,
        FactorKind::PhiUV,
        FactorKind::PhiIR,
        FactorKind::XiUV,
        FactorKind::XiIR,
    ];

    pub fn is_ir(self) -> bool {
        matches!(self, FactorKind::PhiIR | FactorKind::XiIR)
    }

    pub fn name(self) -> &'static str {
        match self {
            FactorKind::PsiUV => "PsiUV",
            FactorKind::PhiUV => "PhiUV",
            FactorKind::PhiIR => "PhiIR",
            FactorKind::XiUV => "XiUV",
            FactorKind::XiIR => "XiIR",
        }
    }
}

impl std::str::FromStr for FactorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FactorKind::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown factorisation kind {s}")))
    }
}

/// Outcome of a factorisation check.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub kind: FactorKind,
    pub gamma: EdgeSet,
    pub whole: KinPoly,
    pub product: KinPoly,
    pub remainder: KinPoly,
    /// Minimal γ-degree of the remainder (`None` if the remainder vanishes).
    pub remainder_min_degree: Option<u32>,
    /// The remainder must have γ-degree strictly larger than this bound.
    pub bound: u32,
}

impl Factorization {
    /// Whether the remainder satisfies its degree bound.
    pub fn holds(&self) -> bool {
        self.remainder_min_degree.map_or(true, |d| d > self.bound)
    }
}

/// Polynomials of a graph, cached by graph.
#[derive(Default)]
pub struct PolyCache {
    memo: HashMap<FeynmanGraph, (KinPoly, KinPoly)>,
}

impl PolyCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// `(Ψ_G, Φ_G)`.
    pub fn psi_phi(&mut self, g: &FeynmanGraph) -> (KinPoly, KinPoly) {
        if let Some(v) = self.memo.get(g) {
            return v.clone();
        }
        let v = (psi(g), phi(g));
        self.memo.insert(g.clone(), v.clone());
        v
    }

    pub fn psi(&mut self, g: &FeynmanGraph) -> KinPoly {
        self.psi_phi(g).0
    }

    pub fn phi(&mut self, g: &FeynmanGraph) -> KinPoly {
        self.psi_phi(g).1
    }

    pub fn xi(&mut self, g: &FeynmanGraph) -> KinPoly {
        let (p, f) = self.psi_phi(g);
        &f + &(&mass_form(g) * &p)
    }
}

/// Computes `whole − product` for one of the factorisation identities.
pub fn factorization_remainder(g: &FeynmanGraph, gamma: EdgeSet, kind: FactorKind) -> Result<Factorization> {
    factorization_remainder_cached(g, gamma, kind, &mut PolyCache::new())
}

/// As [`factorization_remainder`] with a caller-provided polynomial cache.
pub fn factorization_remainder_cached(
    g: &FeynmanGraph,
    gamma: EdgeSet,
    kind: FactorKind,
    cache: &mut PolyCache,
) -> Result<Factorization> {
    if !gamma.is_subset(g.all_edges()) {
        return Err(Error::InvalidInput(format!("{gamma} is not an edge subgraph")));
    }
    match kind {
        FactorKind::PhiIR if !g.is_momentum_spanning(gamma) => {
            return Err(Error::NotMassMomentumSpanning(gamma.to_vec()))
        }
        FactorKind::XiIR if !g.is_mm(gamma) => return Err(Error::NotMassMomentumSpanning(gamma.to_vec())),
        _ => {}
    }
    let sub = g.edge_subgraph(gamma);
    let quo = g.quotient(gamma);
    let h = g.loop_number_of(gamma) as u32;
    let (whole, product, bound) = match kind {
        FactorKind::PsiUV => (cache.psi(g), &cache.psi(&sub) * &cache.psi(&quo), h),
        FactorKind::PhiUV => (cache.phi(g), &cache.psi(&sub) * &cache.phi(&quo), h),
        FactorKind::PhiIR => (cache.phi(g), &cache.phi(&sub) * &cache.psi(&quo), h + 1),
        FactorKind::XiUV => (cache.xi(g), &cache.psi(&sub) * &cache.xi(&quo), h),
        FactorKind::XiIR => (cache.xi(g), &cache.xi(&sub) * &cache.psi(&quo), h + 1),
    };
    let remainder = &whole - &product;
    let remainder_min_degree = remainder.min_gamma_degree(gamma);
    Ok(Factorization { kind, gamma, whole, product, remainder, remainder_min_degree, bound })
}

// ---------------------------------------------------------------------------
// Numeric kinematics

/// A numeric kinematic point: values of `s_{ij}` (`i ≤ j ≤ Q−1`) and `m_k²`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct KinPoint {
    pub n_momenta: u32,
    pub s: BTreeMap<(u32, u32), Complex64>,
    pub msq: BTreeMap<u32, Complex64>,
}

impl KinPoint {
    /// The empty point (for graphs without kinematics).
    pub fn empty() -> Self {
        KinPoint::default()
    }

    /// Value of a kinematic variable; unspecified values are zero.
    pub fn value(&self, v: KinVar) -> Complex64 {
        match v {
            KinVar::S(i, j) => self.s.get(&(i, j)).copied().unwrap_or_default(),
            KinVar::Msq(k) => self.msq.get(&k).copied().unwrap_or_default(),
        }
    }

    /// `s_I = (Σ_{i∈I} q_i)²` for a subset `I ⊆ {1..Q}`.
    pub fn s_of(&self, subset: &[u32]) -> Complex64 {
        let mut c = vec![0i64; self.n_momenta as usize];
        for &i in subset {
            c[i as usize - 1] += 1;
        }
        self.eval_kin_only(&momentum_square(&c))
    }

    /// Evaluates a kinematics-only polynomial (α-exponents must be zero).
    pub fn eval_kin_only(&self, p: &KinPoly) -> Complex64 {
        self.eval_kin(p).into_iter().map(|(_, c)| c).sum()
    }

    /// Substitutes the kinematic values, returning `(α-exponents, value)` pairs
    /// with combined α-monomials.
    pub fn eval_kin(&self, p: &KinPoly) -> Vec<(Vec<u16>, Complex64)> {
        let mut out: BTreeMap<Vec<u16>, Complex64> = BTreeMap::new();
        for (m, c) in p.terms() {
            let mut v = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
            for &(var, e) in m.kin() {
                v *= self.value(var).powu(e as u32);
            }
            *out.entry(m.alpha().to_vec()).or_default() += v;
        }
        out.into_iter().collect()
    }

    /// Evaluates `p` at the point and the given α-values (indexed by label−1).
    pub fn eval(&self, p: &KinPoly, alpha: &[f64]) -> Complex64 {
        self.eval_kin(p)
            .into_iter()
            .map(|(a, c)| {
                a.iter()
                    .enumerate()
                    .fold(c, |acc, (i, &e)| acc * alpha[i].powi(e as i32))
            })
            .sum()
    }

    /// Nonempty proper subsets `I ⊊ {1..Q}` and their `s_I`.
    pub fn all_s_subsets(&self) -> Vec<(Vec<u32>, Complex64)> {
        let q = self.n_momenta;
        let mut out = Vec::new();
        if q < 2 {
            return out;
        }
        for mask in 1u64..(1u64 << q) - 1 {
            let subset: Vec<u32> = (0..q).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect();
            let v = self.s_of(&subset);
            out.push((subset, v));
        }
        out
    }

    /// Genericity: `s_I + m_j² ≠ 0` for every nonempty `I ⊊ {1..Q}` and
    /// `j ∈ {0..M}` (with `m_0 = 0`).  Returns a description of the first
    /// violation.
    pub fn check_generic(&self, n_masses: u32, tol: f64) -> std::result::Result<(), String> {
        let mut masses = vec![(0u32, Complex64::default())];
        masses.extend((1..=n_masses).map(|k| (k, self.value(KinVar::Msq(k)))));
        for (subset, s) in self.all_s_subsets() {
            for (j, m) in &masses {
                if (s + m).norm() <= tol {
                    return Err(format!("s_{subset:?} + m_{j}^2 vanishes"));
                }
            }
        }
        for (j, m) in masses.iter().skip(1) {
            if m.norm() <= tol && self.n_momenta < 2 {
                return Err(format!("m_{j}^2 vanishes"));
            }
        }
        Ok(())
    }

    /// Membership in the region with `Re s_I > 0` and `Re m_j² > 0`.
    pub fn in_u_gen(&self, n_masses: u32) -> bool {
        self.all_s_subsets().iter().all(|(_, s)| s.re > 0.0)
            && (1..=n_masses).all(|k| self.value(KinVar::Msq(k)).re > 0.0)
    }

    /// A random Euclidean point: momenta `q_1..q_{Q−1}` are random vectors in
    /// `R^Q` (so all `s_I > 0` almost surely) and the masses are random in
    /// `(0.5, 2)`.
    pub fn random_euclidean<R: Rng>(n_momenta: u32, n_masses: u32, rng: &mut R) -> KinPoint {
        let dim = n_momenta.max(1) as usize;
        let qs: Vec<Vec<f64>> = (1..n_momenta)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let mut s = BTreeMap::new();
        for i in 0..qs.len() {
            for j in i..qs.len() {
                let dot: f64 = qs[i].iter().zip(&qs[j]).map(|(a, b)| a * b).sum();
                s.insert((i as u32 + 1, j as u32 + 1), Complex64::new(dot, 0.0));
            }
        }
        let msq = (1..=n_masses).map(|k| (k, Complex64::new(rng.gen_range(0.5..2.0), 0.0))).collect();
        KinPoint { n_momenta, s, msq }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyparse::parse_poly;

    fn dunce() -> FeynmanGraph {
        FeynmanGraph::new(
            [1, 2, 3],
            &[(1, 2, Some(1)), (1, 3, None), (2, 3, None), (2, 3, None)],
            &[(1, 1), (2, 2)],
        )
        .unwrap()
    }

    #[test]
    fn dunce_polynomials() {
        let g = dunce();
        let expect_psi = parse_poly("a1*a3 + a1*a4 + a2*a3 + a2*a4 + a3*a4", 2).unwrap();
        assert_eq!(psi(&g), expect_psi);
        let expect_phi = parse_poly("q1^2 (a1*a2*a3 + a1*a2*a4 + a1*a3*a4)", 2).unwrap();
        assert_eq!(phi(&g), expect_phi);
        let mut cd = CdEvaluator::new();
        assert_eq!(cd.psi(&g), psi(&g));
        assert_eq!(cd.phi(&g), phi(&g));
    }

    #[test]
    fn contraction_deletion_reassembles() {
        let g = dunce();
        for e in 1..=4 {
            let parts = contraction_deletion(&g, e).unwrap();
            let a = KinPoly::alpha(e);
            assert_eq!(&(&parts.psi0 * &a) + &parts.psi_contracted, psi(&g));
            assert_eq!(&(&parts.phi0 * &a) + &parts.phi_contracted, phi(&g));
        }
    }

    #[test]
    fn bridge_case() {
        // path 1-2-3 with legs at the ends: middle edges are bridges.
        let g = FeynmanGraph::new([1, 2, 3], &[(1, 2, None), (2, 3, None)], &[(1, 1), (3, 2)]).unwrap();
        let parts = contraction_deletion(&g, 1).unwrap();
        assert!(parts.psi0.is_zero());
        assert_eq!(parts.phi0, KinPoly::kin(KinVar::s(1, 1)));
        assert_eq!(&(&parts.phi0 * &KinPoly::alpha(1)) + &parts.phi_contracted, phi(&g));
    }

    #[test]
    fn dunce_psi_uv() {
        let g = dunce();
        let f = factorization_remainder(&g, EdgeSet::from_labels([3, 4]), FactorKind::PsiUV).unwrap();
        assert_eq!(f.remainder, parse_poly("a3*a4", 0).unwrap());
        assert_eq!(f.remainder_min_degree, Some(2));
        assert!(f.holds());
        assert!(matches!(
            factorization_remainder(&g, EdgeSet::from_labels([3, 4]), FactorKind::XiIR),
            Err(Error::NotMassMomentumSpanning(_))
        ));
    }

    #[test]
    fn kinpoint_genericity() {
        let mut rng = rand::rngs::mock::StepRng::new(1, 7);
        let _ = &mut rng;
        let mut p = KinPoint { n_momenta: 2, ..Default::default() };
        p.s.insert((1, 1), Complex64::new(1.0, 0.0));
        p.msq.insert(1, Complex64::new(1.0, 0.0));
        assert!(p.check_generic(1, 1e-12).is_ok());
        assert!(p.in_u_gen(1));
        p.msq.insert(1, Complex64::new(-1.0, 0.0));
        assert!(p.check_generic(1, 1e-12).is_err());
        assert!(!p.in_u_gen(1));
    }
}
