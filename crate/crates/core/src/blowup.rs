//! Iterated blow-ups `P^B → P^S` along the coordinate linear subspaces
//! `L_I = {α_i = 0, i ∈ I}`, `I ∈ B`, represented by their atlas of charts
//! indexed by maximal flags.
//!
//! A chart `(F, c)` is a flag `∅ = I_0 ⊊ I_1 ⊊ … ⊊ I_{k+1} = S` of members of
//! `B` with choices `j_n ∈ I_n ∖ I_{n−1}`.  Its coordinates `β_x` are indexed by
//! `x ∈ S ∖ {j_{k+1}}`, and
//!
//! ```text
//! π*(α_{j_n}) = β_{j_n} β_{j_{n+1}} ⋯ β_{j_k}
//! π*(α_i)     = β_i β_{j_n} ⋯ β_{j_k}        for i ∈ I_n ∖ (I_{n−1} ∪ {j_n})
//! ```
//!
//! (with `β_{j_{k+1}} = 1`).  The exceptional divisor `D_{I_r}` is `β_{j_r} = 0`
//! and the strict transform `D_i` of a coordinate hyperplane is `β_i = 0`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{EdgeLabel, EdgeSet, FeynmanGraph};
use crate::poly::{KinPoly, Monomial, Rational};

/// A union-closed family `B ⊂ 2^S` containing `S`, with singletons removed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnionClosedFamily {
    ground: EdgeSet,
    members: BTreeSet<EdgeSet>,
}

impl UnionClosedFamily {
    /// Validates and normalises a family: it must be closed under unions and
    /// contain the ground set; singletons (other than a one-element ground
    /// set) are stripped, since blowing up a divisor does nothing.
    pub fn new(ground: EdgeSet, members: impl IntoIterator<Item = EdgeSet>) -> Result<Self> {
        let members: BTreeSet<EdgeSet> = members.into_iter().filter(|m| !m.is_empty()).collect();
        if ground.is_empty() {
            return Err(Error::NotUnionClosed("the ground set is empty".into()));
        }
        if !members.contains(&ground) {
            return Err(Error::NotUnionClosed(format!("the ground set {ground} is not a member")));
        }
        for &a in &members {
            if !a.is_subset(ground) {
                return Err(Error::NotUnionClosed(format!("{a} is not a subset of {ground}")));
            }
            for &b in &members {
                if !members.contains(&a.union(b)) {
                    return Err(Error::NotUnionClosed(format!("{a} ∪ {b} is missing")));
                }
            }
        }
        let members = members.into_iter().filter(|m| m.len() >= 2 || *m == ground).collect();
        Ok(UnionClosedFamily { ground, members })
    }

    /// `B_G`: the motic subgraphs of `G` (all of `E_G` included).
    pub fn of_graph(g: &FeynmanGraph) -> Result<Self> {
        let mut members = g.motic_subgraphs(false);
        members.push(g.all_edges());
        Self::new(g.all_edges(), members)
    }

    pub fn ground(&self) -> EdgeSet {
        self.ground
    }

    /// Members (all of size ≥ 2, plus the ground set).
    pub fn members(&self) -> &BTreeSet<EdgeSet> {
        &self.members
    }

    pub fn contains(&self, s: EdgeSet) -> bool {
        self.members.contains(&s)
    }

    /// Exceptional divisor labels: members `I` with `2 ≤ |I| ≤ |S| − 1`.
    pub fn exceptional_members(&self) -> Vec<EdgeSet> {
        self.members.iter().copied().filter(|&m| m != self.ground && m.len() >= 2).collect()
    }

    /// All divisors `D_i` (`i ∈ S`) and `D_I` (exceptional members).
    pub fn divisors(&self) -> Vec<Divisor> {
        let mut v: Vec<Divisor> = self.ground.iter().map(Divisor::Coord).collect();
        v.extend(self.exceptional_members().into_iter().map(Divisor::Exc));
        v
    }

    /// Largest member strictly inside `top` avoiding `j` (the union of all
    /// such members), if any.
    fn max_member_avoiding(&self, top: EdgeSet, j: EdgeLabel) -> Option<EdgeSet> {
        let u = self
            .members
            .iter()
            .filter(|&&m| m.is_strict_subset(top) && !m.contains(j))
            .fold(EdgeSet::empty(), |acc, &m| acc.union(m));
        (!u.is_empty()).then_some(u)
    }

    /// The subfamily `B(n) = {I ∈ B : |I| ≥ |S| − n − 1}` used in the
    /// inductive construction of the blow-up.
    pub fn truncated(&self, n: usize) -> UnionClosedFamily {
        let min = self.ground.len().saturating_sub(n + 1);
        UnionClosedFamily {
            ground: self.ground,
            members: self.members.iter().copied().filter(|m| m.len() >= min).collect(),
        }
    }

    /// `B^I = {J ∈ B : J ⊆ I}` over the ground set `I` (kept with singletons
    /// that arise), and `B_I = {J ∖ I : J ∈ B, J ⊋ I}` over `S ∖ I`.
    pub fn face_decomposition(&self, i: EdgeSet) -> (Vec<EdgeSet>, Vec<EdgeSet>) {
        let upper: Vec<EdgeSet> = self.members.iter().copied().filter(|m| m.is_subset(i)).collect();
        let upper = if upper.is_empty() { vec![i] } else { upper };
        let mut lower: Vec<EdgeSet> = self
            .members
            .iter()
            .copied()
            .filter(|m| i.is_strict_subset(*m))
            .map(|m| m.difference(i))
            .collect();
        lower.sort_by(|a, b| a.lex_cmp(*b));
        (upper, lower)
    }
}

/// A divisor of `P^B`: the strict transform of a coordinate hyperplane or an
/// exceptional divisor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Divisor {
    Coord(EdgeLabel),
    Exc(EdgeSet),
}

impl Divisor {
    /// The subset of `S` indexing the divisor.
    pub fn set(self) -> EdgeSet {
        match self {
            Divisor::Coord(i) => EdgeSet::singleton(i),
            Divisor::Exc(s) => s,
        }
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divisor::Coord(i) => write!(f, "D{i}"),
            Divisor::Exc(s) => write!(f, "D{s}"),
        }
    }
}

impl Serialize for Divisor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The intersection rule: `D_I ∩ D_J ≠ ∅` iff `I ⊂ J`, `J ⊂ I`, or
/// `I ∩ J = ∅` and `I ∪ J ∉ B`.
pub fn divisor_incidence(b: &UnionClosedFamily, x: Divisor, y: Divisor) -> bool {
    let (i, j) = (x.set(), y.set());
    i.is_subset(j) || j.is_subset(i) || (i.is_disjoint(j) && !b.contains(i.union(j)))
}

/// A maximal flag chart `(F, c)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlagChart {
    /// `I_1 ⊊ … ⊊ I_{k+1} = S`.
    pub flag: Vec<EdgeSet>,
    /// `j_1, …, j_{k+1}`.
    pub choices: Vec<EdgeLabel>,
}

/// Result of pulling a polynomial back to a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPullback {
    /// Exponent of `β_{j_r}` factored out, per exceptional label `j_r` (`r ≤ k`).
    pub exceptional: BTreeMap<EdgeLabel, u32>,
    /// The strict transform (the pullback divided by that monomial).
    pub strict: KinPoly,
}

impl FlagChart {
    /// Number of exceptional levels `k`.
    pub fn k(&self) -> usize {
        self.flag.len() - 1
    }

    pub fn ground(&self) -> EdgeSet {
        *self.flag.last().unwrap()
    }

    /// The level `n` (1-based) with `i ∈ I_n ∖ I_{n−1}`.
    pub fn level(&self, i: EdgeLabel) -> usize {
        self.flag.iter().position(|s| s.contains(i)).expect("label in ground set") + 1
    }

    /// Chart coordinates `S ∖ {j_{k+1}}`.
    pub fn coordinates(&self) -> Vec<EdgeLabel> {
        let last = *self.choices.last().unwrap();
        self.ground().iter().filter(|&x| x != last).collect()
    }

    /// Exceptional coordinates `j_1, …, j_k`.
    pub fn exceptional_coordinates(&self) -> Vec<EdgeLabel> {
        self.choices[..self.k()].to_vec()
    }

    /// Whether `x` is one of the choices `j_n`.
    pub fn is_choice(&self, x: EdgeLabel) -> bool {
        self.choices.contains(&x)
    }

    /// `π*(α_i)` as a list of `(β label, exponent)`.
    pub fn alpha_image(&self, i: EdgeLabel) -> Vec<(EdgeLabel, u16)> {
        let n = self.level(i);
        let mut out = Vec::new();
        if !self.is_choice(i) {
            out.push((i, 1));
        }
        for m in n..=self.k() {
            out.push((self.choices[m - 1], 1));
        }
        out
    }

    /// Divisors visible in the chart: `D_{I_r}` (`r ≤ k`) and `D_i` for the
    /// non-chosen labels.
    pub fn divisors(&self) -> Vec<Divisor> {
        let mut v: Vec<Divisor> = self.flag[..self.k()].iter().map(|&s| Divisor::Exc(s)).collect();
        v.extend(self.ground().iter().filter(|&x| !self.is_choice(x)).map(Divisor::Coord));
        v.sort();
        v
    }

    /// The chart coordinate whose vanishing is the given divisor, if visible.
    pub fn coordinate_of(&self, d: Divisor) -> Option<EdgeLabel> {
        match d {
            Divisor::Exc(s) => self.flag[..self.k()].iter().position(|&f| f == s).map(|r| self.choices[r]),
            Divisor::Coord(i) => (!self.is_choice(i)).then_some(i),
        }
    }

    /// Exponents of the Jacobian `π*(∏ dα) = ∏_r β_{j_r}^{|I_r| − 1} dβ`.
    pub fn jacobian(&self) -> BTreeMap<EdgeLabel, u32> {
        (0..self.k()).map(|r| (self.choices[r], self.flag[r].len() as u32 - 1)).collect()
    }

    /// Pulls `P` back along `π` and factors out the largest monomial in the
    /// exceptional coordinates.
    pub fn pullback(&self, p: &KinPoly) -> ChartPullback {
        let img = p.substitute_monomials(|i| if self.ground().contains(i) { self.alpha_image(i) } else { vec![(i, 1)] });
        let min = img.min_alpha_exponents();
        let mut divide = vec![0u16; min.len()];
        let mut exceptional = BTreeMap::new();
        for j in self.exceptional_coordinates() {
            let e = min.get(j as usize - 1).copied().unwrap_or(0);
            if (j as usize) <= divide.len() {
                divide[j as usize - 1] = e;
            }
            exceptional.insert(j, e as u32);
        }
        let strict = if img.is_zero() { img } else { img.divide_alpha_monomial(&divide) };
        ChartPullback { exceptional, strict }
    }

    /// Integer matrix of `α`-exponents in `β`-coordinates: rows indexed by
    /// `S`, columns by the chart coordinates.
    pub fn alpha_exponent_matrix(&self) -> Vec<Vec<i64>> {
        let coords = self.coordinates();
        self.ground()
            .iter()
            .map(|i| {
                let img = self.alpha_image(i);
                coords
                    .iter()
                    .map(|c| img.iter().filter(|(l, _)| l == c).map(|(_, e)| *e as i64).sum())
                    .collect()
            })
            .collect()
    }

    /// Integer matrix of `β`-coordinates as Laurent monomials in `α`
    /// (`β_{j_n} = α_{j_n}/α_{j_{n+1}}`, `β_i = α_i/α_{j_n}`): rows indexed
    /// by the coordinates, columns by `S`.
    pub fn beta_exponent_matrix(&self) -> Vec<Vec<i64>> {
        let ground: Vec<EdgeLabel> = self.ground().to_vec();
        let col = |l: EdgeLabel| ground.iter().position(|&x| x == l).unwrap();
        self.coordinates()
            .iter()
            .map(|&x| {
                let mut row = vec![0i64; ground.len()];
                row[col(x)] += 1;
                if let Some(n) = self.choices.iter().position(|&j| j == x) {
                    row[col(self.choices[n + 1])] -= 1;
                } else {
                    let n = self.level(x);
                    row[col(self.choices[n - 1])] -= 1;
                }
                row
            })
            .collect()
    }

    /// The sub-charts `(F^{I_r}, c^{I_r})` on `I_r` and `(F_{I_r}, c_{I_r})` on
    /// `S ∖ I_r`, for `1 ≤ r ≤ k`.
    pub fn split_at(&self, r: usize) -> (FlagChart, FlagChart) {
        assert!(r >= 1 && r <= self.k());
        let ir = self.flag[r - 1];
        let upper = FlagChart { flag: self.flag[..r].to_vec(), choices: self.choices[..r].to_vec() };
        let lower = FlagChart {
            flag: self.flag[r..].iter().map(|s| s.difference(ir)).collect(),
            choices: self.choices[r..].to_vec(),
        };
        (upper, lower)
    }

    /// Whether the strict transform of `L_I` meets this chart, decided by
    /// lifting a generic curve `α_i = t c_i` (`i ∈ I`) approaching the generic
    /// point of `L_I`: the lift has a limit in the chart iff no coordinate
    /// `β_x = α^{v_x}` acquires a negative total exponent on `I`.  Valid when
    /// no member of the blown-up family is contained in `I`.
    pub fn strict_transform_meets(&self, i: EdgeSet) -> bool {
        let ground: Vec<EdgeLabel> = self.ground().to_vec();
        self.beta_exponent_matrix().iter().all(|row| {
            let s: i64 = ground.iter().zip(row).filter(|(l, _)| i.contains(**l)).map(|(_, e)| e).sum();
            s >= 0
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "flag": self.flag.iter().map(|s| s.to_vec()).collect::<Vec<_>>(),
            "choices": self.choices,
            "map": self.ground().iter().map(|i| {
                json!({"alpha": i, "beta": self.alpha_image(i).iter().map(|(l, e)| vec![*l as u64, *e as u64]).collect::<Vec<_>>()})
            }).collect::<Vec<_>>(),
            "divisors": self.divisors().iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// All maximal flag charts of `B`, sorted by `(flag, choices)`.
pub fn enumerate_flags(b: &UnionClosedFamily) -> Vec<FlagChart> {
    let mut out = Vec::new();
    // Build top-down: (flag from the top, choices from the top).
    fn rec(b: &UnionClosedFamily, top: EdgeSet, flag: &mut Vec<EdgeSet>, choices: &mut Vec<EdgeLabel>, out: &mut Vec<FlagChart>) {
        // `top` is the current I_n; the lower level is determined by j_n.
        let lower_floor = EdgeSet::empty();
        for j in top.iter() {
            let below = b.max_member_avoiding(top, j).unwrap_or(lower_floor);
            flag.push(top);
            choices.push(j);
            if below.is_empty() {
                let mut f = flag.clone();
                let mut c = choices.clone();
                f.reverse();
                c.reverse();
                out.push(FlagChart { flag: f, choices: c });
            } else {
                rec(b, below, flag, choices, out);
            }
            flag.pop();
            choices.pop();
        }
    }
    rec(b, b.ground(), &mut Vec::new(), &mut Vec::new(), &mut out);
    out.sort_by(|x, y| {
        let fx: Vec<Vec<u32>> = x.flag.iter().map(|s| s.to_vec()).collect();
        let fy: Vec<Vec<u32>> = y.flag.iter().map(|s| s.to_vec()).collect();
        fx.cmp(&fy).then_with(|| x.choices.cmp(&y.choices))
    });
    out
}

/// Checks maximality of a chart directly: no member inserts strictly between
/// consecutive flag members while avoiding the upper choice.
pub fn is_maximal(b: &UnionClosedFamily, c: &FlagChart) -> bool {
    let mut prev = EdgeSet::empty();
    for (n, &top) in c.flag.iter().enumerate() {
        let j = c.choices[n];
        if !top.contains(j) || prev.contains(j) {
            return false;
        }
        if b.members().iter().any(|&m| prev.is_strict_subset(m) && m.is_strict_subset(top) && !m.contains(j)) {
            return false;
        }
        prev = top;
    }
    true
}

// ---------------------------------------------------------------------------
// Chart transitions

/// Integer matrix of the coordinate change `β^A ↦ β^B` (rows: coordinates of
/// `B`, columns: coordinates of `A`); the map is monomial, `β^B_x = ∏ (β^A)^{T_{x,y}}`.
pub fn transition_matrix(a: &FlagChart, b: &FlagChart) -> Vec<Vec<i64>> {
    let ma = a.alpha_exponent_matrix();
    let eb = b.beta_exponent_matrix();
    let n = ma.first().map_or(0, |r| r.len());
    eb.iter()
        .map(|row| (0..n).map(|y| row.iter().zip(&ma).map(|(e, m)| e * m[y]).sum()).collect())
        .collect()
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, r)| x * r[j]).sum()).collect())
        .collect()
}

/// Exact integer determinant by fraction-free (Bareiss) elimination.
pub fn det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

/// Outcome of the chart-transition consistency check between two charts.
#[derive(Clone, Debug)]
pub struct TransitionCheck {
    pub unimodular: bool,
    pub inverse_consistent: bool,
}

/// Checks that `β^A ↦ β^B` is a monomial isomorphism of tori (unimodular
/// exponent matrix) whose inverse is the transition `β^B ↦ β^A`.
pub fn check_transition(a: &FlagChart, b: &FlagChart) -> TransitionCheck {
    let t_ab = transition_matrix(a, b);
    let t_ba = transition_matrix(b, a);
    let d = det(&t_ab);
    let prod = mat_mul(&t_ab, &t_ba);
    let id = prod.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &x)| x == (i == j) as i64));
    TransitionCheck { unimodular: d.abs() == 1, inverse_consistent: id }
}

// ---------------------------------------------------------------------------
// Face poset

/// One face of the `B`-polytope: the intersection of a set of divisors.
#[derive(Clone, Debug, Serialize)]
pub struct Face {
    pub divisors: Vec<Divisor>,
    pub dimension: usize,
}

/// Face poset of the `B`-polytope, ordered by inclusion of faces.
#[derive(Clone, Debug, Serialize)]
pub struct FacePoset {
    pub faces: Vec<Face>,
    /// Covering relations `(smaller face, larger face)` as indices.
    pub covers: Vec<(usize, usize)>,
}

impl FacePoset {
    pub fn facets(&self) -> Vec<&Face> {
        self.faces.iter().filter(|f| f.divisors.len() == 1).collect()
    }

    pub fn vertices(&self) -> Vec<&Face> {
        let top = self.faces.iter().map(|f| f.divisors.len()).max().unwrap_or(0);
        self.faces.iter().filter(|f| f.divisors.len() == top && top > 0).collect()
    }
}

/// The face poset: a set of divisors is a face iff its members are all
/// visible in one chart (each chart's corner is a vertex of the polytope).
pub fn face_poset(b: &UnionClosedFamily) -> FacePoset {
    let dim = b.ground().len() - 1;
    let mut sets: BTreeSet<Vec<Divisor>> = BTreeSet::new();
    for c in enumerate_flags(b) {
        let ds = c.divisors();
        for mask in 0u64..(1u64 << ds.len()) {
            let sub: Vec<Divisor> = ds.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, d)| *d).collect();
            sets.insert(sub);
        }
    }
    let mut faces: Vec<Face> = sets
        .into_iter()
        .map(|divisors| Face { dimension: dim - divisors.len(), divisors })
        .collect();
    faces.sort_by(|a, b| a.divisors.len().cmp(&b.divisors.len()).then_with(|| a.divisors.cmp(&b.divisors)));
    let index: BTreeMap<Vec<Divisor>, usize> = faces.iter().enumerate().map(|(i, f)| (f.divisors.clone(), i)).collect();
    let mut covers = Vec::new();
    for (i, f) in faces.iter().enumerate() {
        for k in 0..f.divisors.len() {
            let mut smaller = f.divisors.clone();
            smaller.remove(k);
            covers.push((i, index[&smaller]));
        }
    }
    covers.sort();
    FacePoset { faces, covers }
}

// ---------------------------------------------------------------------------
// Affine model

/// A rational function `num / den` in the α (or β) variables.
#[derive(Clone, Debug)]
struct RatFn {
    num: KinPoly,
    den: KinPoly,
}

impl RatFn {
    fn eq(&self, other: &RatFn) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
    fn mul(&self, other: &RatFn) -> RatFn {
        RatFn { num: &self.num * &other.num, den: &self.den * &other.den }
    }
}

/// Report of the affine-model verification.
#[derive(Clone, Debug, Default, Serialize)]
pub struct AffineRingReport {
    pub generators: usize,
    pub relations_checked: usize,
    pub partition_of_unity_checked: usize,
    pub localisations_checked: usize,
    pub failures: Vec<String>,
}

impl AffineRingReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Verifies the defining relations of `R_B` for the generators
/// `b_{I/J} = α_I/α_J` (`∅ ≠ I ⊆ J ∈ B`), the partitions of unity
/// `Σ_{i∈J} b_{i/J} = 1`, the chart localisations
/// `b_{I/J} ↦ (P_I/P_J) ∏_{r=ℓ_1}^{ℓ_2−1} β_{j_r}` (agreement with `π*` and
/// absence of exceptional denominators), and the inverse coordinate formulas
/// `β_i = b_{i/I_n}/b_{j_n/I_n}`, `β_{j_n} = b_{j_n/I_{n+1}}/b_{j_{n+1}/I_{n+1}}`.
pub fn affine_ring_check(b: &UnionClosedFamily) -> AffineRingReport {
    let mut rep = AffineRingReport::default();
    let alpha_sum = KinPoly::alpha_sum;
    let gen = |i: EdgeSet, j: EdgeSet| RatFn { num: alpha_sum(i), den: alpha_sum(j) };
    let one = RatFn { num: KinPoly::one(), den: KinPoly::one() };
    let members: Vec<EdgeSet> = b.members().iter().copied().collect();
    for &j in &members {
        for i in j.subsets().filter(|s| !s.is_empty()) {
            rep.generators += 1;
            // b_{I/J} = Σ_{i∈I} b_{i/J}
            let sum = i.iter().fold(KinPoly::zero(), |acc, x| &acc + &KinPoly::alpha(x));
            let lhs = gen(i, j);
            let rhs = RatFn { num: sum, den: alpha_sum(j) };
            rep.relations_checked += 1;
            if !lhs.eq(&rhs) {
                rep.failures.push(format!("additivity fails for b_{{{i}/{j}}}"));
            }
            // b_{I/J} b_{J/K} = b_{I/K}
            for &k in members.iter().filter(|k| j.is_subset(**k)) {
                rep.relations_checked += 1;
                if !gen(i, j).mul(&gen(j, k)).eq(&gen(i, k)) {
                    rep.failures.push(format!("multiplicativity fails for {i}/{j}/{k}"));
                }
            }
        }
        rep.relations_checked += 1;
        if !gen(j, j).eq(&one) {
            rep.failures.push(format!("b_{{{j}/{j}}} ≠ 1"));
        }
        rep.partition_of_unity_checked += 1;
        let total = j.iter().fold(KinPoly::zero(), |acc, x| &acc + &KinPoly::alpha(x));
        if !(RatFn { num: total, den: alpha_sum(j) }).eq(&one) {
            rep.failures.push(format!("partition of unity fails for {j}"));
        }
    }

    for chart in enumerate_flags(b) {
        let k = chart.k();
        let level_of = |s: EdgeSet| chart.flag.iter().position(|f| s.is_subset(*f)).unwrap() + 1;
        let exc = chart.exceptional_coordinates();
        let mut pullbacks: BTreeMap<EdgeSet, ChartPullback> = BTreeMap::new();
        let mut strict_of = |s: EdgeSet| pullbacks.entry(s).or_insert_with(|| chart.pullback(&alpha_sum(s))).clone();
        for &j in &members {
            let pj = strict_of(j);
            // P_J must not vanish on any exceptional divisor.
            for &x in &exc {
                if pj.strict.substitute_alpha_value(x, &Rational::zero()).is_zero() {
                    rep.failures.push(format!("P_{j} vanishes on β_{x} = 0 in chart {:?}", chart.choices));
                }
            }
            for i in j.subsets().filter(|s| !s.is_empty()) {
                rep.localisations_checked += 1;
                let pi = strict_of(i);
                let (l1, l2) = (level_of(i), level_of(j));
                if l1 > l2 {
                    rep.failures.push(format!("exceptional denominator for b_{{{i}/{j}}}"));
                    continue;
                }
                // Expected exceptional exponents: β_{j_r} for r ≥ ℓ.
                for (r, &x) in exc.iter().enumerate() {
                    let want_i = (r + 1 >= l1) as u32;
                    let want_j = (r + 1 >= l2) as u32;
                    if pi.exceptional[&x] != want_i || pj.exceptional[&x] != want_j {
                        rep.failures.push(format!("unexpected exceptional exponent of α_{i} or α_{j}"));
                    }
                }
                let mono: EdgeSet = EdgeSet::from_labels((l1..l2).filter(|&r| r <= k).map(|r| chart.choices[r - 1]));
                // Both sides share the factor strict(P_I)/strict(P_J), so the
                // localisation agrees with π* iff the exceptional monomials do.
                let direct: EdgeSet = EdgeSet::from_labels(
                    exc.iter().copied().filter(|x| pi.exceptional[x] > pj.exceptional[x]),
                );
                let balanced = exc.iter().all(|x| pi.exceptional[x] <= pj.exceptional[x] + 1);
                if !(balanced && direct == mono) {
                    rep.failures.push(format!("localisation of b_{{{i}/{j}}} disagrees with π*"));
                }
            }
        }
        // Inverse coordinate formulas.
        for x in chart.coordinates() {
            rep.localisations_checked += 1;
            let (num, den) = match chart.choices.iter().position(|&j| j == x) {
                Some(n) => {
                    let top = chart.flag[n + 1];
                    (gen(EdgeSet::singleton(x), top), gen(EdgeSet::singleton(chart.choices[n + 1]), top))
                }
                None => {
                    let n = chart.level(x);
                    let top = chart.flag[n - 1];
                    (gen(EdgeSet::singleton(x), top), gen(EdgeSet::singleton(chart.choices[n - 1]), top))
                }
            };
            let ratio = RatFn { num: &num.num * &den.den, den: &num.den * &den.num };
            let pulled = RatFn {
                num: chart.pullback(&ratio.num).strict_times_exceptional(),
                den: chart.pullback(&ratio.den).strict_times_exceptional(),
            };
            let beta = RatFn { num: KinPoly::alpha(x), den: KinPoly::one() };
            if !pulled.eq(&beta) {
                rep.failures.push(format!("inverse coordinate formula fails for β_{x} in chart {:?}", chart.choices));
            }
        }
    }
    rep
}

impl ChartPullback {
    /// The full pullback `∏ β_{j}^{e_j} · strict`.
    pub fn strict_times_exceptional(&self) -> KinPoly {
        let mut m = KinPoly::one();
        for (&j, &e) in &self.exceptional {
            m = &m * &KinPoly::alpha(j).pow(e);
        }
        &m * &self.strict
    }
}

/// Strict transform restricted to `β_x = 0`.
pub fn restrict_to_divisor(p: &KinPoly, x: EdgeLabel) -> KinPoly {
    p.substitute_alpha_value(x, &Rational::zero())
}

/// Serialises an atlas for reports.
pub fn atlas_json(b: &UnionClosedFamily) -> serde_json::Value {
    let charts = enumerate_flags(b);
    let divisors = b.divisors();
    let incidence: Vec<Vec<bool>> = divisors
        .iter()
        .map(|&x| divisors.iter().map(|&y| divisor_incidence(b, x, y)).collect())
        .collect();
    let poset = face_poset(b);
    json!({
        "ground": b.ground().to_vec(),
        "family": b.members().iter().map(|s| s.to_vec()).collect::<Vec<_>>(),
        "charts": charts.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        "divisors": divisors.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "incidence": incidence,
        "faces": poset.faces.iter().map(|f| json!({
            "divisors": f.divisors.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "dimension": f.dimension,
        })).collect::<Vec<_>>(),
        "covers": poset.covers,
    })
}

/// Monomial with a single α-exponent vector (helper for tests).
pub fn alpha_monomial(exps: &[(EdgeLabel, u16)]) -> KinPoly {
    let n = exps.iter().map(|(l, _)| *l as usize).max().unwrap_or(0);
    let mut a = vec![0u16; n];
    for &(l, e) in exps {
        a[l as usize - 1] += e;
    }
    KinPoly::from_term(Monomial::new(a, vec![]), Rational::one())
}

// ---------------------------------------------------------------------------
// Inductive construction and graph-specific structure

/// Report of a family of exact checks.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CheckReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn expect(&mut self, cond: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !cond {
            self.failures.push(msg());
        }
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
    }
}

fn members_of_size_at_least(b: &UnionClosedFamily, min: usize) -> UnionClosedFamily {
    UnionClosedFamily {
        ground: b.ground,
        members: b.members.iter().copied().filter(|m| m.len() >= min).collect(),
    }
}

/// Verifies the flag-avoidance statement underlying the inductive
/// construction: for every `I ∈ B` of size `|S| − n − 1` and every chart of
/// `B(n − 1) = {J ∈ B : |J| ≥ |S| − n}`, the strict transform of `L_I` meets
/// the chart (decided geometrically by [`FlagChart::strict_transform_meets`])
/// iff `I ⊆ I_1 ∖ {j_1}`.
pub fn flag_avoidance_check(b: &UnionClosedFamily) -> CheckReport {
    let mut rep = CheckReport::default();
    let s = b.ground().len();
    for n in 0..s.saturating_sub(2) {
        let size = s - n - 1;
        let centres: Vec<EdgeSet> = b.members().iter().copied().filter(|m| m.len() == size).collect();
        if centres.is_empty() {
            continue;
        }
        let prev = members_of_size_at_least(b, s - n);
        for chart in enumerate_flags(&prev) {
            for &i in &centres {
                let geometric = chart.strict_transform_meets(i);
                let combinatorial = i.is_subset(chart.flag[0].without(chart.choices[0]));
                rep.expect(geometric == combinatorial, || {
                    format!("L_{i} in chart {:?}/{:?}: geometric {geometric}, flag rule {combinatorial}", chart.flag, chart.choices)
                });
            }
        }
    }
    rep
}

/// Compares the divisor-intersection rule with chart co-occurrence for every
/// pair of distinct divisors.
pub fn incidence_check(b: &UnionClosedFamily) -> CheckReport {
    let mut rep = CheckReport::default();
    let charts = enumerate_flags(b);
    let visible: Vec<BTreeSet<Divisor>> = charts.iter().map(|c| c.divisors().into_iter().collect()).collect();
    let ds = b.divisors();
    for (a, &x) in ds.iter().enumerate() {
        for &y in &ds[a + 1..] {
            let rule = divisor_incidence(b, x, y);
            let traced = visible.iter().any(|v| v.contains(&x) && v.contains(&y));
            rep.expect(rule == traced, || format!("{x} ∩ {y}: rule {rule}, charts {traced}"));
        }
    }
    rep
}

/// Checks every pair of charts for a consistent monomial transition.
pub fn transitions_check(b: &UnionClosedFamily) -> CheckReport {
    let mut rep = CheckReport::default();
    let charts = enumerate_flags(b);
    for a in &charts {
        for c in &charts {
            let t = check_transition(a, c);
            rep.expect(t.unimodular && t.inverse_consistent, || {
                format!("transition {:?} → {:?} inconsistent", a.choices, c.choices)
            });
        }
    }
    rep
}

/// For `B = B_G`: in every chart and at every exceptional level `r`,
/// * the exceptional exponent of `π*Ψ_G` along `β_{j_r}` is `h_{I_r}` and
///   that of `π*Ξ_G` is `h_{I_r} + 𝟙_{mm}(I_r)`;
/// * restricting the strict transforms to `β_{j_r} = 0` yields the product of
///   the strict transforms in the two sub-charts: `Ψ_γ Ψ_{G/γ}` for `Ψ`, and
///   `Ξ_γ Ψ_{G/γ}` (`γ` m.m.) or `Ψ_γ Ξ_{G/γ}` (otherwise) for `Ξ`.
pub fn graph_atlas_check(g: &FeynmanGraph) -> Result<CheckReport> {
    let b = UnionClosedFamily::of_graph(g)?;
    let psi_g = crate::symanzik::psi(g);
    let xi_g = crate::symanzik::xi(g);
    let mut rep = CheckReport::default();
    let mut sub_cache: BTreeMap<EdgeSet, (KinPoly, KinPoly, KinPoly, KinPoly)> = BTreeMap::new();
    for chart in enumerate_flags(&b) {
        let pg = chart.pullback(&psi_g);
        let xg = chart.pullback(&xi_g);
        for r in 1..=chart.k() {
            let gamma = chart.flag[r - 1];
            let j = chart.choices[r - 1];
            let h = g.loop_number_of(gamma) as u32;
            let mm = g.is_mm(gamma);
            rep.expect(pg.exceptional[&j] == h, || {
                format!("Ψ exponent along D{gamma} is {} ≠ h = {h}", pg.exceptional[&j])
            });
            if !xi_g.is_zero() {
                let want = h + mm as u32;
                rep.expect(xg.exceptional[&j] == want, || {
                    format!("Ξ exponent along D{gamma} is {} ≠ {want}", xg.exceptional[&j])
                });
            }
            let (psi_s, xi_s, psi_q, xi_q) = sub_cache
                .entry(gamma)
                .or_insert_with(|| {
                    let sub = g.edge_subgraph(gamma);
                    let quo = g.quotient(gamma);
                    (
                        crate::symanzik::psi(&sub),
                        crate::symanzik::xi(&sub),
                        crate::symanzik::psi(&quo),
                        crate::symanzik::xi(&quo),
                    )
                })
                .clone();
            let (upper, lower) = chart.split_at(r);
            let lhs = restrict_to_divisor(&pg.strict, j);
            let rhs = &upper.pullback(&psi_s).strict * &lower.pullback(&psi_q).strict;
            rep.expect(lhs == rhs, || format!("Ψ product identity fails on D{gamma} in chart {:?}", chart.choices));
            if !xi_g.is_zero() {
                let (a, c) = if mm { (&xi_s, &psi_q) } else { (&psi_s, &xi_q) };
                let lhs = restrict_to_divisor(&xg.strict, j);
                let rhs = &upper.pullback(a).strict * &lower.pullback(c).strict;
                rep.expect(lhs == rhs, || format!("Ξ product identity fails on D{gamma} in chart {:?}", chart.choices));
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn es(v: &[u32]) -> EdgeSet {
        EdgeSet::from_labels(v.iter().copied())
    }

    fn app2_family() -> UnionClosedFamily {
        UnionClosedFamily::new(es(&[1, 2, 3]), [es(&[1, 2]), es(&[1, 2, 3])]).unwrap()
    }

    #[test]
    fn projective_space_charts() {
        let b = UnionClosedFamily::new(es(&[1, 2, 3, 4]), [es(&[1, 2, 3, 4])]).unwrap();
        assert_eq!(enumerate_flags(&b).len(), 4);
    }

    #[test]
    fn app2_charts_and_poset() {
        let b = app2_family();
        let charts = enumerate_flags(&b);
        assert_eq!(charts.len(), 4);
        for c in &charts {
            assert!(is_maximal(&b, c));
        }
        let p = face_poset(&b);
        assert_eq!(p.facets().len(), 4);
        assert_eq!(p.vertices().len(), 4);
        for a in &charts {
            for c in &charts {
                let t = check_transition(a, c);
                assert!(t.unimodular && t.inverse_consistent);
            }
        }
        assert!(affine_ring_check(&b).ok());
        assert!(incidence_check(&b).ok());
        assert!(flag_avoidance_check(&b).ok());
    }

    fn app2_graph() -> FeynmanGraph {
        FeynmanGraph::new([1, 2, 3], &[(1, 2, Some(1)), (1, 3, Some(2)), (2, 3, None)], &[(2, 1), (3, 2)]).unwrap()
    }

    #[test]
    fn app2_strict_transform() {
        let g = app2_graph();
        let b = UnionClosedFamily::of_graph(&g).unwrap();
        assert_eq!(b, app2_family());
        let c = enumerate_flags(&b).into_iter().find(|c| c.choices == vec![2, 3]).unwrap();
        let pb = c.pullback(&crate::symanzik::xi(&g));
        assert_eq!(pb.exceptional[&2], 1);
        let want = crate::polyparse::parse_poly(
            "q^2 (a1 + 1) + (m1^2 a1 + m2^2)(a1 a2 + a2 + 1)",
            2,
        )
        .unwrap();
        assert_eq!(pb.strict, want);
        let rep = graph_atlas_check(&g).unwrap();
        assert!(rep.ok(), "{:?}", rep.failures);
    }

    #[test]
    fn wider_family_checks() {
        let b = UnionClosedFamily::new(
            es(&[1, 2, 3, 4, 5]),
            [es(&[1, 2]), es(&[3, 4]), es(&[1, 2, 3, 4]), es(&[1, 2, 3]), es(&[1, 2, 3, 4, 5])],
        )
        .unwrap();
        assert!(incidence_check(&b).ok());
        assert!(transitions_check(&b).ok());
        assert!(flag_avoidance_check(&b).ok());
        let r = affine_ring_check(&b);
        assert!(r.ok(), "{:?}", r.failures);
        for c in enumerate_flags(&b) {
            assert!(is_maximal(&b, &c));
        }
    }

    #[test]
    fn face_decomposition_examples() {
        let b = app2_family();
        assert_eq!(b.face_decomposition(es(&[1, 2])), (vec![es(&[1, 2])], vec![es(&[3])]));
        let (upper, lower) = b.face_decomposition(es(&[1, 2, 3]));
        assert_eq!(upper, b.members().iter().copied().collect::<Vec<_>>());
        assert!(lower.is_empty());
    }

    #[test]
    fn rejects_non_union_closed() {
        let r = UnionClosedFamily::new(es(&[1, 2, 3, 4]), [es(&[1, 2]), es(&[3, 4]), es(&[1, 2, 3, 4])]);
        assert!(r.is_ok());
        let r = UnionClosedFamily::new(es(&[1, 2, 3, 4, 5]), [es(&[1, 2]), es(&[3, 4]), es(&[1, 2, 3, 4, 5])]);
        assert!(matches!(r, Err(Error::NotUnionClosed(_))));
    }

    #[test]
    fn single_blowup_map() {
        // B = {{1,2}, S} over S = {1,2,3}: chart j_1 = 2, j_2 = 3 has
        // π*α_1 = β_1 β_2, π*α_2 = β_2, π*α_3 = 1.
        let b = app2_family();
        let c = enumerate_flags(&b).into_iter().find(|c| c.choices == vec![2, 3]).unwrap();
        assert_eq!(c.alpha_image(1), vec![(1, 1), (2, 1)]);
        assert_eq!(c.alpha_image(2), vec![(2, 1)]);
        assert_eq!(c.alpha_image(3), vec![]);
        assert_eq!(c.jacobian(), BTreeMap::from([(2, 1)]));
    }

    #[test]
    fn two_element_affine_model() {
        let b = UnionClosedFamily::new(es(&[1, 2]), [es(&[1, 2])]).unwrap();
        let r = affine_ring_check(&b);
        assert!(r.ok(), "{:?}", r.failures);
        assert_eq!(r.generators, 3);
    }

    #[test]
    fn determinant() {
        assert_eq!(det(&[vec![2, 1], vec![1, 1]]), 1);
        assert_eq!(det(&[vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(det(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]), -3);
    }
}
