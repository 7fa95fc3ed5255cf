//! Exact sparse polynomials in Schwinger parameters with kinematic
//! coefficients.
//!
//! A [`KinPoly`] is a finite sum of terms `c · α^a · κ^b` where `α_e` are the
//! Schwinger parameters (indexed by edge label), `κ` ranges over the kinematic
//! indeterminates [`KinVar`] (`s_{ij}` with `i ≤ j ≤ Q−1`, and `msq_k = m_k²`)
//! and `c` is an exact rational number.  Coefficient extraction with respect
//! to the α-variables yields polynomials in the kinematic variables only.
//!
//! The canonical text form groups terms by α-monomial (descending
//! lexicographic order of exponent vectors, `α_1` most significant) and prints
//! each kinematic coefficient in parentheses when it has several terms, e.g.
//! `msq1*a1^2 + (s1_1 + 2*msq1)*a1*a2 + msq1*a2^2`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeLabel, EdgeSet};

/// Exact rational numbers.
pub type Rational = BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational `p/q`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// A kinematic indeterminate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KinVar {
    /// `s_{ij} = q_i · q_j` with `1 ≤ i ≤ j ≤ Q−1`.
    S(u32, u32),
    /// `msq_k = m_k²`.
    Msq(u32),
}

impl KinVar {
    /// `s_{ij}` with the indices sorted.
    pub fn s(i: u32, j: u32) -> KinVar {
        KinVar::S(i.min(j), i.max(j))
    }
}

impl fmt::Display for KinVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KinVar::S(i, j) => write!(f, "s{i}_{j}"),
            KinVar::Msq(k) => write!(f, "msq{k}"),
        }
    }
}

/// A monomial `α^a κ^b`.  The α-exponent vector is indexed by `label − 1` and
/// kept without trailing zeros; the kinematic part is a sorted sparse list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    alpha: Vec<u16>,
    kin: Vec<(KinVar, u16)>,
}

impl Monomial {
    /// The monomial 1.
    pub fn one() -> Self {
        Monomial::default()
    }

    /// Monomial from a dense α-exponent vector and sparse kinematic part.
    pub fn new(mut alpha: Vec<u16>, kin: Vec<(KinVar, u16)>) -> Self {
        while alpha.last() == Some(&0) {
            alpha.pop();
        }
        let mut k: BTreeMap<KinVar, u16> = BTreeMap::new();
        for (v, e) in kin {
            *k.entry(v).or_default() += e;
        }
        Monomial {
            alpha,
            kin: k.into_iter().filter(|(_, e)| *e > 0).collect(),
        }
    }

    /// α-exponent vector (trailing zeros trimmed).
    pub fn alpha(&self) -> &[u16] {
        &self.alpha
    }

    /// Sparse kinematic exponents.
    pub fn kin(&self) -> &[(KinVar, u16)] {
        &self.kin
    }

    /// Exponent of `α_label`.
    pub fn alpha_exp(&self, label: EdgeLabel) -> u16 {
        self.alpha.get(label as usize - 1).copied().unwrap_or(0)
    }

    /// Total α-degree.
    pub fn alpha_degree(&self) -> u32 {
        self.alpha.iter().map(|&e| e as u32).sum()
    }

    /// α-degree restricted to the labels in `gamma`.
    pub fn gamma_degree(&self, gamma: EdgeSet) -> u32 {
        gamma.iter().map(|l| self.alpha_exp(l) as u32).sum()
    }

    /// Labels of α-variables occurring in the monomial.
    pub fn alpha_support(&self) -> EdgeSet {
        EdgeSet::from_labels(
            self.alpha
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, _)| i as EdgeLabel + 1),
        )
    }

    /// Product of monomials.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.alpha.len().max(other.alpha.len());
        let mut alpha = vec![0u16; n];
        for (i, a) in alpha.iter_mut().enumerate() {
            *a = self.alpha.get(i).copied().unwrap_or(0) + other.alpha.get(i).copied().unwrap_or(0);
        }
        let mut kin = Vec::with_capacity(self.kin.len() + other.kin.len());
        let (mut i, mut j) = (0, 0);
        while i < self.kin.len() || j < other.kin.len() {
            match (self.kin.get(i), other.kin.get(j)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    kin.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a.0 < b.0 => {
                    kin.push(*a);
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    kin.push(*b);
                    j += 1;
                }
                (Some(a), None) => {
                    kin.push(*a);
                    i += 1;
                }
                (None, Some(b)) => {
                    kin.push(*b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Monomial { alpha, kin }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.alpha.last() == Some(&0) {
            self.alpha.pop();
        }
        self
    }

    /// Copy with the α-part replaced.
    pub fn with_alpha(&self, alpha: Vec<u16>) -> Monomial {
        Monomial { alpha, kin: self.kin.clone() }.trimmed()
    }

    /// Kinematic part only.
    pub fn kin_part(&self) -> Monomial {
        Monomial { alpha: Vec::new(), kin: self.kin.clone() }
    }

    /// α part only.
    pub fn alpha_part(&self) -> Monomial {
        Monomial { alpha: self.alpha.clone(), kin: Vec::new() }
    }
}

/// Descending "dense lexicographic" comparison of sparse kinematic exponent
/// lists: the first variable (in [`KinVar`] order) where the exponents differ
/// decides, the larger exponent coming first.
fn kin_display_cmp(a: &[(KinVar, u16)], b: &[(KinVar, u16)]) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Less,
            (None, Some(_)) => return Ordering::Greater,
            (Some(x), Some(y)) => {
                if x.0 == y.0 {
                    if x.1 != y.1 {
                        return y.1.cmp(&x.1);
                    }
                    i += 1;
                    j += 1;
                } else if x.0 < y.0 {
                    return Ordering::Less;
                } else {
                    return Ordering::Greater;
                }
            }
        }
    }
}

/// Sparse polynomial over `Q` in α- and kinematic variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KinPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl KinPoly {
    pub fn zero() -> Self {
        KinPoly::default()
    }

    pub fn one() -> Self {
        KinPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        KinPoly::from_term(Monomial::one(), c)
    }

    pub fn from_term(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        KinPoly { terms }
    }

    /// The variable `α_label`.
    pub fn alpha(label: EdgeLabel) -> Self {
        let mut a = vec![0u16; label as usize];
        a[label as usize - 1] = 1;
        KinPoly::from_term(Monomial::new(a, vec![]), Rational::one())
    }

    /// A kinematic variable.
    pub fn kin(v: KinVar) -> Self {
        KinPoly::from_term(Monomial::new(vec![], vec![(v, 1)]), Rational::one())
    }

    /// Product of α-variables over an edge set.
    pub fn alpha_product(set: EdgeSet) -> Self {
        set.iter().fold(KinPoly::one(), |acc, l| &acc * &KinPoly::alpha(l))
    }

    /// Sum of α-variables over an edge set (`α_I`).
    pub fn alpha_sum(set: EdgeSet) -> Self {
        set.iter().fold(KinPoly::zero(), |acc, l| &acc + &KinPoly::alpha(l))
    }

    /// Builds a polynomial from `(monomial, coefficient)` pairs (summing
    /// duplicates).
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Self {
        let mut p = KinPoly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c · m` in place.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Coefficient of a monomial.
    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Whether the polynomial is a rational constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.alpha.is_empty() && m.kin.is_empty()).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Multiplies by a rational scalar.
    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return KinPoly::zero();
        }
        KinPoly {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// Non-negative integer power.
    pub fn pow(&self, n: u32) -> Self {
        let mut out = KinPoly::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// `(min, max)` total α-degree over the terms, `None` for zero.
    pub fn alpha_degree_range(&self) -> Option<(u32, u32)> {
        let mut it = self.terms.keys().map(|m| m.alpha_degree());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), d| (lo.min(d), hi.max(d))))
    }

    /// The α-degree if the polynomial is α-homogeneous (`None` otherwise or for
    /// zero).
    pub fn alpha_degree(&self) -> Option<u32> {
        self.alpha_degree_range().and_then(|(lo, hi)| (lo == hi).then_some(lo))
    }

    /// Maximal exponent of `α_label`.
    pub fn max_degree_in(&self, label: EdgeLabel) -> u16 {
        self.terms.keys().map(|m| m.alpha_exp(label)).max().unwrap_or(0)
    }

    /// Largest label with a nonzero α-exponent somewhere.
    pub fn max_alpha_label(&self) -> EdgeLabel {
        self.terms.keys().map(|m| m.alpha.len() as EdgeLabel).max().unwrap_or(0)
    }

    /// Minimal `γ`-degree over all terms (`None` for zero).
    pub fn min_gamma_degree(&self, gamma: EdgeSet) -> Option<u32> {
        self.terms.keys().map(|m| m.gamma_degree(gamma)).min()
    }

    /// Order of vanishing along the linear space `{α_e = 0, e ∈ γ}`: the
    /// minimal `γ`-degree of the monomials.
    pub fn order_of_vanishing(&self, gamma: EdgeSet) -> Result<u32> {
        self.min_gamma_degree(gamma).ok_or(Error::ZeroPolynomial)
    }

    /// Restriction `P|_{α_e = 0}`.
    pub fn set_alpha_zero(&self, label: EdgeLabel) -> Self {
        KinPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.alpha_exp(label) == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Coefficient of `α_label^k` (a polynomial free of `α_label`).
    pub fn coefficient_of_alpha_power(&self, label: EdgeLabel, k: u16) -> Self {
        let idx = label as usize - 1;
        KinPoly::from_terms(self.terms.iter().filter(|(m, _)| m.alpha_exp(label) == k).map(|(m, c)| {
            let mut a = m.alpha.clone();
            if idx < a.len() {
                a[idx] = 0;
            }
            (m.with_alpha(a), c.clone())
        }))
    }

    /// Groups the terms by α-monomial; values are kinematic-only polynomials.
    pub fn by_alpha(&self) -> BTreeMap<Vec<u16>, KinPoly> {
        let mut out: BTreeMap<Vec<u16>, KinPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.alpha.clone())
                .or_default()
                .add_term(m.kin_part(), c.clone());
        }
        out
    }

    /// Kinematic coefficient of a given α-monomial.
    pub fn kin_coefficient(&self, alpha: &[u16]) -> KinPoly {
        let probe = Monomial::new(alpha.to_vec(), vec![]);
        KinPoly::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.alpha == probe.alpha)
                .map(|(m, c)| (m.kin_part(), c.clone())),
        )
    }

    /// Whether all terms are free of kinematic variables.
    pub fn is_kinematics_free(&self) -> bool {
        self.terms.keys().all(|m| m.kin.is_empty())
    }

    /// Keeps only the terms whose monomial satisfies the predicate.
    pub fn filter_terms<F: Fn(&Monomial) -> bool>(&self, f: F) -> Self {
        KinPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| f(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Applies a monomial substitution `α_i ↦ β^{img(i)}` (β indexed by the same
    /// labels).  `img(i)` lists `(label, exponent)` pairs.
    pub fn substitute_monomials<F: Fn(EdgeLabel) -> Vec<(EdgeLabel, u16)>>(&self, img: F) -> Self {
        let maxl = self.max_alpha_label();
        let images: Vec<Vec<(EdgeLabel, u16)>> = (1..=maxl).map(&img).collect();
        let width = images
            .iter()
            .flat_map(|v| v.iter().map(|(l, _)| *l as usize))
            .max()
            .unwrap_or(0);
        KinPoly::from_terms(self.terms.iter().map(|(m, c)| {
            let mut b = vec![0u16; width];
            for (i, &e) in m.alpha.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                for &(l, k) in &images[i] {
                    b[l as usize - 1] += k * e;
                }
            }
            (m.with_alpha(b), c.clone())
        }))
    }

    /// Per-label minimal α-exponent over all terms (dense, indexed by
    /// `label − 1`, length = max label).
    pub fn min_alpha_exponents(&self) -> Vec<u16> {
        let n = self.max_alpha_label() as usize;
        let mut out: Option<Vec<u16>> = None;
        for m in self.terms.keys() {
            let dense: Vec<u16> = (0..n).map(|i| m.alpha.get(i).copied().unwrap_or(0)).collect();
            out = Some(match out {
                None => dense,
                Some(o) => o.iter().zip(&dense).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        out.unwrap_or_default()
    }

    /// Divides by the α-monomial `α^e` (which must divide every term).
    pub fn divide_alpha_monomial(&self, e: &[u16]) -> Self {
        KinPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut a = m.alpha.clone();
                    for (i, &k) in e.iter().enumerate() {
                        if k > 0 {
                            assert!(a.get(i).copied().unwrap_or(0) >= k, "monomial does not divide");
                            a[i] -= k;
                        }
                    }
                    (m.with_alpha(a), c.clone())
                })
                .collect(),
        }
    }

    /// Substitutes `α_label = value` for a rational value.
    pub fn substitute_alpha_value(&self, label: EdgeLabel, value: &Rational) -> Self {
        KinPoly::from_terms(self.terms.iter().map(|(m, c)| {
            let e = m.alpha_exp(label);
            let mut a = m.alpha.clone();
            if e > 0 {
                a[label as usize - 1] = 0;
            }
            let mut f = c.clone();
            for _ in 0..e {
                f *= value;
            }
            (m.with_alpha(a), f)
        }))
    }

    /// Whether every coefficient is an integer.
    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Coefficients as `f64` (lossy), with monomials.
    pub fn terms_f64(&self) -> Vec<(Monomial, f64)> {
        self.terms
            .iter()
            .map(|(m, c)| (m.clone(), c.to_f64().unwrap_or(f64::NAN)))
            .collect()
    }

    /// Canonical text form.
    pub fn to_canonical_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let groups = self.by_alpha();
        let mut out = String::new();
        for (i, (alpha, coeff)) in groups.iter().rev().enumerate() {
            let amono = format_alpha(alpha);
            let (negative, body) = format_group(&amono, coeff);
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }

    /// JSON representation: a list of `{alpha, kin, coeff}` objects in
    /// canonical order.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                serde_json::json!({
                    "alpha": m.alpha,
                    "kin": m.kin.iter().map(|(v, e)| (v.to_string(), *e)).collect::<Vec<_>>(),
                    "coeff": c.to_string(),
                })
            })
            .collect();
        serde_json::Value::Array(terms)
    }
}

fn format_alpha(alpha: &[u16]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in alpha.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("a{}", i + 1)),
            _ => parts.push(format!("a{}^{}", i + 1, e)),
        }
    }
    parts.join("*")
}

fn format_kin_monomial(kin: &[(KinVar, u16)]) -> String {
    kin.iter()
        .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
        .collect::<Vec<_>>()
        .join("*")
}

/// Formats `c · mono` for a single term with given rational `c ≥ 0`.
fn format_scaled(c: &Rational, mono: &str) -> String {
    match (c.is_one(), mono.is_empty()) {
        (true, true) => "1".into(),
        (true, false) => mono.into(),
        (false, true) => c.to_string(),
        (false, false) => format!("{c}*{mono}"),
    }
}

/// Returns `(negative, text)` for an α-group with kinematic coefficient.
fn format_group(amono: &str, coeff: &KinPoly) -> (bool, String) {
    let mut kterms: Vec<(&Monomial, &Rational)> = coeff.terms.iter().collect();
    kterms.sort_by(|a, b| kin_display_cmp(&a.0.kin, &b.0.kin));
    if kterms.len() == 1 {
        let (m, c) = kterms[0];
        let kin = format_kin_monomial(&m.kin);
        let mono = match (kin.is_empty(), amono.is_empty()) {
            (true, _) => amono.to_string(),
            (false, true) => kin,
            (false, false) => format!("{kin}*{amono}"),
        };
        return (c.is_negative(), format_scaled(&c.abs(), &mono));
    }
    let mut inner = String::new();
    let first_negative = kterms[0].1.is_negative();
    for (i, (m, c)) in kterms.iter().enumerate() {
        let body = format_scaled(&c.abs(), &format_kin_monomial(&m.kin));
        if i == 0 {
            if c.is_negative() && !amono.is_empty() {
                inner.push('-');
            }
        } else {
            inner.push_str(if c.is_negative() { " - " } else { " + " });
        }
        inner.push_str(&body);
    }
    if amono.is_empty() {
        // The α-free group is printed last, so it needs no parentheses.
        (first_negative, inner)
    } else {
        (false, format!("({inner})*{amono}"))
    }
}

impl fmt::Display for KinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

impl Add for &KinPoly {
    type Output = KinPoly;
    fn add(self, rhs: &KinPoly) -> KinPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for KinPoly {
    type Output = KinPoly;
    fn add(mut self, rhs: KinPoly) -> KinPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&KinPoly> for KinPoly {
    fn add_assign(&mut self, rhs: &KinPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl Sub for &KinPoly {
    type Output = KinPoly;
    fn sub(self, rhs: &KinPoly) -> KinPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Sub for KinPoly {
    type Output = KinPoly;
    fn sub(self, rhs: KinPoly) -> KinPoly {
        &self - &rhs
    }
}

impl Neg for &KinPoly {
    type Output = KinPoly;
    fn neg(self) -> KinPoly {
        KinPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul for &KinPoly {
    type Output = KinPoly;
    fn mul(self, rhs: &KinPoly) -> KinPoly {
        let mut out = KinPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for KinPoly {
    type Output = KinPoly;
    fn mul(self, rhs: KinPoly) -> KinPoly {
        &self * &rhs
    }
}

/// `(Σ c_i q_i)²` expressed in the basis `s_{ij}` (`i ≤ j ≤ Q−1`), after
/// eliminating `q_Q = −(q_1 + … + q_{Q−1})`.  `c` has length `Q`.
pub fn momentum_square(c: &[i64]) -> KinPoly {
    let q = c.len();
    if q == 0 {
        return KinPoly::zero();
    }
    let last = c[q - 1];
    let a: Vec<i64> = c[..q - 1].iter().map(|x| x - last).collect();
    let mut out = KinPoly::zero();
    for i in 0..a.len() {
        if a[i] == 0 {
            continue;
        }
        out.add_term(
            Monomial::new(vec![], vec![(KinVar::s(i as u32 + 1, i as u32 + 1), 1)]),
            rat(a[i] * a[i]),
        );
        for j in i + 1..a.len() {
            if a[j] != 0 {
                out.add_term(
                    Monomial::new(vec![], vec![(KinVar::s(i as u32 + 1, j as u32 + 1), 1)]),
                    rat(2 * a[i] * a[j]),
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_printing() {
        let a1 = KinPoly::alpha(1);
        let a2 = KinPoly::alpha(2);
        let m = KinPoly::kin(KinVar::Msq(1));
        let s = KinPoly::kin(KinVar::s(1, 1));
        let sum = &a1 + &a2;
        let xi = &(&s * &(&a1 * &a2)) + &(&m * &sum.pow(2));
        assert_eq!(xi.to_canonical_string(), "msq1*a1^2 + (s1_1 + 2*msq1)*a1*a2 + msq1*a2^2");
        assert_eq!(xi.alpha_degree(), Some(2));
        let diff = &xi - &xi;
        assert!(diff.is_zero());
        assert_eq!(diff.to_canonical_string(), "0");
        let neg = -&a1;
        assert_eq!(neg.to_canonical_string(), "-a1");
        assert_eq!((&a1 - &a2.scale(&ratio(1, 2))).to_canonical_string(), "a1 - 1/2*a2");
    }

    #[test]
    fn valuations() {
        let p = &(&KinPoly::alpha(1) * &KinPoly::alpha(3)) + &(&KinPoly::alpha(3) * &KinPoly::alpha(4));
        let g = EdgeSet::from_labels([3, 4]);
        assert_eq!(p.order_of_vanishing(g).unwrap(), 1);
        assert_eq!(p.order_of_vanishing(EdgeSet::empty()).unwrap(), 0);
        assert_eq!(KinPoly::zero().order_of_vanishing(g), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn momentum_squares() {
        // Q = 2: q1^2 = s11, q2^2 = (−q1)^2 = s11, (q1+q2)^2 = 0.
        assert_eq!(momentum_square(&[1, 0]), KinPoly::kin(KinVar::s(1, 1)));
        assert_eq!(momentum_square(&[0, 1]), KinPoly::kin(KinVar::s(1, 1)));
        assert!(momentum_square(&[1, 1]).is_zero());
        // Q = 3: (q1+q2)^2 = s11 + 2 s12 + s22.
        assert_eq!(momentum_square(&[1, 1, 0]).to_canonical_string(), "s1_1 + 2*s1_2 + s2_2");
    }

    #[test]
    fn substitution() {
        // α1 -> β1 β2, α2 -> β2
        let p = &KinPoly::alpha(1) + &KinPoly::alpha(2);
        let q = p.substitute_monomials(|l| if l == 1 { vec![(1, 1), (2, 1)] } else { vec![(2, 1)] });
        assert_eq!(q.to_canonical_string(), "a1*a2 + a2");
        assert_eq!(q.min_alpha_exponents(), vec![0, 1]);
        assert_eq!(q.divide_alpha_monomial(&[0, 1]).to_canonical_string(), "a1 + 1");
    }
}
