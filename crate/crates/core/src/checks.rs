//! Exact invariant suites over a single graph.  Each suite returns a
//! [`CheckReport`] counting the identities verified and describing failures.
//! They back the `selfcheck` command and the property-based test suites.

use crate::blowup::{affine_ring_check, graph_atlas_check, incidence_check, transitions_check, CheckReport, UnionClosedFamily};
use crate::canon::{canonical_key, key_is_type_00};
use crate::convergence::{chart_pole_check, sd, Integrand};
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, FeynmanGraph};
use crate::hopf::{all_or_nothing, word_bidegree, GraphTensor, Hopf};
use crate::poly::Rational;
use crate::reconstruct::Reconstructor;
use crate::strata::{chain_length_bound, max_chain_length};
use crate::symanzik::{factorization_remainder_cached, xi, FactorKind, PolyCache};

fn expect(rep: &mut CheckReport, cond: bool, msg: impl FnOnce() -> String) {
    rep.checked += 1;
    if !cond {
        rep.failures.push(msg());
    }
}

/// Every factorisation identity for every edge subset `γ`: UV kinds always,
/// `PhiIR` on momentum-spanning `γ` and `XiIR` on mass-momentum spanning `γ`.
pub fn factorization_suite(g: &FeynmanGraph, cache: &mut PolyCache) -> Result<CheckReport> {
    let mut rep = CheckReport::default();
    for gamma in g.all_edges().subsets() {
        for kind in FactorKind::ALL {
            let applicable = match kind {
                FactorKind::PhiIR => g.is_momentum_spanning(gamma),
                FactorKind::XiIR => g.is_mm(gamma),
                _ => true,
            };
            if !applicable {
                continue;
            }
            let f = factorization_remainder_cached(g, gamma, kind, cache)?;
            expect(&mut rep, f.holds(), || {
                format!(
                    "{} on {gamma}: remainder degree {:?} not above {}",
                    kind.name(),
                    f.remainder_min_degree,
                    f.bound
                )
            });
        }
    }
    Ok(rep)
}

/// Motic subgraphs are exactly the `Γ` whose valuation strictly exceeds that
/// of every strict subgraph.  Valuations are taken on `Ξ_G`, or on `Ψ_G` for
/// graphs without kinematics (where `Ξ_G = 0` and every subgraph is
/// mass-momentum spanning, so the two criteria coincide).
pub fn valuation_suite(g: &FeynmanGraph) -> Result<CheckReport> {
    let p = if g.has_kinematics() { xi(g) } else { crate::symanzik::psi(g) };
    let all = g.all_edges();
    let v: Vec<(EdgeSet, u32)> = all
        .subsets()
        .map(|s| Ok((s, p.order_of_vanishing(s)?)))
        .collect::<Result<_>>()?;
    let val = |s: EdgeSet| v.iter().find(|(t, _)| *t == s).map(|x| x.1).unwrap();
    let mut rep = CheckReport::default();
    for big in all.subsets().filter(|s| !s.is_empty()) {
        let vb = val(big);
        let increase = big.subsets().filter(|&s| s != big).all(|s| val(s) < vb);
        let motic = g.is_motic(big);
        expect(&mut rep, motic == increase, || {
            format!("{big}: motic = {motic} but strict valuation increase = {increase}")
        });
    }
    Ok(rep)
}

/// Coassociativity, counit laws, bigrading additivity, all-or-nothing
/// containment, coradical bound and both antipode identities on `G`.
pub fn hopf_suite(g: &FeynmanGraph, hopf: &mut Hopf) -> CheckReport {
    let mut rep = CheckReport::default();
    let key = canonical_key(g);
    let (l, r) = hopf.coassociativity_sides(&key);
    expect(&mut rep, l == r, || format!("coassociativity fails for {key}"));
    let (l, r) = hopf.counit_sides(&key);
    let id = GraphTensor::word(vec![key.clone()]);
    expect(&mut rep, l == id && r == id, || format!("counit fails for {key}"));
    let delta = hopf.coproduct_key(&key);
    let bideg = (g.n_edges(), g.loop_number());
    for (w, _) in delta.terms() {
        expect(&mut rep, word_bidegree(w) == bideg, || format!("bigrading of {w:?} differs from {bideg:?}"));
    }
    expect(&mut rep, all_or_nothing(&delta), || format!("all-or-nothing fails for {key}"));
    let bound = g.loop_number() + !key_is_type_00(&key) as usize;
    let cd = hopf.coradical_degree_key(&key);
    expect(&mut rep, cd <= bound.max(1), || format!("coradical degree {cd} exceeds {bound}"));
    let zero_or_unit = |t: &GraphTensor| {
        if key == crate::canon::UNIT_KEY {
            *t == GraphTensor::word(vec![key.clone()])
        } else {
            t.is_zero()
        }
    };
    let sl = hopf.antipode_left_check(&key);
    let sr = hopf.antipode_right_check(&key);
    expect(&mut rep, zero_or_unit(&sl) && zero_or_unit(&sr), || format!("antipode identity fails for {key}"));
    rep
}

/// Union-closed family of `B_G` checks: chart transitions, divisor incidence,
/// exceptional exponents and the product identity on exceptional divisors.
pub fn atlas_suite(g: &FeynmanGraph) -> Result<CheckReport> {
    let b = UnionClosedFamily::of_graph(g)?;
    let mut rep = transitions_check(&b);
    rep.merge(incidence_check(&b));
    rep.merge(graph_atlas_check(g)?);
    Ok(rep)
}

/// The defining relations, partitions of unity and chart localisations of
/// the affine model of `B_G`.
pub fn affine_suite(g: &FeynmanGraph) -> Result<CheckReport> {
    let b = UnionClosedFamily::of_graph(g)?;
    let a = affine_ring_check(&b);
    Ok(CheckReport {
        checked: a.relations_checked + a.partition_of_unity_checked + a.localisations_checked,
        failures: a.failures,
    })
}

/// Reconstruction from the axioms agrees with `(Ψ_G, Ξ_G)`.
pub fn reconstruction_suite(g: &FeynmanGraph, rec: &mut Reconstructor) -> Result<CheckReport> {
    let mut rep = CheckReport::default();
    let r = rec.reconstruct(g)?;
    expect(&mut rep, r.p == crate::symanzik::psi(g), || format!("P_G ≠ Ψ_G for {}", canonical_key(g)));
    expect(&mut rep, r.c == xi(g), || format!("C_G ≠ Ξ_G for {}", canonical_key(g)));
    Ok(rep)
}

/// Valuation formula for pole orders versus chart-derived exponents of the
/// Feynman integrand in dimension `d`.  Graphs without kinematics and with
/// nonzero superficial degree have no Feynman integrand and are skipped
/// (an empty report), as is the edgeless graph.
pub fn convergence_suite(g: &FeynmanGraph, d: u32) -> Result<CheckReport> {
    if g.n_edges() == 0 || (!g.has_kinematics() && sd(g, d)? != 0) {
        return Ok(CheckReport::default());
    }
    let it = Integrand::feynman(g, d)?;
    let c = chart_pole_check(g, &it)?;
    let (convergent, _) = crate::convergence::is_convergent(g, d)?;
    let mut rep = CheckReport { checked: c.checked, failures: c.failures };
    expect(&mut rep, convergent != c.chart_divergent, || {
        format!("criterion says convergent = {convergent}, charts show a pole = {}", c.chart_divergent)
    });
    Ok(rep)
}

/// Maximal chain length plus one equals the coradical degree, and neither
/// exceeds the bound `h_G + 𝟙_{kinematics}`.  The edgeless graph is the unit
/// (coradical degree 0, no strata beyond the empty chain).
pub fn strata_suite(g: &FeynmanGraph, hopf: &mut Hopf) -> CheckReport {
    let mut rep = CheckReport::default();
    let chains = max_chain_length(g);
    let cd = hopf.coradical_degree_key(&canonical_key(g));
    if g.n_edges() == 0 {
        expect(&mut rep, chains == 0 && cd == 0, || format!("unit: max chain {chains}, coradical degree {cd}"));
        return rep;
    }
    let bound = chain_length_bound(g);
    expect(&mut rep, chains + 1 == cd, || format!("max chain {chains} + 1 ≠ coradical degree {cd}"));
    expect(&mut rep, chains < bound.max(1), || format!("max chain {chains} not below bound {bound}"));
    rep
}

/// Runs the suites applicable to one graph, keyed by suite name.
pub fn all_suites(g: &FeynmanGraph) -> Result<Vec<(&'static str, CheckReport)>> {
    let mut out = Vec::new();
    out.push(("factorization", factorization_suite(g, &mut PolyCache::new())?));
    out.push(("valuation", valuation_suite(g)?));
    if g.is_motic(g.all_edges()) {
        let mut hopf = Hopf::new();
        out.push(("hopf", hopf_suite(g, &mut hopf)));
        out.push(("reconstruction", reconstruction_suite(g, &mut Reconstructor::new())?));
        out.push(("strata", strata_suite(g, &mut hopf)));
    }
    out.push(("atlas", atlas_suite(g)?));
    out.push(("affine", affine_suite(g)?));
    out.push(("convergence", convergence_suite(g, 4)?));
    Ok(out)
}

/// Coefficient-free comparison helper: the tensor `a − b`.
pub fn tensor_difference(a: &GraphTensor, b: &GraphTensor) -> GraphTensor {
    let mut d = a.clone();
    d.add_tensor(b, &-Rational::from_integer(1.into()));
    d
}

/// Converts a failing report into an error for callers that need one.
pub fn require(name: &str, rep: &CheckReport) -> Result<()> {
    if rep.ok() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} suite: {}", rep.failures.join("; "))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::named_graphs;

    #[test]
    fn named_graphs_pass_every_suite() {
        for n in named_graphs() {
            for (suite, rep) in all_suites(&n.graph).unwrap() {
                assert!(rep.ok(), "{} / {suite}: {:?}", n.name, rep.failures);
            }
        }
    }
}
