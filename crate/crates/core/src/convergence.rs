//! Power counting: superficial degrees of divergence, pole orders of the
//! pulled-back integrand along the divisors of the blow-up, the convergence
//! criterion, and admissibility of integrands with numerators.
//!
//! A general integrand is `ω = P Ω / (Ψ^A Ξ^B)` with `P ∈ Q[α]` homogeneous
//! of degree `A h_G + B(h_G + 1) − N_G`.  The Feynman integrand
//! `Ψ^{−d/2} (Ψ/Ξ)^{N − h d/2}` is the case `P = 1`, `A = d/2 + sd_G`,
//! `B = −sd_G`.

use serde::Serialize;
use serde_json::json;

use crate::blowup::{enumerate_flags, Divisor, FlagChart, UnionClosedFamily};
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, FeynmanGraph};
use crate::poly::KinPoly;
use crate::symanzik;

fn check_dimension(d: u32) -> Result<()> {
    if d == 0 || d % 2 != 0 {
        return Err(Error::OddDimension(d));
    }
    Ok(())
}

/// `sd_G = d h_G / 2 − N_G`.
pub fn sd(g: &FeynmanGraph, d: u32) -> Result<i64> {
    sd_of(g, g.all_edges(), d)
}

/// `sd_γ` for an edge subgraph.
pub fn sd_of(g: &FeynmanGraph, gamma: EdgeSet, d: u32) -> Result<i64> {
    check_dimension(d)?;
    Ok(d as i64 / 2 * g.loop_number_of(gamma) as i64 - gamma.len() as i64)
}

/// Pole order of `π*ω_G` along `D_γ` for a strict motic `γ`:
/// `1 + sd_γ`, minus `sd_G` when `γ` is m.m.
pub fn pole_order(g: &FeynmanGraph, gamma: EdgeSet, d: u32) -> Result<i64> {
    if gamma.is_empty() || !gamma.is_subset(g.all_edges()) || !g.is_motic_fast(gamma) {
        return Err(Error::NotMotic(gamma.to_vec()));
    }
    let base = 1 + sd_of(g, gamma, d)?;
    Ok(if g.is_mm(gamma) { base - sd(g, d)? } else { base })
}

/// Per-subgraph power-counting record.
#[derive(Clone, Debug, Serialize)]
pub struct SubgraphRecord {
    pub gamma: EdgeSet,
    pub loops: usize,
    pub is_mm: bool,
    pub sd: i64,
    pub pole_order: i64,
}

/// Power-counting report of a graph in dimension `d`.
#[derive(Clone, Debug, Serialize)]
pub struct PowerCountReport {
    pub dimension: u32,
    pub sd: i64,
    pub subgraphs: Vec<SubgraphRecord>,
    pub convergent: bool,
    pub witness: Option<EdgeSet>,
}

impl PowerCountReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "dimension": self.dimension,
            "sd": self.sd,
            "convergent": self.convergent,
            "witness": self.witness.map(|w| w.to_vec()),
            "subgraphs": self.subgraphs.iter().map(|r| json!({
                "gamma": r.gamma.to_vec(),
                "loops": r.loops,
                "mm": r.is_mm,
                "sd": r.sd,
                "pole_order": r.pole_order,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Full power-counting report over all strict nonempty motic subgraphs, in
/// lexicographic order.  The witness is the lexicographically least `γ` with
/// a positive pole order.
pub fn power_count(g: &FeynmanGraph, d: u32) -> Result<PowerCountReport> {
    let sd_g = sd(g, d)?;
    let mut subgraphs = Vec::new();
    for gamma in g.motic_subgraphs(false) {
        subgraphs.push(SubgraphRecord {
            gamma,
            loops: g.loop_number_of(gamma),
            is_mm: g.is_mm(gamma),
            sd: sd_of(g, gamma, d)?,
            pole_order: pole_order(g, gamma, d)?,
        });
    }
    let witness = subgraphs.iter().find(|r| r.pole_order > 0).map(|r| r.gamma);
    Ok(PowerCountReport { dimension: d, sd: sd_g, convergent: witness.is_none(), witness, subgraphs })
}

/// Convergence criterion: `sd_γ < 0` for strict motic non-m.m. `γ` and
/// `sd_γ < sd_G` for strict motic m.m. `γ`.
pub fn is_convergent(g: &FeynmanGraph, d: u32) -> Result<(bool, Option<EdgeSet>)> {
    let r = power_count(g, d)?;
    Ok((r.convergent, r.witness))
}

/// An integrand `P Ω / (Ψ^A Ξ^B)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Integrand {
    pub numerator: KinPoly,
    pub a: i64,
    pub b: i64,
}

impl Integrand {
    /// The Feynman integrand in dimension `d`.  For graphs without
    /// kinematics, `Ξ = 0` and only `sd_G = 0` gives a well-defined integrand.
    pub fn feynman(g: &FeynmanGraph, d: u32) -> Result<Integrand> {
        let s = sd(g, d)?;
        if s != 0 && !g.has_kinematics() {
            return Err(Error::InvalidInput(format!(
                "graph without kinematics has vanishing Ξ; its integrand needs sd_G = 0 (found {s})"
            )));
        }
        Ok(Integrand { numerator: KinPoly::one(), a: d as i64 / 2 + s, b: -s })
    }

    /// Checks homogeneity: `deg P = A h_G + B(h_G + 1) − N_G`.
    pub fn check_homogeneous(&self, g: &FeynmanGraph) -> Result<()> {
        if self.numerator.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !self.numerator.is_kinematics_free() {
            return Err(Error::InvalidInput("numerators must not depend on kinematics".into()));
        }
        let h = g.loop_number() as i64;
        let expected = self.a * h + self.b * (h + 1) - g.n_edges() as i64;
        let (lo, hi) = self.numerator.alpha_degree_range().unwrap();
        if lo != hi || lo as i64 != expected {
            return Err(Error::InhomogeneousNumerator { expected, found: if lo == hi { lo as i64 } else { -1 } });
        }
        if self.b != 0 && !g.has_kinematics() {
            return Err(Error::InvalidInput("B must be 0 for graphs without kinematics".into()));
        }
        Ok(())
    }

    /// Pole order along `D_γ` predicted by valuations:
    /// `A h_γ + B(h_γ + 𝟙_γ) − N_γ + 1 − v_γ(P)`.
    pub fn pole_order(&self, g: &FeynmanGraph, gamma: EdgeSet) -> i64 {
        let h = g.loop_number_of(gamma) as i64;
        let mm = g.is_mm(gamma) as i64;
        let vp = self.numerator.min_gamma_degree(gamma).unwrap_or(0) as i64;
        self.a * h + self.b * (h + mm) - gamma.len() as i64 + 1 - vp
    }
}

/// Admissibility of a numerator integrand: homogeneity and the valuation
/// bound `v_γ(P) ≥ A h_γ + B(h_γ + 𝟙_γ) − N_γ + 1` for all strict motic `γ`.
pub fn numerator_admissible(g: &FeynmanGraph, numerator: &KinPoly, a: i64, b: i64, d: u32) -> Result<bool> {
    check_dimension(d)?;
    let it = Integrand { numerator: numerator.clone(), a, b };
    it.check_homogeneous(g)?;
    Ok(g.motic_subgraphs(false).into_iter().all(|gamma| it.pole_order(g, gamma) <= 0))
}

/// First strict motic subgraph (lexicographically) along which the integrand
/// has a pole.
pub fn integrand_witness(g: &FeynmanGraph, it: &Integrand) -> Option<EdgeSet> {
    g.motic_subgraphs(false).into_iter().find(|&gamma| it.pole_order(g, gamma) > 0)
}

/// Order of vanishing of `π*(P)/(π*Ψ^A π*Ξ^B)·Jacobian` along the chart
/// coordinate `x`, computed directly from the pullbacks.
pub fn chart_valuation(chart: &FlagChart, it: &Integrand, psi: &KinPoly, xi: &KinPoly, x: u32) -> i64 {
    let ord = |p: &KinPoly| -> i64 {
        if p.is_zero() {
            return 0;
        }
        let pb = chart.pullback(p);
        match pb.exceptional.get(&x) {
            Some(&e) => e as i64,
            None => pb.strict.min_gamma_degree(EdgeSet::singleton(x)).unwrap_or(0) as i64,
        }
    };
    let jac = chart.jacobian().get(&x).copied().unwrap_or(0) as i64;
    ord(&it.numerator) - it.a * ord(psi) - it.b * ord(xi) + jac
}

/// Result of comparing the valuation formula with chart-derived exponents.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ChartPoleCheck {
    pub checked: usize,
    pub failures: Vec<String>,
    /// Whether some chart shows a pole along some visible divisor.
    pub chart_divergent: bool,
}

/// For every chart of `B_G` and every divisor visible in it, compares the
/// chart-derived pole order of the integrand with the valuation formula
/// (`D_γ` for exceptional divisors and motic singletons).  Also reports
/// whether any pole is visible at all.
pub fn chart_pole_check(g: &FeynmanGraph, it: &Integrand) -> Result<ChartPoleCheck> {
    let b = UnionClosedFamily::of_graph(g)?;
    let psi = symanzik::psi(g);
    let xi = if it.b != 0 { symanzik::xi(g) } else { KinPoly::zero() };
    let mut out = ChartPoleCheck::default();
    for chart in enumerate_flags(&b) {
        for div in chart.divisors() {
            let x = chart.coordinate_of(div).unwrap();
            let pole = -chart_valuation(&chart, it, &psi, &xi, x);
            if pole > 0 {
                out.chart_divergent = true;
            }
            let gamma = div.set();
            if gamma == g.all_edges() {
                continue;
            }
            let expected = match div {
                Divisor::Exc(_) => Some(it.pole_order(g, gamma)),
                Divisor::Coord(_) if g.is_motic_fast(gamma) => Some(it.pole_order(g, gamma)),
                Divisor::Coord(_) => None,
            };
            if let Some(e) = expected {
                out.checked += 1;
                if e != pole {
                    out.failures.push(format!(
                        "pole order along {div} in chart {:?}: charts give {pole}, formula {e}",
                        chart.choices
                    ));
                }
            } else if pole > 0 {
                out.failures.push(format!("unexpected pole along non-motic {div}"));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dunce() -> FeynmanGraph {
        FeynmanGraph::new([1, 2, 3], &[(1, 2, Some(1)), (1, 3, None), (2, 3, None), (2, 3, None)], &[(1, 1), (2, 2)])
            .unwrap()
    }

    fn wheel3() -> FeynmanGraph {
        FeynmanGraph::new([0, 1, 2, 3], &[(0, 1, None), (0, 2, None), (0, 3, None), (1, 2, None), (2, 3, None), (1, 3, None)], &[])
            .unwrap()
    }

    #[test]
    fn degrees() {
        assert_eq!(sd(&wheel3(), 4).unwrap(), 0);
        assert_eq!(sd_of(&dunce(), EdgeSet::from_labels([3, 4]), 4).unwrap(), 0);
        assert!(matches!(sd(&wheel3(), 3), Err(Error::OddDimension(3))));
    }

    #[test]
    fn dunce_cap_diverges() {
        let g = dunce();
        assert_eq!(pole_order(&g, EdgeSet::from_labels([3, 4]), 4).unwrap(), 1);
        assert_eq!(is_convergent(&g, 4).unwrap(), (false, Some(EdgeSet::from_labels([3, 4]))));
        let it = Integrand::feynman(&g, 4).unwrap();
        let c = chart_pole_check(&g, &it).unwrap();
        assert!(c.failures.is_empty(), "{:?}", c.failures);
        assert!(c.chart_divergent);
    }

    #[test]
    fn wheel_converges() {
        let g = wheel3();
        assert_eq!(is_convergent(&g, 4).unwrap(), (true, None));
        for gamma in g.motic_subgraphs(false) {
            assert!(pole_order(&g, gamma, 4).unwrap() <= 0);
        }
        let c = chart_pole_check(&g, &Integrand::feynman(&g, 4).unwrap()).unwrap();
        assert!(c.failures.is_empty() && !c.chart_divergent);
    }

    #[test]
    fn banana_numerator() {
        let g = FeynmanGraph::new([1, 2], &[(1, 2, None), (1, 2, None), (1, 2, None)], &[]).unwrap();
        let p = KinPoly::alpha_product(g.all_edges());
        assert!(numerator_admissible(&g, &p, 3, 0, 4).unwrap());
        assert!(matches!(
            numerator_admissible(&g, &KinPoly::alpha(1), 3, 0, 4),
            Err(Error::InhomogeneousNumerator { .. })
        ));
    }

    #[test]
    fn massive_bubble_converges_in_two_dimensions() {
        let g = FeynmanGraph::new([1, 2], &[(1, 2, Some(1)), (1, 2, Some(2))], &[(1, 1), (2, 2)]).unwrap();
        assert!(is_convergent(&g, 2).unwrap().0);
    }
}
