//! Numerical evaluation of convergent parametric integrals by sectors: the
//! Feynman polytope is tessellated by the unit hypercubes of the maximal flag
//! charts of `B_G` (the point `z = (1 : … : 1)` fixed), and each sector is
//! integrated separately.

use num_complex::Complex64;
use num_traits::One;
use rayon::prelude::*;
use serde_json::json;

use crate::blowup::{enumerate_flags, FlagChart, UnionClosedFamily};
use crate::convergence::{integrand_witness, Integrand};
use crate::cubature::{integrate_cube, Budget, Estimate};
use crate::error::{Error, Result};
use crate::graph::{EdgeLabel, FeynmanGraph};
use crate::poly::{KinPoly, Monomial, Rational};
use crate::symanzik::{self, KinPoint};

/// A polynomial compiled for fast evaluation at a numeric point.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(Vec<(usize, i32)>, Complex64)>,
}

impl CompiledPoly {
    /// Compiles `p` at a kinematic point; α-labels are mapped to positions in
    /// `coords`.  Labels outside `coords` must not occur.
    pub fn new(p: &KinPoly, point: &KinPoint, coords: &[EdgeLabel]) -> CompiledPoly {
        let terms = point
            .eval_kin(p)
            .into_iter()
            .filter(|(_, c)| *c != Complex64::default())
            .map(|(a, c)| {
                let exps = a
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        let pos = coords.iter().position(|&l| l as usize == i + 1).expect("label is a coordinate");
                        (pos, e as i32)
                    })
                    .collect();
                (exps, c)
            })
            .collect();
        CompiledPoly { terms }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| e.iter().fold(*c, |acc, &(i, k)| acc * x[i].powi(k)))
            .sum()
    }
}

/// The integrand of one sector as an exact rational function in the chart
/// coordinates: `numerator / ∏ denominator_i^{exponent_i}` on `[0,1]^{N−1}`.
#[derive(Clone, Debug)]
pub struct SectorIntegrand {
    pub chart: FlagChart,
    /// Chart coordinates (the integration variables, in this order).
    pub coordinates: Vec<EdgeLabel>,
    /// Numerator including the Jacobian and all monomial factors.
    pub numerator: KinPoly,
    /// Denominator factors with integer exponents (negative exponents are
    /// numerator factors).
    pub denominators: Vec<(KinPoly, i64)>,
}

impl SectorIntegrand {
    /// Compiles the integrand at a kinematic point.
    pub fn compile(&self, point: &KinPoint) -> CompiledSector {
        CompiledSector {
            numerator: CompiledPoly::new(&self.numerator, point, &self.coordinates),
            denominators: self
                .denominators
                .iter()
                .map(|(p, e)| (CompiledPoly::new(p, point, &self.coordinates), *e as i32))
                .collect(),
        }
    }
}

/// Evaluation plan of a sector integrand.
#[derive(Clone, Debug)]
pub struct CompiledSector {
    numerator: CompiledPoly,
    denominators: Vec<(CompiledPoly, i32)>,
}

impl CompiledSector {
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.denominators
            .iter()
            .fold(self.numerator.eval(x), |acc, (p, e)| acc / p.eval(x).powi(*e))
    }
}

fn split_monomial(p: &KinPoly) -> (Vec<u16>, KinPoly) {
    let m = p.min_alpha_exponents();
    let rest = p.divide_alpha_monomial(&m);
    (m, rest)
}

/// Builds one sector per maximal flag chart of `B_G`.  Fails with
/// [`Error::DivergentIntegrand`] if the integrand has a pole along a divisor.
pub fn build_sectors(g: &FeynmanGraph, it: &Integrand) -> Result<Vec<SectorIntegrand>> {
    it.check_homogeneous(g)?;
    if let Some(w) = integrand_witness(g, it) {
        return Err(Error::DivergentIntegrand { witness: w.to_vec() });
    }
    let b = UnionClosedFamily::of_graph(g)?;
    let psi = symanzik::psi(g);
    let xi = if it.b != 0 { symanzik::xi(g) } else { KinPoly::zero() };
    let mut out = Vec::new();
    for chart in enumerate_flags(&b) {
        let coordinates = chart.coordinates();
        let width = g.max_label() as usize;
        let mut exps = vec![0i64; width];
        let mut denominators = Vec::new();
        let mut numerator = KinPoly::one();
        let absorb = |p: &KinPoly, power: i64, exps: &mut Vec<i64>| -> KinPoly {
            let pb = chart.pullback(p);
            let (m, rest) = split_monomial(&pb.strict);
            for (&j, &e) in &pb.exceptional {
                exps[j as usize - 1] += power * e as i64;
            }
            for (i, &e) in m.iter().enumerate() {
                exps[i] += power * e as i64;
            }
            rest
        };
        let p_rest = absorb(&it.numerator, 1, &mut exps);
        numerator = &numerator * &p_rest;
        if it.a != 0 {
            let r = absorb(&psi, -it.a, &mut exps);
            denominators.push((r, it.a));
        }
        if it.b != 0 {
            let r = absorb(&xi, -it.b, &mut exps);
            denominators.push((r, it.b));
        }
        for (&j, &e) in &chart.jacobian() {
            exps[j as usize - 1] += e as i64;
        }
        if let Some(i) = exps.iter().position(|&e| e < 0) {
            return Err(Error::DivergentIntegrand { witness: vec![i as u32 + 1] });
        }
        let mono: Vec<u16> = exps.iter().map(|&e| e as u16).collect();
        numerator = &numerator * &KinPoly::from_term(Monomial::new(mono, vec![]), Rational::one());
        denominators.retain(|(p, _)| p.as_constant().map_or(true, |c| !c.is_one()));
        out.push(SectorIntegrand { chart, coordinates, numerator, denominators });
    }
    Ok(out)
}

/// Outcome of a sector-decomposed integration.
#[derive(Clone, Debug)]
pub struct IntegrationResult {
    pub value: Complex64,
    pub error: f64,
    pub sectors: usize,
    pub samples: usize,
    pub per_sector: Vec<Estimate>,
}

impl IntegrationResult {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "value": {"re": self.value.re, "im": self.value.im},
            "error": self.error,
            "sectors": self.sectors,
            "samples": self.samples,
        })
    }
}

/// Checks a kinematic point against the graph: same number of momenta,
/// generic, and in the region of positive real parts.
pub fn check_point(g: &FeynmanGraph, point: &KinPoint) -> Result<()> {
    if g.has_momenta() && point.n_momenta != g.n_momenta() {
        return Err(Error::NonGenericPoint(format!(
            "point has {} momenta, graph has {}",
            point.n_momenta,
            g.n_momenta()
        )));
    }
    if !g.has_kinematics() {
        return Ok(());
    }
    let m = g.n_masses();
    point.check_generic(m, 1e-12).map_err(Error::NonGenericPoint)?;
    if !point.in_u_gen(m) {
        return Err(Error::NonGenericPoint("real parts of s_I and m² must be positive".into()));
    }
    Ok(())
}

/// Integrates `∫_σ P Ω/(Ψ^A Ξ^B)` at a kinematic point by summing sectors.
/// Sectors are processed in parallel; the reduction order is fixed.  Each
/// sector receives `budget.max_evals / sectors` evaluations and the absolute
/// tolerance `abs_tol / √sectors`; errors add in quadrature.
pub fn integrate(g: &FeynmanGraph, it: &Integrand, point: &KinPoint, budget: &Budget) -> Result<IntegrationResult> {
    check_point(g, point)?;
    let sectors = build_sectors(g, it)?;
    integrate_sectors(&sectors, point, budget)
}

/// Integrates prepared sectors.
pub fn integrate_sectors(sectors: &[SectorIntegrand], point: &KinPoint, budget: &Budget) -> Result<IntegrationResult> {
    let n = sectors.len().max(1);
    let per = Budget {
        max_evals: (budget.max_evals / n).max(1),
        rel_tol: budget.rel_tol,
        abs_tol: budget.abs_tol / (n as f64).sqrt(),
        seed: budget.seed,
    };
    let per_sector: Vec<Estimate> = sectors
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let plan = s.compile(point);
            let b = Budget { seed: per.seed.wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)), ..per.clone() };
            integrate_cube(s.coordinates.len(), |x| plan.eval(x), &b)
        })
        .collect();
    let value: Complex64 = per_sector.iter().map(|e| e.value).sum();
    let error = per_sector.iter().map(|e| e.error * e.error).sum::<f64>().sqrt();
    let samples = per_sector.iter().map(|e| e.evaluations).sum();
    if error > budget.target(value) {
        return Err(Error::BudgetExceeded { value: value.re, error });
    }
    Ok(IntegrationResult { value, error, sectors: sectors.len(), samples, per_sector })
}

/// Evaluates the projective integral in the single affine chart `α_e = 1`
/// over `[0, ∞)^{N−1}`, mapped to the unit cube by `α = t/(1−t)`.  An
/// independent cross-check of the sector decomposition.
pub fn integrate_affine_chart(
    g: &FeynmanGraph,
    it: &Integrand,
    point: &KinPoint,
    e: EdgeLabel,
    budget: &Budget,
) -> Result<Estimate> {
    it.check_homogeneous(g)?;
    check_point(g, point)?;
    let coords: Vec<EdgeLabel> = g.all_edges().iter().filter(|&l| l != e).collect();
    let all: Vec<EdgeLabel> = g.all_edges().to_vec();
    let num = CompiledPoly::new(&it.numerator, point, &all);
    let psi = CompiledPoly::new(&symanzik::psi(g), point, &all);
    let xi = CompiledPoly::new(&if it.b != 0 { symanzik::xi(g) } else { KinPoly::zero() }, point, &all);
    let pos_e = all.iter().position(|&l| l == e).ok_or_else(|| Error::InvalidInput(format!("no edge {e}")))?;
    let (a, b) = (it.a as i32, it.b as i32);
    let f = |t: &[f64]| {
        let mut alpha = vec![1.0; all.len()];
        let mut jac = 1.0;
        let mut k = 0;
        for (i, slot) in alpha.iter_mut().enumerate() {
            if i == pos_e {
                continue;
            }
            let s = t[k];
            k += 1;
            *slot = s / (1.0 - s);
            jac /= (1.0 - s) * (1.0 - s);
        }
        let mut v = num.eval(&alpha) * jac;
        if a != 0 {
            v /= psi.eval(&alpha).powi(a);
        }
        if b != 0 {
            v /= xi.eval(&alpha).powi(b);
        }
        v
    };
    Ok(integrate_cube(coords.len(), f, budget))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_counts() {
        // Triangle without kinematics: B_G = {S}, one sector per coordinate;
        // ∫ Ω/Ψ³ with Ψ = α1 + α2 + α3 equals ∫_{x,y ≥ 0} (1 + x + y)^{-3} = 1/2.
        let tri = FeynmanGraph::new([1, 2, 3], &[(1, 2, None), (2, 3, None), (1, 3, None)], &[]).unwrap();
        let it = Integrand { numerator: KinPoly::one(), a: 3, b: 0 };
        assert_eq!(build_sectors(&tri, &it).unwrap().len(), 3);
        let r = integrate(&tri, &it, &KinPoint::empty(), &Budget::default()).unwrap();
        assert!((r.value.re - 0.5).abs() < 1e-8);
        let bad = Integrand { numerator: KinPoly::alpha(1), a: 3, b: 0 };
        assert!(matches!(build_sectors(&tri, &bad), Err(Error::InhomogeneousNumerator { .. })));
        let bubble = FeynmanGraph::new([1, 2], &[(1, 2, Some(1)), (1, 2, Some(1))], &[(1, 1), (2, 2)]).unwrap();
        let it = Integrand::feynman(&bubble, 2).unwrap();
        assert_eq!(build_sectors(&bubble, &it).unwrap().len(), 2);
    }

    #[test]
    fn banana_numerator_is_one_half() {
        let g = FeynmanGraph::new([1, 2], &[(1, 2, None), (1, 2, None), (1, 2, None)], &[]).unwrap();
        let it = Integrand { numerator: KinPoly::alpha_product(g.all_edges()), a: 3, b: 0 };
        let r = integrate(&g, &it, &KinPoint::empty(), &Budget::default()).unwrap();
        assert!((r.value.re - 0.5).abs() < 1e-8, "{}", r.value);
        assert_eq!(r.sectors, 6);
    }
}
