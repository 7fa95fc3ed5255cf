//! Numerical integration over the unit hypercube `[0,1]^n` of complex-valued
//! integrands: adaptive Gauss–Kronrod (n = 1), adaptive Genz–Malik
//! (2 ≤ n ≤ 4), and randomly shifted Halton quasi-Monte Carlo (n ≥ 5).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stopping rules and resources for one cube integration.
#[derive(Clone, Debug, PartialEq)]
pub struct Budget {
    /// Maximum number of integrand evaluations.
    pub max_evals: usize,
    /// Relative error target.
    pub rel_tol: f64,
    /// Absolute error target.
    pub abs_tol: f64,
    /// Seed for the random shifts of quasi-Monte Carlo rules.
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_evals: 2_000_000, rel_tol: 1e-8, abs_tol: 1e-10, seed: 0x5eed }
    }
}

impl Budget {
    pub fn target(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

/// Integral estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
    /// Whether the error target was met within the budget.
    pub converged: bool,
}

/// Integrates `f` over `[0,1]^dim`.
pub fn integrate_cube<F>(dim: usize, f: F, budget: &Budget) -> Estimate
where
    F: Fn(&[f64]) -> Complex64,
{
    match dim {
        0 => Estimate { value: f(&[]), error: 0.0, evaluations: 1, converged: true },
        1 => adaptive(1, &f, budget),
        2..=4 => adaptive(dim, &f, budget),
        _ => qmc(dim, &f, budget),
    }
}

// ---------------------------------------------------------------------------
// Adaptive subdivision

struct Region {
    lo: Vec<f64>,
    hi: Vec<f64>,
    value: Complex64,
    error: f64,
    split_axis: usize,
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Region {}
impl PartialOrd for Region {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Region {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn apply_rule<F: Fn(&[f64]) -> Complex64>(dim: usize, f: &F, lo: Vec<f64>, hi: Vec<f64>) -> (Region, usize) {
    if dim == 1 {
        let (value, error, n) = gauss_kronrod15(f, lo[0], hi[0]);
        (Region { lo, hi, value, error, split_axis: 0 }, n)
    } else {
        let (value, error, split_axis, n) = genz_malik(f, &lo, &hi);
        (Region { lo, hi, value, error, split_axis }, n)
    }
}

fn adaptive<F: Fn(&[f64]) -> Complex64>(dim: usize, f: &F, budget: &Budget) -> Estimate {
    let (first, mut evals) = apply_rule(dim, f, vec![0.0; dim], vec![1.0; dim]);
    let per_region = evals;
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    loop {
        if error <= budget.target(value) {
            return Estimate { value, error, evaluations: evals, converged: true };
        }
        if evals + 2 * per_region > budget.max_evals {
            return Estimate { value, error, evaluations: evals, converged: false };
        }
        let r = heap.pop().unwrap();
        let axis = r.split_axis;
        let mid = 0.5 * (r.lo[axis] + r.hi[axis]);
        let mut hi1 = r.hi.clone();
        hi1[axis] = mid;
        let mut lo2 = r.lo.clone();
        lo2[axis] = mid;
        let (a, na) = apply_rule(dim, f, r.lo.clone(), hi1);
        let (b, nb) = apply_rule(dim, f, lo2, r.hi.clone());
        evals += na + nb;
        value += a.value + b.value - r.value;
        // Recompute the error sum from the heap to avoid drift.
        heap.push(a);
        heap.push(b);
        error = heap.iter().map(|r| r.error).sum();
    }
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS_K: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WEIGHTS_G: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate with the embedded 7-point Gauss error.
fn gauss_kronrod15<F: Fn(&[f64]) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64, usize) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = Complex64::default();
    let mut g = Complex64::default();
    for (i, &x) in GK_NODES.iter().enumerate() {
        if x == 0.0 {
            let v = f(&[c]);
            k += v * GK_WEIGHTS_K[i];
            g += v * GK_WEIGHTS_G[3];
        } else {
            let v = f(&[c - h * x]) + f(&[c + h * x]);
            k += v * GK_WEIGHTS_K[i];
            if i % 2 == 1 {
                g += v * GK_WEIGHTS_G[i / 2];
            }
        }
    }
    (k * h, ((k - g) * h).norm(), 15)
}

/// Degree-7 Genz–Malik rule with embedded degree-5 error estimate.  Returns
/// the estimate, the error, the axis with the largest fourth difference, and
/// the number of evaluations.
fn genz_malik<F: Fn(&[f64]) -> Complex64>(f: &F, lo: &[f64], hi: &[f64]) -> (Complex64, f64, usize, usize) {
    let n = lo.len();
    let nf = n as f64;
    let center: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let half: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
    let volume: f64 = half.iter().map(|h| 2.0 * h).product();
    let (l2, l3, l4, l5) = ((9.0f64 / 70.0).sqrt(), (9.0f64 / 10.0).sqrt(), (9.0f64 / 10.0).sqrt(), (9.0f64 / 19.0).sqrt());
    let w1 = (12824.0 - 9120.0 * nf + 400.0 * nf * nf) / 19683.0;
    let w2 = 980.0 / 6561.0;
    let w3 = (1820.0 - 400.0 * nf) / 19683.0;
    let w4 = 200.0 / 19683.0;
    let w5 = 6859.0 / 19683.0 / 2f64.powi(n as i32);
    let v1 = (729.0 - 950.0 * nf + 50.0 * nf * nf) / 729.0;
    let v2 = 245.0 / 486.0;
    let v3 = (265.0 - 100.0 * nf) / 1458.0;
    let v4 = 25.0 / 729.0;

    let mut evals = 0usize;
    let mut p = center.clone();
    let mut eval = |p: &[f64]| {
        evals += 1;
        f(p)
    };
    let f0 = eval(&p);
    let mut s2 = Complex64::default();
    let mut s3 = Complex64::default();
    let mut best_axis = 0;
    let mut best_diff = -1.0;
    for i in 0..n {
        p[i] = center[i] - l2 * half[i];
        let a2 = eval(&p);
        p[i] = center[i] + l2 * half[i];
        let b2 = eval(&p);
        p[i] = center[i] - l3 * half[i];
        let a3 = eval(&p);
        p[i] = center[i] + l3 * half[i];
        let b3 = eval(&p);
        p[i] = center[i];
        s2 += a2 + b2;
        s3 += a3 + b3;
        let diff = ((a2 + b2 - f0 * 2.0) - (a3 + b3 - f0 * 2.0) * (l2 * l2 / (l3 * l3))).norm();
        if diff > best_diff * (1.0 + 1e-12) {
            best_diff = diff;
            best_axis = i;
        }
    }
    let mut s4 = Complex64::default();
    for i in 0..n {
        for j in i + 1..n {
            for (si, sj) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
                p[i] = center[i] + si * l4 * half[i];
                p[j] = center[j] + sj * l4 * half[j];
                s4 += eval(&p);
            }
            p[i] = center[i];
            p[j] = center[j];
        }
    }
    let mut s5 = Complex64::default();
    for mask in 0u32..(1 << n) {
        for i in 0..n {
            let s = if mask & (1 << i) != 0 { 1.0 } else { -1.0 };
            p[i] = center[i] + s * l5 * half[i];
        }
        s5 += eval(&p);
    }
    let i7 = (f0 * w1 + s2 * w2 + s3 * w3 + s4 * w4 + s5 * w5) * volume;
    let i5 = (f0 * v1 + s2 * v2 + s3 * v3 + s4 * v4) * volume;
    (i7, (i7 - i5).norm(), best_axis, evals)
}

// ---------------------------------------------------------------------------
// Quasi-Monte Carlo

const PRIMES: [u64; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107,
    109, 113, 127, 131,
];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Number of independent random shifts used by the QMC rule.
pub const QMC_SHIFTS: usize = 16;

fn qmc<F: Fn(&[f64]) -> Complex64>(dim: usize, f: &F, budget: &Budget) -> Estimate {
    assert!(dim <= PRIMES.len(), "quasi-Monte Carlo supports at most {} dimensions", PRIMES.len());
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let shifts: Vec<Vec<f64>> = (0..QMC_SHIFTS).map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect()).collect();
    let mut sums = vec![Complex64::default(); QMC_SHIFTS];
    let mut n_points: u64 = 0;
    let mut next: u64 = 1024;
    let mut x = vec![0.0; dim];
    loop {
        for i in n_points..next {
            let base: Vec<f64> = (0..dim).map(|k| radical_inverse(i + 1, PRIMES[k])).collect();
            for (s, shift) in shifts.iter().enumerate() {
                for k in 0..dim {
                    let v = base[k] + shift[k];
                    x[k] = if v >= 1.0 { v - 1.0 } else { v };
                }
                sums[s] += f(&x);
            }
        }
        n_points = next;
        let means: Vec<Complex64> = sums.iter().map(|s| s / n_points as f64).collect();
        let mean: Complex64 = means.iter().sum::<Complex64>() / QMC_SHIFTS as f64;
        let var: f64 = means.iter().map(|m| (m - mean).norm_sqr()).sum::<f64>() / (QMC_SHIFTS as f64 - 1.0);
        let error = (var / QMC_SHIFTS as f64).sqrt();
        let evaluations = n_points as usize * QMC_SHIFTS;
        if error <= budget.target(mean) {
            return Estimate { value: mean, error, evaluations, converged: true };
        }
        if evaluations * 2 > budget.max_evals {
            return Estimate { value: mean, error, evaluations, converged: false };
        }
        next = n_points * 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(f: impl Fn(&[f64]) -> f64) -> impl Fn(&[f64]) -> Complex64 {
        move |x| Complex64::new(f(x), 0.0)
    }

    #[test]
    fn one_dimensional() {
        let e = integrate_cube(1, re(|x| (x[0] * 3.0).exp()), &Budget::default());
        assert!((e.value.re - (3f64.exp() - 1.0) / 3.0).abs() < 1e-10 && e.converged);
        let e = integrate_cube(1, re(|x| x[0].sqrt()), &Budget::default());
        assert!((e.value.re - 2.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn genz_malik_exact_on_low_degree() {
        for dim in 2..=4 {
            let e = integrate_cube(dim, re(|x| x.iter().map(|t| t * t * t).sum::<f64>() + x[0] * x[1]), &Budget::default());
            let want = dim as f64 / 4.0 + 0.25;
            assert!((e.value.re - want).abs() < 1e-12, "{dim}: {}", e.value);
        }
        let e = integrate_cube(3, re(|x| 1.0 / (1.0 + x[0] + x[1] + x[2])), &Budget { rel_tol: 1e-9, ..Default::default() });
        // ∫ over the unit cube of 1/(1+x+y+z), computed by iterated logarithms.
        let g = |s: f64| s * s * s.ln() / 2.0;
        let want = -(g(1.0) - 3.0 * g(2.0) + 3.0 * g(3.0) - g(4.0));
        assert!((e.value.re - want).abs() < 1e-8, "{} vs {want}", e.value.re);
    }

    #[test]
    fn qmc_smooth_integrand() {
        let b = Budget { rel_tol: 1e-4, ..Default::default() };
        let e = integrate_cube(6, re(|x| x.iter().map(|t| (t * 2.0).cos()).product()), &b);
        let want = ((2f64).sin() / 2.0).powi(6);
        assert!((e.value.re - want).abs() < 5.0 * e.error.max(1e-6), "{} vs {want}", e.value.re);
        let again = integrate_cube(6, re(|x| x.iter().map(|t| (t * 2.0).cos()).product()), &b);
        assert_eq!(e, again);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let b = Budget { max_evals: 100, rel_tol: 1e-14, abs_tol: 0.0, seed: 1 };
        let e = integrate_cube(2, re(|x| (x[0] - 0.3).abs().sqrt() * x[1]), &b);
        assert!(!e.converged);
    }
}
