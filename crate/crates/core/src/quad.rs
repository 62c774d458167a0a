//! One-dimensional quadrature: fixed and doubling Gauss-Legendre rules and an
//! adaptive Gauss-Kronrod (7, 15) integrator for finite and half-infinite ranges.

use crate::error::{Error, Result};
use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        for i in 0..half {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre with the node count doubled from `n0` until two successive
/// estimates agree to `tol` (absolute, scaled by `max(1, |I|)`).
pub fn adaptive_gauss_legendre<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    n0: usize,
    tol: f64,
) -> Result<f64> {
    let mut n = n0.max(2);
    let mut prev = GaussLegendre::new(n).integrate(&mut f, a, b);
    while n <= 512 {
        n *= 2;
        let cur = GaussLegendre::new(n).integrate(&mut f, a, b);
        if (cur - prev).abs() <= tol * cur.abs().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!(
        "Gauss-Legendre doubling on [{a}, {b}] did not reach tolerance {tol}"
    )))
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 4000 }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = WGK[7] * fc;
    let mut rg = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod (7, 15) on `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, intervals: 0 });
    }
    let (v, e) = kronrod15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Interval { a, b, value: v, error: e });
    let mut total = v;
    let mut err = e;
    loop {
        if !total.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
        }
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(QuadResult { value: total, error: err, intervals: heap.len() });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature(format!(
                "Gauss-Kronrod on [{a}, {b}] stalled at error {err:.3e} (value {total:.6e})"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = kronrod15(&mut f, worst.a, mid);
        let (v2, e2) = kronrod15(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Interval { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Interval { a: mid, b: worst.b, value: v2, error: e2 });
        if err < 0.0 {
            err = heap.iter().map(|i| i.error).sum();
        }
    }
}

/// Adaptive Gauss-Kronrod on `[a, inf)` via `x = a + (1 - u) / u`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, opts: &QuadOptions) -> Result<QuadResult> {
    integrate(
        |u| {
            if u <= 0.0 {
                return 0.0;
            }
            let x = a + (1.0 - u) / u;
            let v = f(x) / (u * u);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        opts,
    )
}

/// Adaptive integral over `[a, b]` split at the given interior breakpoints.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    opts: &QuadOptions,
) -> Result<QuadResult> {
    let mut out = QuadResult { value: 0.0, error: 0.0, intervals: 0 };
    for w in points.windows(2) {
        let r = integrate(&mut f, w[0], w[1], opts)?;
        out.value += r.value;
        out.error += r.error;
        out.intervals += r.intervals;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let g = GaussLegendre::new(8);
        // degree 15 is the highest exact degree
        let v = g.integrate(|x| x.powi(14) + 3.0 * x.powi(15), -1.0, 1.0);
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
        let s: f64 = g.weights().iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn large_rules_stay_accurate() {
        let g = GaussLegendre::new(256);
        let v = g.integrate(f64::cos, 0.0, 10.0);
        assert!((v - 10f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn kronrod_handles_endpoint_singularity() {
        let r = integrate(|x: f64| x.sqrt().recip(), 0.0, 1.0, &QuadOptions::with_tol(1e-10, 1e-10)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn half_line_integrals() {
        let o = QuadOptions::default();
        let r = integrate_to_infinity(|x| (-x).exp(), 0.0, &o).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11);
        let r = integrate_to_infinity(|x| 1.0 / (1.0 + x * x), 0.0, &o).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-11);
    }

    #[test]
    fn doubling_reports_failure_on_discontinuity() {
        let r = adaptive_gauss_legendre(|x| if x < 0.3 { 0.0 } else { 1.0 }, 0.0, 1.0, 16, 1e-14);
        assert!(r.is_err());
    }
}
