//! Special functions behind the relativistic kernels.
//!
//! `bessel_k` evaluates `K_nu(x)` for real order `nu >= 0` with Temme's series for
//! `x < 2` and Steed's continued fraction beyond, followed by upward recurrence in
//! the order.  The kernels built on it are radial, so they take `r = |y|`.

use crate::error::{domain, invalid, Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

/// Mass `m >= 0` and space dimension `d` in `{1, 2, 3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassDim {
    pub mass: f64,
    pub dim: usize,
}

impl MassDim {
    pub fn new(mass: f64, dim: usize) -> Result<Self> {
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(invalid(format!("mass must be finite and non-negative, got {mass}")));
        }
        if !(1..=3).contains(&dim) {
            return Err(invalid(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        Ok(Self { mass, dim })
    }

    /// Bessel order `(d + 1) / 2` of the kernel.
    pub fn order(&self) -> f64 {
        (self.dim as f64 + 1.0) / 2.0
    }

    fn massless_constant(&self) -> f64 {
        let nu = self.order();
        libm::tgamma(nu) / PI.powf(nu)
    }
}

/// Surface area of the unit sphere in `R^d`.
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / libm::tgamma(h)
}

const G1_CHEB: [f64; 14] = [
    -1.145_164_083_662_683_1,
    0.006_360_853_113_470_842,
    0.001_862_451_930_072_068_5,
    0.000_152_833_085_873_453_5,
    0.000_017_017_464_011_802_04,
    -6.459_750_292_334_725e-7,
    -5.181_984_843_251_938e-8,
    4.518_909_289_485_818e-10,
    3.243_322_737_102_087e-11,
    6.830_943_402_494_752e-13,
    2.835_350_275_517_21e-14,
    -7.988_390_576_932_359e-16,
    -3.372_667_730_077_195e-17,
    -3.658_633_480_921_052e-20,
];

const G2_CHEB: [f64; 15] = [
    1.882_645_524_949_671_8,
    -0.077_490_658_396_167_52,
    -0.018_256_714_847_324_93,
    0.000_633_803_020_907_489_6,
    0.000_076_229_054_350_872_9,
    -9.550_164_756_172_044e-7,
    -8.892_726_810_788_635e-8,
    -1.952_133_477_231_961_4e-9,
    -9.400_305_273_588_516e-11,
    4.687_513_384_953_239e-12,
    2.265_853_574_692_576e-13,
    -1.172_550_969_848_801_5e-15,
    -7.044_133_820_024_522e-17,
    -2.437_787_831_010_769_4e-18,
    -7.522_524_321_825_39e-20,
];

fn chebyshev(c: &[f64], x: f64) -> f64 {
    let (mut d, mut dd) = (0.0, 0.0);
    for &cj in c[1..].iter().rev() {
        let t = d;
        d = 2.0 * x * d - dd + cj;
        dd = t;
    }
    x * d - dd + 0.5 * c[0]
}

/// `(1/Gamma(1+mu), 1/Gamma(1-mu), g1, g2)` for `|mu| <= 1/2`.
fn temme_gamma(mu: f64) -> (f64, f64, f64, f64) {
    let x = 4.0 * mu.abs() - 1.0;
    let g1 = chebyshev(&G1_CHEB, x);
    let g2 = chebyshev(&G2_CHEB, x);
    (g2 - mu * g1, g2 + mu * g1, g1, g2)
}

/// `e^x K_mu(x)` and `e^x K_{mu+1}(x)` for `x < 2` by Temme's series.
fn k_scaled_temme(mu: f64, x: f64) -> Result<(f64, f64)> {
    let half_x = 0.5 * x;
    let ln_half_x = half_x.ln();
    let half_x_mu = (mu * ln_half_x).exp();
    let pi_mu = PI * mu;
    let sigma = -mu * ln_half_x;
    let sinrat = if pi_mu.abs() < f64::EPSILON { 1.0 } else { pi_mu / pi_mu.sin() };
    let sinhrat = if sigma.abs() < f64::EPSILON { 1.0 } else { sigma.sinh() / sigma };
    let (inv_gp, inv_gm, g1, g2) = temme_gamma(mu);

    let mut fk = sinrat * (sigma.cosh() * g1 - sinhrat * ln_half_x * g2);
    let mut pk = 0.5 / half_x_mu / inv_gp;
    let mut qk = 0.5 * half_x_mu / inv_gm;
    let mut ck = 1.0;
    let mut sum0 = fk;
    let mut sum1 = pk;
    let mut k = 0.0;
    loop {
        k += 1.0;
        if k > 15_000.0 {
            return Err(Error::Quadrature(format!("Temme series for K_{mu}({x}) did not converge")));
        }
        fk = (k * fk + pk + qk) / (k * k - mu * mu);
        ck *= half_x * half_x / k;
        pk /= k - mu;
        qk /= k + mu;
        let hk = -k * fk + pk;
        let del0 = ck * fk;
        sum0 += del0;
        sum1 += ck * hk;
        if del0.abs() < 0.5 * sum0.abs() * f64::EPSILON {
            break;
        }
    }
    let ex = x.exp();
    Ok((sum0 * ex, sum1 * 2.0 / x * ex))
}

/// `e^x K_mu(x)` and `e^x K_{mu+1}(x)` for `x >= 2` by Steed's method on CF2.
fn k_scaled_steed(mu: f64, x: f64) -> Result<(f64, f64)> {
    let mut bi = 2.0 * (1.0 + x);
    let mut di = 1.0 / bi;
    let mut delhi = di;
    let mut hi = di;
    let mut qi = 0.0;
    let mut qip1 = 1.0;
    let mut ai = -(0.25 - mu * mu);
    let a1 = ai;
    let mut ci = -ai;
    let mut bqi = -ai;
    let mut s = 1.0 + bqi * delhi;
    let mut converged = false;
    for i in 2..=10_000 {
        ai -= 2.0 * (i - 1) as f64;
        ci = -ai * ci / i as f64;
        let tmp = (qi - bi * qip1) / ai;
        qi = qip1;
        qip1 = tmp;
        bqi += ci * qip1;
        bi += 2.0;
        di = 1.0 / (bi + ai * di);
        delhi *= bi * di - 1.0;
        hi += delhi;
        let dels = bqi * delhi;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Quadrature(format!("continued fraction for K_{mu}({x}) did not converge")));
    }
    hi *= -a1;
    let k_mu = (PI / (2.0 * x)).sqrt() / s;
    Ok((k_mu, k_mu * (mu + x + 0.5 - hi) / x))
}

/// `e^x K_nu(x)` for `nu >= 0`, `x > 0`.
pub fn bessel_k_scaled(nu: f64, x: f64) -> Result<f64> {
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(domain(format!("Bessel order must be finite and non-negative, got {nu}")));
    }
    if !(x.is_finite() && x > 0.0) {
        return Err(domain(format!("Bessel argument must be positive and finite, got {x}")));
    }
    let n = (nu + 0.5).floor();
    let mu = nu - n;
    let (mut k_nu, mut k_nup1) = if x < 2.0 { k_scaled_temme(mu, x)? } else { k_scaled_steed(mu, x)? };
    for j in 0..n as usize {
        let k_num1 = k_nu;
        k_nu = k_nup1;
        k_nup1 = 2.0 * (mu + j as f64 + 1.0) / x * k_nu + k_num1;
    }
    Ok(k_nu)
}

/// Modified Bessel function of the second kind `K_nu(x)`.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(nu, x)? * (-x).exp())
}

fn check_radius(r: f64) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        return Err(domain(format!("radius must be positive and finite, got {r}")));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(domain(format!("time must be positive and finite, got {t}")));
    }
    Ok(())
}

/// Below this value of `m * r` the massless formulas are used.
const MASSLESS_CUTOFF: f64 = 1e-10;

/// Levy density `n(y)` of `sqrt(-Delta + m^2) - m` at `|y| = r`.
pub fn levy_density(r: f64, md: MassDim) -> Result<f64> {
    check_radius(r)?;
    let nu = md.order();
    let m = md.mass;
    if m * r < MASSLESS_CUTOFF {
        return Ok(md.massless_constant() / r.powf(2.0 * nu));
    }
    let k = bessel_k_scaled(nu, m * r)?;
    Ok(2.0 * (m / (2.0 * PI)).powf(nu) * k * (-m * r).exp() / r.powf(nu))
}

/// Free heat kernel `k0(y, t)` of `sqrt(-Delta + m^2) - m` at `|y| = r >= 0`.
pub fn free_kernel(r: f64, t: f64, md: MassDim) -> Result<f64> {
    check_time(t)?;
    if !(r.is_finite() && r >= 0.0) {
        return Err(domain(format!("radius must be finite and non-negative, got {r}")));
    }
    let nu = md.order();
    let m = md.mass;
    let rho = r.hypot(t);
    if m * rho < MASSLESS_CUTOFF {
        return Ok(md.massless_constant() * t / rho.powf(2.0 * nu));
    }
    let k = bessel_k_scaled(nu, m * rho)?;
    Ok(2.0 * (m / (2.0 * PI)).powf(nu) * t * k * (m * (t - rho)).exp() / rho.powf(nu))
}

/// One row of the small-time comparison of `k0(y, t) / t` with `n(y)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LimitRow {
    pub t: f64,
    pub ratio: f64,
    pub levy: f64,
    pub rel_err: f64,
}

/// `k0(y, t) / t` against `n(y)` for each `t` in `times`.
pub fn kernel_to_levy_limit(r: f64, times: &[f64], md: MassDim) -> Result<Vec<LimitRow>> {
    let levy = levy_density(r, md)?;
    times
        .iter()
        .map(|&t| {
            let ratio = free_kernel(r, t, md)? / t;
            Ok(LimitRow { t, ratio, levy, rel_err: (ratio - levy).abs() / levy })
        })
        .collect()
}

/// Symbol `sqrt(|xi|^2 + m^2) - m` as a function of `|xi|`.
pub fn relativistic_symbol(xi_norm: f64, m: f64) -> f64 {
    let x2 = xi_norm * xi_norm;
    x2 / ((x2 + m * m).sqrt() + m).max(f64::MIN_POSITIVE)
}

fn check_mass(m: f64) -> Result<()> {
    if !(m.is_finite() && m >= 0.0) {
        return Err(invalid(format!("mass must be finite and non-negative, got {m}")));
    }
    Ok(())
}

/// `E exp(-sigma T(t)) = exp(-t (sqrt(2 sigma + m^2) - m))` for `sigma >= 0`.
pub fn subordinator_laplace(sigma: f64, t: f64, m: f64) -> Result<f64> {
    check_mass(m)?;
    check_time(t)?;
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(domain(format!("Laplace variable must be non-negative, got {sigma}")));
    }
    let e = 2.0 * sigma / ((2.0 * sigma + m * m).sqrt() + m).max(f64::MIN_POSITIVE);
    Ok((-t * e).exp())
}

/// Density of the first passage time `T(t) = inf{s : B(s) + m s = t}` at `s > 0`.
///
/// For `m > 0` this is the inverse Gaussian law with mean `t / m` and shape `t^2`;
/// for `m = 0` it is the law of `t^2 / Z^2`.
pub fn subordinator_density(s: f64, t: f64, m: f64) -> Result<f64> {
    check_mass(m)?;
    check_time(t)?;
    if !(s.is_finite() && s > 0.0) {
        return Err(domain(format!("subordinator density needs s > 0, got {s}")));
    }
    let a = t - m * s;
    Ok(t / (2.0 * PI * s * s * s).sqrt() * (-a * a / (2.0 * s)).exp())
}

/// Bochner density `f_t(kappa) = t / (2 sqrt(pi)) kappa^(-3/2) exp(-t^2 / (4 kappa))`
/// with `int_0^inf f_t(kappa) e^(-kappa z) dkappa = exp(-t sqrt(z))`.
pub fn fractional_power_density(kappa: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(domain(format!("density needs kappa > 0, got {kappa}")));
    }
    Ok(t / (2.0 * PI.sqrt()) * kappa.powf(-1.5) * (-t * t / (4.0 * kappa)).exp())
}

/// `V(rho)` with `E exp(i rho T(t)) = exp(-t V(rho))`: the principal branch of
/// `sqrt(m^2 - 2 i rho) - m`, evaluated through its real and imaginary parts.
pub fn char_exponent(rho: f64, m: f64) -> Result<Complex64> {
    check_mass(m)?;
    if !rho.is_finite() {
        return Err(domain(format!("frequency must be finite, got {rho}")));
    }
    if rho == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let m2 = m * m;
    let q = m2.hypot(2.0 * rho);
    let s = (m2 + q).sqrt();
    let re = 4.0 * rho * rho / ((q + m2) * SQRT_2 * (s + SQRT_2 * m));
    let im = -SQRT_2 * rho / s;
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn bessel_closed_forms() {
        // K_{1/2}(x) = sqrt(pi / 2x) e^{-x}, K_{3/2}(x) = K_{1/2}(x) (1 + 1/x)
        for &x in &[1e-6, 0.01, 0.5, 1.9, 2.0, 2.1, 7.5, 40.0, 300.0] {
            let k12 = (PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!(rel(bessel_k(0.5, x).unwrap(), k12) < 1e-13, "x={x}");
            assert!(rel(bessel_k(1.5, x).unwrap(), k12 * (1.0 + 1.0 / x)) < 1e-13, "x={x}");
            let k52 = k12 * (1.0 + 3.0 / x + 3.0 / (x * x));
            assert!(rel(bessel_k(2.5, x).unwrap(), k52) < 1e-13, "x={x}");
        }
    }

    #[test]
    fn bessel_reference_values() {
        assert!(rel(bessel_k(1.0, 1.0).unwrap(), 0.601_907_230_197_234_6) < 1e-14);
        assert!(rel(bessel_k(0.0, 1.0).unwrap(), 0.421_024_438_240_708_3) < 1e-14);
        assert!(rel(bessel_k(2.0, 0.1).unwrap(), 199.503_964_642_114_1) < 1e-13);
        assert!(rel(bessel_k(1.0, 5.0).unwrap(), 0.004_044_613_445_452_164) < 1e-13);
    }

    #[test]
    fn bessel_rejects_bad_arguments() {
        assert!(bessel_k(1.0, 0.0).is_err());
        assert!(bessel_k(-1.0, 1.0).is_err());
        assert!(bessel_k(1.0, f64::NAN).is_err());
    }

    #[test]
    fn kernel_at_origin_example() {
        let md = MassDim::new(1.0, 1).unwrap();
        let k = free_kernel(0.0, 1.0, md).unwrap();
        let expected = std::f64::consts::E * 0.601_907_230_197_234_6 / PI;
        assert!(rel(k, expected) < 1e-13);
        assert!((k - 0.5208).abs() < 1e-4);
    }

    #[test]
    fn massless_kernels_are_cauchy() {
        let md = MassDim::new(0.0, 1).unwrap();
        assert!(rel(levy_density(1.0, md).unwrap(), 1.0 / PI) < 1e-15);
        assert!(rel(free_kernel(0.0, 1.0, md).unwrap(), 1.0 / PI) < 1e-15);
        let md3 = MassDim::new(0.0, 3).unwrap();
        assert!(rel(levy_density(1.0, md3).unwrap(), 1.0 / (PI * PI)) < 1e-14);
    }

    #[test]
    fn small_mass_matches_massless_limit() {
        for d in 1..=3 {
            let a = levy_density(0.7, MassDim::new(1e-7, d).unwrap()).unwrap();
            let b = levy_density(0.7, MassDim::new(0.0, d).unwrap()).unwrap();
            assert!(rel(a, b) < 1e-6, "d={d}");
        }
    }

    #[test]
    fn subordinator_examples() {
        assert!(rel(subordinator_laplace(1.0, 1.0, 0.0).unwrap(), (-SQRT_2).exp()) < 1e-15);
        assert!(rel(fractional_power_density(1.0, 1.0).unwrap(), 0.219_695_644_733_861) < 1e-12);
        let v = char_exponent(1.0, 0.0).unwrap();
        assert!((v - Complex64::new(1.0, -1.0)).norm() < 1e-15);
        assert!(subordinator_density(0.0, 1.0, 1.0).is_err());
        assert!(subordinator_laplace(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn char_exponent_is_principal_square_root() {
        for &m in &[0.0, 0.3, 1.0, 4.0] {
            for &rho in &[-3.0, -0.1, 1e-6, 0.5, 2.0, 50.0] {
                // rationalized form avoids cancellation at small rho
                let z = Complex64::new(0.0, -2.0 * rho) / (Complex64::new(m * m, -2.0 * rho).sqrt() + m);
                let v = char_exponent(rho, m).unwrap();
                assert!((v - z).norm() <= 1e-13 * z.norm().max(1e-12), "m={m} rho={rho}");
            }
        }
    }

    #[test]
    fn symbol_is_stable_for_small_xi() {
        let s = relativistic_symbol(1e-9, 1.0);
        assert!(rel(s, 0.5e-18) < 1e-12);
        assert_eq!(relativistic_symbol(2.0, 0.0), 2.0);
    }

    #[test]
    fn sphere_areas() {
        assert!(rel(sphere_area(1), 2.0) < 1e-15);
        assert!(rel(sphere_area(2), 2.0 * PI) < 1e-15);
        assert!(rel(sphere_area(3), 4.0 * PI) < 1e-15);
    }
}
