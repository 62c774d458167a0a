use proptest::prelude::*;
use relkac_core::fields::{FieldSpec, Gauge, ScalarPotential, VectorPotential};
use relkac_core::lattice::{gauge_residual, Lattice, Variant};
use relkac_core::specfun::{
    bessel_k, char_exponent, free_kernel, kernel_to_levy_limit, levy_density, relativistic_symbol, subordinator_density, subordinator_laplace,
};
use relkac_core::{Complex64, MassDim};
use std::f64::consts::{E, PI};

fn md(m: f64, d: usize) -> MassDim {
    MassDim::new(m, d).unwrap()
}

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol * b.abs().max(1e-300), "{a} vs {b}");
}

#[test]
fn bessel_values() {
    close(bessel_k(0.5, 1.0).unwrap(), (PI / 2.0).sqrt() / E, 1e-12);
    close(bessel_k(1.0, 1.0).unwrap(), 0.601_907_230_197_234_6, 1e-12);
    let tiny = 1e-8;
    close(bessel_k(1.0, tiny).unwrap() * tiny, 1.0, 1e-6);
    assert!(bessel_k(1.0, 0.0).is_err());
    assert!(bessel_k(1.0, -1.0).is_err());
}

#[test]
fn levy_density_values() {
    close(levy_density(1.0, md(0.0, 1)).unwrap(), 1.0 / PI, 1e-12);
    close(levy_density(2.0, md(0.0, 1)).unwrap(), 1.0 / (4.0 * PI), 1e-12);
    close(levy_density(1.0, md(1.0, 1)).unwrap(), bessel_k(1.0, 1.0).unwrap() / PI, 1e-12);
    close(levy_density(1.0, md(1.0, 1)).unwrap(), 0.191_593_02, 1e-7);
    assert!(levy_density(0.0, md(1.0, 1)).is_err());
}

#[test]
fn free_kernel_values() {
    close(free_kernel(0.0, 1.0, md(0.0, 1)).unwrap(), 1.0 / PI, 1e-12);
    close(free_kernel(0.0, 1.0, md(1.0, 1)).unwrap(), E * bessel_k(1.0, 1.0).unwrap() / PI, 1e-12);
    close(free_kernel(0.0, 1.0, md(1.0, 1)).unwrap(), 0.520_803_83, 1e-7);
    assert!(free_kernel(0.0, 0.0, md(1.0, 1)).is_err());
}

#[test]
fn kernel_over_time_tends_to_levy_density() {
    for (r, m, d) in [(1.0, 0.0, 1), (1.0, 1.0, 1), (0.5, 0.0, 2)] {
        let rows = kernel_to_levy_limit(r, &[1e-2, 1e-3, 1e-4], md(m, d)).unwrap();
        let n = levy_density(r, md(m, d)).unwrap();
        let last = rows.last().unwrap();
        close(last.ratio, n, 1e-3);
    }
    let expect = (PI.sqrt() / 2.0) / PI.powf(1.5) / 0.125;
    close(levy_density(0.5, md(0.0, 2)).unwrap(), expect, 1e-12);
}

#[test]
fn symbol_and_subordinator_values() {
    assert_eq!(relativistic_symbol(0.0, 1.0), 0.0);
    close(relativistic_symbol(3f64.sqrt(), 1.0), 1.0, 1e-14);
    close(relativistic_symbol(1.0, 0.0), 1.0, 1e-14);
    close(subordinator_laplace(0.0, 1.0, 1.0).unwrap(), 1.0, 1e-15);
    close(subordinator_laplace(1.5, 1.0, 1.0).unwrap(), (-1f64).exp(), 1e-14);
    close(subordinator_laplace(0.5, 1.0, 0.0).unwrap(), (-1f64).exp(), 1e-14);
    close(subordinator_density(1.0, 1.0, 1.0).unwrap(), 1.0 / (2.0 * PI).sqrt(), 1e-14);
    assert!(subordinator_density(0.0, 1.0, 1.0).is_err());
    assert!(subordinator_density(1.0, 0.0, 1.0).is_err());
}

#[test]
fn char_exponent_values() {
    assert_eq!(char_exponent(0.0, 1.0).unwrap(), Complex64::new(0.0, 0.0));
    let v = char_exponent(1.0, 0.0).unwrap();
    assert!((v - Complex64::new(1.0, -1.0)).norm() < 1e-14, "{v}");
    let w = char_exponent(1.0, 1.0).unwrap();
    let direct = Complex64::new(1.0, -2.0).sqrt() - 1.0;
    assert!((w - direct).norm() < 1e-13, "{w} vs {direct}");
}

#[test]
fn field_examples() {
    let q = FieldSpec::new(3, VectorPotential::Quadratic { axis: 2, coeff: 1.0 }, ScalarPotential::Zero, Gauge::Zero).unwrap();
    let (x, y) = ([0.0, 0.0, 0.0], [0.0, 0.0, 1.0]);
    close(q.midpoint_eval(&x, &y)[2], 0.25, 1e-15);
    close(q.line_average(&x, &y).unwrap()[2], 1.0 / 3.0, 1e-14);
    close(q.exact_line_integral(&x, &y), 1.0 / 3.0, 1e-14);
    let c = FieldSpec::constant(vec![0.4, -1.1]).unwrap();
    close(c.exact_line_integral(&[0.0, 0.0], &[1.0, 0.0]), 0.4, 1e-15);
    let g = FieldSpec::zero(1).unwrap().gauge_shift(&Gauge::Quadratic { coeff: 2.0 }).unwrap();
    close(g.exact_line_integral(&[0.0], &[1.0]), 1.0, 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symbol_between_bounds(xi in 0.0f64..50.0, m in 0.0f64..5.0) {
        let s = relativistic_symbol(xi, m);
        prop_assert!(s >= 0.0);
        prop_assert!(s <= xi + 1e-12);
        prop_assert!(s >= xi * xi / (2.0 * (xi * xi + m * m).sqrt() + 1e-300) - 1e-12);
    }

    #[test]
    fn laplace_in_unit_interval_and_decreasing(sigma in 0.0f64..20.0, ds in 0.0f64..5.0, t in 0.0f64..3.0, m in 0.0f64..3.0) {
        let a = subordinator_laplace(sigma, t, m).unwrap();
        let b = subordinator_laplace(sigma + ds, t, m).unwrap();
        prop_assert!(a > 0.0 && a <= 1.0);
        prop_assert!(b <= a + 1e-15);
    }

    #[test]
    fn char_exponent_has_nonnegative_real_part(rho in -100.0f64..100.0, m in 0.0f64..4.0) {
        let v = char_exponent(rho, m).unwrap();
        prop_assert!(v.re >= -1e-12);
        let direct = Complex64::new(m * m, -2.0 * rho).sqrt() - m;
        prop_assert!((v - direct).norm() <= 1e-10 * (1.0 + direct.norm()));
    }

    #[test]
    fn kernel_positive_and_radially_decreasing(r in 0.0f64..10.0, dr in 0.001f64..2.0, t in 0.01f64..3.0, m in 0.0f64..2.0, d in 1usize..4) {
        let k = free_kernel(r, t, md(m, d)).unwrap();
        let k2 = free_kernel(r + dr, t, md(m, d)).unwrap();
        prop_assert!(k > 0.0 && k2 < k);
    }

    #[test]
    fn levy_density_continuous_in_mass(r in 0.05f64..5.0, d in 1usize..4) {
        let a = levy_density(r, md(0.0, d)).unwrap();
        let b = levy_density(r, md(1e-7, d)).unwrap();
        prop_assert!((a - b).abs() <= 1e-5 * a);
    }

    #[test]
    fn line_phases_are_gauge_covariant(amp in -2.0f64..2.0, width in 0.5f64..4.0) {
        let lat = Lattice::new(1, 32, 8.0).unwrap();
        let fs = FieldSpec::tanh(1).unwrap();
        let phi = Gauge::CappedCubic { amplitude: amp, width };
        for v in [Variant::H2, Variant::H3] {
            let r = gauge_residual(v, &fs, &phi, &lat, md(1.0, 1)).unwrap();
            prop_assert!(r.relative <= 1e-8, "{:?}: {}", v, r.relative);
        }
    }
}
