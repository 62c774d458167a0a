use super::covariant::CovariantLaplacian;
use super::grid::Lattice;
use super::operator::{build, build_h1, build_h3, check_dims, heat_kernel, hermitian_from_kernel, matvec, relativistic_kernel, LatticeOperator, Variant};
use crate::error::{invalid, Error, Result};
use crate::fields::{FieldSpec, Gauge};
use crate::quad::{integrate_to_infinity, QuadOptions};
use crate::specfun::{free_kernel, MassDim};
use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// How the magnetic phase of a short chord is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prescription {
    Midpoint,
    LineAverage,
}

impl Prescription {
    pub fn phase(&self, fs: &FieldSpec, from: &[f64], to: &[f64]) -> f64 {
        match self {
            Prescription::Midpoint => fs.midpoint_phase(from, to),
            Prescription::LineAverage => fs.exact_line_integral(from, to),
        }
    }

    pub fn for_variant(variant: Variant) -> Result<Self> {
        match variant {
            Variant::H1 => Ok(Prescription::Midpoint),
            Variant::H2 => Ok(Prescription::LineAverage),
            other => Err(invalid(format!("no chord prescription for {other:?}"))),
        }
    }
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn hermitian_norm(m: &Mat<Complex64>) -> Result<f64> {
    let ev = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("eigenvalues failed: {e:?}")))?;
    Ok(ev.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GaugeResidual {
    /// `||H_{A + grad phi} - U H_A U*||_2`.
    pub residual: f64,
    /// `||H_A||_2`.
    pub norm: f64,
    pub relative: f64,
}

/// Operator-norm defect of gauge covariance under `A -> A + grad(phi)`.
pub fn gauge_residual(variant: Variant, fs: &FieldSpec, phi: &Gauge, lat: &Lattice, md: MassDim) -> Result<GaugeResidual> {
    check_dims(lat, fs, md)?;
    let shifted = fs.gauge_shift(phi)?;
    let a = build(variant, lat, fs, md)?;
    let b = build(variant, lat, &shifted, md)?;
    gauge_residual_of(&a, &b, phi)
}

/// Same as [`gauge_residual`] for operators already built.
pub fn gauge_residual_of(a: &LatticeOperator, b: &LatticeOperator, phi: &Gauge) -> Result<GaugeResidual> {
    let lat = a.lattice;
    let n = lat.size();
    let ph: Vec<f64> = (0..n).map(|i| phi.phi(&lat.site(i)[..lat.dim])).collect();
    let (ma, mb) = (a.matrix(), b.matrix());
    let delta = Mat::from_fn(n, n, |i, j| mb[(i, j)] - Complex64::from_polar(1.0, ph[i] - ph[j]) * ma[(i, j)]);
    let residual = hermitian_norm(&delta)?;
    let norm = a.norm()?;
    Ok(GaugeResidual { residual, norm, relative: residual / norm })
}

/// Interior probe functions for operator comparisons: smooth bumps well inside the box.
pub fn interior_probes(lat: &Lattice) -> Vec<Vec<Complex64>> {
    let l = lat.length;
    let specs: [([f64; 3], f64, [f64; 3]); 3] = [
        ([0.0; 3], l / 12.0, [0.0; 3]),
        ([l / 16.0, -l / 20.0, 0.0], l / 14.0, [1.0, 0.5, 0.0]),
        ([-l / 24.0, l / 16.0, l / 30.0], l / 10.0, [-0.5, 1.0, 0.25]),
    ];
    specs
        .iter()
        .map(|(c, w, k)| {
            (0..lat.size())
                .map(|i| {
                    let x = lat.site(i);
                    let mut r2 = 0.0;
                    let mut ph = 0.0;
                    for a in 0..lat.dim {
                        r2 += (x[a] - c[a]).powi(2);
                        ph += k[a] * x[a];
                    }
                    Complex64::from_polar((-r2 / (2.0 * w * w)).exp(), ph)
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoincidenceResidual {
    /// `max_f ||(H1 - H3) f|| / ||f||`.
    pub weyl_vs_sqrt: f64,
    /// `max_f ||(H1^2 - (P^2 + m^2)) f|| / ||f||`.
    pub square_vs_covariant: f64,
}

/// Discrepancy between `H1` and `H3` for an affine vector potential, measured on
/// interior probes.  `H3 f` is computed by a Chebyshev expansion of the square root.
pub fn coincidence_residual(fs: &FieldSpec, lat: &Lattice, md: MassDim) -> Result<CoincidenceResidual> {
    check_dims(lat, fs, md)?;
    if !fs.is_affine() {
        return Err(invalid("coincidence of H1 and H3 requires an affine vector potential"));
    }
    if md.mass <= 0.0 {
        return Err(invalid("coincidence residual uses a Chebyshev square root and needs m > 0"));
    }
    let h1 = build_h1(lat, &fs.without_scalar(), md)?;
    let cov = CovariantLaplacian::new(lat, fs);
    let m2 = md.mass * md.mass;
    let mut out = CoincidenceResidual { weyl_vs_sqrt: 0.0, square_vs_covariant: 0.0 };
    for f in interior_probes(lat) {
        let nf = l2(&f);
        let a = h1.apply(&f);
        let s = cov.sqrt_apply(&f, m2, 1e-14)?;
        let diff: Vec<Complex64> = a.iter().zip(&s).map(|(x, y)| x - y).collect();
        out.weyl_vs_sqrt = out.weyl_vs_sqrt.max(l2(&diff) / nf);
        let aa = h1.apply(&a);
        let dd = cov.apply(&f, m2);
        let diff: Vec<Complex64> = aa.iter().zip(&dd).map(|(x, y)| x - y).collect();
        out.square_vs_covariant = out.square_vs_covariant.max(l2(&diff) / nf);
    }
    Ok(out)
}

/// `max_f ||(a - b) f|| / ||f||` over [`interior_probes`]. Unlike the operator norm,
/// this stays put under refinement when `A` is unbounded on the box.
pub fn probe_gap(a: &LatticeOperator, b: &LatticeOperator) -> Result<f64> {
    if a.lattice().size() != b.lattice().size() {
        return Err(invalid("operators live on different lattices"));
    }
    let mut worst = 0.0f64;
    for f in interior_probes(a.lattice()) {
        let x = a.apply(&f);
        let y = b.apply(&f);
        let diff: Vec<Complex64> = x.iter().zip(&y).map(|(p, q)| p - q).collect();
        worst = worst.max(l2(&diff) / l2(&f));
    }
    Ok(worst)
}

/// `(|<f, e^{-t(H_A - m)} f>|, <|f|, e^{-t(H_0 - m)} |f|>)`; the first never exceeds the second.
pub fn diamagnetic_values(h_a: &LatticeOperator, h_free: &LatticeOperator, t: f64, f: &[Complex64]) -> Result<(f64, f64)> {
    let lhs = inner(f, &h_a.apply_semigroup(t, f)?).norm();
    let g: Vec<Complex64> = f.iter().map(|z| Complex64::new(z.norm(), 0.0)).collect();
    let rhs = inner(&g, &h_free.apply_semigroup(t, &g)?).re;
    Ok((lhs, rhs))
}

/// Pair of operators for diamagnetic comparisons: `H3` for `fs` and for `A = 0`.
pub fn diamagnetic_pair(fs: &FieldSpec, lat: &Lattice, md: MassDim) -> Result<(LatticeOperator, LatticeOperator)> {
    let a = build_h3(lat, &fs.without_scalar(), md)?;
    let free = build_h3(lat, &FieldSpec::zero(fs.dim)?, md)?;
    Ok((a, free))
}

/// Nonnegative pair weights of the lattice quadratic form, `w(delta) = -K(delta)`.
pub fn levy_weights(lat: &Lattice, mass: f64) -> Vec<f64> {
    let mut w: Vec<f64> = relativistic_kernel(lat, mass).iter().map(|k| -k).collect();
    w[0] = 0.0;
    w
}

/// `1/2 sum_{x != y} w(x - y) |u(x) - e^{i phase(y, x)} u(y)|^2 + sum_x V(x) |u(x)|^2`.
///
/// This equals `<u, (H - m + V) u>` for `H1` (midpoint phase) and `H2` (line phase).
pub fn quadratic_form(variant: Variant, u: &[Complex64], fs: &FieldSpec, lat: &Lattice, md: MassDim) -> Result<f64> {
    check_dims(lat, fs, md)?;
    let pres = Prescription::for_variant(variant)?;
    if u.len() != lat.size() {
        return Err(invalid("vector length does not match the lattice"));
    }
    let w = levy_weights(lat, md.mass);
    let d = lat.dim;
    let sites = lat.sites();
    let mut form = 0.0;
    for x in 0..u.len() {
        for y in 0..x {
            let wxy = w[lat.displacement_index(x, y)];
            let e = Complex64::from_polar(1.0, pres.phase(fs, &sites[y][..d], &sites[x][..d]));
            form += wxy * (u[x] - e * u[y]).norm_sqr();
        }
        form += fs.scalar_at(&sites[x][..d]) * u[x].norm_sqr();
    }
    Ok(form)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FormConsistency {
    pub form: f64,
    pub expectation: f64,
    pub relative: f64,
}

/// Compares [`quadratic_form`] with `Re <u, (H - m + V) u>`.
pub fn form_consistency(variant: Variant, u: &[Complex64], fs: &FieldSpec, lat: &Lattice, md: MassDim) -> Result<FormConsistency> {
    let form = quadratic_form(variant, u, fs, lat, md)?;
    let h = build(variant, lat, &fs.without_scalar(), md)?.with_potential(fs)?;
    let hu = h.apply(u);
    let expectation = inner(u, &hu).re - md.mass * inner(u, u).re;
    Ok(FormConsistency { form, expectation, relative: (form - expectation).abs() / expectation.abs().max(f64::MIN_POSITIVE) })
}

/// `T(tau)[x, y] = K_tau(x - y) exp(i phase(y, x) - V((x + y)/2) tau)`.
pub fn sliced_operator(fs: &FieldSpec, lat: &Lattice, md: MassDim, tau: f64, pres: Prescription) -> Result<Mat<Complex64>> {
    check_dims(lat, fs, md)?;
    if !(tau.is_finite() && tau > 0.0) {
        return Err(invalid(format!("slice length must be positive, got {tau}")));
    }
    let k = heat_kernel(lat, md.mass, tau);
    let d = lat.dim;
    let sites = lat.sites();
    let n = lat.size();
    let phases = hermitian_from_kernel(lat, &k, |y, x| pres.phase(fs, y, x));
    Ok(Mat::from_fn(n, n, |i, j| phases[(i, j)] * (-tau * fs.scalar_midpoint(&sites[i][..d], &sites[j][..d])).exp()))
}

/// `T(t/n)^n`.
pub fn sliced_product(fs: &FieldSpec, lat: &Lattice, md: MassDim, t: f64, n: usize, pres: Prescription) -> Result<Mat<Complex64>> {
    if n == 0 {
        return Err(invalid("need at least one slice"));
    }
    Ok(matrix_power(&sliced_operator(fs, lat, md, t / n as f64, pres)?, n))
}

/// `T(t/n)^n g` by `n` matrix-vector products.
pub fn sliced_apply(fs: &FieldSpec, lat: &Lattice, md: MassDim, t: f64, n: usize, pres: Prescription, g: &[Complex64]) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(invalid("need at least one slice"));
    }
    let tm = sliced_operator(fs, lat, md, t / n as f64, pres)?;
    let mut v = g.to_vec();
    for _ in 0..n {
        v = matvec(&tm, &v);
    }
    Ok(v)
}

/// `(exp(-tau (H3 - m)) exp(-tau V))^n` with `tau = t / n`.
pub fn trotter_product(fs: &FieldSpec, lat: &Lattice, md: MassDim, t: f64, n: usize) -> Result<Mat<Complex64>> {
    let h3 = build(Variant::H3, lat, &fs.without_scalar(), md)?;
    trotter_product_of(&h3, fs, t, n)
}

pub fn trotter_product_of(h3: &LatticeOperator, fs: &FieldSpec, t: f64, n: usize) -> Result<Mat<Complex64>> {
    if n == 0 {
        return Err(invalid("need at least one Trotter step"));
    }
    let lat = h3.lattice;
    let tau = t / n as f64;
    let s = h3.semigroup(tau)?;
    let ev: Vec<f64> = (0..lat.size()).map(|i| (-tau * fs.scalar_at(&lat.site(i)[..lat.dim])).exp()).collect();
    let step = Mat::from_fn(lat.size(), lat.size(), |i, j| s[(i, j)] * ev[j]);
    Ok(matrix_power(&step, n))
}

pub fn matrix_power(m: &Mat<Complex64>, mut n: usize) -> Mat<Complex64> {
    let size = m.nrows();
    let mut result = Mat::<Complex64>::identity(size, size);
    let mut base = m.clone();
    let mut first = true;
    while n > 0 {
        if n & 1 == 1 {
            result = if first { base.clone() } else { &result * &base };
            first = false;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    result
}

/// `||(P - S) g|| / ||g||` for a product approximation `P` and exact semigroup `S`.
pub fn probe_error(product: &Mat<Complex64>, exact: &[Complex64], g: &[Complex64]) -> f64 {
    let pg = matvec(product, g);
    let diff: Vec<Complex64> = pg.iter().zip(exact).map(|(a, b)| a - b).collect();
    l2(&diff) / l2(g)
}

/// Least-squares slope of `log err` against `log n`.
pub fn log_log_slope(points: &[(usize, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, e)| e.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Samples `g` on the lattice.
pub fn sample_on_lattice(lat: &Lattice, g: impl Fn(&[f64]) -> Complex64) -> Vec<Complex64> {
    (0..lat.size()).map(|i| g(&lat.site(i)[..lat.dim])).collect()
}

/// `(exp(-t (H_j + V - m)) g)(x)`, interpolated between sites when needed.
pub fn semigroup_value(
    variant: Variant,
    fs: &FieldSpec,
    g: impl Fn(&[f64]) -> Complex64,
    x: &[f64],
    t: f64,
    lat: &Lattice,
    md: MassDim,
) -> Result<Complex64> {
    let op = build(variant, lat, &fs.without_scalar(), md)?.with_potential(fs)?;
    let u = op.apply_semigroup(t, &sample_on_lattice(lat, g))?;
    Ok(lat.interpolate(&u, x))
}

/// Free-case periodization error: the lattice semigroup of `H0` against the
/// continuum convolution `int k0(x - y, t) g(y) dy`.
pub fn free_periodization_error(
    g: impl Fn(&[f64]) -> Complex64 + Copy,
    x: &[f64],
    t: f64,
    lat: &Lattice,
    md: MassDim,
) -> Result<f64> {
    let lattice = semigroup_value(Variant::H0, &FieldSpec::zero(lat.dim)?, g, x, t, lat, md)?;
    let continuum = free_convolution(g, x, t, md)?;
    Ok((lattice - continuum).norm())
}

/// `int k0(y, t) g(x + y) dy` by radial quadrature (`d <= 2`).
pub fn free_convolution(g: impl Fn(&[f64]) -> Complex64, x: &[f64], t: f64, md: MassDim) -> Result<Complex64> {
    let opts = QuadOptions::with_tol(1e-13, 1e-11);
    let avg = |r: f64| -> Complex64 {
        match md.dim {
            1 => g(&[x[0] + r]) + g(&[x[0] - r]),
            2 => {
                let m = 128;
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..m {
                    let th = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                    s += g(&[x[0] + r * th.cos(), x[1] + r * th.sin()]);
                }
                s * (2.0 * std::f64::consts::PI / m as f64)
            }
            _ => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    if md.dim > 2 {
        return Err(invalid("free convolution is implemented for d <= 2"));
    }
    let rpow = |r: f64| if md.dim == 2 { r } else { 1.0 };
    let mut parts = [0.0; 2];
    for (p, part) in parts.iter_mut().enumerate() {
        *part = integrate_to_infinity(
            |r| {
                let k = free_kernel(r, t, md).unwrap_or(0.0) * rpow(r);
                let a = avg(r);
                k * if p == 0 { a.re } else { a.im }
            },
            0.0,
            &opts,
        )?
        .value;
    }
    Ok(Complex64::new(parts[0], parts[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_h0, build_h2, build_h3};

    fn md(m: f64, d: usize) -> MassDim {
        MassDim::new(m, d).unwrap()
    }

    #[test]
    fn quadratic_form_is_exact() {
        let lat = Lattice::new(2, 8, 6.0).unwrap();
        let fs = FieldSpec::tanh(2).unwrap().with_scalar(crate::fields::ScalarPotential::HarmonicCapped { coeff: 1.0, cap: 4.0 }).unwrap();
        let u: Vec<Complex64> = (0..lat.size()).map(|i| Complex64::new((i as f64).sin(), (0.3 * i as f64).cos())).collect();
        for v in [Variant::H1, Variant::H2] {
            let c = form_consistency(v, &u, &fs, &lat, md(1.0, 2)).unwrap();
            assert!(c.relative < 1e-10, "{v:?}: {c:?}");
        }
    }

    #[test]
    fn levy_weights_approximate_levy_density() {
        let lat = Lattice::new(1, 256, 32.0).unwrap();
        let w = levy_weights(&lat, 1.0);
        assert!(w.iter().all(|&v| v >= -1e-15));
        let h = lat.spacing();
        for j in [16usize, 32, 64] {
            let r = j as f64 * h;
            let n = crate::specfun::levy_density(r, md(1.0, 1)).unwrap();
            assert!((w[j] / h - n).abs() / n < 0.05, "j={j}: {} vs {}", w[j] / h, n);
        }
    }

    #[test]
    fn semigroup_column_approaches_periodized_kernel() {
        let lat = Lattice::new(1, 512, 20.0).unwrap();
        let h0 = build_h0(&lat, md(1.0, 1)).unwrap();
        let s = h0.semigroup(1.0).unwrap();
        let y0 = 256;
        let h = lat.spacing();
        let mut err: f64 = 0.0;
        for x in 0..512 {
            let dx = lat.site(x)[0] - lat.site(y0)[0];
            let per: f64 = (-20..=20).map(|k| free_kernel((dx + 20.0 * k as f64).abs(), 1.0, md(1.0, 1)).unwrap()).sum::<f64>() * h;
            err = err.max((s[(x, y0)].re - per).abs());
        }
        // O(h^2) symbol error of the nearest-neighbour Laplacian
        assert!(err < 2e-3, "{err}");
    }

    #[test]
    fn zero_field_collapse() {
        let lat = Lattice::new(1, 32, 8.0).unwrap();
        let m = md(1.0, 1);
        let z = FieldSpec::zero(1).unwrap();
        let h0 = build_h0(&lat, m).unwrap();
        for op in [build_h1(&lat, &z, m).unwrap(), build_h2(&lat, &z, m).unwrap(), build_h3(&lat, &z, m).unwrap()] {
            let mut e: f64 = 0.0;
            for i in 0..32 {
                for j in 0..32 {
                    e = e.max((op.matrix()[(i, j)] - h0.matrix()[(i, j)]).norm());
                }
            }
            assert!(e < 1e-12, "{:?}: {e}", op.variant);
        }
    }

    #[test]
    fn matrix_power_matches_repeated_product() {
        let m = Mat::from_fn(3, 3, |i, j| Complex64::new((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.05));
        let p = matrix_power(&m, 5);
        let q = &(&(&(&m * &m) * &m) * &m) * &m;
        for i in 0..3 {
            for j in 0..3 {
                assert!((p[(i, j)] - q[(i, j)]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn slope_of_exact_power_law() {
        let pts: Vec<(usize, f64)> = [4usize, 8, 16, 32].iter().map(|&n| (n, 3.0 / n as f64)).collect();
        assert!((log_log_slope(&pts) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_linear_potential_gives_coincidence() {
        let lat = Lattice::new(2, 16, 8.0).unwrap();
        let matrix = vec![vec![0.2, 0.1], vec![0.1, -0.1]];
        let fs = FieldSpec::new(2, crate::fields::VectorPotential::Linear { matrix }, crate::fields::ScalarPotential::Zero, Gauge::Zero).unwrap();
        let c = coincidence_residual(&fs, &lat, md(1.0, 2)).unwrap();
        assert!(c.weyl_vs_sqrt < 1e-10 && c.square_vs_covariant < 1e-10, "{c:?}");
    }

    #[test]
    fn probe_gap_separates_quadratic_potential() {
        let fs = FieldSpec::quadratic(1).unwrap();
        let mut gaps = vec![];
        for n in [64, 128] {
            let lat = Lattice::new(1, n, 8.0).unwrap();
            let a = build_h1(&lat, &fs, md(1.0, 1)).unwrap();
            let b = build_h2(&lat, &fs, md(1.0, 1)).unwrap();
            assert!(probe_gap(&a, &a).unwrap() == 0.0);
            gaps.push(probe_gap(&a, &b).unwrap());
        }
        assert!(gaps[0] > 1e-2 && (gaps[0] - gaps[1]).abs() < 0.05 * gaps[0], "{gaps:?}");
    }
}
