//! Acceptance suites.  Each suite returns one [`Check`] per criterion item plus a
//! runtime check against its budget.

use crate::error::CliResult;
use rand::Rng;
use rand_distr::StandardNormal;
use relkac_core::actions::{jump_action, sliced_action, action_s3, CompensatorQuadrature};
use relkac_core::estimator::{charfn_suite, compare_with_oracle, estimate, free_lattice_tolerance, lattice_oracle, McParams, ProbeFunction};
use relkac_core::fields::{FieldSpec, Gauge, ScalarPotential, VectorPotential};
use relkac_core::lattice::{
    build, build_h0, build_h1, build_h2, build_h3, coincidence_residual, diamagnetic_pair, diamagnetic_values, form_consistency,
    gauge_residual, log_log_slope, probe_error, probe_gap, sample_on_lattice, sliced_product, trotter_product_of, Lattice, Prescription,
    Variant,
};
use relkac_core::paths::{first_passage_time, sample_levy_jumps, sample_subordinated, subordinated_skeleton_into, uniform_grid, JumpLaw, RngStream};
use relkac_core::quad::{integrate, QuadOptions};
use relkac_core::specfun::{bessel_k, free_kernel, kernel_to_levy_limit, levy_density, sphere_area, subordinator_density, subordinator_laplace};
use relkac_core::{Complex64, MassDim};
use serde::Serialize;
use std::f64::consts::PI;
use std::time::Instant;

pub const SUITES: [&str; 8] = ["specfun", "fields", "subordinator", "process", "lattice", "products", "estimator", "actions"];

/// Items that cannot be met as worded; they are reported, never masked.
pub const KNOWN_GAPS: [&str; 1] = ["4d"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: String,
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn at_most(id: &str, name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { id: id.into(), name: name.into(), value, relation: Relation::AtMost, bound, pass: value <= bound, detail: String::new() }
    }

    fn at_least(id: &str, name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { id: id.into(), name: name.into(), value, relation: Relation::AtLeast, bound, pass: value >= bound, detail: String::new() }
    }

    fn holds(id: &str, name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            relation: Relation::AtLeast,
            bound: 1.0,
            pass: ok,
            detail: detail.into(),
        }
    }

    fn with(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn line(&self) -> String {
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        };
        let mut s = format!("{} [{}] {}: {:.3e} {rel} {:.3e}", if self.pass { "PASS" } else { "FAIL" }, self.id, self.name, self.value, self.bound);
        if !self.detail.is_empty() {
            s += &format!(" ({})", self.detail);
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub elapsed_s: f64,
    pub budget_s: f64,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn runtime_line(&self) -> String {
        format!("---- {} finished in {:.1} s (budget {:.0} s)", self.suite, self.elapsed_s, self.budget_s)
    }
}

pub fn run_suite(name: &str, seed: u64) -> CliResult<SuiteReport> {
    let start = Instant::now();
    let (criterion, budget, mut checks) = match name {
        "specfun" => ("1", 5.0, specfun()?),
        "fields" => ("F", 5.0, fields()?),
        "subordinator" => ("2", 10.0, subordinator(seed)?),
        "process" => ("3", 30.0, process(seed)?),
        "lattice" => ("4", 120.0, lattice()?),
        "products" => ("5", 60.0, products()?),
        "estimator" => ("6", 300.0, end_to_end(seed)?),
        "actions" => ("7", 30.0, pathwise(seed)?),
        other => return Err(crate::error::CliError::Config(format!("unknown suite '{other}' ({})", SUITES.join(", ")))),
    };
    let elapsed = start.elapsed().as_secs_f64();
    checks.push(Check::at_most(&format!("{criterion}-time"), "runtime [s]", elapsed, budget));
    Ok(SuiteReport { suite: name.into(), checks, elapsed_s: elapsed, budget_s: budget })
}

fn md(m: f64, d: usize) -> MassDim {
    MassDim::new(m, d).expect("static mass and dimension")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn quad_tight() -> QuadOptions {
    QuadOptions { abs_tol: 0.0, rel_tol: 1e-13, max_intervals: 20_000 }
}

/// `int_0^inf f(s) ds` in the variable `u = ln s`.
fn log_integral(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> CliResult<f64> {
    Ok(integrate(|u| {
        let s = u.exp();
        f(s) * s
    }, lo, hi, &quad_tight())?
    .value)
}

/// Gaussian heat kernel at radius `r` in dimension `d`.
fn heat(r: f64, s: f64, d: usize) -> f64 {
    (2.0 * PI * s).powf(-0.5 * d as f64) * (-r * r / (2.0 * s)).exp()
}

// ---------------------------------------------------------------- 1

fn specfun() -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let mut worst_k: f64 = 0.0;
    for &nu in &[0.0, 0.5, 1.0, 1.5, 2.0] {
        for &x in &[0.05, 0.3, 1.0, 2.5, 8.0, 20.0] {
            let q = integrate(|s| (-x * s.cosh()).exp() * (nu * s).cosh(), 0.0, 12.0, &quad_tight())?.value;
            worst_k = worst_k.max(rel(bessel_k(nu, x)?, q));
        }
    }
    out.push(Check::at_most("1", "bessel_k vs integral representation, max rel err", worst_k, 1e-10));

    // Levy density and kernel by subordination: Brownian heat kernel averaged over the
    // Levy measure (2 pi s^3)^{-1/2} e^{-m^2 s / 2} ds and the first-passage law.
    let radii: Vec<f64> = (0..20).map(|i| 0.05 * 160f64.powf(i as f64 / 19.0)).collect();
    for d in 1..=2 {
        for &m in &[0.0, 1.0] {
            let p = md(m, d);
            let mut wn: f64 = 0.0;
            let mut wk: f64 = 0.0;
            for &r in &radii {
                let n_ref = log_integral(|s| heat(r, s, d) * (2.0 * PI * s * s * s).powf(-0.5) * (-0.5 * m * m * s).exp(), -50.0, 50.0)?;
                wn = wn.max(rel(levy_density(r, p)?, n_ref));
                for &t in &[0.1, 1.0] {
                    let k_ref = log_integral(
                        |s| {
                            let a = t - m * s;
                            heat(r, s, d) * t / (2.0 * PI * s * s * s).sqrt() * (-a * a / (2.0 * s)).exp()
                        },
                        -50.0,
                        50.0,
                    )?;
                    wk = wk.max(rel(free_kernel(r, t, p)?, k_ref));
                }
            }
            out.push(Check::at_most("1", format!("levy_density d={d} m={m}, 20 radii, max rel err"), wn, 1e-8));
            out.push(Check::at_most("1", format!("free_kernel d={d} m={m}, 20 radii x t in {{0.1,1}}, max rel err"), wk, 1e-8));
        }
    }
    for d in 1..=2 {
        for &m in &[0.0, 1.0] {
            let p = md(m, d);
            let mut worst: f64 = 0.0;
            for &t in &[0.1, 1.0] {
                let mass = sphere_area(d) * log_integral(|r| r.powi(d as i32 - 1) * free_kernel(r, t, p).unwrap_or(f64::NAN), -40.0, 40.0)?;
                worst = worst.max((mass - 1.0).abs());
            }
            out.push(Check::at_most("1", format!("|int k0 - 1| d={d} m={m}, t in {{0.1,1}}"), worst, 1e-6));
        }
    }
    let mut worst: f64 = 0.0;
    for d in 1..=2 {
        for &m in &[0.0, 1.0] {
            for row in kernel_to_levy_limit(1.0, &[1e-4], md(m, d))? {
                worst = worst.max(row.rel_err);
            }
        }
    }
    out.push(Check::at_most("1", "k0(y,t)/t vs n(y) at t=1e-4, max rel err", worst, 1e-3));
    Ok(out)
}

// ---------------------------------------------------------------- fields

fn fields() -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let quad3 = FieldSpec::new(3, VectorPotential::Quadratic { axis: 2, coeff: 1.0 }, ScalarPotential::Zero, Gauge::Zero)?;
    let (x, y) = ([0.0, 0.0, 0.0], [0.0, 0.0, 1.0]);
    let gap = quad3.line_average(&x, &y)?[2] - quad3.midpoint_eval(&x, &y)[2];
    out.push(Check::at_most("F", "line average - midpoint for A=(0,0,z^2) minus 1/12", (gap - 1.0 / 12.0).abs(), 1e-14));

    let lin = FieldSpec::new(2, VectorPotential::Linear { matrix: vec![vec![0.3, -0.2], vec![0.4, 0.1]] }, ScalarPotential::Zero, Gauge::Zero)?;
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let a = [(k as f64 * 0.37).sin() * 3.0, (k as f64 * 0.11).cos() * 2.0];
        let b = [(k as f64 * 0.71).cos() * 2.5, (k as f64 * 0.53).sin() * 1.5];
        let la = lin.line_average(&a, &b)?;
        let mp = lin.midpoint_eval(&a, &b);
        worst = worst.max((la[0] - mp[0]).abs().max((la[1] - mp[1]).abs()));
    }
    out.push(Check::at_most("F", "linear A: |line average - midpoint|", worst, 1e-14));

    let p1 = Gauge::CappedCubic { amplitude: 1.0, width: 3.0 };
    let p2 = Gauge::Quadratic { coeff: 0.4 };
    let base = FieldSpec::tanh(2)?;
    let twice = base.gauge_shift(&p1)?.gauge_shift(&p2)?;
    let once = base.gauge_shift(&Gauge::Sum { terms: vec![p1.clone(), p2] })?;
    let mut worst: f64 = 0.0;
    let mut tele: f64 = 0.0;
    let zero = FieldSpec::zero(2)?.gauge_shift(&p1)?;
    for k in 0..50 {
        let a = [(k as f64 * 0.37).sin() * 4.0, (k as f64 * 0.19).cos() * 4.0];
        let b = [(k as f64 * 0.29).cos() * 4.0, (k as f64 * 0.83).sin() * 4.0];
        let (u, v) = (twice.vector_at(&a), once.vector_at(&a));
        worst = worst.max((u[0] - v[0]).abs().max((u[1] - v[1]).abs()));
        tele = tele.max((zero.exact_line_integral(&a, &b) - (p1.phi(&b) - p1.phi(&a))).abs());
    }
    out.push(Check::at_most("F", "gauge additivity, max pointwise difference", worst, 1e-13));
    out.push(Check::at_most("F", "line integral of grad(phi) minus phi(y)-phi(x)", tele, 1e-10));

    let mut worst: f64 = 0.0;
    let h = 1e-5;
    for fs in [FieldSpec::tanh(2)?, twice.clone()] {
        for k in 0..20 {
            let a = [(k as f64 * 0.61).sin() * 2.0, (k as f64 * 0.23).cos() * 2.0];
            let mut fd = 0.0;
            for i in 0..2 {
                let (mut p, mut q) = (a, a);
                p[i] += h;
                q[i] -= h;
                fd += (fs.vector_at(&p)[i] - fs.vector_at(&q)[i]) / (2.0 * h);
            }
            worst = worst.max((fd - fs.divergence(&a)).abs());
        }
    }
    out.push(Check::at_most("F", "div A against central differences", worst, 1e-6));
    Ok(out)
}

// ---------------------------------------------------------------- 2

fn subordinator(seed: u64) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let n = 100_000;
    for (i, &m) in [0.0, 1.0].iter().enumerate() {
        let mut rng = RngStream::new(seed, 10 + i as u64).rng();
        let draws: Vec<f64> = (0..n).map(|_| first_passage_time(1.0, m, &mut rng)).collect();
        let mut worst: f64 = 0.0;
        for &sigma in &[0.5, 1.0, 2.0] {
            let w: Vec<f64> = draws.iter().map(|s| (-sigma * s).exp()).collect();
            let mean = w.iter().sum::<f64>() / n as f64;
            let var = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let z = (mean - subordinator_laplace(sigma, 1.0, m)?).abs() / (var / n as f64).sqrt();
            worst = worst.max(z);
        }
        out.push(Check::at_most("2", format!("E exp(-sigma T(1)) m={m}, sigma in {{0.5,1,2}}, 1e5 draws, max |z|"), worst, 3.0));
        if m > 0.0 {
            let mean = draws.iter().sum::<f64>() / n as f64;
            let var = draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            out.push(Check::at_most("2", "E T(1) = 1/m, |z|", (mean - 1.0 / m).abs() / (var / n as f64).sqrt(), 3.0));
        }
    }
    let mut worst: f64 = 0.0;
    for &m in &[0.0, 1.0] {
        for &t in &[0.5, 1.0, 2.0] {
            for &sigma in &[0.0, 0.5, 1.0, 2.0, 5.0] {
                let q = log_integral(|s| (-sigma * s).exp() * subordinator_density(s, t, m).unwrap_or(f64::NAN), -40.0, 40.0)?;
                worst = worst.max((q - subordinator_laplace(sigma, t, m)?).abs());
            }
        }
    }
    out.push(Check::at_most("2", "Laplace transform of the density vs closed form", worst, 1e-6));
    Ok(out)
}

// ---------------------------------------------------------------- 3

fn process(seed: u64) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let xi = [0.0, 0.5, 1.0, 2.0];
    let n = 100_000;
    for &m in &[0.0, 1.0] {
        for (label, eps, allowance) in [("subordinated", None, 0.0), ("jump eps=0.05", Some(0.05), 5e-3), ("jump eps=0.025", Some(0.025), 2.5e-3)] {
            let rows = charfn_suite(eps, md(m, 1), 1.0, &xi, n, seed ^ 0x3)?;
            let excess = rows
                .iter()
                .map(|r| Complex64::new(r.empirical_re - r.exact, r.empirical_im).norm() - 3.0 * r.stderr)
                .fold(f64::NEG_INFINITY, f64::max);
            let zs: Vec<String> = rows.iter().map(|r| format!("{:.2}", r.z_score)).collect();
            out.push(Check::at_most("3", format!("{label} m={m}: max(|phi_emp - phi| - 3 se) over xi"), excess, allowance).with(format!("z = [{}]", zs.join(", "))));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- 4

fn max_entry_gap(a: &relkac_core::lattice::LatticeOperator, b: &relkac_core::lattice::LatticeOperator) -> f64 {
    let (ma, mb) = (a.matrix(), b.matrix());
    let mut e: f64 = 0.0;
    for j in 0..ma.ncols() {
        for i in 0..ma.nrows() {
            e = e.max((ma[(i, j)] - mb[(i, j)]).norm());
        }
    }
    e
}

fn random_probe(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect()
}

fn lattice() -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let m1 = md(1.0, 1);
    let m2 = md(1.0, 2);
    let l1 = Lattice::new(1, 128, 16.0)?;
    let l1c = Lattice::new(1, 64, 16.0)?;
    let l2 = Lattice::new(2, 32, 8.0)?;
    let l2c = Lattice::new(2, 16, 8.0)?;

    for (lat, p) in [(&l1, m1), (&l2, m2)] {
        let z = FieldSpec::zero(lat.dim)?;
        let h0 = build_h0(lat, p)?;
        let e = [build_h1(lat, &z, p)?, build_h2(lat, &z, p)?, build_h3(lat, &z, p)?].iter().map(|op| max_entry_gap(op, &h0)).fold(0.0, f64::max);
        out.push(Check::at_most("4a", format!("A=0 collapse d={} N={}, max entry |H_j - H0|", lat.dim, lat.n), e, 1e-12));
    }

    for (fine, coarse, p) in [(&l1, &l1c, m1), (&l2, &l2c, m2)] {
        let fs = FieldSpec::tanh(fine.dim)?;
        for v in [Variant::H1, Variant::H2, Variant::H3] {
            let f = build(v, fine, &fs, p)?.spectral_floor()?;
            let c = build(v, coarse, &fs, p)?.spectral_floor()?;
            let tol = if v == Variant::H3 { 1e-9 } else { 1e-3 };
            let (df, dc) = ((p.mass - f).max(0.0), (p.mass - c).max(0.0));
            let mut chk = Check::at_least("4b", format!("spectral floor {v:?} tanh d={} N={}", fine.dim, fine.n), f, p.mass - tol)
                .with(format!("deficit {df:.2e} at N={}, {dc:.2e} at N={}", fine.n, coarse.n));
            chk.pass &= df <= dc + 1e-12;
            out.push(chk);
        }
    }

    let phi = Gauge::CappedCubic { amplitude: 1.0, width: 3.0 };
    for (lat, p) in [(&l1, m1), (&l2, m2)] {
        for fs in [FieldSpec::zero(lat.dim)?, FieldSpec::tanh(lat.dim)?] {
            let name = if fs.vector == VectorPotential::Zero { "A=0" } else { "A=tanh" };
            for v in [Variant::H2, Variant::H3] {
                let r = gauge_residual(v, &fs, &phi, lat, p)?.relative;
                out.push(Check::at_most("4c", format!("gauge residual {v:?} {name} d={}", lat.dim), r, 1e-8));
            }
            let r = gauge_residual(Variant::H1, &fs, &phi, lat, p)?.relative;
            out.push(Check::at_least("4c", format!("gauge residual H1 {name} d={}", lat.dim), r, 1e-3));
        }
    }

    let field = FieldSpec::constant_magnetic(2, 0.2)?;
    let r32 = coincidence_residual(&field, &l2, m2)?.weyl_vs_sqrt;
    let r64 = coincidence_residual(&field, &Lattice::new(2, 64, 8.0)?, m2)?.weyl_vs_sqrt;
    out.push(
        Check::at_most("4d", "coincidence residual, constant field b=0.2, ratio N=64 / N=32", r64 / r32, 0.5)
            .with(format!("{r32:.3e} -> {r64:.3e}; H1 and H3 differ in the continuum for antisymmetric linear A")),
    );
    let sym = FieldSpec::new(2, VectorPotential::Linear { matrix: vec![vec![0.2, 0.1], vec![0.1, -0.1]] }, ScalarPotential::Zero, Gauge::Zero)?;
    let rs = coincidence_residual(&sym, &l2, m2)?;
    out.push(Check::at_most("4d", "coincidence residual, symmetric linear A, N=32", rs.weyl_vs_sqrt.max(rs.square_vs_covariant), 1e-10));

    let quad = FieldSpec::quadratic(1)?;
    let gaps: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| {
            let lat = Lattice::new(1, n, 8.0)?;
            probe_gap(&build_h1(&lat, &quad, m1)?, &build_h2(&lat, &quad, m1)?)
        })
        .collect::<relkac_core::Result<_>>()?;
    let spread = gaps.iter().fold(0.0f64, |a, g| a.max((g - gaps[2]).abs())) / gaps[2];
    out.push(Check::at_least("4e", "H1 - H2 for A=x^2, interior-probe gap at N=256", gaps[2], 1e-2).with(format!("N=64,128,256: {:.5}, {:.5}, {:.5}", gaps[0], gaps[1], gaps[2])));
    out.push(Check::at_most("4e", "relative spread of the gap over N=64..256", spread, 0.05));

    let mut rng = RngStream::new(4, 0).rng();
    for fs in [FieldSpec::constant_magnetic(2, 0.5)?, FieldSpec::tanh(2)?] {
        let (a, free) = diamagnetic_pair(&fs, &l2, m2)?;
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..50 {
            let f = random_probe(&mut rng, l2.size());
            for &t in &[0.1, 0.5, 1.0] {
                let (lhs, rhs) = diamagnetic_values(&a, &free, t, &f)?;
                worst = worst.max((lhs - rhs) / rhs);
            }
        }
        let name = if matches!(fs.vector, VectorPotential::Tanh { .. }) { "tanh" } else { "constant field" };
        out.push(Check::at_most("4f", format!("diamagnetic (|lhs| - rhs) / rhs, {name}, 50 probes x 3 times"), worst, 1e-9));
    }

    let v = ScalarPotential::HarmonicCapped { coeff: 1.0, cap: 10.0 };
    for (lat, p) in [(&l1, m1), (&l2, m2)] {
        let fs = FieldSpec::tanh(lat.dim)?.with_scalar(v.clone())?;
        let u = sample_on_lattice(lat, |x| {
            let r2: f64 = x.iter().map(|c| (c - 0.3) * (c - 0.3)).sum();
            Complex64::from_polar((-r2 / 2.0).exp(), 0.7 * x[0])
        });
        for var in [Variant::H1, Variant::H2] {
            let c = form_consistency(var, &u, &fs, lat, p)?;
            out.push(Check::at_most("4g", format!("form consistency {var:?} d={}", lat.dim), c.relative, 1e-6));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- 5

fn products() -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let p = md(1.0, 1);
    let lat = Lattice::new(1, 128, 16.0)?;
    let fs = FieldSpec::tanh(1)?.with_scalar(ScalarPotential::HarmonicCapped { coeff: 1.0, cap: 10.0 })?;
    let g = sample_on_lattice(&lat, |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0));
    let t = 0.5;
    let exact = build_h1(&lat, &fs.without_scalar(), p)?.with_potential(&fs)?.apply_semigroup(t, &g)?;
    let errs: Vec<f64> = [4, 8, 16, 32]
        .iter()
        .map(|&n| Ok(probe_error(&sliced_product(&fs, &lat, p, t, n, Prescription::Midpoint)?, &exact, &g)))
        .collect::<CliResult<_>>()?;
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    out.push(Check::holds("5", "sliced product error monotone over n=4,8,16,32", monotone, errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", ")));

    let h3 = build_h3(&lat, &fs.without_scalar(), p)?;
    let exact3 = h3.with_potential(&fs)?.apply_semigroup(t, &g)?;
    let pts: Vec<(usize, f64)> = [4, 8, 16, 32]
        .iter()
        .map(|&n| Ok((n, probe_error(&trotter_product_of(&h3, &fs, t, n)?, &exact3, &g))))
        .collect::<CliResult<_>>()?;
    let slope = log_log_slope(&pts);
    let mut c = Check::at_least("5", "Trotter error log-log slope (in [-1.5, -0.5])", slope, -1.5);
    c.pass &= slope <= -0.5;
    out.push(c.with(pts.iter().map(|(_, e)| format!("{e:.3e}")).collect::<Vec<_>>().join(", ")));
    Ok(out)
}

// ---------------------------------------------------------------- 6

fn end_to_end(seed: u64) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let p = md(1.0, 1);
    let lat = Lattice::new(1, 1024, 24.0)?;
    let fs = FieldSpec::tanh(1)?.with_scalar(ScalarPotential::HarmonicCapped { coeff: 1.0, cap: 10.0 })?;
    let g = ProbeFunction::gaussian(vec![0.0], 1.0);
    let (x, t) = (vec![0.0], 0.5);
    let tol = free_lattice_tolerance(&g, &x, t, p, &lat)?;
    let params = McParams { n_paths: 200_000, n_slices: 64, ..McParams::default() };
    for v in [Variant::H1, Variant::H2, Variant::H3] {
        let oracle = lattice_oracle(v, &fs, &g, &x, t, p, &lat)?;
        let mut report = estimate(v, &fs, &g, &x, t, p, &params, seed)?;
        let verdict = compare_with_oracle(&mut report, oracle, tol);
        let m = report.mean();
        out.push(Check::at_most("6", format!("{v:?} |mean - oracle| vs 3 se + lat_tol"), verdict.difference, verdict.bound).with(format!(
            "mean {:.6}{:+.6}i, oracle {:.6}{:+.6}i, se {:.2e}, lat_tol {:.2e}",
            m.re, m.im, oracle.re, oracle.im, verdict.stderr, tol
        )));
    }
    Ok(out)
}

// ---------------------------------------------------------------- 7

fn pathwise(seed: u64) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let n_paths = 1000;
    let p = md(1.0, 2);
    let grid = uniform_grid(1.0, 64);
    let lin = FieldSpec::new(2, VectorPotential::Linear { matrix: vec![vec![0.3, -0.2], vec![0.4, -0.3]] }, ScalarPotential::HarmonicCapped { coeff: 0.5, cap: 10.0 }, Gauge::Zero)?;
    let a = [0.7, -0.3];
    let cst = FieldSpec::constant(a.to_vec())?;
    let law = JumpLaw::new(p, 0.25)?;
    let cq = CompensatorQuadrature::new(p, 0.25)?;
    let p1 = md(1.0, 1);
    let cst1 = FieldSpec::constant(vec![a[0]])?;
    let law1 = JumpLaw::new(p1, 0.1)?;
    let cq1 = CompensatorQuadrature::new(p1, 0.1)?;
    let x0 = [0.2, -0.1];
    let (mut d_sl, mut d_jp, mut t_sl, mut t_jp) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut skel = Vec::new();
    for k in 0..n_paths {
        let mut rng = RngStream::new(seed, 70_000 + k as u64).rng();
        subordinated_skeleton_into(&x0, &grid, p.mass, &mut rng, &mut skel);
        let s1 = sliced_action(Prescription::Midpoint, &lin, &grid, &skel);
        let s2 = sliced_action(Prescription::LineAverage, &lin, &grid, &skel);
        d_sl = d_sl.max((s1.imag_part - s2.imag_part).abs().max((s1.real_part - s2.real_part).abs()));
        let sc = sliced_action(Prescription::Midpoint, &cst, &grid, &skel);
        let end = &skel[skel.len() - 2..];
        let tel = a[0] * (end[0] - x0[0]) + a[1] * (end[1] - x0[1]);
        t_sl = t_sl.max((sc.imag_part - tel).abs());

        let path = sample_levy_jumps(&x0, 1.0, &law, 64, &mut rng)?;
        let j1 = jump_action(Prescription::Midpoint, &path, &lin, &cq)?;
        let j2 = jump_action(Prescription::LineAverage, &path, &lin, &cq)?;
        d_jp = d_jp.max((j1.imag_part - j2.imag_part).abs().max((j1.real_part - j2.real_part).abs()));
        let path1 = sample_levy_jumps(&x0[..1], 1.0, &law1, 64, &mut rng)?;
        let jc = jump_action(Prescription::Midpoint, &path1, &cst1, &cq1)?;
        t_jp = t_jp.max((jc.imag_part - a[0] * (path1.end()[0] - x0[0])).abs());
    }
    out.push(Check::at_most("7", "linear A: max |S1 - S2|, sliced form, 1e3 shared paths", d_sl, 1e-12));
    out.push(Check::at_most("7", "linear A: max |S1 - S2|, jump form (eps 0.25), 1e3 shared paths", d_jp, 1e-12));
    out.push(Check::at_most("7", "constant A: max |Im S - a.(X(t) - x0)|, sliced form", t_sl, 1e-12));
    out.push(Check::at_most("7", "constant A: max |Im S - a.(X(t) - x0)|, jump form, d=1", t_jp, 1e-12));

    let fs = FieldSpec::tanh(1)?;
    let grid = uniform_grid(1.0, 16);
    let mut defects = Vec::new();
    for &sub in &[256usize, 1024, 4096] {
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..200 {
            let mut rng = RngStream::new(seed, 90_000 + k as u64).rng();
            let sp = sample_subordinated(&[0.0], &grid, 1.0, sub, &mut rng)?;
            let s = action_s3(&sp, &fs)?;
            num += (s.ito_stratonovich_gap() - s.diagnostics.half_divergence).abs();
            den += s.diagnostics.half_divergence.abs();
        }
        defects.push(num / den);
    }
    let shrinking = defects.windows(2).all(|w| w[1] < 0.75 * w[0]);
    let mut c = Check::at_most("7", "Stratonovich - Ito vs 1/2 int div A, relative defect at 4096 steps", defects[2], 0.05);
    c.pass &= shrinking;
    out.push(c.with(format!("256, 1024, 4096 steps: {}", defects.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>().join(", "))));
    Ok(out)
}
