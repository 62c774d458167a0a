use crate::config::Resolved;
use crate::error::{CliError, CliResult};
use crate::output::{write_json, Artifact, Table};
use crate::verify;
use relkac_core::estimator::{compare_with_oracle, estimate, free_lattice_tolerance, lattice_oracle, EstimateReport, Sampler, Verdict};
use relkac_core::fields::{Gauge, ScalarPotential};
use relkac_core::lattice::{build, gauge_residual, sample_on_lattice, Variant};
use relkac_core::paths::{sample_levy_jumps, sample_subordinated, uniform_grid, JumpLaw, RngStream};
use relkac_core::specfun::{free_kernel, levy_density, subordinator_density};
use relkac_core::Complex64;
use serde::Serialize;
use std::path::PathBuf;

/// Where artifacts go.  JSON defaults to stdout; CSV to stdout only when it is the
/// sole artifact of the command.
#[derive(Debug, Clone, Default)]
pub struct Outputs {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

/// `y, t, k0, n, density` with `density` the subordinator density at `s = y`.
pub fn kernel(r: &Resolved, out: &Outputs) -> CliResult<()> {
    let c = &r.config;
    let mut table = Table::new(&["y", "t", "k0", "n", "density"]);
    for &t in &c.kernel.times {
        for &y in &c.kernel.radii {
            let n = if y > 0.0 { levy_density(y, r.md)? } else { f64::INFINITY };
            let dens = if y > 0.0 { subordinator_density(y, t, r.md.mass)? } else { 0.0 };
            table.push(vec![y, t, free_kernel(y, t, r.md)?, n, dens]);
        }
    }
    table.write_to(out.csv.as_deref(), "kernel", c)
}

#[derive(Serialize)]
struct SampleSummary {
    sampler: Sampler,
    paths: usize,
    steps: usize,
    mean_end: Vec<f64>,
    mean_jumps: f64,
    csv: Option<PathBuf>,
}

/// Path skeletons: `path, k, t, T (or jumps so far), x_1..x_d`.
pub fn sample(r: &Resolved, out: &Outputs) -> CliResult<()> {
    let c = &r.config;
    let d = c.dim;
    let grid = uniform_grid(c.t, c.sample.steps);
    let mut cols = vec!["path", "k", "t", if c.sample.sampler == Sampler::Jump { "jumps" } else { "T" }];
    let names: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    cols.extend(names.iter().map(String::as_str));
    let mut table = Table::new(&cols);
    let law = match c.sample.sampler {
        Sampler::Jump => Some(JumpLaw::new(r.md, c.mc.eps_cut)?),
        Sampler::Subordinated => None,
    };
    let mut mean_end = vec![0.0; d];
    let mut jumps = 0usize;
    for p in 0..c.sample.paths {
        let mut rng = RngStream::new(c.seed, p as u64).rng();
        let (path, tcol): (_, Vec<f64>) = match &law {
            Some(law) => {
                let path = sample_levy_jumps(&r.x, c.t, law, c.sample.steps, &mut rng)?;
                let counts = grid.iter().map(|&s| path.jump_times.iter().filter(|&&u| u <= s).count() as f64).collect();
                (path, counts)
            }
            None => {
                let sp = sample_subordinated(&r.x, &grid, r.md.mass, c.mc.brownian_substeps, &mut rng)?;
                let tv = sp.subordinator.values.clone();
                (sp.path, tv)
            }
        };
        jumps += path.jump_count();
        for (k, (&s, &tv)) in grid.iter().zip(&tcol).enumerate() {
            let mut row = vec![p as f64, k as f64, s, tv];
            row.extend_from_slice(path.point(k));
            table.push(row);
        }
        for (m, e) in mean_end.iter_mut().zip(path.end()) {
            *m += e / c.sample.paths as f64;
        }
    }
    if out.csv.is_none() {
        return table.write_to(None, "sample", c);
    }
    table.write_to(out.csv.as_deref(), "sample", c)?;
    let summary = SampleSummary {
        sampler: c.sample.sampler,
        paths: c.sample.paths,
        steps: c.sample.steps,
        mean_end,
        mean_jumps: jumps as f64 / c.sample.paths as f64,
        csv: out.csv.clone(),
    };
    write_json(&Artifact { command: "sample", seed: c.seed, config: c, result: summary }, out.json.as_deref())
}

fn run_estimate(r: &Resolved) -> CliResult<EstimateReport> {
    let c = &r.config;
    let mc = r.mc()?;
    Ok(estimate(c.variant, &r.fs, &r.probe, &r.x, c.t, r.md, &mc, c.seed)?)
}

pub fn estimate_cmd(r: &Resolved, out: &Outputs) -> CliResult<()> {
    let report = run_estimate(r)?;
    write_json(&Artifact { command: "estimate", seed: r.config.seed, config: &r.config, result: report }, out.json.as_deref())
}

#[derive(Serialize)]
pub struct OracleReport {
    pub variant: Variant,
    pub sites: usize,
    pub spacing: f64,
    pub spectral_floor: f64,
    pub floor_minus_shift: f64,
    pub hermiticity_defect: f64,
    pub norm: f64,
    /// Relative gauge residual under the stock cubic gauge function, when requested.
    pub gauge_residual: Option<f64>,
    pub value_re: f64,
    pub value_im: f64,
    pub free_lattice_tolerance: Option<f64>,
}

/// Operator diagnostics (JSON) and the semigroup applied to the probe on every site (CSV).
pub fn oracle(r: &Resolved, out: &Outputs, residuals: bool) -> CliResult<()> {
    let c = &r.config;
    let lat = r.lattice()?;
    let op = build(c.variant, &lat, &r.fs.without_scalar(), r.md)?;
    let floor = op.spectral_floor()?;
    let full = if r.fs.scalar == ScalarPotential::Zero { op.clone() } else { op.with_potential(&r.fs)? };
    let g = sample_on_lattice(&lat, |y| r.probe.eval(y));
    let u = full.apply_semigroup(c.t, &g)?;
    let value = lat.interpolate(&u, &r.x);
    let gauge = if residuals && matches!(c.variant, Variant::H1 | Variant::H2 | Variant::H3) {
        Some(gauge_residual(c.variant, &r.fs.without_scalar(), &Gauge::CappedCubic { amplitude: 1.0, width: 3.0 }, &lat, r.md)?.relative)
    } else {
        None
    };
    let free_tol = if c.dim <= 2 { Some(free_lattice_tolerance(&r.probe, &r.x, c.t, r.md, &lat)?) } else { None };
    let report = OracleReport {
        variant: c.variant,
        sites: lat.size(),
        spacing: lat.spacing(),
        spectral_floor: floor,
        floor_minus_shift: floor - op.shift(),
        hermiticity_defect: op.hermiticity_defect(),
        norm: op.norm()?,
        gauge_residual: gauge,
        value_re: value.re,
        value_im: value.im,
        free_lattice_tolerance: free_tol,
    };
    if let Some(path) = &out.csv {
        let mut cols: Vec<String> = (1..=c.dim).map(|i| format!("x{i}")).collect();
        cols.extend(["g_re", "g_im", "u_re", "u_im"].map(String::from));
        let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
        let mut table = Table::new(&refs);
        for (i, (gi, ui)) in g.iter().zip(&u).enumerate() {
            let mut row = lat.site(i)[..c.dim].to_vec();
            row.extend([gi.re, gi.im, ui.re, ui.im]);
            table.push(row);
        }
        table.write_to(Some(path), "oracle", c)?;
    }
    write_json(&Artifact { command: "oracle", seed: c.seed, config: c, result: report }, out.json.as_deref())
}

#[derive(Serialize)]
struct CompareResult {
    verdict: Verdict,
    report: EstimateReport,
}

/// Monte Carlo estimate against the lattice oracle; FAIL is an error with exit code 1.
pub fn compare(r: &Resolved, out: &Outputs) -> CliResult<()> {
    let c = &r.config;
    let lat = r.lattice()?;
    let mut report = run_estimate(r)?;
    let lat_value: Complex64 = lattice_oracle(c.variant, &r.fs, &r.probe, &r.x, c.t, r.md, &lat)?;
    let tol = match c.lattice.tolerance {
        Some(t) => t,
        None => free_lattice_tolerance(&r.probe, &r.x, c.t, r.md, &lat)?,
    };
    let verdict = compare_with_oracle(&mut report, lat_value, tol);
    write_json(&Artifact { command: "compare", seed: c.seed, config: c, result: CompareResult { verdict, report } }, out.json.as_deref())?;
    if verdict.pass {
        Ok(())
    } else {
        Err(CliError::Fail(format!("|mean - oracle| = {:.3e} exceeds {:.3e}", verdict.difference, verdict.bound)))
    }
}

#[derive(Serialize)]
struct VerifyResult {
    suites: Vec<verify::SuiteReport>,
    pass: bool,
}

/// Runs suites, printing one line per check; any FAIL is an error with exit code 1.
pub fn verify_cmd(r: &Resolved, out: &Outputs, suites: &[String]) -> CliResult<()> {
    let mut reports = Vec::new();
    for name in suites {
        let rep = verify::run_suite(name, r.config.seed)?;
        for check in &rep.checks {
            println!("{}", check.line());
        }
        println!("{}", rep.runtime_line());
        reports.push(rep);
    }
    let pass = reports.iter().all(|s| s.pass());
    let failed: Vec<String> = reports.iter().flat_map(|s| s.checks.iter().filter(|c| !c.pass).map(|c| c.id.clone())).collect();
    if out.json.is_some() {
        write_json(&Artifact { command: "verify", seed: r.config.seed, config: &r.config, result: VerifyResult { suites: reports, pass } }, out.json.as_deref())?;
    }
    if pass {
        Ok(())
    } else {
        Err(CliError::Fail(format!("failing checks: {}", failed.join(", "))))
    }
}
