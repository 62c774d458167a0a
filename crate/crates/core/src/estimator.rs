//! Monte Carlo evaluation of `(exp(-t [H_j + V - m]) g)(x)`.
//!
//! Paths are sampled from the origin and shifted by `x`.  Work is split into chunks
//! of `chunk` paths; chunk `c` draws from stream `c` of the seed and the chunk sums
//! are combined in index order, so a report does not depend on the worker count.

use crate::actions::{action_s3, jump_action, sliced_action, ActionValue, CompensatorQuadrature};
use crate::error::{invalid, Result};
use crate::fields::FieldSpec;
use crate::lattice::{semigroup_value, Lattice, Prescription, Variant};
use crate::paths::{sample_levy_jumps, sample_subordinated, subordinated_skeleton_into, uniform_grid, JumpLaw, RngStream};
use crate::specfun::{relativistic_symbol, MassDim};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Initial data `g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbeFunction {
    /// `exp(-|x - c|^2 / (2 w^2))`.
    Gaussian { center: Vec<f64>, width: f64 },
    /// `exp(1 - 1 / (1 - |x - c|^2 / r^2))` inside the ball, zero outside.
    Bump { center: Vec<f64>, radius: f64 },
    /// `exp(i xi . x)` times the Gaussian window of `width` around `center`, if any.
    WindowedPlaneWave { xi: Vec<f64>, center: Vec<f64>, width: Option<f64> },
}

impl ProbeFunction {
    pub fn gaussian(center: Vec<f64>, width: f64) -> Self {
        ProbeFunction::Gaussian { center, width }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let ok = |v: &[f64]| v.len() == dim && v.iter().all(|c| c.is_finite());
        match self {
            ProbeFunction::Gaussian { center, width } => {
                if !ok(center) || !(width.is_finite() && *width > 0.0) {
                    return Err(invalid(format!("gaussian probe needs a {dim}-dimensional center and positive width")));
                }
            }
            ProbeFunction::Bump { center, radius } => {
                if !ok(center) || !(radius.is_finite() && *radius > 0.0) {
                    return Err(invalid(format!("bump probe needs a {dim}-dimensional center and positive radius")));
                }
            }
            ProbeFunction::WindowedPlaneWave { xi, center, width } => {
                if !ok(xi) || !ok(center) || width.is_some_and(|w| !(w.is_finite() && w > 0.0)) {
                    return Err(invalid(format!("plane-wave probe needs {dim}-dimensional xi and center and a positive width")));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let r2 = |c: &[f64]| x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        match self {
            ProbeFunction::Gaussian { center, width } => Complex64::new((-r2(center) / (2.0 * width * width)).exp(), 0.0),
            ProbeFunction::Bump { center, radius } => {
                let s = r2(center) / (radius * radius);
                Complex64::new(if s < 1.0 { (1.0 - 1.0 / (1.0 - s)).exp() } else { 0.0 }, 0.0)
            }
            ProbeFunction::WindowedPlaneWave { xi, center, width } => {
                let ph: f64 = xi.iter().zip(x).map(|(k, v)| k * v).sum();
                let amp = width.map_or(1.0, |w| (-r2(center) / (2.0 * w * w)).exp());
                Complex64::from_polar(amp, ph)
            }
        }
    }

    /// Every probe in the registry peaks at modulus one.
    pub fn sup_norm(&self) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    /// `X(t) = B(T(t))`.
    Subordinated,
    /// Compound Poisson jumps above the cutoff plus a Gaussian surrogate below it.
    Jump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionForm {
    Sliced,
    Jump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McParams {
    pub n_paths: usize,
    pub n_slices: usize,
    /// Slices of the control column; a multiple of `n_slices`, or 0 for none.
    pub control_slices: usize,
    pub eps_cut: f64,
    /// Brownian steps per path for the subordinated action.
    pub brownian_substeps: usize,
    pub sampler: Sampler,
    pub form: ActionForm,
    pub chunk: usize,
}

impl Default for McParams {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            n_slices: 64,
            control_slices: 128,
            eps_cut: 0.1,
            brownian_substeps: 512,
            sampler: Sampler::Subordinated,
            form: ActionForm::Sliced,
            chunk: 4096,
        }
    }
}

impl McParams {
    pub fn validate(&self, variant: Variant) -> Result<()> {
        if self.n_paths < 2 || self.n_slices == 0 || self.chunk == 0 || self.brownian_substeps == 0 {
            return Err(invalid("need n_paths >= 2 and positive n_slices, chunk and brownian_substeps"));
        }
        if self.control_slices != 0 && self.control_slices % self.n_slices != 0 {
            return Err(invalid(format!("control_slices {} is not a multiple of n_slices {}", self.control_slices, self.n_slices)));
        }
        if !(self.eps_cut > 0.0 && self.eps_cut < 1.0) {
            return Err(invalid(format!("eps_cut must lie in (0, 1), got {}", self.eps_cut)));
        }
        if self.form == ActionForm::Jump && self.sampler != Sampler::Jump {
            return Err(invalid("the jump-form action needs the jump sampler"));
        }
        if variant == Variant::H3 && (self.sampler != Sampler::Subordinated || self.form != ActionForm::Sliced) {
            return Err(invalid("variant h3 runs on the subordinated sampler only"));
        }
        if !matches!(variant, Variant::H1 | Variant::H2 | Variant::H3) {
            return Err(invalid(format!("no path integral for variant {variant:?}")));
        }
        Ok(())
    }
}

/// Running sums of a complex sample.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    re: f64,
    im: f64,
    re2: f64,
    im2: f64,
}

impl Moments {
    fn push(&mut self, z: Complex64) {
        self.n += 1;
        self.re += z.re;
        self.im += z.im;
        self.re2 += z.re * z.re;
        self.im2 += z.im * z.im;
    }

    fn merge(&mut self, o: &Moments) {
        self.n += o.n;
        self.re += o.re;
        self.im += o.im;
        self.re2 += o.re2;
        self.im2 += o.im2;
    }

    fn summary(&self) -> Summary {
        let n = self.n as f64;
        let (mr, mi) = (self.re / n, self.im / n);
        let var = |s2: f64, m: f64| ((s2 - n * m * m) / (n - 1.0)).max(0.0);
        Summary {
            mean_re: mr,
            mean_im: mi,
            stderr_re: (var(self.re2, mr) / n).sqrt(),
            stderr_im: (var(self.im2, mi) / n).sqrt(),
        }
    }
}

/// Complex sample mean with componentwise standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean_re: f64,
    pub mean_im: f64,
    pub stderr_re: f64,
    pub stderr_im: f64,
}

impl Summary {
    pub fn mean(&self) -> Complex64 {
        Complex64::new(self.mean_re, self.mean_im)
    }

    /// `sqrt(stderr_re^2 + stderr_im^2)`.
    pub fn stderr(&self) -> f64 {
        self.stderr_re.hypot(self.stderr_im)
    }
}

/// Second estimate from the same run: finer slicing, the Ito form, or half the cutoff.
#[derive(Debug, Clone, Serialize)]
pub struct ControlColumn {
    pub label: String,
    pub value: Summary,
    /// `|mean - control mean|`.
    pub difference: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EstimateDiagnostics {
    pub mean_potential: f64,
    pub mean_phase: f64,
    pub mean_abs_phase: f64,
    pub mean_jump_count: f64,
    pub mean_pv_drift: f64,
    pub mean_compensator: f64,
    /// Mean of `Stratonovich - Ito - 1/2 int div A` (subordinated action only).
    pub mean_ito_gap_defect: f64,
    pub max_weight: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct DiagSums {
    potential: f64,
    phase: f64,
    abs_phase: f64,
    jumps: f64,
    pv: f64,
    comp: f64,
    gap: f64,
    max_weight: f64,
}

impl DiagSums {
    fn push(&mut self, a: &ActionValue, jumps: usize) {
        self.potential += a.real_part;
        self.phase += a.imag_part;
        self.abs_phase += a.imag_part.abs();
        self.jumps += jumps as f64;
        self.pv += a.diagnostics.pv_drift;
        self.comp += a.diagnostics.compensator;
        self.gap += a.ito_stratonovich_gap() - a.diagnostics.half_divergence;
        self.max_weight = self.max_weight.max((-a.real_part).exp());
    }

    fn merge(&mut self, o: &DiagSums) {
        self.potential += o.potential;
        self.phase += o.phase;
        self.abs_phase += o.abs_phase;
        self.jumps += o.jumps;
        self.pv += o.pv;
        self.comp += o.comp;
        self.gap += o.gap;
        self.max_weight = self.max_weight.max(o.max_weight);
    }

    fn finish(&self, n: usize) -> EstimateDiagnostics {
        let n = n as f64;
        EstimateDiagnostics {
            mean_potential: self.potential / n,
            mean_phase: self.phase / n,
            mean_abs_phase: self.abs_phase / n,
            mean_jump_count: self.jumps / n,
            mean_pv_drift: self.pv / n,
            mean_compensator: self.comp / n,
            mean_ito_gap_defect: self.gap / n,
            max_weight: self.max_weight,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub oracle_re: f64,
    pub oracle_im: f64,
    pub difference: f64,
    pub stderr: f64,
    pub lat_tol: f64,
    /// `3 stderr + lat_tol`.
    pub bound: f64,
    /// `difference / stderr`.
    pub z_score: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub variant: Variant,
    pub x: Vec<f64>,
    pub t: f64,
    pub mass: f64,
    pub dim: usize,
    pub seed: u64,
    pub n_paths: usize,
    pub params: McParams,
    pub value: Summary,
    pub control: Option<ControlColumn>,
    pub diagnostics: EstimateDiagnostics,
    pub oracle: Option<Verdict>,
}

impl EstimateReport {
    pub fn mean(&self) -> Complex64 {
        self.value.mean()
    }

    pub fn stderr(&self) -> f64 {
        self.value.stderr()
    }
}

/// Everything one chunk accumulates.
#[derive(Default)]
struct ChunkSums {
    main: Moments,
    control: Moments,
    diag: DiagSums,
}

impl ChunkSums {
    fn merge(&mut self, o: &ChunkSums) {
        self.main.merge(&o.main);
        self.control.merge(&o.control);
        self.diag.merge(&o.diag);
    }
}

struct Problem<'a> {
    variant: Variant,
    fs: &'a FieldSpec,
    g: &'a ProbeFunction,
    x: &'a [f64],
    t: f64,
    md: MassDim,
    params: &'a McParams,
}

fn shift(values: &mut [f64], x: &[f64]) {
    let d = x.len();
    for (i, v) in values.iter_mut().enumerate() {
        *v += x[i % d];
    }
}

fn prescription(variant: Variant) -> Prescription {
    if variant == Variant::H2 {
        Prescription::LineAverage
    } else {
        Prescription::Midpoint
    }
}

/// Runs `f(stream_rng, count)` over chunks in parallel and merges in chunk order.
fn run_chunks<F>(seed: u64, stream_offset: u64, n_paths: usize, chunk: usize, f: F) -> Result<ChunkSums>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng, usize) -> Result<ChunkSums> + Sync,
{
    let n_chunks = n_paths.div_ceil(chunk);
    let parts: Vec<Result<ChunkSums>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let count = chunk.min(n_paths - c * chunk);
            let mut rng = RngStream::new(seed, stream_offset + c as u64).rng();
            f(&mut rng, count)
        })
        .collect();
    let mut total = ChunkSums::default();
    for p in parts {
        total.merge(&p?);
    }
    Ok(total)
}

fn run_sliced(p: &Problem, seed: u64) -> Result<ChunkSums> {
    let params = p.params;
    let d = p.md.dim;
    let fine = if params.control_slices > 0 { params.control_slices } else { params.n_slices };
    let stride = fine / params.n_slices;
    let grid = uniform_grid(p.t, fine);
    let coarse_grid: Vec<f64> = grid.iter().step_by(stride).copied().collect();
    let pres = prescription(p.variant);
    let law = match params.sampler {
        Sampler::Jump => Some(JumpLaw::new(p.md, params.eps_cut)?),
        Sampler::Subordinated => None,
    };
    let origin = vec![0.0; d];
    run_chunks(seed, 0, params.n_paths, params.chunk, |rng, count| {
        let mut sums = ChunkSums::default();
        let mut skel = Vec::with_capacity((fine + 1) * d);
        let mut coarse = Vec::with_capacity((params.n_slices + 1) * d);
        for _ in 0..count {
            let jumps = match &law {
                None => {
                    subordinated_skeleton_into(&origin, &grid, p.md.mass, rng, &mut skel);
                    0
                }
                Some(law) => {
                    let path = sample_levy_jumps(&origin, p.t, law, fine, rng)?;
                    skel = path.skeleton;
                    path.jump_times.len()
                }
            };
            shift(&mut skel, p.x);
            coarse.clear();
            for k in (0..=fine).step_by(stride) {
                coarse.extend_from_slice(&skel[k * d..(k + 1) * d]);
            }
            let gx = p.g.eval(&skel[fine * d..]);
            let a = sliced_action(pres, p.fs, &coarse_grid, &coarse);
            sums.main.push(a.weight() * gx);
            sums.diag.push(&a, jumps);
            if params.control_slices > 0 {
                let b = sliced_action(pres, p.fs, &grid, &skel);
                sums.control.push(b.weight() * gx);
            }
        }
        Ok(sums)
    })
}

fn run_jump_form(p: &Problem, seed: u64, eps: f64, stream_offset: u64) -> Result<ChunkSums> {
    let params = p.params;
    let d = p.md.dim;
    let law = JumpLaw::new(p.md, eps)?;
    let quad = CompensatorQuadrature::new(p.md, eps)?;
    let pres = prescription(p.variant);
    let origin = vec![0.0; d];
    run_chunks(seed, stream_offset, params.n_paths, params.chunk, |rng, count| {
        let mut sums = ChunkSums::default();
        for _ in 0..count {
            let mut path = sample_levy_jumps(&origin, p.t, &law, params.n_slices, rng)?;
            shift(&mut path.skeleton, p.x);
            let gx = p.g.eval(path.end());
            let a = jump_action(pres, &path, p.fs, &quad)?;
            sums.main.push(a.weight() * gx);
            sums.diag.push(&a, path.jump_count());
        }
        Ok(sums)
    })
}

fn run_subordinated(p: &Problem, seed: u64) -> Result<ChunkSums> {
    let params = p.params;
    let grid = uniform_grid(p.t, params.n_slices);
    let origin = vec![0.0; p.md.dim];
    run_chunks(seed, 0, params.n_paths, params.chunk, |rng, count| {
        let mut sums = ChunkSums::default();
        for _ in 0..count {
            let mut sp = sample_subordinated(&origin, &grid, p.md.mass, params.brownian_substeps, rng)?;
            shift(&mut sp.brownian.values, p.x);
            shift(&mut sp.path.skeleton, p.x);
            let gx = p.g.eval(sp.path.end());
            let a = action_s3(&sp, p.fs)?;
            sums.main.push(a.weight() * gx);
            sums.diag.push(&a, 0);
            let ito = a.diagnostics.ito_phase + a.diagnostics.half_divergence;
            sums.control.push(Complex64::from_polar((-a.real_part).exp(), -ito) * gx);
        }
        Ok(sums)
    })
}

/// Monte Carlo estimate of `(exp(-t [H_j + V - m]) g)(x)`.
#[allow(clippy::too_many_arguments)]
pub fn estimate(
    variant: Variant,
    fs: &FieldSpec,
    g: &ProbeFunction,
    x: &[f64],
    t: f64,
    md: MassDim,
    params: &McParams,
    seed: u64,
) -> Result<EstimateReport> {
    params.validate(variant)?;
    fs.validate()?;
    g.validate(md.dim)?;
    if fs.dim != md.dim || x.len() != md.dim {
        return Err(invalid(format!("field, start point and mass dimensions disagree ({}, {}, {})", fs.dim, x.len(), md.dim)));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid(format!("time must be positive, got {t}")));
    }
    let p = Problem { variant, fs, g, x, t, md, params };
    let (sums, control) = match (variant, params.form) {
        (Variant::H3, _) => {
            let s = run_subordinated(&p, seed)?;
            let c = s.control.summary();
            (s, Some(("ito_form".to_string(), c)))
        }
        (_, ActionForm::Sliced) => {
            let s = run_sliced(&p, seed)?;
            let c = (params.control_slices > 0).then(|| (format!("slices_{}", params.control_slices), s.control.summary()));
            (s, c)
        }
        (_, ActionForm::Jump) => {
            let s = run_jump_form(&p, seed, params.eps_cut, 0)?;
            let half = run_jump_form(&p, seed, 0.5 * params.eps_cut, 1 << 40)?;
            (s, Some((format!("eps_cut_{}", 0.5 * params.eps_cut), half.main.summary())))
        }
    };
    let value = sums.main.summary();
    let control = control.map(|(label, c)| ControlColumn { label, difference: (value.mean() - c.mean()).norm(), value: c });
    Ok(EstimateReport {
        variant,
        x: x.to_vec(),
        t,
        mass: md.mass,
        dim: md.dim,
        seed,
        n_paths: params.n_paths,
        params: params.clone(),
        value,
        control,
        diagnostics: sums.diag.finish(sums.main.n),
        oracle: None,
    })
}

/// PASS iff `|mean - lat_value| <= 3 stderr + lat_tol`.  The verdict is also stored in the report.
pub fn compare_with_oracle(report: &mut EstimateReport, lat_value: Complex64, lat_tol: f64) -> Verdict {
    let difference = (report.mean() - lat_value).norm();
    let stderr = report.stderr();
    let bound = 3.0 * stderr + lat_tol;
    let v = Verdict {
        pass: difference <= bound,
        oracle_re: lat_value.re,
        oracle_im: lat_value.im,
        difference,
        stderr,
        lat_tol,
        bound,
        z_score: if stderr > 0.0 { difference / stderr } else { f64::INFINITY },
    };
    report.oracle = Some(v);
    v
}

/// Lattice value of `(exp(-t [H_j + V - m]) g)(x)`.
pub fn lattice_oracle(variant: Variant, fs: &FieldSpec, g: &ProbeFunction, x: &[f64], t: f64, md: MassDim, lat: &Lattice) -> Result<Complex64> {
    g.validate(md.dim)?;
    semigroup_value(variant, fs, |y| g.eval(y), x, t, lat, md)
}

/// `2 |lattice - continuum|` for the free semigroup on the same probe and point.
pub fn free_lattice_tolerance(g: &ProbeFunction, x: &[f64], t: f64, md: MassDim, lat: &Lattice) -> Result<f64> {
    g.validate(md.dim)?;
    Ok(2.0 * crate::lattice::free_periodization_error(|y| g.eval(y), x, t, lat, md)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharfnRow {
    pub xi: f64,
    pub empirical_re: f64,
    pub empirical_im: f64,
    pub exact: f64,
    pub stderr: f64,
    /// `|empirical - exact| / stderr`, zero when both vanish.
    pub z_score: f64,
}

/// Empirical `E exp(i xi X_1(t))` against `exp(-t [sqrt(xi^2 + m^2) - m])`.
///
/// `eps_cut` selects the jump sampler; `None` the subordinated one.  The endpoint draws
/// are shared across the `xi` grid.
pub fn charfn_suite(eps_cut: Option<f64>, md: MassDim, t: f64, xi_grid: &[f64], n_paths: usize, seed: u64) -> Result<Vec<CharfnRow>> {
    if n_paths < 2 || !(t.is_finite() && t > 0.0) {
        return Err(invalid("characteristic-function suite needs n_paths >= 2 and t > 0"));
    }
    let law = eps_cut.map(|e| JumpLaw::new(md, e)).transpose()?;
    let d = md.dim;
    let chunk = 4096;
    let n_chunks = n_paths.div_ceil(chunk);
    let parts: Vec<Vec<Moments>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let count = chunk.min(n_paths - c * chunk);
            let mut rng = RngStream::new(seed, c as u64).rng();
            let mut m = vec![Moments::default(); xi_grid.len()];
            let mut out = vec![0.0; d];
            for _ in 0..count {
                match &law {
                    Some(law) => law.sample_increment(t, &mut rng, &mut out),
                    None => {
                        let s = crate::paths::first_passage_time(t, md.mass, &mut rng).sqrt();
                        for o in out.iter_mut() {
                            *o = s * rng.sample::<f64, _>(rand_distr::StandardNormal);
                        }
                    }
                }
                for (mk, &xi) in m.iter_mut().zip(xi_grid) {
                    mk.push(Complex64::from_polar(1.0, xi * out[0]));
                }
            }
            m
        })
        .collect();
    let mut total = vec![Moments::default(); xi_grid.len()];
    for part in &parts {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    Ok(xi_grid
        .iter()
        .zip(&total)
        .map(|(&xi, m)| {
            let s = m.summary();
            let exact = (-t * relativistic_symbol(xi.abs(), md.mass)).exp();
            let diff = (s.mean() - Complex64::new(exact, 0.0)).norm();
            let se = s.stderr();
            CharfnRow {
                xi,
                empirical_re: s.mean_re,
                empirical_im: s.mean_im,
                exact,
                stderr: se,
                z_score: if se > 0.0 { diff / se } else if diff == 0.0 { 0.0 } else { f64::INFINITY },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{ScalarPotential, VectorPotential};
    use crate::lattice::free_convolution;

    fn md(m: f64, d: usize) -> MassDim {
        MassDim::new(m, d).unwrap()
    }

    fn small(n: usize) -> McParams {
        McParams { n_paths: n, n_slices: 16, control_slices: 32, brownian_substeps: 64, chunk: 512, ..Default::default() }
    }

    #[test]
    fn probe_values() {
        let g = ProbeFunction::gaussian(vec![1.0], 0.5);
        assert!((g.eval(&[1.5]).re - (-0.5f64).exp()).abs() < 1e-15);
        let b = ProbeFunction::Bump { center: vec![0.0, 0.0], radius: 2.0 };
        assert_eq!(b.eval(&[0.0, 0.0]).re, 1.0);
        assert_eq!(b.eval(&[2.0, 0.1]).re, 0.0);
        let w = ProbeFunction::WindowedPlaneWave { xi: vec![2.0], center: vec![0.0], width: None };
        assert!((w.eval(&[0.25]) - Complex64::from_polar(1.0, 0.5)).norm() < 1e-15);
        assert!(ProbeFunction::gaussian(vec![0.0], -1.0).validate(1).is_err());
    }

    #[test]
    fn free_estimate_matches_convolution() {
        let m = md(1.0, 1);
        let fs = FieldSpec::zero(1).unwrap();
        let g = ProbeFunction::gaussian(vec![0.5], 0.8);
        let exact = free_convolution(|y| g.eval(y), &[0.0], 0.5, m).unwrap();
        for v in [Variant::H1, Variant::H2, Variant::H3] {
            let r = estimate(v, &fs, &g, &[0.0], 0.5, m, &small(20_000), 11).unwrap();
            assert!((r.mean() - exact).norm() < 4.0 * r.stderr() + 1e-3, "{v:?}: {} vs {exact}", r.mean());
            assert!(r.mean().norm() <= 1.0 + 3.0 * r.stderr());
        }
    }

    #[test]
    fn reports_are_reproducible_across_thread_counts() {
        let fs = FieldSpec::tanh(1).unwrap();
        let g = ProbeFunction::gaussian(vec![0.0], 1.0);
        let p = small(3000);
        let a = estimate(Variant::H1, &fs, &g, &[0.1], 0.5, md(1.0, 1), &p, 3).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| estimate(Variant::H1, &fs, &g, &[0.1], 0.5, md(1.0, 1), &p, 3).unwrap());
        assert_eq!(a.value, b.value);
        assert_eq!(a.control.unwrap().value, b.control.unwrap().value);
    }

    #[test]
    fn linear_potential_gives_identical_weyl_and_line_estimates() {
        let fs = FieldSpec::new(
            2,
            VectorPotential::Linear { matrix: vec![vec![0.0, -0.3], vec![0.3, 0.0]] },
            ScalarPotential::Zero,
            crate::fields::Gauge::Zero,
        )
        .unwrap();
        let g = ProbeFunction::gaussian(vec![0.0, 0.0], 1.0);
        let a = estimate(Variant::H1, &fs, &g, &[0.2, 0.0], 0.5, md(1.0, 2), &small(2000), 5).unwrap();
        let b = estimate(Variant::H2, &fs, &g, &[0.2, 0.0], 0.5, md(1.0, 2), &small(2000), 5).unwrap();
        assert!((a.mean() - b.mean()).norm() < 1e-12);
    }

    #[test]
    fn jump_form_reports_cutoff_control() {
        let fs = FieldSpec::tanh(1).unwrap();
        let g = ProbeFunction::gaussian(vec![0.0], 1.0);
        let p = McParams { sampler: Sampler::Jump, form: ActionForm::Jump, n_slices: 8, eps_cut: 0.2, ..small(500) };
        let r = estimate(Variant::H1, &fs, &g, &[0.0], 0.3, md(1.0, 1), &p, 9).unwrap();
        let c = r.control.unwrap();
        assert_eq!(c.label, "eps_cut_0.1");
        assert!(r.diagnostics.mean_jump_count > 0.0);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let fs = FieldSpec::zero(1).unwrap();
        let g = ProbeFunction::gaussian(vec![0.0], 1.0);
        let bad = McParams { control_slices: 24, ..small(100) };
        assert!(estimate(Variant::H1, &fs, &g, &[0.0], 1.0, md(1.0, 1), &bad, 0).is_err());
        let bad = McParams { form: ActionForm::Jump, ..small(100) };
        assert!(estimate(Variant::H1, &fs, &g, &[0.0], 1.0, md(1.0, 1), &bad, 0).is_err());
        assert!(estimate(Variant::H0, &fs, &g, &[0.0], 1.0, md(1.0, 1), &small(100), 0).is_err());
        assert!(estimate(Variant::H1, &fs, &g, &[0.0], 0.0, md(1.0, 1), &small(100), 0).is_err());
    }

    #[test]
    fn verdict_bound() {
        let fs = FieldSpec::zero(1).unwrap();
        let g = ProbeFunction::gaussian(vec![0.0], 1.0);
        let mut r = estimate(Variant::H1, &fs, &g, &[0.0], 0.5, md(1.0, 1), &small(1000), 1).unwrap();
        let mean = r.mean();
        let v = compare_with_oracle(&mut r, mean + Complex64::new(0.01, 0.0), 0.02);
        assert!(v.pass && (v.difference - 0.01).abs() < 1e-15);
        let v = compare_with_oracle(&mut r, mean + Complex64::new(1.0, 0.0), 0.0);
        assert!(!v.pass);
    }

    #[test]
    fn charfn_at_zero_is_one() {
        let rows = charfn_suite(None, md(1.0, 1), 1.0, &[0.0, 3f64.sqrt()], 4000, 2).unwrap();
        assert_eq!(rows[0].empirical_re, 1.0);
        assert_eq!(rows[0].z_score, 0.0);
        assert!((rows[1].exact - (-1.0f64).exp()).abs() < 1e-15);
        assert!(rows[1].z_score < 4.0);
    }
}
