//! Action functionals along sampled paths.
//!
//! Every action is `S = i * phase + potential` and enters the path integral as
//! `exp(-S)`.  The phase of a chord from `x` to `y` is `A((x + y)/2) . (y - x)` for
//! the Weyl quantization and `int_x^y A . dl` for the line-average one, so that a
//! constant `A = a` contributes `a . (X(t) - X(0))`.

use crate::error::{invalid, Error, Result};
use crate::fields::FieldSpec;
use crate::lattice::Prescription;
use crate::paths::{CadlagPath, PathEvent, SubordinatedPath};
use crate::quad::GaussLegendre;
use crate::specfun::{levy_density, MassDim};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Per-term breakdown of an action.  Phase terms are the coefficients of `i`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ActionDiagnostics {
    /// Sum of chord phases over jumps with `|y| >= 1`.
    pub jump_sum_large: f64,
    /// Sum of chord phases over jumps with `eps < |y| < 1`.
    pub jump_sum_compensated: f64,
    /// `int ds int_{eps < |y| < 1} phase(X(s), y) n(dy)`.
    pub compensator: f64,
    /// `int ds pv int_{|y| < 1} [phase(X(s), y) - A(X(s)) . y] n(dy)`.
    pub pv_drift: f64,
    /// Gaussian small-jump chords minus their mean `1/2 sigma^2 div A ds`.
    pub small_jumps: f64,
    /// Sliced chord sum, or the Stratonovich sum for the subordinated action.
    pub diffusion_phase: f64,
    /// Ito sum `sum A(B_k) . dB_k` (subordinated action only).
    pub ito_phase: f64,
    /// `1/2 int_0^{T(t)} div A(B(s)) ds` (subordinated action only).
    pub half_divergence: f64,
    pub potential: f64,
    pub cutoff: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ActionValue {
    pub real_part: f64,
    pub imag_part: f64,
    pub diagnostics: ActionDiagnostics,
}

impl ActionValue {
    /// `exp(-S)`.
    pub fn weight(&self) -> Complex64 {
        Complex64::from_polar((-self.real_part).exp(), -self.imag_part)
    }

    /// Stratonovich minus Ito, to be compared with `half_divergence`.
    pub fn ito_stratonovich_gap(&self) -> f64 {
        self.diagnostics.diffusion_phase - self.diagnostics.ito_phase
    }
}

/// Sliced action on a skeleton `X(t_0), ..., X(t_n)` flattened with stride `dim`:
/// `i sum_j phase(X_{j-1}, X_j) + sum_j V((X_{j-1} + X_j)/2) (t_j - t_{j-1})`.
pub fn sliced_action(pres: Prescription, fs: &FieldSpec, times: &[f64], skeleton: &[f64]) -> ActionValue {
    let d = fs.dim;
    let mut phase = 0.0;
    let mut potential = 0.0;
    for j in 1..times.len() {
        let a = &skeleton[(j - 1) * d..j * d];
        let b = &skeleton[j * d..(j + 1) * d];
        phase += pres.phase(fs, a, b);
        potential += fs.scalar_midpoint(a, b) * (times[j] - times[j - 1]);
    }
    ActionValue {
        real_part: potential,
        imag_part: phase,
        diagnostics: ActionDiagnostics { diffusion_phase: phase, potential, ..Default::default() },
    }
}

fn check_path(path: &CadlagPath, fs: &FieldSpec) -> Result<()> {
    if path.dim != fs.dim {
        return Err(invalid(format!("path dimension {} does not match field dimension {}", path.dim, fs.dim)));
    }
    if path.times.len() < 2 {
        return Err(invalid("path skeleton needs at least one interval"));
    }
    Ok(())
}

/// Weyl sliced action on the path skeleton.
pub fn action_s1_sliced(path: &CadlagPath, fs: &FieldSpec) -> Result<ActionValue> {
    check_path(path, fs)?;
    Ok(sliced_action(Prescription::Midpoint, fs, &path.times, &path.skeleton))
}

/// Line-average sliced action on the path skeleton.
pub fn action_s2_sliced(path: &CadlagPath, fs: &FieldSpec) -> Result<ActionValue> {
    check_path(path, fs)?;
    Ok(sliced_action(Prescription::LineAverage, fs, &path.times, &path.skeleton))
}

/// Two consecutive shells below this size end the principal-value sum.
pub const PV_CAUCHY_TOL: f64 = 1e-8;
const MAX_SHELLS: usize = 64;
const RADIAL_NODES: usize = 8;

/// Radial and angular nodes for integrals of even-symmetrized chord phases
/// against the Levy measure.
///
/// Integrals run over dyadic shells `(2^{-k-1}, 2^{-k}]` of the unit ball, with the
/// pair `y, -y` evaluated together so the odd part `A(x) . y` cancels exactly.
#[derive(Debug, Clone)]
pub struct CompensatorQuadrature {
    pub md: MassDim,
    pub cutoff: f64,
    /// Per-axis variance rate of the jumps below the cutoff.
    pub small_variance: f64,
    /// Per shell: `(r, w * n(r) * r^{d-1})`.
    shells: Vec<Vec<(f64, f64)>>,
    /// Shells of `(cutoff, 1)`, the last one truncated at the cutoff.
    outer: Vec<Vec<(f64, f64)>>,
    /// Unit vectors on a half sphere with weights summing to half the sphere area.
    directions: Vec<([f64; 3], f64)>,
}

impl CompensatorQuadrature {
    pub fn new(md: MassDim, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff < 1.0) {
            return Err(invalid(format!("jump cutoff must lie in (0, 1), got {cutoff}")));
        }
        if md.dim > 3 {
            return Err(invalid("compensator quadrature supports d <= 3"));
        }
        let gl = GaussLegendre::new(RADIAL_NODES);
        let shell = |lo: f64, hi: f64| -> Result<Vec<(f64, f64)>> {
            gl.mapped(lo, hi)
                .map(|(r, wi)| Ok((r, wi * levy_density(r, md)? * r.powi(md.dim as i32 - 1))))
                .collect()
        };
        let shells = (0..MAX_SHELLS)
            .map(|k| shell(0.5f64.powi(k as i32 + 1), 0.5f64.powi(k as i32)))
            .collect::<Result<Vec<_>>>()?;
        let mut outer = Vec::new();
        let mut hi = 1.0;
        while hi > cutoff {
            let lo = (0.5 * hi).max(cutoff);
            outer.push(shell(lo, hi)?);
            hi = lo;
        }
        let small_variance = crate::paths::JumpLaw::small_variance_rate(md, cutoff)?;
        Ok(Self { md, cutoff, small_variance, shells, outer, directions: half_sphere(md.dim) })
    }

    /// `sum over directions of phase(x, r w) + phase(x, -r w)`, integrated over one shell.
    fn shell_value(&self, pres: Prescription, fs: &FieldSpec, x: &[f64], shell: &[(f64, f64)]) -> f64 {
        let d = self.md.dim;
        let mut p = [0.0; 3];
        let mut q = [0.0; 3];
        let mut s = 0.0;
        for &(r, wr) in shell {
            let mut ang = 0.0;
            for (dir, wa) in &self.directions {
                for a in 0..d {
                    p[a] = x[a] + r * dir[a];
                    q[a] = x[a] - r * dir[a];
                }
                ang += wa * (pres.phase(fs, x, &p[..d]) + pres.phase(fs, x, &q[..d]));
            }
            s += wr * ang;
        }
        s
    }

    /// `pv int_{|y| < 1} [phase(x, y) - A(x) . y] n(dy)`.
    pub fn pv_drift(&self, pres: Prescription, fs: &FieldSpec, x: &[f64]) -> Result<f64> {
        let mut sum = 0.0;
        let mut settled = 0;
        for shell in &self.shells {
            let v = self.shell_value(pres, fs, x, shell);
            sum += v;
            settled = if v.abs() < PV_CAUCHY_TOL { settled + 1 } else { 0 };
            if settled == 2 {
                return Ok(sum);
            }
        }
        Err(Error::Quadrature(format!("principal-value drift at {x:?} did not settle within {MAX_SHELLS} shells")))
    }

    /// `int_{cutoff < |y| < 1} phase(x, y) n(dy)`.
    pub fn compensator(&self, pres: Prescription, fs: &FieldSpec, x: &[f64]) -> f64 {
        self.outer.iter().map(|shell| self.shell_value(pres, fs, x, shell)).sum()
    }
}

fn half_sphere(d: usize) -> Vec<([f64; 3], f64)> {
    match d {
        1 => vec![([1.0, 0.0, 0.0], 1.0)],
        2 => {
            GaussLegendre::new(24).mapped(0.0, PI).map(|(t, w)| ([t.cos(), t.sin(), 0.0], w)).collect()
        }
        _ => {
            let nphi = 24;
            let mut out = Vec::with_capacity(12 * nphi);
            for (c, w) in GaussLegendre::new(12).mapped(0.0, 1.0) {
                let s = (1.0 - c * c).sqrt();
                for k in 0..nphi {
                    let ph = 2.0 * PI * k as f64 / nphi as f64;
                    out.push(([s * ph.cos(), s * ph.sin(), c], w * 2.0 * PI / nphi as f64));
                }
            }
            out
        }
    }
}

/// Jump-measure form of the action on a path from the jump sampler.
///
/// Jumps with `|y| >= 1` enter raw, jumps in `(eps, 1)` minus their compensator, and
/// the Gaussian increments standing in for jumps below `eps` minus their mean
/// `1/2 sigma^2 div A dt`.  Time integrals are exact for the piecewise-constant path.
pub fn jump_action(pres: Prescription, path: &CadlagPath, fs: &FieldSpec, quad: &CompensatorQuadrature) -> Result<ActionValue> {
    check_path(path, fs)?;
    let cutoff = path.cutoff.ok_or_else(|| invalid("jump-form action needs a path from the jump sampler"))?;
    if (cutoff - quad.cutoff).abs() > 1e-15 * cutoff {
        return Err(invalid(format!("path cutoff {cutoff} differs from quadrature cutoff {}", quad.cutoff)));
    }
    if quad.md.dim != fs.dim {
        return Err(invalid("quadrature dimension does not match the field"));
    }
    let d = fs.dim;
    let sigma2 = quad.small_variance;
    let mut x = path.start().to_vec();
    let mut next = vec![0.0; d];
    let mut last = path.times[0];
    let mut diag = ActionDiagnostics { cutoff: Some(cutoff), ..Default::default() };

    let hold = |x: &[f64], dt: f64, diag: &mut ActionDiagnostics| -> Result<()> {
        if dt > 0.0 {
            diag.potential += fs.scalar_at(x) * dt;
            diag.compensator += quad.compensator(pres, fs, x) * dt;
            diag.pv_drift += quad.pv_drift(pres, fs, x)? * dt;
        }
        Ok(())
    };

    for ev in path.events() {
        let t = ev.time();
        hold(&x, t - last, &mut diag)?;
        let step = match ev {
            PathEvent::Jump { index, .. } => path.jump(index),
            PathEvent::Diffusion { index, .. } => path.diffusion_step(index),
        };
        for a in 0..d {
            next[a] = x[a] + step[a];
        }
        let ph = pres.phase(fs, &x, &next);
        match ev {
            PathEvent::Jump { .. } => {
                let r = step.iter().map(|v| v * v).sum::<f64>().sqrt();
                if r >= 1.0 {
                    diag.jump_sum_large += ph;
                } else {
                    diag.jump_sum_compensated += ph;
                }
            }
            PathEvent::Diffusion { index, .. } => {
                let dt = path.times[index] - path.times[index - 1];
                diag.small_jumps += ph - 0.5 * sigma2 * fs.divergence(&x) * dt;
            }
        }
        std::mem::swap(&mut x, &mut next);
        last = t;
    }
    hold(&x, path.horizon() - last, &mut diag)?;

    let imag = diag.jump_sum_large + diag.jump_sum_compensated - diag.compensator + diag.small_jumps + diag.pv_drift;
    Ok(ActionValue { real_part: diag.potential, imag_part: imag, diagnostics: diag })
}

pub fn action_s1_jump(path: &CadlagPath, fs: &FieldSpec, quad: &CompensatorQuadrature) -> Result<ActionValue> {
    jump_action(Prescription::Midpoint, path, fs, quad)
}

pub fn action_s2_jump(path: &CadlagPath, fs: &FieldSpec, quad: &CompensatorQuadrature) -> Result<ActionValue> {
    jump_action(Prescription::LineAverage, path, fs, quad)
}

/// Subordinated action: Stratonovich sum of `A` along the fine Brownian path up to
/// `T(t)` plus the trapezoid rule for `int_0^t V(B(T(s))) ds` on the outer grid.
/// The Ito sum and `1/2 int div A` are recorded alongside.
pub fn action_s3(path: &SubordinatedPath, fs: &FieldSpec) -> Result<ActionValue> {
    let b = &path.brownian;
    if b.dim != fs.dim {
        return Err(invalid("Brownian path dimension does not match the field"));
    }
    let d = fs.dim;
    let mut diag = ActionDiagnostics::default();
    let mut inc = [0.0; 3];
    for k in 1..b.len() {
        let p = b.point(k - 1);
        let q = b.point(k);
        diag.diffusion_phase += fs.midpoint_phase(p, q);
        for a in 0..d {
            inc[a] = q[a] - p[a];
        }
        diag.ito_phase += fs.vector_dot(p, &inc[..d]);
        diag.half_divergence += 0.5 * fs.divergence(p) * (b.times[k] - b.times[k - 1]);
    }
    let outer = &path.path;
    for k in 1..outer.times.len() {
        let dt = outer.times[k] - outer.times[k - 1];
        diag.potential += 0.5 * (fs.scalar_at(outer.point(k - 1)) + fs.scalar_at(outer.point(k))) * dt;
    }
    Ok(ActionValue { real_part: diag.potential, imag_part: diag.diffusion_phase, diagnostics: diag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Gauge, ScalarPotential, VectorPotential};
    use crate::paths::{sample_levy_jumps, sample_subordinated, uniform_grid, JumpLaw, RngStream};
    use crate::quad::{integrate, QuadOptions};

    fn md(m: f64, d: usize) -> MassDim {
        MassDim::new(m, d).unwrap()
    }

    fn subordinated(seed: u64, d: usize, n: usize) -> SubordinatedPath {
        let mut rng = RngStream::new(seed, 0).rng();
        sample_subordinated(&vec![0.3; d], &uniform_grid(0.5, n), 1.0, 256, &mut rng).unwrap()
    }

    #[test]
    fn zero_field_gives_riemann_sum_of_potential() {
        let fs = FieldSpec::zero(1).unwrap().with_scalar(ScalarPotential::HarmonicCapped { coeff: 1.0, cap: 10.0 }).unwrap();
        let p = subordinated(1, 1, 16).path;
        let s = action_s1_sliced(&p, &fs).unwrap();
        assert_eq!(s.imag_part, 0.0);
        let mut riemann = 0.0;
        for j in 1..=16 {
            let mid = 0.5 * (p.point(j - 1)[0] + p.point(j)[0]);
            riemann += (mid * mid).min(10.0) * (p.times[j] - p.times[j - 1]);
        }
        assert!((s.real_part - riemann).abs() < 1e-14);
        assert!(s.weight().norm() <= 1.0);
    }

    #[test]
    fn constant_potential_telescopes() {
        let a = [0.7, -1.3];
        let fs = FieldSpec::constant(a.to_vec()).unwrap();
        let p = subordinated(2, 2, 64).path;
        let expected: f64 = (0..2).map(|i| a[i] * (p.end()[i] - p.start()[i])).sum();
        for s in [action_s1_sliced(&p, &fs).unwrap(), action_s2_sliced(&p, &fs).unwrap()] {
            assert!((s.imag_part - expected).abs() < 1e-12, "{} vs {expected}", s.imag_part);
        }
    }

    #[test]
    fn quadratic_potential_separates_the_prescriptions_by_cubed_chords() {
        let fs = FieldSpec::quadratic(1).unwrap();
        let p = subordinated(3, 1, 32).path;
        let s1 = action_s1_sliced(&p, &fs).unwrap();
        let s2 = action_s2_sliced(&p, &fs).unwrap();
        let gap: f64 = (1..=32).map(|j| (p.point(j)[0] - p.point(j - 1)[0]).powi(3) / 12.0).sum();
        assert!(gap.abs() > 0.0);
        assert!((s2.imag_part - s1.imag_part - gap).abs() < 1e-12);
    }

    #[test]
    fn line_average_action_shifts_by_gauge_difference() {
        let fs = FieldSpec::tanh(1).unwrap();
        let phi = Gauge::CappedCubic { amplitude: 0.5, width: 2.0 };
        let shifted = fs.gauge_shift(&phi).unwrap();
        let p = subordinated(4, 1, 64).path;
        let a = action_s2_sliced(&p, &fs).unwrap().imag_part;
        let b = action_s2_sliced(&p, &shifted).unwrap().imag_part;
        let expected = phi.phi(p.end()) - phi.phi(p.start());
        assert!((b - a - expected).abs() < 1e-12);
        let c = action_s1_sliced(&p, &shifted).unwrap().imag_part - action_s1_sliced(&p, &fs).unwrap().imag_part;
        assert!((c - expected).abs() > 1e-8);
    }

    #[test]
    fn pv_drift_matches_adaptive_quadrature() {
        let m = md(1.0, 1);
        let fs = FieldSpec::tanh(1).unwrap();
        let q = CompensatorQuadrature::new(m, 0.1).unwrap();
        for x in [-1.0, 0.0, 0.4, 2.0] {
            let got = q.pv_drift(Prescription::Midpoint, &fs, &[x]).unwrap();
            let f = |r: f64| r * ((x + 0.5 * r).tanh() - (x - 0.5 * r).tanh()) * levy_density(r, m).unwrap();
            let want = integrate(f, 0.0, 1.0, &QuadOptions::with_tol(1e-13, 1e-12)).unwrap().value;
            assert!((got - want).abs() < 1e-7, "x={x}: {got} vs {want}");
            let comp = q.compensator(Prescription::Midpoint, &fs, &[x]);
            let want = integrate(f, 0.1, 1.0, &QuadOptions::with_tol(1e-13, 1e-12)).unwrap().value;
            assert!((comp - want).abs() < 1e-10, "x={x}: {comp} vs {want}");
        }
    }

    #[test]
    fn pv_drift_in_two_dimensions_matches_polar_quadrature() {
        let m = md(1.0, 2);
        let fs = FieldSpec::tanh(2).unwrap();
        let q = CompensatorQuadrature::new(m, 0.2).unwrap();
        let x = [0.3, -0.6];
        let got = q.pv_drift(Prescription::LineAverage, &fs, &x).unwrap();
        // trapezoid over the full circle, adaptive in r
        let ring = |r: f64| -> f64 {
            let k = 256;
            (0..k)
                .map(|j| {
                    let th = 2.0 * PI * j as f64 / k as f64;
                    let y = [r * th.cos(), r * th.sin()];
                    fs.exact_line_integral(&x, &[x[0] + y[0], x[1] + y[1]]) - fs.vector_dot(&x, &y)
                })
                .sum::<f64>()
                * (2.0 * PI / k as f64)
        };
        let want = integrate(|r| r * levy_density(r, m).unwrap() * ring(r), 0.0, 1.0, &QuadOptions::with_tol(1e-12, 1e-10))
            .unwrap()
            .value;
        assert!((got - want).abs() < 1e-7, "{got} vs {want}");
    }

    #[test]
    fn jump_form_telescopes_for_constant_potential() {
        let m = md(1.0, 1);
        let law = JumpLaw::new(m, 0.1).unwrap();
        let q = CompensatorQuadrature::new(m, 0.1).unwrap();
        let fs = FieldSpec::constant(vec![0.8]).unwrap();
        let mut rng = RngStream::new(5, 0).rng();
        for _ in 0..20 {
            let p = sample_levy_jumps(&[0.0], 1.0, &law, 32, &mut rng).unwrap();
            let s = action_s1_jump(&p, &fs, &q).unwrap();
            assert!(s.diagnostics.pv_drift.abs() < 1e-12 && s.diagnostics.compensator.abs() < 1e-12);
            assert!((s.imag_part - 0.8 * p.end()[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn jump_form_reduces_to_potential_integral() {
        let m = md(0.0, 2);
        let law = JumpLaw::new(m, 0.2).unwrap();
        let q = CompensatorQuadrature::new(m, 0.2).unwrap();
        let fs = FieldSpec::zero(2).unwrap().with_scalar(ScalarPotential::Constant { value: 0.7 }).unwrap();
        let mut rng = RngStream::new(6, 0).rng();
        let p = sample_levy_jumps(&[0.0, 0.0], 0.5, &law, 8, &mut rng).unwrap();
        let s = action_s2_jump(&p, &fs, &q).unwrap();
        assert_eq!(s.imag_part, 0.0);
        assert!((s.real_part - 0.35).abs() < 1e-14);
    }

    #[test]
    fn stratonovich_sum_is_exact_for_quadratic_gauge() {
        let fs = FieldSpec::new(1, VectorPotential::Zero, ScalarPotential::Zero, Gauge::Quadratic { coeff: 0.6 }).unwrap();
        let sp = subordinated(7, 1, 8);
        let s = action_s3(&sp, &fs).unwrap();
        let b = &sp.brownian;
        let expected = 0.3 * (b.point(b.len() - 1)[0].powi(2) - b.point(0)[0].powi(2));
        assert!((s.imag_part - expected).abs() < 1e-12);
        assert!((s.ito_stratonovich_gap() - s.diagnostics.half_divergence).abs() < 0.2 * s.diagnostics.half_divergence.abs().max(1e-3));
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let p = subordinated(8, 2, 4).path;
        assert!(action_s1_sliced(&p, &FieldSpec::tanh(1).unwrap()).is_err());
    }
}
