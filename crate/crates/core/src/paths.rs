//! Path samplers for the relativistic Levy process `X(t)` with exponent
//! `sqrt(|xi|^2 + m^2) - m`.
//!
//! Two constructions are provided.  The subordinated one runs a Brownian motion at
//! the random clock `T(t) = inf{s : B1(s) + m s = t}`, whose increments are inverse
//! Gaussian (`t^2 / Z^2` when `m = 0`).  The jump one draws a compound Poisson process
//! of jumps with `|y| > eps` and replaces the small jumps by a Brownian motion with
//! matching covariance.

use crate::error::{invalid, Error, Result};
use crate::quad::{adaptive_gauss_legendre, integrate_to_infinity, GaussLegendre, QuadOptions};
use crate::specfun::{levy_density, sphere_area, MassDim};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rand::SeedableRng;
use serde::Serialize;

/// Independent random stream `stream` derived from a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream);
        r
    }
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Brownian motion sampled on a grid, values flattened with stride `dim`.
#[derive(Debug, Clone, Serialize)]
pub struct BrownianPath {
    pub dim: usize,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl BrownianPath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }
}

/// Brownian motion from `x0` with unit covariance per axis on `steps` steps of `dt`.
pub fn sample_brownian<R: Rng + ?Sized>(x0: &[f64], dt: f64, steps: usize, rng: &mut R) -> Result<BrownianPath> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    let d = x0.len();
    let mut values = Vec::with_capacity((steps + 1) * d);
    values.extend_from_slice(x0);
    let s = dt.sqrt();
    for k in 0..steps {
        for a in 0..d {
            let prev = values[k * d + a];
            values.push(prev + s * normal(rng));
        }
    }
    Ok(BrownianPath { dim: d, times: (0..=steps).map(|k| k as f64 * dt).collect(), values })
}

/// First passage time of `B(s) + m s` to `level > 0`.
///
/// Inverse Gaussian with mean `level / m` and shape `level^2`, sampled by the
/// Michael-Schucany-Haas transform with the root written without cancellation.
pub fn first_passage_time<R: Rng + ?Sized>(level: f64, m: f64, rng: &mut R) -> f64 {
    loop {
        let z: f64 = normal(rng);
        let y = z * z;
        if y == 0.0 {
            continue;
        }
        if m == 0.0 {
            return level * level / y;
        }
        let mu = level / m;
        let lambda = level * level;
        let muy = mu * y;
        let s = (4.0 * mu * lambda * y + muy * muy).sqrt();
        let x1 = 4.0 * mu * mu * lambda * y / ((s + muy) * (s + muy));
        let u: f64 = rng.gen();
        return if u * (mu + x1) <= mu { x1 } else { mu * mu / x1 };
    }
}

/// Values of `T` on a time grid starting at 0.
#[derive(Debug, Clone, Serialize)]
pub struct SubordinatorPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.len() < 2 || t_grid[0] != 0.0 {
        return Err(invalid("time grid must start at 0 and have at least two points"));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
        return Err(invalid("time grid must be strictly increasing and finite"));
    }
    Ok(())
}

/// Uniform grid `0, t/n, ..., t`.
pub fn uniform_grid(t: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| t * k as f64 / n as f64).collect()
}

pub fn sample_subordinator<R: Rng + ?Sized>(t_grid: &[f64], m: f64, rng: &mut R) -> Result<SubordinatorPath> {
    check_grid(t_grid)?;
    if !(m.is_finite() && m >= 0.0) {
        return Err(invalid(format!("mass must be non-negative, got {m}")));
    }
    let mut values = Vec::with_capacity(t_grid.len());
    values.push(0.0);
    for w in t_grid.windows(2) {
        let last = *values.last().expect("non-empty");
        values.push(last + first_passage_time(w[1] - w[0], m, rng));
    }
    Ok(SubordinatorPath { times: t_grid.to_vec(), values })
}

/// A right-continuous path with a grid skeleton and an explicit event record.
///
/// Between events the path is constant.  Events are Gaussian increments applied at
/// the grid times (jump sampler only) and the sampled jumps at their own times.
#[derive(Debug, Clone, Serialize)]
pub struct CadlagPath {
    pub dim: usize,
    pub times: Vec<f64>,
    /// `X(t_k)` flattened with stride `dim`.
    pub skeleton: Vec<f64>,
    /// Gaussian increment applied at `t_k`, `k >= 1`, flattened; empty if none.
    pub diffusion: Vec<f64>,
    pub jump_times: Vec<f64>,
    /// Jump sizes flattened with stride `dim`.
    pub jump_sizes: Vec<f64>,
    pub cutoff: Option<f64>,
}

/// One event of a [`CadlagPath`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathEvent {
    Diffusion { time: f64, index: usize },
    Jump { time: f64, index: usize },
}

impl PathEvent {
    pub fn time(&self) -> f64 {
        match self {
            PathEvent::Diffusion { time, .. } | PathEvent::Jump { time, .. } => *time,
        }
    }
}

impl CadlagPath {
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.skeleton[k * self.dim..(k + 1) * self.dim]
    }

    pub fn start(&self) -> &[f64] {
        self.point(0)
    }

    pub fn end(&self) -> &[f64] {
        self.point(self.steps())
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("non-empty grid")
    }

    pub fn jump_count(&self) -> usize {
        self.jump_times.len()
    }

    pub fn jump(&self, j: usize) -> &[f64] {
        &self.jump_sizes[j * self.dim..(j + 1) * self.dim]
    }

    pub fn diffusion_step(&self, k: usize) -> &[f64] {
        &self.diffusion[(k - 1) * self.dim..k * self.dim]
    }

    /// Skeleton restricted to every `stride`-th grid point.
    pub fn coarse_skeleton(&self, stride: usize) -> Result<Vec<f64>> {
        if stride == 0 || self.steps() % stride != 0 {
            return Err(invalid(format!("stride {stride} does not divide {} steps", self.steps())));
        }
        let mut out = Vec::with_capacity((self.steps() / stride + 1) * self.dim);
        for k in (0..=self.steps()).step_by(stride) {
            out.extend_from_slice(self.point(k));
        }
        Ok(out)
    }

    /// Events in time order; jumps precede a diffusion step at the same time.
    pub fn events(&self) -> Vec<PathEvent> {
        let mut ev: Vec<PathEvent> = Vec::with_capacity(self.steps() + self.jump_count());
        if !self.diffusion.is_empty() {
            ev.extend((1..=self.steps()).map(|k| PathEvent::Diffusion { time: self.times[k], index: k }));
        }
        ev.extend(self.jump_times.iter().enumerate().map(|(j, &time)| PathEvent::Jump { time, index: j }));
        ev.sort_by(|a, b| {
            a.time().total_cmp(&b.time()).then_with(|| match (a, b) {
                (PathEvent::Jump { .. }, PathEvent::Diffusion { .. }) => std::cmp::Ordering::Less,
                (PathEvent::Diffusion { .. }, PathEvent::Jump { .. }) => std::cmp::Ordering::Greater,
                _ => std::cmp::Ordering::Equal,
            })
        });
        ev
    }
}

/// Skeleton `x0 + B(T(t_k))` of a subordinated path, written into `out`.
pub fn subordinated_skeleton_into<R: Rng + ?Sized>(x0: &[f64], t_grid: &[f64], m: f64, rng: &mut R, out: &mut Vec<f64>) {
    let d = x0.len();
    out.clear();
    out.extend_from_slice(x0);
    for k in 1..t_grid.len() {
        let dt = first_passage_time(t_grid[k] - t_grid[k - 1], m, rng).sqrt();
        for a in 0..d {
            let prev = out[(k - 1) * d + a];
            out.push(prev + dt * normal(rng));
        }
    }
}

/// Subordinated path with the underlying Brownian motion resolved on a fine grid.
#[derive(Debug, Clone, Serialize)]
pub struct SubordinatedPath {
    pub subordinator: SubordinatorPath,
    pub brownian: BrownianPath,
    /// Index into `brownian` of `T(t_k)` for each outer grid point.
    pub outer_index: Vec<usize>,
    pub path: CadlagPath,
}

/// `X(t) = x0 + B(T(t))` on `t_grid`; each outer interval is split into at least
/// `ceil(dT / (T(t_end) / substeps))` Brownian steps.
pub fn sample_subordinated<R: Rng + ?Sized>(x0: &[f64], t_grid: &[f64], m: f64, substeps: usize, rng: &mut R) -> Result<SubordinatedPath> {
    let sub = sample_subordinator(t_grid, m, rng)?;
    let d = x0.len();
    let total = *sub.values.last().expect("non-empty");
    let db = total / substeps.max(1) as f64;
    let mut times = vec![0.0];
    let mut values = x0.to_vec();
    let mut outer_index = vec![0];
    for k in 1..sub.values.len() {
        let (s0, s1) = (sub.values[k - 1], sub.values[k]);
        let pieces = ((s1 - s0) / db).ceil().max(1.0) as usize;
        let h = (s1 - s0) / pieces as f64;
        let sq = h.sqrt();
        for p in 1..=pieces {
            let base = values.len() - d;
            for a in 0..d {
                let prev = values[base + a];
                values.push(prev + sq * normal(rng));
            }
            times.push(if p == pieces { s1 } else { s0 + p as f64 * h });
        }
        outer_index.push(times.len() - 1);
    }
    let mut skeleton = Vec::with_capacity(outer_index.len() * d);
    for &i in &outer_index {
        skeleton.extend_from_slice(&values[i * d..(i + 1) * d]);
    }
    let path = CadlagPath {
        dim: d,
        times: t_grid.to_vec(),
        skeleton,
        diffusion: Vec::new(),
        jump_times: Vec::new(),
        jump_sizes: Vec::new(),
        cutoff: None,
    };
    Ok(SubordinatedPath { subordinator: sub, brownian: BrownianPath { dim: d, times, values }, outer_index, path })
}

const TABLE_KNOTS: usize = 2048;

/// Levy measure restricted to `|y| > eps`, tabulated for sampling, plus the
/// per-axis variance rate of the jumps with `|y| < eps`.
#[derive(Debug, Clone, Serialize)]
pub struct JumpLaw {
    pub md: MassDim,
    pub cutoff: f64,
    /// `Lambda_eps = n({|y| > eps})`.
    pub rate: f64,
    /// `(1/d) int_{|y| < eps} |y|^2 n(dy)`.
    pub small_variance: f64,
    pub r_max: f64,
    #[serde(skip)]
    knots: Vec<f64>,
    #[serde(skip)]
    cumulative: Vec<f64>,
    #[serde(skip)]
    exponents: Vec<f64>,
    tail_mass: f64,
    tail_exponent: f64,
}

impl JumpLaw {
    pub fn new(md: MassDim, cutoff: f64) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(invalid(format!("jump cutoff must be positive, got {cutoff}")));
        }
        let sphere = sphere_area(md.dim);
        let radial = |r: f64| sphere * r.powi(md.dim as i32 - 1) * levy_density(r, md).unwrap_or(0.0);
        let r_max = if md.mass > 0.0 { 60.0 / md.mass } else { 1e3 }.max(100.0 * cutoff).min(1e8);
        let ratio = (r_max / cutoff).ln() / (TABLE_KNOTS - 1) as f64;
        let knots: Vec<f64> = (0..TABLE_KNOTS).map(|k| cutoff * (ratio * k as f64).exp()).collect();
        let g8 = GaussLegendre::new(8);
        let g16 = GaussLegendre::new(16);
        let mut cumulative = Vec::with_capacity(TABLE_KNOTS);
        cumulative.push(0.0);
        let mut worst: f64 = 0.0;
        for w in knots.windows(2) {
            let a = g16.integrate(radial, w[0], w[1]);
            let b = g8.integrate(radial, w[0], w[1]);
            worst = worst.max((a - b).abs() / a.abs().max(f64::MIN_POSITIVE));
            let last = *cumulative.last().expect("non-empty");
            cumulative.push(last + a);
        }
        if worst > 1e-10 {
            return Err(Error::Quadrature(format!("jump-rate quadrature disagreement {worst:.2e}")));
        }
        let exponents: Vec<f64> = knots
            .windows(2)
            .map(|w| (radial(w[1]) / radial(w[0])).ln() / (w[1] / w[0]).ln())
            .collect();
        let tail_mass = integrate_to_infinity(radial, r_max, &QuadOptions::with_tol(1e-300, 1e-10))?.value;
        let tail_exponent = exponents.last().copied().unwrap_or(-2.0).min(-1.5);
        let rate = cumulative.last().expect("non-empty") + tail_mass;
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::Quadrature(format!("jump rate is not finite: {rate}")));
        }
        let small_variance = Self::small_variance_rate(md, cutoff)?;
        Ok(Self {
            md,
            cutoff,
            rate,
            small_variance,
            r_max,
            knots,
            cumulative,
            exponents,
            tail_mass,
            tail_exponent,
        })
    }

    /// `(1/d) int_{|y| < eps} |y|^2 n(dy)`, the per-axis variance rate of the small jumps.
    pub fn small_variance_rate(md: MassDim, cutoff: f64) -> Result<f64> {
        let sphere = sphere_area(md.dim);
        let f = |r: f64| sphere * r.powi(md.dim as i32 + 1) * levy_density(r, md).unwrap_or(0.0);
        Ok(adaptive_gauss_legendre(f, 0.0, cutoff, 16, 1e-13)? / md.dim as f64)
    }

    /// Largest error of the interpolated radial CDF at interval midpoints, relative to the rate.
    pub fn tabulation_error(&self) -> f64 {
        let sphere = sphere_area(self.md.dim);
        let radial = |r: f64| sphere * r.powi(self.md.dim as i32 - 1) * levy_density(r, self.md).unwrap_or(0.0);
        let g = GaussLegendre::new(16);
        let mut worst: f64 = 0.0;
        for k in (0..self.knots.len() - 1).step_by(7) {
            let (a, b) = (self.knots[k], self.knots[k + 1]);
            let mid = (a * b).sqrt();
            let exact = g.integrate(radial, a, mid);
            let interp = self.partial_mass(k, mid);
            worst = worst.max((exact - interp).abs() / self.rate);
        }
        worst
    }

    /// Mass on `[knot_k, r]` under the power-law interpolant.
    fn partial_mass(&self, k: usize, r: f64) -> f64 {
        let (a, b) = (self.knots[k], self.knots[k + 1]);
        let mass = self.cumulative[k + 1] - self.cumulative[k];
        let q = self.exponents[k] + 1.0;
        let frac = if q.abs() < 1e-12 { (r / a).ln() / (b / a).ln() } else { ((r / a).powf(q) - 1.0) / ((b / a).powf(q) - 1.0) };
        mass * frac
    }

    pub fn sample_radius<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen::<f64>() * self.rate;
        let table_mass = *self.cumulative.last().expect("non-empty");
        if u >= table_mass {
            let v: f64 = rng.gen();
            return self.r_max * (1.0 - v).powf(1.0 / (self.tail_exponent + 1.0));
        }
        let k = self.cumulative.partition_point(|&c| c <= u).saturating_sub(1).min(self.knots.len() - 2);
        let (a, b) = (self.knots[k], self.knots[k + 1]);
        let frac = ((u - self.cumulative[k]) / (self.cumulative[k + 1] - self.cumulative[k])).clamp(0.0, 1.0);
        let q = self.exponents[k] + 1.0;
        let r = if q.abs() < 1e-12 {
            a * (b / a).powf(frac)
        } else {
            a * (1.0 + frac * ((b / a).powf(q) - 1.0)).powf(1.0 / q)
        };
        r.clamp(a, b)
    }

    /// Uniform direction on the unit sphere, written into `out`.
    pub fn sample_direction<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        if out.len() == 1 {
            out[0] = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            return;
        }
        loop {
            let mut n2 = 0.0;
            for o in out.iter_mut() {
                *o = normal(rng);
                n2 += *o * *o;
            }
            if n2 > 1e-24 {
                let s = n2.sqrt().recip();
                out.iter_mut().for_each(|o| *o *= s);
                return;
            }
        }
    }

    pub fn sample_jump<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let r = self.sample_radius(rng);
        self.sample_direction(rng, out);
        out.iter_mut().for_each(|o| *o *= r);
    }

    /// Endpoint `X(t) - X(0)` only.
    pub fn sample_increment<R: Rng + ?Sized>(&self, t: f64, rng: &mut R, out: &mut [f64]) {
        let sd = (self.small_variance * t).sqrt();
        for o in out.iter_mut() {
            *o = sd * normal(rng);
        }
        let n = self.poisson(self.rate * t, rng);
        let mut y = [0.0; 3];
        for _ in 0..n {
            self.sample_jump(rng, &mut y[..out.len()]);
            for (o, yi) in out.iter_mut().zip(&y) {
                *o += yi;
            }
        }
    }

    fn poisson<R: Rng + ?Sized>(&self, mean: f64, rng: &mut R) -> u64 {
        if mean <= 0.0 {
            return 0;
        }
        Poisson::new(mean).map(|p| p.sample(rng) as u64).unwrap_or(0)
    }
}

/// Jump path on `steps` grid intervals of `[0, t]`: Gaussian small-jump increments at
/// the grid times and compound Poisson jumps with `|y| > eps` at uniform times.
pub fn sample_levy_jumps<R: Rng + ?Sized>(x0: &[f64], t: f64, law: &JumpLaw, steps: usize, rng: &mut R) -> Result<CadlagPath> {
    let d = x0.len();
    if d != law.md.dim {
        return Err(invalid("start point and jump law dimensions differ"));
    }
    if !(t.is_finite() && t > 0.0) || steps == 0 {
        return Err(invalid("jump path needs t > 0 and at least one step"));
    }
    let times = uniform_grid(t, steps);
    let sd = (law.small_variance * t / steps as f64).sqrt();
    let diffusion: Vec<f64> = (0..steps * d).map(|_| sd * normal(rng)).collect();
    let n = law.poisson(law.rate * t, rng) as usize;
    let mut jump_times: Vec<f64> = (0..n).map(|_| t * rng.gen::<f64>()).collect();
    jump_times.sort_by(f64::total_cmp);
    let mut jump_sizes = vec![0.0; n * d];
    for j in 0..n {
        law.sample_jump(rng, &mut jump_sizes[j * d..(j + 1) * d]);
    }
    let mut skeleton = Vec::with_capacity((steps + 1) * d);
    skeleton.extend_from_slice(x0);
    let mut x = x0.to_vec();
    let mut j = 0;
    for k in 1..=steps {
        while j < n && jump_times[j] <= times[k] {
            for a in 0..d {
                x[a] += jump_sizes[j * d + a];
            }
            j += 1;
        }
        for a in 0..d {
            x[a] += diffusion[(k - 1) * d + a];
        }
        skeleton.extend_from_slice(&x);
    }
    Ok(CadlagPath { dim: d, times, skeleton, diffusion, jump_times, jump_sizes, cutoff: Some(law.cutoff) })
}

/// Number of jumps with time in `(t_lo, t_hi]` and size in the open annulus `r_in < |y| < r_out`.
pub fn counting_measure(path: &CadlagPath, t_lo: f64, t_hi: f64, r_in: f64, r_out: f64) -> usize {
    if !(r_in < r_out) || !(t_lo < t_hi) {
        return 0;
    }
    (0..path.jump_count())
        .filter(|&j| {
            let s = path.jump_times[j];
            let r = path.jump(j).iter().map(|v| v * v).sum::<f64>().sqrt();
            s > t_lo && s <= t_hi && r > r_in && r < r_out
        })
        .count()
}

/// `n({r_in < |y| < r_out})`.
pub fn levy_mass(md: MassDim, r_in: f64, r_out: f64) -> Result<f64> {
    if !(r_in > 0.0 && r_in < r_out) {
        return Err(invalid("annulus needs 0 < r_in < r_out"));
    }
    let sphere = sphere_area(md.dim);
    crate::quad::integrate(
        |r| sphere * r.powi(md.dim as i32 - 1) * levy_density(r, md).unwrap_or(0.0),
        r_in,
        r_out,
        &QuadOptions::default(),
    )
    .map(|r| r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::subordinator_laplace;

    #[test]
    fn inverse_gaussian_moments() {
        let mut rng = RngStream::new(7, 0).rng();
        let (t, m) = (0.8, 1.5);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| first_passage_time(t, m, &mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let mu = t / m;
        let v = mu.powi(3) / (t * t);
        assert!((mean - mu).abs() < 4.0 * (v / n as f64).sqrt(), "{mean} vs {mu}");
        assert!((var - v).abs() / v < 0.05);
    }

    #[test]
    fn massless_first_passage_laplace() {
        let mut rng = RngStream::new(9, 1).rng();
        let n = 100_000;
        let emp = (0..n).map(|_| (-first_passage_time(1.0, 0.0, &mut rng)).exp()).sum::<f64>() / n as f64;
        let exact = subordinator_laplace(1.0, 1.0, 0.0).unwrap();
        assert!((emp - exact).abs() < 0.005, "{emp} vs {exact}");
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = RngStream::new(1, 3).rng().gen();
        let b: f64 = RngStream::new(1, 3).rng().gen();
        let c: f64 = RngStream::new(1, 4).rng().gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn jump_table_is_accurate() {
        for (m, d) in [(1.0, 1), (0.0, 1), (1.0, 2)] {
            let law = JumpLaw::new(MassDim::new(m, d).unwrap(), 0.05).unwrap();
            assert!(law.tabulation_error() < 1e-9, "m={m} d={d}: {}", law.tabulation_error());
            let direct = levy_mass(law.md, 0.05, 1e3).unwrap();
            assert!((direct - law.rate).abs() / law.rate < 1e-6 || m == 0.0);
        }
    }

    #[test]
    fn massless_jump_rate_closed_form() {
        // n(y) = 1/(pi y^2) in d = 1, so the mass beyond eps is 2/(pi eps)
        let law = JumpLaw::new(MassDim::new(0.0, 1).unwrap(), 0.1).unwrap();
        assert!((law.rate - 2.0 / (std::f64::consts::PI * 0.1)).abs() < 1e-8);
        assert!((law.small_variance - 2.0 * 0.1 / std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn jump_path_is_consistent() {
        let law = JumpLaw::new(MassDim::new(1.0, 2).unwrap(), 0.1).unwrap();
        let mut rng = RngStream::new(3, 0).rng();
        let p = sample_levy_jumps(&[0.5, -0.5], 1.0, &law, 16, &mut rng).unwrap();
        let mut x = [0.5, -0.5];
        for ev in p.events() {
            match ev {
                PathEvent::Jump { index, .. } => x.iter_mut().zip(p.jump(index)).for_each(|(a, b)| *a += b),
                PathEvent::Diffusion { index, .. } => {
                    x.iter_mut().zip(p.diffusion_step(index)).for_each(|(a, b)| *a += b);
                    for (xa, pa) in x.iter().zip(p.point(index)) {
                        assert!((xa - pa).abs() < 1e-12);
                    }
                }
            }
        }
        assert_eq!(counting_measure(&p, 0.0, 1.0, 2.0, 1.0), 0);
        assert_eq!(counting_measure(&p, 0.0, 1.0, 0.0, f64::INFINITY), p.jump_count());
    }

    #[test]
    fn subordinated_path_hits_outer_points() {
        let mut rng = RngStream::new(5, 0).rng();
        let grid = uniform_grid(0.5, 8);
        let sp = sample_subordinated(&[0.0], &grid, 1.0, 64, &mut rng).unwrap();
        for (k, &i) in sp.outer_index.iter().enumerate() {
            assert!((sp.brownian.times[i] - sp.subordinator.values[k]).abs() < 1e-12);
            assert_eq!(sp.brownian.point(i), sp.path.point(k));
        }
        let dt_max = sp.brownian.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        assert!(dt_max <= sp.subordinator.values[8] / 64.0 * (1.0 + 1e-12));
    }
}
