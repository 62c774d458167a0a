//! Vector potentials `A`, scalar potentials `V` and gauge functions `phi`.
//!
//! A [`FieldSpec`] carries a base potential plus an accumulated gauge term, so
//! `A + grad(phi)` is evaluated in closed form and `int A . dl` along a chord is
//! exact for every supported family.

use crate::error::{invalid, Result};
use crate::quad::adaptive_gauss_legendre;
use serde::{Deserialize, Serialize};

/// Tolerance of the Gauss-Legendre doubling used for line averages.
pub const LINE_AVERAGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorPotential {
    Zero,
    /// `A(x) = a`.
    Constant { value: Vec<f64> },
    /// `A(x) = M x`, rows of `M` given.
    Linear { matrix: Vec<Vec<f64>> },
    /// `A_axis(x) = coeff * x_axis^2`, other components zero.
    Quadratic { axis: usize, coeff: f64 },
    /// `A_i(x) = amplitude * tanh(x_i / scale)`.
    Tanh { amplitude: f64, scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarPotential {
    Zero,
    Constant { value: f64 },
    /// `V(x) = min(coeff |x|^2, cap)`.
    HarmonicCapped { coeff: f64, cap: f64 },
    /// `V(x) = -depth exp(-|x|^2 / (2 width^2))`.
    GaussianWell { depth: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Gauge {
    Zero,
    /// `phi(x) = c . x`.
    Linear { coeff: Vec<f64> },
    /// `phi(x) = coeff |x|^2 / 2`.
    Quadratic { coeff: f64 },
    /// `phi(x) = amplitude * sum_i x_i^3 exp(-(x_i / width)^2)`.
    CappedCubic { amplitude: f64, width: f64 },
    Sum { terms: Vec<Gauge> },
}

/// Coarse classification of `A + grad(phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldFamily {
    Zero,
    Constant,
    Linear,
    Polynomial,
    SmoothBounded,
    Mixed,
}

fn ln_cosh(u: f64) -> f64 {
    let a = u.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl VectorPotential {
    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            VectorPotential::Zero => Ok(()),
            VectorPotential::Constant { value } => {
                if value.len() != dim || value.iter().any(|v| !v.is_finite()) {
                    return Err(invalid(format!("constant potential needs {dim} finite components")));
                }
                Ok(())
            }
            VectorPotential::Linear { matrix } => {
                if matrix.len() != dim || matrix.iter().any(|r| r.len() != dim || r.iter().any(|v| !v.is_finite())) {
                    return Err(invalid(format!("linear potential needs a finite {dim}x{dim} matrix")));
                }
                Ok(())
            }
            VectorPotential::Quadratic { axis, coeff } => {
                if *axis >= dim || !coeff.is_finite() {
                    return Err(invalid(format!("quadratic potential needs axis < {dim} and finite coefficient")));
                }
                Ok(())
            }
            VectorPotential::Tanh { amplitude, scale } => {
                if !amplitude.is_finite() || !(scale.is_finite() && *scale > 0.0) {
                    return Err(invalid("tanh potential needs finite amplitude and positive scale"));
                }
                Ok(())
            }
        }
    }

    fn family(&self) -> FieldFamily {
        match self {
            VectorPotential::Zero => FieldFamily::Zero,
            VectorPotential::Constant { .. } => FieldFamily::Constant,
            VectorPotential::Linear { .. } => FieldFamily::Linear,
            VectorPotential::Quadratic { .. } => FieldFamily::Polynomial,
            VectorPotential::Tanh { .. } => FieldFamily::SmoothBounded,
        }
    }

    fn add_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            VectorPotential::Zero => {}
            VectorPotential::Constant { value } => out.iter_mut().zip(value).for_each(|(o, v)| *o += v),
            VectorPotential::Linear { matrix } => {
                for (o, row) in out.iter_mut().zip(matrix) {
                    *o += dot(row, x);
                }
            }
            VectorPotential::Quadratic { axis, coeff } => out[*axis] += coeff * x[*axis] * x[*axis],
            VectorPotential::Tanh { amplitude, scale } => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o += amplitude * (xi / scale).tanh();
                }
            }
        }
    }

    fn dot(&self, x: &[f64], v: &[f64]) -> f64 {
        match self {
            VectorPotential::Zero => 0.0,
            VectorPotential::Constant { value } => dot(value, v),
            VectorPotential::Linear { matrix } => matrix.iter().zip(v).map(|(row, vi)| dot(row, x) * vi).sum(),
            VectorPotential::Quadratic { axis, coeff } => coeff * x[*axis] * x[*axis] * v[*axis],
            VectorPotential::Tanh { amplitude, scale } => {
                x.iter().zip(v).map(|(xi, vi)| amplitude * (xi / scale).tanh() * vi).sum()
            }
        }
    }

    fn line_integral(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            VectorPotential::Zero => 0.0,
            VectorPotential::Constant { value } => value.iter().zip(x.iter().zip(y)).map(|(a, (xi, yi))| a * (yi - xi)).sum(),
            VectorPotential::Linear { matrix } => {
                let mut s = 0.0;
                for (i, row) in matrix.iter().enumerate() {
                    let mid: f64 = row.iter().zip(x.iter().zip(y)).map(|(mij, (xj, yj))| mij * 0.5 * (xj + yj)).sum();
                    s += mid * (y[i] - x[i]);
                }
                s
            }
            VectorPotential::Quadratic { axis, coeff } => {
                let (a, b) = (x[*axis], y[*axis]);
                coeff * (b - a) * (a * a + a * b + b * b) / 3.0
            }
            VectorPotential::Tanh { amplitude, scale } => x
                .iter()
                .zip(y)
                .map(|(xi, yi)| amplitude * scale * (ln_cosh(yi / scale) - ln_cosh(xi / scale)))
                .sum(),
        }
    }

    fn divergence(&self, x: &[f64]) -> f64 {
        match self {
            VectorPotential::Zero | VectorPotential::Constant { .. } => 0.0,
            VectorPotential::Linear { matrix } => (0..matrix.len()).map(|i| matrix[i][i]).sum(),
            VectorPotential::Quadratic { axis, coeff } => 2.0 * coeff * x[*axis],
            VectorPotential::Tanh { amplitude, scale } => x
                .iter()
                .map(|xi| {
                    let c = (xi / scale).cosh();
                    amplitude / (scale * c * c)
                })
                .sum(),
        }
    }
}

impl ScalarPotential {
    fn validate(&self) -> Result<()> {
        let ok = match self {
            ScalarPotential::Zero => true,
            ScalarPotential::Constant { value } => value.is_finite(),
            ScalarPotential::HarmonicCapped { coeff, cap } => coeff.is_finite() && *coeff >= 0.0 && cap.is_finite(),
            ScalarPotential::GaussianWell { depth, width } => depth.is_finite() && width.is_finite() && *width > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("scalar potential {self:?} is not bounded below or has invalid parameters")))
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ScalarPotential::Zero => 0.0,
            ScalarPotential::Constant { value } => *value,
            ScalarPotential::HarmonicCapped { coeff, cap } => (coeff * dot(x, x)).min(*cap),
            ScalarPotential::GaussianWell { depth, width } => -depth * (-dot(x, x) / (2.0 * width * width)).exp(),
        }
    }

    /// A constant `c` with `V >= c` everywhere.
    pub fn lower_bound(&self) -> f64 {
        match self {
            ScalarPotential::Zero => 0.0,
            ScalarPotential::Constant { value } => *value,
            ScalarPotential::HarmonicCapped { cap, .. } => cap.min(0.0),
            ScalarPotential::GaussianWell { depth, .. } => (-depth).min(0.0),
        }
    }
}

fn capped_cubic(u: f64, a: f64, w: f64) -> (f64, f64, f64) {
    let e = (-(u / w) * (u / w)).exp();
    let w2 = w * w;
    let u2 = u * u;
    let g = a * u * u2 * e;
    let g1 = a * e * (3.0 * u2 - 2.0 * u2 * u2 / w2);
    let g2 = a * e * (6.0 * u - 14.0 * u * u2 / w2 + 4.0 * u * u2 * u2 / (w2 * w2));
    (g, g1, g2)
}

impl Gauge {
    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Gauge::Zero => Ok(()),
            Gauge::Linear { coeff } if coeff.len() == dim && coeff.iter().all(|c| c.is_finite()) => Ok(()),
            Gauge::Quadratic { coeff } if coeff.is_finite() => Ok(()),
            Gauge::CappedCubic { amplitude, width } if amplitude.is_finite() && width.is_finite() && *width > 0.0 => Ok(()),
            Gauge::Sum { terms } => terms.iter().try_for_each(|g| g.validate(dim)),
            _ => Err(invalid(format!("invalid gauge function {self:?} in dimension {dim}"))),
        }
    }

    fn family(&self) -> FieldFamily {
        match self {
            Gauge::Zero => FieldFamily::Zero,
            Gauge::Linear { .. } => FieldFamily::Constant,
            Gauge::Quadratic { .. } => FieldFamily::Linear,
            Gauge::CappedCubic { .. } => FieldFamily::SmoothBounded,
            Gauge::Sum { terms } => terms.iter().map(Gauge::family).fold(FieldFamily::Zero, combine_families),
        }
    }

    pub fn phi(&self, x: &[f64]) -> f64 {
        match self {
            Gauge::Zero => 0.0,
            Gauge::Linear { coeff } => dot(coeff, x),
            Gauge::Quadratic { coeff } => 0.5 * coeff * dot(x, x),
            Gauge::CappedCubic { amplitude, width } => x.iter().map(|&u| capped_cubic(u, *amplitude, *width).0).sum(),
            Gauge::Sum { terms } => terms.iter().map(|g| g.phi(x)).sum(),
        }
    }

    fn add_grad_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Gauge::Zero => {}
            Gauge::Linear { coeff } => out.iter_mut().zip(coeff).for_each(|(o, c)| *o += c),
            Gauge::Quadratic { coeff } => out.iter_mut().zip(x).for_each(|(o, xi)| *o += coeff * xi),
            Gauge::CappedCubic { amplitude, width } => {
                for (o, &u) in out.iter_mut().zip(x) {
                    *o += capped_cubic(u, *amplitude, *width).1;
                }
            }
            Gauge::Sum { terms } => terms.iter().for_each(|g| g.add_grad_into(x, out)),
        }
    }

    fn grad_dot(&self, x: &[f64], v: &[f64]) -> f64 {
        match self {
            Gauge::Zero => 0.0,
            Gauge::Linear { coeff } => dot(coeff, v),
            Gauge::Quadratic { coeff } => coeff * dot(x, v),
            Gauge::CappedCubic { amplitude, width } => {
                x.iter().zip(v).map(|(&u, vi)| capped_cubic(u, *amplitude, *width).1 * vi).sum()
            }
            Gauge::Sum { terms } => terms.iter().map(|g| g.grad_dot(x, v)).sum(),
        }
    }

    pub fn laplacian(&self, x: &[f64]) -> f64 {
        match self {
            Gauge::Zero | Gauge::Linear { .. } => 0.0,
            Gauge::Quadratic { coeff } => coeff * x.len() as f64,
            Gauge::CappedCubic { amplitude, width } => x.iter().map(|&u| capped_cubic(u, *amplitude, *width).2).sum(),
            Gauge::Sum { terms } => terms.iter().map(|g| g.laplacian(x)).sum(),
        }
    }

    /// Gradient of `phi` at `x`.
    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.add_grad_into(x, &mut out);
        out
    }
}

fn combine_families(a: FieldFamily, b: FieldFamily) -> FieldFamily {
    use FieldFamily::*;
    match (a, b) {
        (Zero, f) | (f, Zero) => f,
        (SmoothBounded, SmoothBounded) => SmoothBounded,
        (Mixed, _) | (_, Mixed) | (SmoothBounded, _) | (_, SmoothBounded) => Mixed,
        (x, y) => x.max(y),
    }
}

/// Vector potential, scalar potential and accumulated gauge term in dimension `dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub dim: usize,
    pub vector: VectorPotential,
    #[serde(default = "default_scalar")]
    pub scalar: ScalarPotential,
    #[serde(default = "default_gauge")]
    pub gauge: Gauge,
}

fn default_scalar() -> ScalarPotential {
    ScalarPotential::Zero
}

fn default_gauge() -> Gauge {
    Gauge::Zero
}

impl FieldSpec {
    pub fn new(dim: usize, vector: VectorPotential, scalar: ScalarPotential, gauge: Gauge) -> Result<Self> {
        let fs = Self { dim, vector, scalar, gauge };
        fs.validate()?;
        Ok(fs)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(invalid(format!("dimension must be 1, 2 or 3, got {}", self.dim)));
        }
        self.vector.validate(self.dim)?;
        self.scalar.validate()?;
        self.gauge.validate(self.dim)
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, VectorPotential::Zero, ScalarPotential::Zero, Gauge::Zero)
    }

    pub fn constant(value: Vec<f64>) -> Result<Self> {
        Self::new(value.len(), VectorPotential::Constant { value }, ScalarPotential::Zero, Gauge::Zero)
    }

    /// Symmetric gauge `A = b/2 (-x_2, x_1, 0)` of a constant magnetic field.
    pub fn constant_magnetic(dim: usize, b: f64) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("a magnetic field needs dimension at least 2"));
        }
        let mut matrix = vec![vec![0.0; dim]; dim];
        matrix[0][1] = -0.5 * b;
        matrix[1][0] = 0.5 * b;
        Self::new(dim, VectorPotential::Linear { matrix }, ScalarPotential::Zero, Gauge::Zero)
    }

    pub fn tanh(dim: usize) -> Result<Self> {
        Self::new(dim, VectorPotential::Tanh { amplitude: 1.0, scale: 1.0 }, ScalarPotential::Zero, Gauge::Zero)
    }

    /// `A_1(x) = x_1^2`.
    pub fn quadratic(dim: usize) -> Result<Self> {
        Self::new(dim, VectorPotential::Quadratic { axis: 0, coeff: 1.0 }, ScalarPotential::Zero, Gauge::Zero)
    }

    pub fn with_scalar(mut self, scalar: ScalarPotential) -> Result<Self> {
        scalar.validate()?;
        self.scalar = scalar;
        Ok(self)
    }

    /// Same vector potential without the scalar potential.
    pub fn without_scalar(&self) -> Self {
        Self { scalar: ScalarPotential::Zero, ..self.clone() }
    }

    /// The field `A + grad(phi)`.
    pub fn gauge_shift(&self, phi: &Gauge) -> Result<Self> {
        phi.validate(self.dim)?;
        let gauge = match (&self.gauge, phi) {
            (g, Gauge::Zero) => g.clone(),
            (Gauge::Zero, p) => p.clone(),
            (Gauge::Sum { terms }, p) => {
                let mut terms = terms.clone();
                terms.push(p.clone());
                Gauge::Sum { terms }
            }
            (g, p) => Gauge::Sum { terms: vec![g.clone(), p.clone()] },
        };
        Ok(Self { gauge, ..self.clone() })
    }

    pub fn family(&self) -> FieldFamily {
        combine_families(self.vector.family(), self.gauge.family())
    }

    /// True when `A` is affine, so the Weyl and line-average prescriptions agree.
    pub fn is_affine(&self) -> bool {
        matches!(self.family(), FieldFamily::Zero | FieldFamily::Constant | FieldFamily::Linear)
    }

    pub fn vector_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        self.vector.add_into(x, out);
        self.gauge.add_grad_into(x, out);
    }

    pub fn vector_at(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.vector_into(x, &mut out);
        out
    }

    /// `A(x) . v` without allocating.
    pub fn vector_dot(&self, x: &[f64], v: &[f64]) -> f64 {
        self.vector.dot(x, v) + self.gauge.grad_dot(x, v)
    }

    pub fn scalar_at(&self, x: &[f64]) -> f64 {
        self.scalar.eval(x)
    }

    /// `A((x + y) / 2)`.
    pub fn midpoint_eval(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
        self.vector_at(&mid)
    }

    /// `A((x + y) / 2) . (y - x)`, the Weyl phase of the chord from `x` to `y`.
    pub fn midpoint_phase(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut mid = [0.0; 3];
        let mut dv = [0.0; 3];
        for i in 0..self.dim {
            mid[i] = 0.5 * (x[i] + y[i]);
            dv[i] = y[i] - x[i];
        }
        self.vector_dot(&mid[..self.dim], &dv[..self.dim])
    }

    /// `V((x + y) / 2)`.
    pub fn scalar_midpoint(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut mid = [0.0; 3];
        for i in 0..self.dim {
            mid[i] = 0.5 * (x[i] + y[i]);
        }
        self.scalar.eval(&mid[..self.dim])
    }

    /// `int_0^1 A(x + theta (y - x)) d theta`, exact for polynomial families and
    /// by Gauss-Legendre doubling otherwise.
    pub fn line_average(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim;
        match (&self.vector, &self.gauge) {
            (VectorPotential::Zero | VectorPotential::Constant { .. } | VectorPotential::Linear { .. }, Gauge::Zero | Gauge::Linear { .. } | Gauge::Quadratic { .. }) => {
                Ok(self.midpoint_eval(x, y))
            }
            (VectorPotential::Quadratic { axis, coeff }, Gauge::Zero) => {
                let mut out = vec![0.0; d];
                let (a, b) = (x[*axis], y[*axis]);
                out[*axis] = coeff * (a * a + a * b + b * b) / 3.0;
                Ok(out)
            }
            _ => {
                let mut out = vec![0.0; d];
                let mut p = vec![0.0; d];
                let mut a = vec![0.0; d];
                for (i, o) in out.iter_mut().enumerate() {
                    *o = adaptive_gauss_legendre(
                        |theta| {
                            for k in 0..d {
                                p[k] = x[k] + theta * (y[k] - x[k]);
                            }
                            self.vector_into(&p, &mut a);
                            a[i]
                        },
                        0.0,
                        1.0,
                        16,
                        LINE_AVERAGE_TOL,
                    )?;
                }
                Ok(out)
            }
        }
    }

    /// `int A . dl` along the straight segment from `x` to `y`, in closed form.
    pub fn exact_line_integral(&self, x: &[f64], y: &[f64]) -> f64 {
        self.vector.line_integral(x, y) + self.gauge.phi(y) - self.gauge.phi(x)
    }

    /// `div A(x)`.
    pub fn divergence(&self, x: &[f64]) -> f64 {
        self.vector.divergence(x) + self.gauge.laplacian(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cubic() -> Gauge {
        Gauge::CappedCubic { amplitude: 1.0, width: 3.0 }
    }

    #[test]
    fn gauge_shift_adds_gradient() {
        let fs = FieldSpec::tanh(2).unwrap();
        let shifted = fs.gauge_shift(&cubic()).unwrap();
        let x = [0.3, -1.7];
        let d: Vec<f64> = shifted.vector_at(&x).iter().zip(fs.vector_at(&x)).map(|(a, b)| a - b).collect();
        let g = cubic().grad(&x);
        for (a, b) in d.iter().zip(&g) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn capped_cubic_derivatives_match_finite_differences() {
        let h = 1e-5;
        for &u in &[-2.0, -0.4, 0.0, 0.9, 3.3] {
            let (g, g1, g2) = capped_cubic(u, 1.3, 2.0);
            let (gp, g1p, _) = capped_cubic(u + h, 1.3, 2.0);
            let (gm, g1m, _) = capped_cubic(u - h, 1.3, 2.0);
            assert!(((gp - gm) / (2.0 * h) - g1).abs() < 1e-8);
            assert!(((g1p - g1m) / (2.0 * h) - g2).abs() < 1e-8);
            assert!(((gp - 2.0 * g + gm) / (h * h) - g2).abs() < 1e-4);
        }
    }

    #[test]
    fn quadratic_line_average_closed_form() {
        let fs = FieldSpec::quadratic(1).unwrap();
        let la = fs.line_average(&[0.0], &[1.0]).unwrap();
        assert!((la[0] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn linear_line_average_is_midpoint() {
        let fs = FieldSpec::constant_magnetic(2, 0.7).unwrap();
        let (x, y) = ([0.2, -1.0], [1.4, 0.6]);
        assert_eq!(fs.line_average(&x, &y).unwrap(), fs.midpoint_eval(&x, &y));
    }

    #[test]
    fn divergence_matches_finite_differences() {
        let fs = FieldSpec::new(
            2,
            VectorPotential::Tanh { amplitude: 0.8, scale: 1.5 },
            ScalarPotential::Zero,
            Gauge::Sum { terms: vec![cubic(), Gauge::Quadratic { coeff: 0.3 }] },
        )
        .unwrap();
        let x = [0.4, -0.9];
        let h = 1e-5;
        let mut fd = 0.0;
        for i in 0..2 {
            let mut p = x;
            let mut m = x;
            p[i] += h;
            m[i] -= h;
            fd += (fs.vector_at(&p)[i] - fs.vector_at(&m)[i]) / (2.0 * h);
        }
        assert!((fd - fs.divergence(&x)).abs() < 1e-8);
    }

    #[test]
    fn families_combine() {
        let lin = FieldSpec::constant_magnetic(2, 1.0).unwrap();
        assert_eq!(lin.family(), FieldFamily::Linear);
        assert!(lin.is_affine());
        assert_eq!(lin.gauge_shift(&cubic()).unwrap().family(), FieldFamily::Mixed);
        assert_eq!(FieldSpec::zero(2).unwrap().gauge_shift(&Gauge::Linear { coeff: vec![1.0, 0.0] }).unwrap().family(), FieldFamily::Constant);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(FieldSpec::constant_magnetic(1, 1.0).is_err());
        assert!(FieldSpec::new(2, VectorPotential::Constant { value: vec![1.0] }, ScalarPotential::Zero, Gauge::Zero).is_err());
        assert!(FieldSpec::zero(1).unwrap().with_scalar(ScalarPotential::HarmonicCapped { coeff: -1.0, cap: 1.0 }).is_err());
        assert!(FieldSpec::zero(4).is_err());
    }

    #[test]
    fn config_round_trip() {
        let fs = FieldSpec::tanh(1).unwrap().with_scalar(ScalarPotential::HarmonicCapped { coeff: 1.0, cap: 10.0 }).unwrap();
        let s = serde_json::to_string(&fs).unwrap();
        let back: FieldSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, fs);
    }

    fn any_field() -> impl Strategy<Value = FieldSpec> {
        prop_oneof![
            (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| FieldSpec::constant(vec![a, b]).unwrap()),
            (-2.0..2.0f64).prop_map(|b| FieldSpec::constant_magnetic(2, b).unwrap()),
            (0.1..2.0f64, 0.3..3.0f64).prop_map(|(a, s)| FieldSpec::new(
                2,
                VectorPotential::Tanh { amplitude: a, scale: s },
                ScalarPotential::Zero,
                Gauge::Zero
            )
            .unwrap()),
            (-1.0..1.0f64).prop_map(|c| FieldSpec::new(
                2,
                VectorPotential::Quadratic { axis: 1, coeff: c },
                ScalarPotential::Zero,
                Gauge::Zero
            )
            .unwrap()),
            (0.5..2.0f64).prop_map(|w| FieldSpec::zero(2).unwrap().gauge_shift(&Gauge::CappedCubic { amplitude: 1.0, width: w }).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn line_average_matches_line_integral(fs in any_field(), x in prop::array::uniform2(-4.0..4.0f64), y in prop::array::uniform2(-4.0..4.0f64)) {
            let la = fs.line_average(&x, &y).unwrap();
            let chord = [y[0] - x[0], y[1] - x[1]];
            let lhs = la[0] * chord[0] + la[1] * chord[1];
            let rhs = fs.exact_line_integral(&x, &y);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()), "{} vs {}", lhs, rhs);
        }

        #[test]
        fn line_integral_of_gradient_telescopes(w in 0.5..3.0f64, x in prop::array::uniform2(-4.0..4.0f64), y in prop::array::uniform2(-4.0..4.0f64)) {
            let g = Gauge::CappedCubic { amplitude: 1.0, width: w };
            let fs = FieldSpec::zero(2).unwrap().gauge_shift(&g).unwrap();
            let la = fs.line_average(&x, &y).unwrap();
            let lhs = la[0] * (y[0] - x[0]) + la[1] * (y[1] - x[1]);
            prop_assert!((lhs - (g.phi(&y) - g.phi(&x))).abs() <= 1e-9 * (1.0 + lhs.abs()));
        }

        #[test]
        fn line_integral_reverses_sign(fs in any_field(), x in prop::array::uniform2(-4.0..4.0f64), y in prop::array::uniform2(-4.0..4.0f64)) {
            let a = fs.exact_line_integral(&x, &y);
            let b = fs.exact_line_integral(&y, &x);
            prop_assert!((a + b).abs() <= 1e-12 * (1.0 + a.abs()));
        }

        #[test]
        fn weyl_phase_equals_line_integral_for_affine_fields(b in -2.0..2.0f64, x in prop::array::uniform2(-4.0..4.0f64), y in prop::array::uniform2(-4.0..4.0f64)) {
            let fs = FieldSpec::constant_magnetic(2, b).unwrap().gauge_shift(&Gauge::Quadratic { coeff: 0.4 }).unwrap();
            let a = fs.midpoint_phase(&x, &y);
            let c = fs.exact_line_integral(&x, &y);
            prop_assert!((a - c).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }
}
