use super::grid::Lattice;
use crate::error::{invalid, Error, Result};
use crate::fields::FieldSpec;
use crate::specfun::MassDim;
use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Which quantization a lattice operator represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    H0,
    H1,
    H2,
    H3,
    Nr,
}

impl Variant {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h0" | "0" => Some(Variant::H0),
            "h1" | "1" => Some(Variant::H1),
            "h2" | "2" => Some(Variant::H2),
            "h3" | "3" => Some(Variant::H3),
            "nr" => Some(Variant::Nr),
            _ => None,
        }
    }

    /// Lower spectral bound of the variant at `A = 0`, subtracted in the semigroup.
    pub fn shift(&self, mass: f64) -> f64 {
        if *self == Variant::Nr {
            0.0
        } else {
            mass
        }
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Mat<Complex64>,
}

impl Eigen {
    pub fn of(matrix: &Mat<Complex64>) -> Result<Self> {
        let e = matrix
            .self_adjoint_eigen(Side::Lower)
            .map_err(|err| Error::LinearAlgebra(format!("Hermitian eigensolver failed: {err:?}")))?;
        let s = e.S().column_vector();
        let values: Vec<f64> = (0..matrix.nrows()).map(|i| s[i].re).collect();
        Ok(Self { values, vectors: e.U().to_owned() })
    }

    /// `U diag(f(lambda)) U*`.
    pub fn function(&self, f: impl Fn(f64) -> f64) -> Mat<Complex64> {
        let u = &self.vectors;
        let n = u.nrows();
        let scaled = Mat::from_fn(n, n, |i, j| u[(i, j)] * f(self.values[j]));
        &scaled * u.adjoint()
    }

    /// `U diag(f(lambda)) U* v`.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64, v: &[Complex64]) -> Vec<Complex64> {
        let u = &self.vectors;
        let n = u.nrows();
        let col = Mat::from_fn(n, 1, |i, _| v[i]);
        let mut c = u.adjoint() * &col;
        for j in 0..n {
            c[(j, 0)] *= f(self.values[j]);
        }
        let out = u * &c;
        (0..n).map(|i| out[(i, 0)]).collect()
    }
}

/// Dense Hermitian lattice operator with a lazily computed eigendecomposition.
#[derive(Debug)]
pub struct LatticeOperator {
    pub variant: Variant,
    pub lattice: Lattice,
    pub mass: f64,
    pub has_potential: bool,
    matrix: Mat<Complex64>,
    eigen: OnceLock<Result<Eigen>>,
}

impl Clone for LatticeOperator {
    fn clone(&self) -> Self {
        let eigen = OnceLock::new();
        if let Some(e) = self.eigen.get() {
            let _ = eigen.set(e.clone());
        }
        Self {
            variant: self.variant,
            lattice: self.lattice,
            mass: self.mass,
            has_potential: self.has_potential,
            matrix: self.matrix.clone(),
            eigen,
        }
    }
}

impl LatticeOperator {
    pub fn from_parts(variant: Variant, lattice: Lattice, mass: f64, matrix: Mat<Complex64>, eigen: Option<Eigen>) -> Self {
        let cell = OnceLock::new();
        if let Some(e) = eigen {
            let _ = cell.set(Ok(e));
        }
        Self { variant, lattice, mass, has_potential: false, matrix, eigen: cell }
    }

    pub fn matrix(&self) -> &Mat<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn eigen(&self) -> Result<&Eigen> {
        self.eigen.get_or_init(|| Eigen::of(&self.matrix)).as_ref().map_err(Clone::clone)
    }

    pub fn shift(&self) -> f64 {
        self.variant.shift(self.mass)
    }

    /// Smallest eigenvalue.
    pub fn spectral_floor(&self) -> Result<f64> {
        Ok(self.eigen()?.values[0])
    }

    /// Spectral norm, from the eigenvalues.
    pub fn norm(&self) -> Result<f64> {
        let v = &self.eigen()?.values;
        Ok(v[0].abs().max(v[v.len() - 1].abs()))
    }

    /// `max |H - H*| / max |H|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        let n = m.nrows();
        let mut defect: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                defect = defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
                scale = scale.max(m[(i, j)].norm());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }

    /// Adds `V(x)` on the diagonal.
    pub fn with_potential(&self, fs: &FieldSpec) -> Result<Self> {
        if fs.dim != self.lattice.dim {
            return Err(invalid("field and lattice dimensions differ"));
        }
        let mut matrix = self.matrix.clone();
        for i in 0..self.dim() {
            let x = self.lattice.site(i);
            matrix[(i, i)] += Complex64::new(fs.scalar_at(&x[..fs.dim]), 0.0);
        }
        Ok(Self {
            variant: self.variant,
            lattice: self.lattice,
            mass: self.mass,
            has_potential: true,
            matrix,
            eigen: OnceLock::new(),
        })
    }

    pub fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        matvec(&self.matrix, f)
    }

    /// `exp(-t (H - shift))` as a dense matrix.
    pub fn semigroup(&self, t: f64) -> Result<Mat<Complex64>> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(invalid(format!("semigroup time must be non-negative, got {t}")));
        }
        let s = self.shift();
        Ok(self.eigen()?.function(|l| (-t * (l - s)).exp()))
    }

    /// `exp(-t (H - shift)) g`.
    pub fn apply_semigroup(&self, t: f64, g: &[Complex64]) -> Result<Vec<Complex64>> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(invalid(format!("semigroup time must be non-negative, got {t}")));
        }
        let s = self.shift();
        Ok(self.eigen()?.apply_function(|l| (-t * (l - s)).exp(), g))
    }
}

pub(crate) fn matvec(m: &Mat<Complex64>, f: &[Complex64]) -> Vec<Complex64> {
    let n = m.nrows();
    let col = Mat::from_fn(f.len(), 1, |i, _| f[i]);
    let out = m * &col;
    (0..n).map(|i| out[(i, 0)]).collect()
}

pub(crate) fn check_dims(lat: &Lattice, fs: &FieldSpec, md: MassDim) -> Result<()> {
    if lat.dim != fs.dim || lat.dim != md.dim {
        return Err(invalid(format!(
            "dimension mismatch: lattice {}, field {}, mass/dim {}",
            lat.dim, fs.dim, md.dim
        )));
    }
    Ok(())
}

/// Symbol `sum_i (2 sin(xi_i h / 2) / h)^2` of the nearest-neighbour Laplacian `-Delta_h`.
pub fn laplacian_symbol(lat: &Lattice, xi: &[f64]) -> f64 {
    let h = lat.spacing();
    xi.iter().map(|v| (2.0 * (0.5 * v * h).sin() / h).powi(2)).sum()
}

/// Kernel of `sqrt(-Delta_h + m^2)`, real and even.
pub fn relativistic_kernel(lat: &Lattice, mass: f64) -> Vec<f64> {
    let k = lat.multiplier_kernel(|xi| Complex64::new((laplacian_symbol(lat, xi) + mass * mass).sqrt(), 0.0));
    symmetrize(lat, k)
}

/// Kernel of `exp(-tau (sqrt(-Delta_h + m^2) - m))`.
pub fn heat_kernel(lat: &Lattice, mass: f64, tau: f64) -> Vec<f64> {
    let k = lat.multiplier_kernel(|xi| {
        let x = laplacian_symbol(lat, xi).sqrt();
        Complex64::new((-tau * crate::specfun::relativistic_symbol(x, mass)).exp(), 0.0)
    });
    symmetrize(lat, k)
}

fn symmetrize(lat: &Lattice, k: Vec<Complex64>) -> Vec<f64> {
    let n = lat.n;
    (0..k.len())
        .map(|i| {
            let idx = lat.multi_index(i);
            let mut neg = [0; 3];
            for a in 0..lat.dim {
                neg[a] = (n - idx[a]) % n;
            }
            0.5 * (k[i].re + k[lat.flat_index(&neg)].re)
        })
        .collect()
}

/// Hermitian matrix `K(x - y) exp(i phase(y, x))` filled from its upper triangle.
pub(crate) fn hermitian_from_kernel(
    lat: &Lattice,
    kernel: &[f64],
    phase: impl Fn(&[f64], &[f64]) -> f64,
) -> Mat<Complex64> {
    let n = lat.size();
    let d = lat.dim;
    let sites = lat.sites();
    let mut m = Mat::<Complex64>::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let k = kernel[lat.displacement_index(i, j)];
            let v = if i == j {
                Complex64::new(k, 0.0)
            } else {
                Complex64::from_polar(k, phase(&sites[j][..d], &sites[i][..d]))
            };
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    m
}

pub fn build_h0(lat: &Lattice, md: MassDim) -> Result<LatticeOperator> {
    if lat.dim != md.dim {
        return Err(invalid("lattice and mass/dim dimensions differ"));
    }
    let k = relativistic_kernel(lat, md.mass);
    let m = hermitian_from_kernel(lat, &k, |_, _| 0.0);
    Ok(LatticeOperator::from_parts(Variant::H0, *lat, md.mass, m, None))
}

/// Weyl quantization: phase `A((x + y) / 2) . (x - y)`.
pub fn build_h1(lat: &Lattice, fs: &FieldSpec, md: MassDim) -> Result<LatticeOperator> {
    check_dims(lat, fs, md)?;
    let k = relativistic_kernel(lat, md.mass);
    let m = hermitian_from_kernel(lat, &k, |y, x| fs.midpoint_phase(y, x));
    Ok(LatticeOperator::from_parts(Variant::H1, *lat, md.mass, m, None))
}

/// Line-average quantization: phase `int_y^x A . dl`.
pub fn build_h2(lat: &Lattice, fs: &FieldSpec, md: MassDim) -> Result<LatticeOperator> {
    check_dims(lat, fs, md)?;
    let k = relativistic_kernel(lat, md.mass);
    let m = hermitian_from_kernel(lat, &k, |y, x| fs.exact_line_integral(y, x));
    Ok(LatticeOperator::from_parts(Variant::H2, *lat, md.mass, m, None))
}

/// `sqrt(-Delta_A + m^2)` with the nearest-neighbour magnetic Laplacian `-Delta_A`.
pub fn build_h3(lat: &Lattice, fs: &FieldSpec, md: MassDim) -> Result<LatticeOperator> {
    check_dims(lat, fs, md)?;
    let cov = super::CovariantLaplacian::new(lat, fs);
    let d = cov.dense(md.mass * md.mass);
    let e = Eigen::of(&d)?;
    let values: Vec<f64> = e.values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let eig = Eigen { values, vectors: e.vectors };
    let mut m = eig.function(|s| s);
    hermitian_part(&mut m);
    Ok(LatticeOperator::from_parts(Variant::H3, *lat, md.mass, m, Some(eig)))
}

/// Nonrelativistic `-Delta_A / 2`.
pub fn build_nr(lat: &Lattice, fs: &FieldSpec, md: MassDim) -> Result<LatticeOperator> {
    check_dims(lat, fs, md)?;
    let cov = super::CovariantLaplacian::new(lat, fs);
    let mut m = cov.dense(0.0);
    for v in m.col_iter_mut() {
        for x in v.iter_mut() {
            *x *= 0.5;
        }
    }
    Ok(LatticeOperator::from_parts(Variant::Nr, *lat, md.mass, m, None))
}

pub fn build(variant: Variant, lat: &Lattice, fs: &FieldSpec, md: MassDim) -> Result<LatticeOperator> {
    match variant {
        Variant::H0 => build_h0(lat, md),
        Variant::H1 => build_h1(lat, fs, md),
        Variant::H2 => build_h2(lat, fs, md),
        Variant::H3 => build_h3(lat, fs, md),
        Variant::Nr => build_nr(lat, fs, md),
    }
}

fn hermitian_part(m: &mut Mat<Complex64>) {
    let n = m.nrows();
    for j in 0..n {
        m[(j, j)].im = 0.0;
        for i in 0..j {
            let v = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
}
