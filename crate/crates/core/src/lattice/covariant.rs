use super::grid::Lattice;
use crate::error::{invalid, Error, Result};
use crate::fields::FieldSpec;
use faer::Mat;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Magnetic nearest-neighbour Laplacian `-Delta_A = sum_i (2 - T_i - T_i*) / h^2`, where
/// the hop from `y` to its neighbour `x` along axis `i` carries `exp(i int_y^x A . dl)`.
///
/// The wrap-around link uses the unwrapped chord inside the box, so `A -> A + grad(phi)`
/// acts as `-Delta_A -> U (-Delta_A) U*` exactly for any `phi`.  Stored as one
/// `n x n` block per axis line.
#[derive(Debug, Clone)]
pub struct CovariantLaplacian {
    lattice: Lattice,
    lines: Vec<Vec<Vec<usize>>>,
    blocks: Vec<Vec<Mat<Complex64>>>,
}

impl CovariantLaplacian {
    pub fn new(lat: &Lattice, fs: &FieldSpec) -> Self {
        let n = lat.n;
        let h = lat.spacing();
        let sites = lat.sites();
        let d = lat.dim;
        let s = 1.0 / (h * h);
        let mut lines = Vec::with_capacity(d);
        let mut blocks = Vec::with_capacity(d);
        for axis in 0..d {
            let axis_lines = lat.axis_lines(axis);
            let axis_blocks = axis_lines
                .iter()
                .map(|line| {
                    let mut q = Mat::<Complex64>::zeros(n, n);
                    for a in 0..n {
                        q[(a, a)] += Complex64::new(2.0 * s, 0.0);
                        for b in [(a + 1) % n, (a + n - 1) % n] {
                            let phase = fs.exact_line_integral(&sites[line[b]][..d], &sites[line[a]][..d]);
                            q[(a, b)] -= Complex64::from_polar(s, phase);
                        }
                    }
                    q
                })
                .collect();
            lines.push(axis_lines);
            blocks.push(axis_blocks);
        }
        Self { lattice: *lat, lines, blocks }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// `(sum_i P_i^2 + mass2) v`.
    pub fn apply(&self, v: &[Complex64], mass2: f64) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = v.iter().map(|x| x * mass2).collect();
        let n = self.lattice.n;
        for (axis_lines, axis_blocks) in self.lines.iter().zip(&self.blocks) {
            for (line, q) in axis_lines.iter().zip(axis_blocks) {
                for a in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for b in 0..n {
                        acc += q[(a, b)] * v[line[b]];
                    }
                    out[line[a]] += acc;
                }
            }
        }
        out
    }

    pub fn dense(&self, mass2: f64) -> Mat<Complex64> {
        let size = self.lattice.size();
        let n = self.lattice.n;
        let mut m = Mat::<Complex64>::zeros(size, size);
        for i in 0..size {
            m[(i, i)] = Complex64::new(mass2, 0.0);
        }
        for (axis_lines, axis_blocks) in self.lines.iter().zip(&self.blocks) {
            for (line, q) in axis_lines.iter().zip(axis_blocks) {
                for b in 0..n {
                    for a in 0..n {
                        m[(line[a], line[b])] += q[(a, b)];
                    }
                }
            }
        }
        m
    }

    /// Gershgorin upper bound on the spectrum of `sum_i P_i^2 + mass2`.
    pub fn upper_bound(&self, mass2: f64) -> f64 {
        let n = self.lattice.n;
        let mut rows = vec![mass2; self.lattice.size()];
        for (axis_lines, axis_blocks) in self.lines.iter().zip(&self.blocks) {
            for (line, q) in axis_lines.iter().zip(axis_blocks) {
                for a in 0..n {
                    rows[line[a]] += (0..n).map(|b| q[(a, b)].norm()).sum::<f64>();
                }
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// `sqrt(sum_i P_i^2 + mass2) v` by a Chebyshev expansion on `[mass2, upper_bound]`.
    pub fn sqrt_apply(&self, v: &[Complex64], mass2: f64, tol: f64) -> Result<Vec<Complex64>> {
        if mass2 <= 0.0 {
            return Err(invalid("Chebyshev square root needs a positive mass"));
        }
        let a = mass2;
        let b = self.upper_bound(mass2) * (1.0 + 1e-12);
        let coef = chebyshev_coefficients(|x| x.sqrt(), a, b, tol)?;
        let (alpha, beta) = (2.0 / (b - a), -(b + a) / (b - a));
        // Clenshaw recurrence on the affine map of the operator onto [-1, 1]
        let zero = vec![Complex64::new(0.0, 0.0); v.len()];
        let mut b1 = zero.clone();
        let mut b2 = zero;
        for &c in coef[1..].iter().rev() {
            let tb = self.apply(&b1, mass2);
            let b0: Vec<Complex64> = (0..v.len())
                .map(|i| 2.0 * (alpha * tb[i] + beta * b1[i]) - b2[i] + c * v[i])
                .collect();
            b2 = b1;
            b1 = b0;
        }
        let tb = self.apply(&b1, mass2);
        Ok((0..v.len()).map(|i| (alpha * tb[i] + beta * b1[i]) - b2[i] + 0.5 * coef[0] * v[i]).collect())
    }
}

/// Chebyshev coefficients of `f` on `[a, b]`, truncated once the tail falls below `tol`.
pub fn chebyshev_coefficients(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<Vec<f64>> {
    let mut m = 64;
    while m <= 1 << 13 {
        let vals: Vec<f64> = (0..m)
            .map(|j| {
                let th = PI * (j as f64 + 0.5) / m as f64;
                f(0.5 * (b - a) * th.cos() + 0.5 * (b + a))
            })
            .collect();
        let coef: Vec<f64> = (0..m)
            .map(|k| {
                2.0 / m as f64
                    * vals
                        .iter()
                        .enumerate()
                        .map(|(j, fj)| fj * (PI * k as f64 * (j as f64 + 0.5) / m as f64).cos())
                        .sum::<f64>()
            })
            .collect();
        let scale = coef[0].abs().max(f64::MIN_POSITIVE);
        let last = (0..m).rev().find(|&k| coef[k].abs() > tol * scale).unwrap_or(0);
        if last + 8 < m / 2 {
            return Ok(coef[..=last + 1].to_vec());
        }
        m *= 2;
    }
    Err(Error::Quadrature("Chebyshev expansion did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_sqrt_matches_eigen_route() {
        let lat = Lattice::new(2, 8, 6.0).unwrap();
        let fs = FieldSpec::constant_magnetic(2, 0.8).unwrap();
        let cov = CovariantLaplacian::new(&lat, &fs);
        let d = cov.dense(1.0);
        let e = super::super::operator::Eigen::of(&d).unwrap();
        let v: Vec<Complex64> = (0..lat.size()).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
        let exact = e.apply_function(f64::sqrt, &v);
        let cheb = cov.sqrt_apply(&v, 1.0, 1e-14).unwrap();
        let err: f64 = exact.iter().zip(&cheb).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let nrm: f64 = exact.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!(err / nrm < 1e-11, "{}", err / nrm);
    }

    #[test]
    fn zero_field_laplacian_is_diagonal_in_fourier() {
        let lat = Lattice::new(1, 8, 4.0).unwrap();
        let cov = CovariantLaplacian::new(&lat, &FieldSpec::zero(1).unwrap());
        let xi = lat.frequency(3);
        let sym = super::super::operator::laplacian_symbol(&lat, &[xi]);
        let v: Vec<Complex64> = (0..8).map(|i| Complex64::from_polar(1.0, xi * lat.site(i)[0])).collect();
        let w = cov.apply(&v, 0.0);
        for (a, b) in w.iter().zip(&v) {
            assert!((a - b * sym).norm() < 1e-12);
        }
    }
}
