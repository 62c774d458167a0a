use crate::error::{invalid, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest number of sites handled by dense eigendecomposition.
pub const DENSE_SITE_BUDGET: usize = 4096;

/// Periodic grid of `n^dim` sites `-L/2 + k h`, `h = L / n`, flattened with axis 0 slowest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub dim: usize,
    pub n: usize,
    pub length: f64,
}

impl Lattice {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(invalid(format!("lattice dimension must be 1, 2 or 3, got {dim}")));
        }
        if n < 2 || n % 2 != 0 {
            return Err(invalid(format!("points per axis must be even and at least 2, got {n}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(invalid(format!("box length must be positive, got {length}")));
        }
        let lat = Self { dim, n, length };
        if n.checked_pow(dim as u32).is_none_or(|s| s > DENSE_SITE_BUDGET) {
            return Err(invalid(format!(
                "{n}^{dim} sites exceed the dense budget of {DENSE_SITE_BUDGET}"
            )));
        }
        Ok(lat)
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn size(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Volume element `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let mut out = [0; 3];
        let mut r = idx;
        for a in (0..self.dim).rev() {
            out[a] = r % self.n;
            r /= self.n;
        }
        out
    }

    pub fn flat_index(&self, k: &[usize]) -> usize {
        k.iter().take(self.dim).fold(0, |acc, &ki| acc * self.n + ki)
    }

    pub fn axis_coordinate(&self, k: usize) -> f64 {
        -0.5 * self.length + k as f64 * self.spacing()
    }

    /// Coordinates of site `idx`; entries past `dim` are zero.
    pub fn site(&self, idx: usize) -> [f64; 3] {
        let k = self.multi_index(idx);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.axis_coordinate(k[a]);
        }
        x
    }

    pub fn sites(&self) -> Vec<[f64; 3]> {
        (0..self.size()).map(|i| self.site(i)).collect()
    }

    /// Index of the site nearest to `x` and the distance to it.
    pub fn nearest_site(&self, x: &[f64]) -> (usize, f64) {
        let h = self.spacing();
        let mut k = [0usize; 3];
        let mut dist2 = 0.0;
        for a in 0..self.dim {
            let j = ((x[a] + 0.5 * self.length) / h).round().rem_euclid(self.n as f64) as usize;
            k[a] = j;
            let dx = x[a] - self.axis_coordinate(j);
            dist2 += dx * dx;
        }
        (self.flat_index(&k), dist2.sqrt())
    }

    /// Flattened index of the periodic displacement `x - y` between two sites.
    pub fn displacement_index(&self, x: usize, y: usize) -> usize {
        let (kx, ky) = (self.multi_index(x), self.multi_index(y));
        let mut d = [0; 3];
        for a in 0..self.dim {
            d[a] = (kx[a] + self.n - ky[a]) % self.n;
        }
        self.flat_index(&d)
    }

    /// Frequency of FFT bin `k`; the Nyquist bin maps to `-pi / h`.
    pub fn frequency(&self, k: usize) -> f64 {
        let kk = if k < self.n / 2 { k as f64 } else { k as f64 - self.n as f64 };
        2.0 * PI * kk / self.length
    }

    /// Dual-grid momenta in FFT order.
    pub fn momenta(&self) -> Vec<[f64; 3]> {
        (0..self.size())
            .map(|i| {
                let k = self.multi_index(i);
                let mut xi = [0.0; 3];
                for a in 0..self.dim {
                    xi[a] = self.frequency(k[a]);
                }
                xi
            })
            .collect()
    }

    /// Translation kernel `K(delta) = N^-d sum_xi sym(xi) e^{i xi . delta}` of a Fourier
    /// multiplier, indexed by [`Lattice::displacement_index`].
    pub fn multiplier_kernel<F: Fn(&[f64]) -> Complex64>(&self, sym: F) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = self.momenta().iter().map(|xi| sym(&xi[..self.dim])).collect();
        self.inverse_dft(&mut data);
        data
    }

    /// Normalized inverse DFT over all axes, in place.
    pub fn inverse_dft(&self, data: &mut [Complex64]) {
        self.dft_axes(data, true);
        let scale = 1.0 / self.size() as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }

    /// Forward DFT over all axes, in place and unnormalized.
    pub fn forward_dft(&self, data: &mut [Complex64]) {
        self.dft_axes(data, false);
    }

    fn dft_axes(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let mut planner = FftPlanner::new();
        let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for a in 0..self.dim {
            let stride = n.pow((self.dim - 1 - a) as u32);
            for start in 0..self.size() {
                if (start / stride) % n != 0 {
                    continue;
                }
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[start + j * stride];
                }
                fft.process(&mut line);
                for (j, v) in line.iter().enumerate() {
                    data[start + j * stride] = *v;
                }
            }
        }
    }

    /// Sites along the axis-`axis` line through each site with `k_axis = 0`.
    pub fn axis_lines(&self, axis: usize) -> Vec<Vec<usize>> {
        let n = self.n;
        let stride = n.pow((self.dim - 1 - axis) as u32);
        (0..self.size())
            .filter(|&s| (s / stride) % n == 0)
            .map(|s| (0..n).map(|j| s + j * stride).collect())
            .collect()
    }

    /// Band-limited interpolation of lattice values at an arbitrary point.
    pub fn interpolate(&self, values: &[Complex64], x: &[f64]) -> Complex64 {
        let (idx, dist) = self.nearest_site(x);
        if dist < 1e-12 * self.spacing() {
            return values[idx];
        }
        let mut coef = values.to_vec();
        self.forward_dft(&mut coef);
        let scale = 1.0 / self.size() as f64;
        let origin = -0.5 * self.length;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in coef.iter().enumerate() {
            let k = self.multi_index(i);
            let mut factor = Complex64::new(1.0, 0.0);
            for a in 0..self.dim {
                let u = x[a] - origin;
                factor *= if k[a] == self.n / 2 {
                    Complex64::new((PI * u / self.spacing()).cos(), 0.0)
                } else {
                    Complex64::from_polar(1.0, self.frequency(k[a]) * u)
                };
            }
            acc += c * factor;
        }
        acc * scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trip() {
        let lat = Lattice::new(2, 8, 4.0).unwrap();
        for i in 0..lat.size() {
            assert_eq!(lat.flat_index(&lat.multi_index(i)), i);
            let (j, d) = lat.nearest_site(&lat.site(i));
            assert_eq!(j, i);
            assert!(d < 1e-14);
        }
        assert_eq!(lat.site(0)[0], -2.0);
        assert_eq!(lat.displacement_index(0, 0), 0);
    }

    #[test]
    fn budget_and_parity_enforced() {
        assert!(Lattice::new(2, 128, 1.0).is_err());
        assert!(Lattice::new(1, 7, 1.0).is_err());
        assert!(Lattice::new(2, 64, 1.0).is_ok());
    }

    #[test]
    fn multiplier_kernel_of_identity_is_delta() {
        let lat = Lattice::new(2, 8, 3.0).unwrap();
        let k = lat.multiplier_kernel(|_| Complex64::new(1.0, 0.0));
        assert!((k[0] - 1.0).norm() < 1e-14);
        assert!(k[1..].iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn interpolation_reproduces_band_limited_waves() {
        let lat = Lattice::new(1, 16, 2.0 * PI).unwrap();
        let vals: Vec<Complex64> = (0..16).map(|i| Complex64::new((3.0 * lat.site(i)[0]).cos(), (2.0 * lat.site(i)[0]).sin())).collect();
        let x = 0.377;
        let v = lat.interpolate(&vals, &[x]);
        assert!((v - Complex64::new((3.0 * x).cos(), (2.0 * x).sin())).norm() < 1e-12);
    }

    #[test]
    fn axis_lines_cover_the_grid() {
        let lat = Lattice::new(2, 4, 1.0).unwrap();
        for axis in 0..2 {
            let lines = lat.axis_lines(axis);
            assert_eq!(lines.len(), 4);
            let mut all: Vec<usize> = lines.concat();
            all.sort();
            assert_eq!(all, (0..16).collect::<Vec<_>>());
        }
        assert_eq!(lat.axis_lines(1)[0], vec![0, 1, 2, 3]);
    }
}
