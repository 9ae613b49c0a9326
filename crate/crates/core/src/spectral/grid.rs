use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Periodic collocation grid on `[-L, L)^2` with `n` points per axis.
///
/// Coefficient and value arrays are row-major with the first coordinate
/// fastest: index `i2 * n + i1`. Spectral index `i` maps to the integer mode
/// `m = i` for `i < n/2` and `m = i - n` otherwise, with wavevector
/// `k = (pi / L) m`.
pub struct Grid {
    n: usize,
    half_period: f64,
    modes: Vec<i64>,
    wavenumbers: Vec<f64>,
    k_abs: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

pub const MIN_N: usize = 16;
pub const MAX_N: usize = 1 << 14;

impl Grid {
    pub fn new(n: usize, half_period: f64) -> Result<Arc<Grid>> {
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("n = {n} must be even")));
        }
        if !(MIN_N..=MAX_N).contains(&n) {
            return Err(Error::InvalidGrid(format!("n = {n} outside [{MIN_N}, {MAX_N}]")));
        }
        if !(half_period.is_finite() && half_period > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half period {half_period} must be positive"
            )));
        }
        let half = n as i64 / 2;
        let modes: Vec<i64> = (0..n as i64).map(|i| if i < half { i } else { i - n as i64 }).collect();
        let dk = std::f64::consts::PI / half_period;
        let wavenumbers: Vec<f64> = modes.iter().map(|&m| dk * m as f64).collect();
        let mut k_abs = Vec::with_capacity(n * n);
        for i2 in 0..n {
            for i1 in 0..n {
                k_abs.push(wavenumbers[i1].hypot(wavenumbers[i2]));
            }
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Arc::new(Grid {
            n,
            half_period,
            modes,
            wavenumbers,
            k_abs,
            forward,
            inverse,
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    /// Side length `2L` of the periodic box.
    pub fn box_size(&self) -> f64 {
        2.0 * self.half_period
    }

    pub fn spacing(&self) -> f64 {
        self.box_size() / self.n as f64
    }

    /// Smallest nonzero wavenumber `pi / L`.
    pub fn k_min(&self) -> f64 {
        std::f64::consts::PI / self.half_period
    }

    /// Largest mode index `K` kept by the 2/3 rule, the largest with
    /// `3K < n` so that no alias of a product lands on a kept mode.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n as i64 - 1) / 3
    }

    pub fn mode(&self, i: usize) -> i64 {
        self.modes[i]
    }

    pub fn wavenumber(&self, i: usize) -> f64 {
        self.wavenumbers[i]
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// `|k|` for every flat spectral index.
    pub fn k_abs(&self) -> &[f64] {
        &self.k_abs
    }

    /// Collocation coordinate `-L + j h` along one axis.
    pub fn coordinate(&self, j: usize) -> f64 {
        -self.half_period + self.spacing() * j as f64
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.coordinate(j)).collect()
    }

    /// Flat spectral index of the integer mode `(m1, m2)`, if representable.
    pub fn index_of(&self, m1: i64, m2: i64) -> Option<usize> {
        let n = self.n as i64;
        let wrap = |m: i64| -> Option<usize> {
            if m < -n / 2 || m >= n / 2 {
                None
            } else {
                Some(m.rem_euclid(n) as usize)
            }
        };
        Some(wrap(m2)? * self.n + wrap(m1)?)
    }

    /// True on the Nyquist lines `m1 = -n/2` or `m2 = -n/2`.
    pub(crate) fn is_nyquist(&self, i1: usize, i2: usize) -> bool {
        let h = self.n / 2;
        i1 == h || i2 == h
    }

    pub(crate) fn is_dealiased_out(&self, i1: usize, i2: usize) -> bool {
        let c = self.dealias_cutoff();
        self.modes[i1].abs() > c || self.modes[i2].abs() > c
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        std::ptr::eq(self, other) || (self.n == other.n && self.half_period == other.half_period)
    }

    /// In-place unnormalized 2D FFT of a row-major `n x n` buffer.
    pub(crate) fn fft2(&self, data: &mut [Complex64], inverse: bool) {
        let plan = if inverse { &self.inverse } else { &self.forward };
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(data, &mut scratch);
        transpose_square(data, self.n);
        plan.process_with_scratch(data, &mut scratch);
        transpose_square(data, self.n);
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("half_period", &self.half_period)
            .finish()
    }
}

/// Build a grid, validating `n` and `L`.
pub fn make_grid(n: usize, half_period: f64) -> Result<Arc<Grid>> {
    Grid::new(n, half_period)
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    const B: usize = 32;
    for bi in (0..n).step_by(B) {
        for bj in (bi..n).step_by(B) {
            for i in bi..(bi + B).min(n) {
                let j0 = if bi == bj { i + 1 } else { bj };
                for j in j0..(bj + B).min(n) {
                    data.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_spacing_for_pi_box() {
        let g = make_grid(16, PI).unwrap();
        assert!((g.spacing() - 2.0 * PI / 16.0).abs() < 1e-15);
        assert!((g.k_min() - 1.0).abs() < 1e-15);
        assert_eq!(g.k_abs()[0], 0.0);
        assert_eq!(g.k_abs().iter().filter(|&&k| k == 0.0).count(), 1);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(make_grid(15, PI), Err(Error::InvalidGrid(_))));
        assert!(make_grid(14, PI).is_err());
        assert!(make_grid(1 << 15, PI).is_err());
        assert!(make_grid(16, 0.0).is_err());
        assert!(make_grid(16, -1.0).is_err());
    }

    #[test]
    fn large_box_k_min() {
        let g = make_grid(512, 40.0 * PI).unwrap();
        assert!((g.k_min() - 1.0 / 40.0).abs() < 1e-15);
        assert!((g.spacing() * 512.0 - 80.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn mode_indexing() {
        let g = make_grid(16, PI).unwrap();
        assert_eq!(g.index_of(0, 0), Some(0));
        assert_eq!(g.index_of(-1, 0), Some(15));
        assert_eq!(g.index_of(2, -3), Some(13 * 16 + 2));
        assert_eq!(g.index_of(8, 0), None);
        assert_eq!(g.index_of(-8, 0), Some(8));
        assert_eq!(g.dealias_cutoff(), 5);
        assert_eq!(make_grid(24, PI).unwrap().dealias_cutoff(), 7);
        assert_eq!(make_grid(512, PI).unwrap().dealias_cutoff(), 170);
    }

    #[test]
    fn blocked_transpose() {
        let n = 70;
        let mut d: Vec<Complex64> = (0..n * n).map(|i| Complex64::new(i as f64, 0.0)).collect();
        transpose_square(&mut d, n);
        for i in 0..n {
            for j in 0..n {
                assert_eq!(d[i * n + j].re, (j * n + i) as f64);
            }
        }
    }
}
