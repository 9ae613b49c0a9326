use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Real values at the collocation points of a grid.
#[derive(Clone, Debug)]
pub struct PhysicalScalar {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

/// Fourier coefficients `c(m) = n^{-2} sum_j f(x_j) exp(-i k_m . x_j)`.
///
/// With this normalization `c(m)` approximates `fhat(k_m) / (2L)^2` where
/// `fhat` is the whole-plane Fourier transform `int f(x) exp(-i k.x) dx`.
#[derive(Clone, Debug)]
pub struct SpectralScalar {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
}

/// A pair of spectral components, e.g. a velocity field.
#[derive(Clone, Debug)]
pub struct SpectralVector {
    pub components: [SpectralScalar; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Either representation of a scalar field.
#[derive(Clone, Debug)]
pub enum Field {
    Physical(PhysicalScalar),
    Spectral(SpectralScalar),
}

/// Move a field to the other representation. The direction must match the
/// representation it is given in.
pub fn transform(field: Field, direction: Direction) -> Result<Field> {
    match (field, direction) {
        (Field::Physical(p), Direction::Forward) => Ok(Field::Spectral(SpectralScalar::forward(&p)?)),
        (Field::Spectral(s), Direction::Inverse) => Ok(Field::Physical(s.inverse())),
        (Field::Physical(p), Direction::Inverse) => Ok(Field::Physical(p)),
        (Field::Spectral(s), Direction::Forward) => Ok(Field::Spectral(s)),
    }
}

fn parity_sign(i1: usize, i2: usize) -> f64 {
    if (i1 + i2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Shift the FFT of data sampled from `x = 0` to samples starting at `-L`:
/// `exp(i k_m L) = (-1)^(m1 + m2)`, and `(-1)^m = (-1)^i` for even `n`.
fn apply_parity(grid: &Grid, data: &mut [Complex64]) {
    let n = grid.n();
    for (i2, row) in data.chunks_mut(n).enumerate() {
        for (i1, c) in row.iter_mut().enumerate() {
            if (i1 + i2) % 2 == 1 {
                *c = -*c;
            }
        }
    }
}

/// Forward transforms of real arrays, two per complex FFT.
pub(crate) fn forward_many(grid: &Grid, fields: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let n = grid.n();
    let len = grid.len();
    let norm = 1.0 / len as f64;
    let mut out = Vec::with_capacity(fields.len());
    for chunk in fields.chunks(2) {
        let mut z: Vec<Complex64> = match chunk {
            [a, b] => a.iter().zip(b.iter()).map(|(&x, &y)| Complex64::new(x, y)).collect(),
            [a] => a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            _ => unreachable!(),
        };
        grid.fft2(&mut z, false);
        if chunk.len() == 1 {
            for (i, c) in z.iter_mut().enumerate() {
                *c *= norm * parity_sign(i % n, i / n);
            }
            out.push(z);
            continue;
        }
        let mut fa = vec![Complex64::default(); len];
        let mut fb = vec![Complex64::default(); len];
        for i2 in 0..n {
            let j2 = (n - i2) % n;
            for i1 in 0..n {
                let j1 = (n - i1) % n;
                let zk = z[i2 * n + i1];
                let zm = z[j2 * n + j1].conj();
                let s = norm * parity_sign(i1, i2);
                fa[i2 * n + i1] = (zk + zm) * (0.5 * s);
                // (zk - zm) / (2i)
                let d = zk - zm;
                fb[i2 * n + i1] = Complex64::new(d.im, -d.re) * (0.5 * s);
            }
        }
        out.push(fa);
        out.push(fb);
    }
    out
}

/// Inverse transforms to real arrays, two per complex FFT. Imaginary parts
/// of non-Hermitian input are discarded.
pub(crate) fn inverse_many(grid: &Grid, fields: &[&SpectralScalar]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(fields.len());
    for chunk in fields.chunks(2) {
        let mut z: Vec<Complex64> = match chunk {
            [a, b] => a
                .coeffs
                .iter()
                .zip(b.coeffs.iter())
                .map(|(&x, &y)| x + Complex64::new(-y.im, y.re))
                .collect(),
            [a] => a.coeffs.clone(),
            _ => unreachable!(),
        };
        apply_parity(grid, &mut z);
        grid.fft2(&mut z, true);
        out.push(z.iter().map(|c| c.re).collect());
        if chunk.len() == 2 {
            out.push(z.iter().map(|c| c.im).collect());
        }
    }
    out
}

impl PhysicalScalar {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(PhysicalScalar { grid, values })
    }

    pub(crate) fn from_raw(grid: Arc<Grid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        PhysicalScalar { grid, values }
    }

    /// Sample `f(x1, x2)` at the collocation points.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let xs = grid.coordinates();
        let mut values = Vec::with_capacity(grid.len());
        for &x2 in &xs {
            for &x1 in &xs {
                values.push(f(x1, x2));
            }
        }
        PhysicalScalar {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Collocation quadrature of the field.
    pub fn integral(&self) -> f64 {
        let h = self.grid.spacing();
        self.values.iter().sum::<f64>() * h * h
    }

    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.spacing();
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt() * h
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl SpectralScalar {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        SpectralScalar {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn from_coeffs(grid: Arc<Grid>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(SpectralScalar { grid, coeffs })
    }

    pub(crate) fn from_raw(grid: Arc<Grid>, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        SpectralScalar { grid, coeffs }
    }

    pub fn forward(field: &PhysicalScalar) -> Result<Self> {
        if field.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let coeffs = forward_many(&field.grid, &[&field.values]).pop().unwrap();
        Ok(SpectralScalar {
            grid: field.grid.clone(),
            coeffs,
        })
    }

    /// Convenience: sample `f` and transform.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        Self::forward(&PhysicalScalar::from_fn(grid, f))
    }

    pub fn inverse(&self) -> PhysicalScalar {
        let values = inverse_many(&self.grid, &[self]).pop().unwrap();
        PhysicalScalar {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of the integer mode `(m1, m2)`; zero if not representable.
    pub fn mode(&self, m1: i64, m2: i64) -> Complex64 {
        self.grid.index_of(m1, m2).map(|i| self.coeffs[i]).unwrap_or_default()
    }

    pub fn set_mode(&mut self, m1: i64, m2: i64, value: Complex64) {
        if let Some(i) = self.grid.index_of(m1, m2) {
            self.coeffs[i] = value;
        }
    }

    /// Spatial mean, i.e. the `(0, 0)` coefficient's real part.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Copy with the `(0, 0)` coefficient removed.
    pub fn mean_free(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = Complex64::default();
        out
    }

    /// `sqrt(sum |c|^2)`, the scale against which relative tolerances are taken.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub(crate) fn check_grid(&self, other: &SpectralScalar) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Multiply each coefficient by `symbol(k1, k2, |k|)`.
    pub(crate) fn map_symbol(&self, symbol: impl Fn(usize, usize, f64) -> Complex64) -> Self {
        let n = self.grid.n();
        let k = self.grid.k_abs();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * symbol(i % n, i / n, k[i]))
            .collect();
        SpectralScalar {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// Multiply each coefficient by a real factor depending on `|k|`.
    pub fn map_radial(&self, factor: impl Fn(f64) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(self.grid.k_abs())
            .map(|(&c, &k)| c * factor(k))
            .collect();
        SpectralScalar {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        SpectralScalar {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &SpectralScalar) -> Self {
        debug_assert!(self.grid.same_as(&other.grid));
        SpectralScalar {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&x, &y)| x + y * a)
                .collect(),
        }
    }

    /// Real inner product `int f g dx` of the represented real fields.
    pub fn inner(&self, other: &SpectralScalar) -> f64 {
        let area = self.grid.box_size().powi(2);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum::<f64>()
            * area
    }

    /// Largest violation of `c(-m) = conj(c(m))`, ignoring Nyquist lines.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let mut worst: f64 = 0.0;
        for i2 in 0..n {
            for i1 in 0..n {
                if self.grid.is_nyquist(i1, i2) {
                    continue;
                }
                let j = ((n - i2) % n) * n + (n - i1) % n;
                worst = worst.max((self.coeffs[i2 * n + i1] - self.coeffs[j].conj()).norm());
            }
        }
        worst
    }

    /// Zero-pad (or truncate) onto a grid with the same half period.
    pub fn resample(&self, target: &Arc<Grid>) -> Result<Self> {
        if target.half_period() != self.grid.half_period() {
            return Err(Error::GridMismatch);
        }
        let mut out = SpectralScalar::zeros(target);
        let n = self.grid.n();
        let lim = (target.n().min(n) / 2) as i64;
        for i2 in 0..n {
            let m2 = self.grid.mode(i2);
            for i1 in 0..n {
                let m1 = self.grid.mode(i1);
                // the Nyquist line has no unambiguous partner on the other grid
                if m1.abs() >= lim || m2.abs() >= lim {
                    continue;
                }
                if let Some(j) = target.index_of(m1, m2) {
                    out.coeffs[j] = self.coeffs[i2 * n + i1];
                }
            }
        }
        Ok(out)
    }
}

impl Add for &SpectralScalar {
    type Output = SpectralScalar;
    fn add(self, rhs: &SpectralScalar) -> SpectralScalar {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &SpectralScalar {
    type Output = SpectralScalar;
    fn sub(self, rhs: &SpectralScalar) -> SpectralScalar {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &SpectralScalar {
    type Output = SpectralScalar;
    fn mul(self, rhs: f64) -> SpectralScalar {
        self.scale(rhs)
    }
}

impl SpectralVector {
    pub fn new(a: SpectralScalar, b: SpectralScalar) -> Result<Self> {
        a.check_grid(&b)?;
        Ok(SpectralVector { components: [a, b] })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        SpectralVector {
            components: [SpectralScalar::zeros(grid), SpectralScalar::zeros(grid)],
        }
    }

    pub fn forward(a: &PhysicalScalar, b: &PhysicalScalar) -> Result<Self> {
        if !a.grid.same_as(&b.grid) {
            return Err(Error::GridMismatch);
        }
        if a.values.iter().chain(&b.values).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut out = forward_many(&a.grid, &[&a.values, &b.values]);
        let c2 = out.pop().unwrap();
        let c1 = out.pop().unwrap();
        Ok(SpectralVector {
            components: [
                SpectralScalar::from_raw(a.grid.clone(), c1),
                SpectralScalar::from_raw(a.grid.clone(), c2),
            ],
        })
    }

    pub fn inverse(&self) -> [PhysicalScalar; 2] {
        let grid = self.grid().clone();
        let mut v = inverse_many(&grid, &[&self.components[0], &self.components[1]]);
        let b = v.pop().unwrap();
        let a = v.pop().unwrap();
        [
            PhysicalScalar::from_raw(grid.clone(), a),
            PhysicalScalar::from_raw(grid, b),
        ]
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.components[0].grid()
    }

    pub fn scale(&self, s: f64) -> Self {
        SpectralVector {
            components: [self.components[0].scale(s), self.components[1].scale(s)],
        }
    }

    pub fn axpy(&self, a: f64, other: &SpectralVector) -> Self {
        SpectralVector {
            components: [
                self.components[0].axpy(a, &other.components[0]),
                self.components[1].axpy(a, &other.components[1]),
            ],
        }
    }

    pub fn map_radial(&self, factor: impl Fn(f64) -> f64 + Copy) -> Self {
        SpectralVector {
            components: [
                self.components[0].map_radial(factor),
                self.components[1].map_radial(factor),
            ],
        }
    }

    pub fn inner(&self, other: &SpectralVector) -> f64 {
        self.components[0].inner(&other.components[0]) + self.components[1].inner(&other.components[1])
    }

    pub fn coeff_norm(&self) -> f64 {
        self.components[0].coeff_norm().hypot(self.components[1].coeff_norm())
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(SpectralScalar::is_finite)
    }

    pub fn resample(&self, target: &Arc<Grid>) -> Result<Self> {
        Ok(SpectralVector {
            components: [
                self.components[0].resample(target)?,
                self.components[1].resample(target)?,
            ],
        })
    }
}

impl Sub for &SpectralVector {
    type Output = SpectralVector;
    fn sub(self, rhs: &SpectralVector) -> SpectralVector {
        self.axpy(-1.0, rhs)
    }
}
