//! Exact Fourier-multiplier operators.
//!
//! Symbols that are odd in `k` (derivatives, Riesz, the off-diagonal part of
//! the Leray projector) have no Hermitian-consistent value on the Nyquist
//! lines `m = -n/2`; those coefficients are set to zero. Solver states are
//! band-limited by the 2/3 rule and never populate them.

use num_complex::Complex64;

use super::field::{SpectralScalar, SpectralVector};
use crate::error::{Error, Result};

/// Relative size of the mean coefficient tolerated by negative-order operators.
pub const MEAN_TOLERANCE: f64 = 1e-14;

fn check_mean_free(f: &SpectralScalar) -> Result<()> {
    let mean = f.coeffs()[0].norm();
    let scale = f.coeff_norm();
    if mean > MEAN_TOLERANCE * scale {
        return Err(Error::NonzeroMean { mean, scale });
    }
    Ok(())
}

/// `Lambda^alpha f`: multiply by `|k|^alpha`, with the `(0, 0)` mode removed
/// for `alpha != 0`.
pub fn fractional_laplacian(f: &SpectralScalar, alpha: f64) -> Result<SpectralScalar> {
    if !(-2.0..=4.0).contains(&alpha) {
        return Err(Error::ExponentOutOfRange(alpha));
    }
    if alpha < 0.0 {
        check_mean_free(f)?;
    }
    if alpha == 0.0 {
        return Ok(f.clone());
    }
    Ok(f.map_radial(|k| if k == 0.0 { 0.0 } else { k.powf(alpha) }))
}

/// Multiplier `|k|^alpha` with the mean silently dropped. Used where the
/// caller tracks the mean separately.
pub(crate) fn lambda_pow_mean_free(f: &SpectralScalar, alpha: f64) -> SpectralScalar {
    f.map_radial(|k| if k == 0.0 { 0.0 } else { k.powf(alpha) })
}

/// Riesz transform `R f = grad Lambda^{-1} f`, symbol `i k_j / |k|`.
pub fn riesz(f: &SpectralScalar) -> Result<SpectralVector> {
    check_mean_free(f)?;
    Ok(riesz_unchecked(f))
}

pub(crate) fn riesz_unchecked(f: &SpectralScalar) -> SpectralVector {
    let grid = f.grid().clone();
    let component = |axis: usize| {
        f.map_symbol(|i1, i2, k| {
            if k == 0.0 || grid.is_nyquist(i1, i2) {
                return Complex64::default();
            }
            let kj = if axis == 0 {
                grid.wavenumber(i1)
            } else {
                grid.wavenumber(i2)
            };
            Complex64::new(0.0, kj / k)
        })
    };
    SpectralVector {
        components: [component(0), component(1)],
    }
}

/// Leray projector `I - k k^T / |k|^2`; the mean mode passes through.
pub fn leray_project(v: &SpectralVector) -> SpectralVector {
    let grid = v.grid().clone();
    let n = grid.n();
    let [a, b] = &v.components;
    let mut pa = a.clone();
    let mut pb = b.clone();
    let (ca, cb) = (pa.coeffs_mut(), pb.coeffs_mut());
    for i2 in 0..n {
        let k2 = grid.wavenumber(i2);
        for i1 in 0..n {
            let idx = i2 * n + i1;
            if idx == 0 {
                continue;
            }
            if grid.is_nyquist(i1, i2) {
                ca[idx] = Complex64::default();
                cb[idx] = Complex64::default();
                continue;
            }
            let k1 = grid.wavenumber(i1);
            let k_sq = k1 * k1 + k2 * k2;
            // subtract the longitudinal part (k . v) k / |k|^2
            let proj = (a.coeffs()[idx] * k1 + b.coeffs()[idx] * k2) / k_sq;
            ca[idx] = a.coeffs()[idx] - proj * k1;
            cb[idx] = b.coeffs()[idx] - proj * k2;
        }
    }
    SpectralVector { components: [pa, pb] }
}

/// Spectral gradient, multipliers `i k_j`.
pub fn gradient(f: &SpectralScalar) -> SpectralVector {
    let grid = f.grid().clone();
    let component = |axis: usize| {
        f.map_symbol(|i1, i2, _| {
            if grid.is_nyquist(i1, i2) {
                return Complex64::default();
            }
            let kj = if axis == 0 {
                grid.wavenumber(i1)
            } else {
                grid.wavenumber(i2)
            };
            Complex64::new(0.0, kj)
        })
    };
    SpectralVector {
        components: [component(0), component(1)],
    }
}

/// Partial derivative along one axis (0 or 1).
pub fn partial(f: &SpectralScalar, axis: usize) -> SpectralScalar {
    let grid = f.grid().clone();
    f.map_symbol(|i1, i2, _| {
        if grid.is_nyquist(i1, i2) {
            return Complex64::default();
        }
        let kj = if axis == 0 {
            grid.wavenumber(i1)
        } else {
            grid.wavenumber(i2)
        };
        Complex64::new(0.0, kj)
    })
}

/// Spectral divergence `i k . v`.
pub fn divergence(v: &SpectralVector) -> SpectralScalar {
    let d1 = partial(&v.components[0], 0);
    let d2 = partial(&v.components[1], 1);
    &d1 + &d2
}

/// Fields the 2/3 rule can be applied to.
pub trait Dealias: Sized {
    fn dealiased(&self) -> Self;
}

impl Dealias for SpectralScalar {
    fn dealiased(&self) -> Self {
        let grid = self.grid().clone();
        let mut out = self.clone();
        let n = grid.n();
        for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
            if grid.is_dealiased_out(idx % n, idx / n) {
                *c = Complex64::default();
            }
        }
        out
    }
}

impl Dealias for SpectralVector {
    fn dealiased(&self) -> Self {
        SpectralVector {
            components: [self.components[0].dealiased(), self.components[1].dealiased()],
        }
    }
}

/// Zero every mode with `max(|m1|, |m2|) > K`, the grid's dealiasing cutoff.
pub fn dealias<T: Dealias>(f: &T) -> T {
    f.dealiased()
}

/// Largest `|k . v(k)|` relative to the coefficient norm of `v`.
pub fn divergence_defect(v: &SpectralVector) -> f64 {
    let scale = v.coeff_norm();
    if scale == 0.0 {
        return 0.0;
    }
    let grid = v.grid();
    let n = grid.n();
    let [a, b] = &v.components;
    let mut worst: f64 = 0.0;
    for i2 in 0..n {
        for i1 in 0..n {
            let idx = i2 * n + i1;
            let d = a.coeffs()[idx] * grid.wavenumber(i1) + b.coeffs()[idx] * grid.wavenumber(i2);
            let k = grid.k_abs()[idx];
            if k > 0.0 {
                worst = worst.max(d.norm() / k);
            }
        }
    }
    worst / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::make_grid;
    use std::f64::consts::PI;

    fn close(a: &SpectralScalar, b: &SpectralScalar, tol: f64) -> bool {
        let d = (a - b).coeff_norm();
        d <= tol * a.coeff_norm().max(b.coeff_norm()).max(1e-300)
    }

    fn field(f: impl Fn(f64, f64) -> f64) -> SpectralScalar {
        let g = make_grid(16, PI).unwrap();
        SpectralScalar::from_fn(&g, f).unwrap()
    }

    #[test]
    fn half_laplacian_of_unit_mode() {
        let f = field(|x, _| x.cos());
        assert!(close(&fractional_laplacian(&f, 1.0).unwrap(), &f, 1e-14));
    }

    #[test]
    fn negative_order_on_mode_two() {
        let f = field(|x, _| (2.0 * x).cos());
        let expected = field(|x, _| 2f64.powf(-0.5) * (2.0 * x).cos());
        assert!(close(&fractional_laplacian(&f, -0.5).unwrap(), &expected, 1e-14));
    }

    #[test]
    fn minus_laplacian() {
        let f = field(|x, y| x.cos() + (2.0 * y).cos());
        let expected = field(|x, y| x.cos() + 4.0 * (2.0 * y).cos());
        assert!(close(&fractional_laplacian(&f, 2.0).unwrap(), &expected, 1e-14));
    }

    #[test]
    fn negative_order_needs_mean_free() {
        let f = field(|x, _| 1.0 + x.cos());
        assert!(matches!(fractional_laplacian(&f, -1.0), Err(Error::NonzeroMean { .. })));
        assert!(fractional_laplacian(&f, 1.0).is_ok());
        assert!(matches!(
            fractional_laplacian(&f, 4.5),
            Err(Error::ExponentOutOfRange(_))
        ));
    }

    #[test]
    fn riesz_of_cosine() {
        let f = field(|x, _| x.cos());
        let r = riesz(&f).unwrap();
        assert!(close(&r.components[0], &field(|x, _| -x.sin()), 1e-14));
        assert!(r.components[1].coeff_norm() < 1e-15);
    }

    #[test]
    fn leray_kills_gradients_and_keeps_solenoidal() {
        let g = make_grid(16, PI).unwrap();
        let grad = gradient(&field(|x, _| x.sin()));
        assert!(leray_project(&grad).coeff_norm() < 1e-15);
        let v = SpectralVector::new(field(|_, y| y.sin()), SpectralScalar::zeros(&g)).unwrap();
        let p = leray_project(&v);
        assert!((&p - &v).coeff_norm() < 1e-15);
    }

    #[test]
    fn gradient_and_divergence() {
        let grad = gradient(&field(|x, _| x.sin()));
        assert!(close(&grad.components[0], &field(|x, _| x.cos()), 1e-14));
        assert!(grad.components[1].coeff_norm() < 1e-15);
        let g = make_grid(16, PI).unwrap();
        let v = SpectralVector::new(field(|_, y| y.sin()), SpectralScalar::zeros(&g)).unwrap();
        assert!(divergence(&v).coeff_norm() < 1e-15);
    }

    #[test]
    fn divergence_of_gradient_is_minus_laplacian() {
        let f = field(|x, y| (x + 2.0 * y).sin() + (3.0 * x).cos() * y.sin());
        let lhs = divergence(&gradient(&f));
        let rhs = fractional_laplacian(&f, 2.0).unwrap().scale(-1.0);
        assert!(close(&lhs, &rhs, 1e-14));
    }

    #[test]
    fn two_thirds_cutoff() {
        let g = make_grid(16, PI).unwrap();
        let mut f = SpectralScalar::zeros(&g);
        f.set_mode(6, 0, Complex64::new(1.0, 0.0));
        f.set_mode(5, 0, Complex64::new(1.0, 0.0));
        f.set_mode(0, -6, Complex64::new(1.0, 0.0));
        let d = dealias(&f);
        assert_eq!(d.mode(6, 0), Complex64::default());
        assert_eq!(d.mode(0, -6), Complex64::default());
        assert_eq!(d.mode(5, 0), Complex64::new(1.0, 0.0));
        assert_eq!(dealias(&d).coeffs(), d.coeffs());
    }
}
