//! Closed-form linear evolutions `Q(t) = exp(-t Lambda) q0` and
//! `U(t) = exp(t Delta) u0`, the comparison solutions for the coupled flow.

use crate::error::{Error, Result};
use crate::spectral::{gradient, inverse_many, partial, Dealias, SpectralScalar, SpectralVector};

/// Fraction of spectral energy beyond the 2/3 cutoff above which a field
/// counts as under-resolved.
pub const RESOLUTION_TAIL: f64 = 1e-10;

/// Poisson semigroup, multiplier `exp(-|k| t)`.
pub fn poisson_evolve(q0: &SpectralScalar, t: f64) -> Result<SpectralScalar> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(q0.clone());
    }
    Ok(q0.map_radial(|k| (-k * t).exp()))
}

/// Heat semigroup, multiplier `exp(-|k|^2 t)` on each component.
pub fn heat_evolve(u0: &SpectralVector, t: f64) -> Result<SpectralVector> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(u0.clone());
    }
    Ok(u0.map_radial(|k| (-k * k * t).exp()))
}

/// Energy fraction outside the dealiasing cutoff.
pub fn tail_fraction(f: &SpectralScalar) -> f64 {
    let total = f.coeff_norm().powi(2);
    if total == 0.0 {
        return 0.0;
    }
    let kept = f.dealiased().coeff_norm().powi(2);
    ((total - kept) / total).max(0.0)
}

fn warn_unresolved(what: &str, fraction: f64) {
    if fraction > RESOLUTION_TAIL {
        log::warn!("{what}: {fraction:.2e} of spectral energy beyond the 2/3 cutoff");
    }
}

/// `max_x |grad f(x)|` over collocation points.
pub fn grad_sup(f: &SpectralScalar) -> f64 {
    warn_unresolved("grad_sup", tail_fraction(f));
    let g = gradient(f);
    let v = inverse_many(f.grid(), &[&g.components[0], &g.components[1]]);
    v[0].iter().zip(&v[1]).map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max)
}

/// `max_x |grad u(x)|` (Frobenius) over collocation points.
pub fn grad_sup_vector(u: &SpectralVector) -> f64 {
    let [a, b] = &u.components;
    warn_unresolved("grad_sup", tail_fraction(a).max(tail_fraction(b)));
    let parts = [partial(a, 0), partial(a, 1), partial(b, 0), partial(b, 1)];
    let v = inverse_many(u.grid(), &parts.iter().collect::<Vec<_>>());
    (0..v[0].len())
        .map(|i| v.iter().map(|p| p[i] * p[i]).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn poisson_single_mode() {
        let g = make_grid(16, PI).unwrap();
        let f = SpectralScalar::from_fn(&g, |x, _| (2.0 * x).cos()).unwrap();
        let q = poisson_evolve(&f, 1.0).unwrap();
        let expected = f.scale((-2.0f64).exp());
        assert!((&q - &expected).coeff_norm() < 1e-16);
        assert_eq!(poisson_evolve(&f, 0.0).unwrap().coeffs(), f.coeffs());
        assert!(matches!(poisson_evolve(&f, -1.0), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn heat_single_mode() {
        let g = make_grid(16, PI).unwrap();
        let u = SpectralVector::new(
            SpectralScalar::from_fn(&g, |_, y| (2.0 * y).sin()).unwrap(),
            SpectralScalar::zeros(&g),
        )
        .unwrap();
        let e = heat_evolve(&u, 1.0).unwrap();
        assert!((&e - &u.scale((-4.0f64).exp())).coeff_norm() < 1e-15 * u.coeff_norm());
        assert!(heat_evolve(&u, -0.1).is_err());
    }

    #[test]
    fn grad_sup_of_cosine() {
        let g = make_grid(16, PI).unwrap();
        let f = SpectralScalar::from_fn(&g, |x, _| x.cos()).unwrap();
        // sin attains 1 at x = pi/2, a grid point for n = 16
        assert!((grad_sup(&f) - 1.0).abs() < 1e-14);
        assert_eq!(grad_sup(&SpectralScalar::zeros(&g)), 0.0);
        assert_eq!(grad_sup_vector(&SpectralVector::zeros(&g)), 0.0);
    }
}
