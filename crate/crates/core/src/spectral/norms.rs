use super::field::{inverse_many, SpectralScalar, SpectralVector};
use super::ops::{fractional_laplacian, gradient, partial};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormKind {
    L2,
    L4,
    Linf,
    /// Homogeneous Sobolev norm `||Lambda^s f||_{L2}`.
    Hs(f64),
    /// `||f||_{L4} + ||grad f||_{L4}`.
    W14,
}

/// `||f||_{L2}` by Parseval: `(2L) sqrt(sum |c|^2)`.
pub fn l2(f: &SpectralScalar) -> f64 {
    f.grid().box_size() * f.coeff_norm()
}

/// Collocation quadrature of `int (sum_i g_i^2)^2 dx`, returned as the L4 norm.
fn l4_of_magnitude(parts: &[Vec<f64>], h: f64) -> f64 {
    let len = parts[0].len();
    let mut acc = 0.0;
    for i in 0..len {
        let s: f64 = parts.iter().map(|p| p[i] * p[i]).sum();
        acc += s * s;
    }
    (acc * h * h).powf(0.25)
}

fn linf_of_magnitude(parts: &[Vec<f64>]) -> f64 {
    let len = parts[0].len();
    (0..len)
        .map(|i| parts.iter().map(|p| p[i] * p[i]).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

pub fn norm(f: &SpectralScalar, kind: NormKind) -> Result<f64> {
    let grid = f.grid();
    let h = grid.spacing();
    Ok(match kind {
        NormKind::L2 => l2(f),
        NormKind::L4 => l4_of_magnitude(&inverse_many(grid, &[f]), h),
        NormKind::Linf => linf_of_magnitude(&inverse_many(grid, &[f])),
        NormKind::Hs(s) => l2(&fractional_laplacian(f, s)?),
        NormKind::W14 => {
            let g = gradient(f);
            let vals = inverse_many(grid, &[f, &g.components[0], &g.components[1]]);
            l4_of_magnitude(&vals[..1], h) + l4_of_magnitude(&vals[1..], h)
        }
    })
}

/// Norms of a vector field use the pointwise Euclidean magnitude (Frobenius
/// for the gradient).
pub fn vector_norm(v: &SpectralVector, kind: NormKind) -> Result<f64> {
    let grid = v.grid();
    let h = grid.spacing();
    let [a, b] = &v.components;
    Ok(match kind {
        NormKind::L2 => l2(a).hypot(l2(b)),
        NormKind::L4 => l4_of_magnitude(&inverse_many(grid, &[a, b]), h),
        NormKind::Linf => linf_of_magnitude(&inverse_many(grid, &[a, b])),
        NormKind::Hs(s) => l2(&fractional_laplacian(a, s)?).hypot(l2(&fractional_laplacian(b, s)?)),
        NormKind::W14 => {
            let da1 = partial(a, 0);
            let da2 = partial(a, 1);
            let db1 = partial(b, 0);
            let db2 = partial(b, 1);
            let vals = inverse_many(grid, &[a, b, &da1, &da2, &db1, &db2]);
            l4_of_magnitude(&vals[..2], h) + l4_of_magnitude(&vals[2..], h)
        }
    })
}

/// Inhomogeneous `||f||_{H^s}` with weight `(1 + |k|^2)^{s/2}`.
pub fn sobolev_inhomogeneous(v: &SpectralVector, s: f64) -> f64 {
    let w = v.map_radial(|k| (1.0 + k * k).powf(s / 2.0));
    l2(&w.components[0]).hypot(l2(&w.components[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::make_grid;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn cosine_l2_matches_closed_form() {
        let g = make_grid(16, PI).unwrap();
        let f = SpectralScalar::from_fn(&g, |x, _| x.cos()).unwrap();
        let expected = PI * SQRT_2;
        assert!((norm(&f, NormKind::L2).unwrap() - expected).abs() < 1e-13);
        assert!((f.inverse().l2_norm() - expected).abs() < 1e-13);
        // int cos^4 = (3/8)(2 pi)^2
        let l4 = (1.5 * PI * PI).powf(0.25);
        assert!((norm(&f, NormKind::L4).unwrap() - l4).abs() < 1e-13);
        assert!((norm(&f, NormKind::Linf).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_field_has_zero_norms() {
        let g = make_grid(16, PI).unwrap();
        let z = SpectralScalar::zeros(&g);
        for kind in [
            NormKind::L2,
            NormKind::L4,
            NormKind::Linf,
            NormKind::Hs(-0.5),
            NormKind::W14,
        ] {
            assert_eq!(norm(&z, kind).unwrap(), 0.0);
        }
    }

    #[test]
    fn negative_sobolev_on_single_mode() {
        let g = make_grid(16, PI).unwrap();
        let f = SpectralScalar::from_fn(&g, |x, _| (2.0 * x).cos()).unwrap();
        let expected = 2f64.powf(-0.5) * PI * SQRT_2;
        assert!((norm(&f, NormKind::Hs(-0.5)).unwrap() - expected).abs() < 1e-13);
        let shifted = SpectralScalar::from_fn(&g, |x, _| 1.0 + x.cos()).unwrap();
        assert!(norm(&shifted, NormKind::Hs(-1.0)).is_err());
    }

    #[test]
    fn w14_of_cosine() {
        // ||cos||_4 + ||sin||_4, both (3 pi^2 / 2)^{1/4}
        let g = make_grid(16, PI).unwrap();
        let f = SpectralScalar::from_fn(&g, |x, _| x.cos()).unwrap();
        let expected = 2.0 * (1.5 * PI * PI).powf(0.25);
        assert!((norm(&f, NormKind::W14).unwrap() - expected).abs() < 1e-12);
    }
}
