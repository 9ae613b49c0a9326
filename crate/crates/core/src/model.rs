//! Nonlinear right-hand sides of the charge and velocity equations.
//!
//! The linear parts (`-Lambda q`, `Delta u`) are excluded here; the
//! integrator applies them exactly through integrating factors.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{
    divergence, divergence_defect, forward_many, inverse_many, leray_project, partial, riesz_unchecked, Dealias, Grid,
    SpectralScalar, SpectralVector,
};

/// Divergence tolerance (relative) above which a velocity is rejected.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

/// Solver state: time, charge density and divergence-free velocity.
#[derive(Clone, Debug)]
pub struct SimState {
    pub t: f64,
    pub q_hat: SpectralScalar,
    pub u_hat: SpectralVector,
}

impl SimState {
    pub fn new(t: f64, q_hat: SpectralScalar, u_hat: SpectralVector) -> Result<Self> {
        if !q_hat.grid().same_as(u_hat.grid()) {
            return Err(Error::GridMismatch);
        }
        let state = SimState { t, q_hat, u_hat };
        state.check_divergence()?;
        Ok(state)
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        SimState {
            t: 0.0,
            q_hat: SpectralScalar::zeros(grid),
            u_hat: SpectralVector::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.q_hat.grid()
    }

    pub fn check_divergence(&self) -> Result<()> {
        let defect = divergence_defect(&self.u_hat);
        if defect > DIVERGENCE_TOLERANCE {
            return Err(Error::NotDivergenceFree(defect));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.q_hat.is_finite() && self.u_hat.is_finite()
    }
}

/// The three quadratic terms, each dealiased, before sign and projection.
pub(crate) struct Nonlinear {
    /// `dealias(u q)`
    pub flux_q: SpectralVector,
    /// `dealias((u . grad) u)`
    pub advect_u: SpectralVector,
    /// `dealias(q R q)`
    pub force_u: SpectralVector,
    pub u_max: f64,
}

pub(crate) fn nonlinear_terms(state: &SimState) -> Result<Nonlinear> {
    state.check_divergence()?;
    let grid = state.grid().clone();
    let q = &state.q_hat;
    let [u1, u2] = &state.u_hat.components;
    let rq = riesz_unchecked(&q.mean_free());
    let d11 = partial(u1, 0);
    let d12 = partial(u1, 1);
    let d21 = partial(u2, 0);
    let d22 = partial(u2, 1);
    let phys = inverse_many(
        &grid,
        &[q, u1, u2, &d11, &d12, &d21, &d22, &rq.components[0], &rq.components[1]],
    );
    let [qp, u1p, u2p, d11p, d12p, d21p, d22p, r1p, r2p] = &phys[..] else {
        unreachable!()
    };
    let len = grid.len();
    let mut f1 = vec![0.0; len];
    let mut f2 = vec![0.0; len];
    let mut a1 = vec![0.0; len];
    let mut a2 = vec![0.0; len];
    let mut g1 = vec![0.0; len];
    let mut g2 = vec![0.0; len];
    let mut u_max_sq: f64 = 0.0;
    for i in 0..len {
        let (qv, v1, v2) = (qp[i], u1p[i], u2p[i]);
        f1[i] = v1 * qv;
        f2[i] = v2 * qv;
        a1[i] = v1 * d11p[i] + v2 * d12p[i];
        a2[i] = v1 * d21p[i] + v2 * d22p[i];
        g1[i] = qv * r1p[i];
        g2[i] = qv * r2p[i];
        u_max_sq = u_max_sq.max(v1 * v1 + v2 * v2);
    }
    let mut spec = forward_many(&grid, &[&f1, &f2, &a1, &a2, &g1, &g2]).into_iter();
    let mut next = || SpectralScalar::from_raw(grid.clone(), spec.next().unwrap());
    let pair = |a: SpectralScalar, b: SpectralScalar| SpectralVector { components: [a, b] }.dealiased();
    let flux_q = pair(next(), next());
    let advect_u = pair(next(), next());
    let force_u = pair(next(), next());
    Ok(Nonlinear {
        flux_q,
        advect_u,
        force_u,
        u_max: u_max_sq.sqrt(),
    })
}

/// Both tendencies plus `max |u|` from one set of transforms.
#[derive(Clone, Debug)]
pub struct Tendency {
    pub q: SpectralScalar,
    pub u: SpectralVector,
    pub u_max: f64,
}

pub fn tendency(state: &SimState) -> Result<Tendency> {
    let nl = nonlinear_terms(state)?;
    Ok(assemble(nl))
}

fn assemble(nl: Nonlinear) -> Tendency {
    let q = divergence(&nl.flux_q).scale(-1.0);
    let total = nl.advect_u.axpy(1.0, &nl.force_u);
    let u = leray_project(&total).scale(-1.0);
    Tendency { q, u, u_max: nl.u_max }
}

/// `-dealias(div(u q))`.
pub fn rhs_q(state: &SimState) -> Result<SpectralScalar> {
    Ok(tendency(state)?.q)
}

/// `-P dealias((u . grad) u) - P dealias(q R q)`.
pub fn rhs_u(state: &SimState) -> Result<SpectralVector> {
    Ok(tendency(state)?.u)
}

/// `E = 1/2 ||Lambda^{-1/2} q||^2 + 1/2 ||u||^2`, mean of `q` excluded.
pub fn energy(state: &SimState) -> f64 {
    let area = state.grid().box_size().powi(2);
    let q_part: f64 = state
        .q_hat
        .coeffs()
        .iter()
        .zip(state.grid().k_abs())
        .filter(|(_, &k)| k > 0.0)
        .map(|(c, &k)| c.norm_sqr() / k)
        .sum::<f64>()
        * area;
    let u_part = state.u_hat.inner(&state.u_hat);
    0.5 * (q_part + u_part)
}

/// `D = ||q||^2 + ||grad u||^2`, mean of `q` excluded.
pub fn dissipation(state: &SimState) -> f64 {
    let q = state.q_hat.mean_free();
    let grad_u = state.u_hat.map_radial(|k| k);
    q.inner(&q) + grad_u.inner(&grad_u)
}

/// Residual of the discrete energy identity between two states,
/// `|(E(b) - E(a)) / (t_b - t_a) + (D(a) + D(b)) / 2|`.
pub fn energy_residual(a: &SimState, b: &SimState) -> Result<f64> {
    if a.t.is_nan() || b.t.is_nan() || b.t <= a.t {
        return Err(Error::InvalidInterval { t_a: a.t, t_b: b.t });
    }
    let rate = (energy(b) - energy(a)) / (b.t - a.t);
    Ok((rate + 0.5 * (dissipation(a) + dissipation(b))).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn state(q: impl Fn(f64, f64) -> f64, u1: impl Fn(f64, f64) -> f64) -> SimState {
        let g = make_grid(16, PI).unwrap();
        let q = SpectralScalar::from_fn(&g, q).unwrap();
        let u = SpectralVector::new(SpectralScalar::from_fn(&g, u1).unwrap(), SpectralScalar::zeros(&g)).unwrap();
        SimState::new(0.0, q, u).unwrap()
    }

    #[test]
    fn shear_advecting_charge() {
        // div((sin x2, 0) sin x1) = sin x2 cos x1
        let s = state(|x, _| x.sin(), |_, y| y.sin());
        let r = rhs_q(&s).unwrap();
        let g = s.grid().clone();
        let expected = SpectralScalar::from_fn(&g, |x, y| -y.sin() * x.cos()).unwrap();
        assert!((&r - &expected).coeff_norm() < 1e-15);
        assert_eq!(r.coeffs()[0], Complex64::default());
    }

    #[test]
    fn zero_velocity_gives_zero_charge_tendency() {
        let s = state(|x, y| x.cos() + (2.0 * y).sin(), |_, _| 0.0);
        assert!(rhs_q(&s).unwrap().coeff_norm() < 1e-15 * s.q_hat.coeff_norm());
    }

    #[test]
    fn shear_flow_is_steady_under_advection() {
        let s = state(|_, _| 0.0, |_, y| y.sin());
        assert!(rhs_u(&s).unwrap().coeff_norm() < 1e-16);
    }

    #[test]
    fn electric_force_of_single_mode_is_a_gradient() {
        let s = state(|x, _| x.cos(), |_, _| 0.0);
        assert!(rhs_u(&s).unwrap().coeff_norm() < 1e-16);
    }

    #[test]
    fn zero_state() {
        let g = make_grid(16, PI).unwrap();
        let s = SimState::zeros(&g);
        let t = tendency(&s).unwrap();
        assert_eq!(t.q.coeff_norm(), 0.0);
        assert_eq!(t.u.coeff_norm(), 0.0);
        assert_eq!(t.u_max, 0.0);
    }

    #[test]
    fn rejects_compressible_velocity() {
        let g = make_grid(16, PI).unwrap();
        let u = SpectralVector::new(
            SpectralScalar::from_fn(&g, |x, _| x.sin()).unwrap(),
            SpectralScalar::zeros(&g),
        )
        .unwrap();
        let err = SimState::new(0.0, SpectralScalar::zeros(&g), u);
        assert!(matches!(err, Err(Error::NotDivergenceFree(_))));
    }

    #[test]
    fn energy_residual_interval() {
        let g = make_grid(16, PI).unwrap();
        let a = SimState::zeros(&g);
        let mut b = a.clone();
        assert!(energy_residual(&a, &b).is_err());
        b.t = 1.0;
        assert_eq!(energy_residual(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn energy_of_unit_mode() {
        // 1/2 ||Lambda^{-1/2} cos x1||^2 = 1/2 * 2 pi^2
        let s = state(|x, _| 1.0 + x.cos(), |_, _| 0.0);
        assert!((energy(&s) - PI * PI).abs() < 1e-12);
        assert!((dissipation(&s) - 2.0 * PI * PI).abs() < 1e-12);
    }
}
