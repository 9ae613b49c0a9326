use electroconv::checks::{cutoff_wavenumber, random_field, random_velocity};
use electroconv::model::{tendency, SimState};
use electroconv::semigroups::{heat_evolve, poisson_evolve};
use electroconv::spectral::{
    divergence_defect, fractional_laplacian, l2, leray_project, make_grid, riesz, SpectralScalar, SpectralVector,
};
use proptest::prelude::*;

const N: usize = 32;

fn field(seed: u64, width: f64, mean: f64) -> SpectralScalar {
    let g = make_grid(N, 3.0).unwrap();
    let k0 = width * cutoff_wavenumber(&g);
    random_field(&g, seed, k0, mean).unwrap()
}

fn velocity(seed: u64, width: f64) -> SpectralVector {
    let g = make_grid(N, 3.0).unwrap();
    random_velocity(&g, seed, width * cutoff_wavenumber(&g)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(seed in any::<u64>(), width in 0.05f64..0.9, mean in -2.0f64..2.0) {
        let f = field(seed, width, mean);
        let p = f.inverse();
        prop_assert!((p.l2_norm() - l2(&f)).abs() <= 1e-12 * l2(&f));
    }

    #[test]
    fn riesz_is_an_antisymmetric_isometry(seed in any::<u64>(), width in 0.05f64..0.9) {
        let f = field(seed, width, 0.0);
        let r = riesz(&f).unwrap();
        let f2 = f.inner(&f);
        prop_assert!(f.inner(&r.components[0]).abs() <= 1e-12 * f2);
        prop_assert!(f.inner(&r.components[1]).abs() <= 1e-12 * f2);
        let g = field(seed ^ 7, width, 0.0);
        let rg = riesz(&g).unwrap();
        // <R_j f, g> = -<f, R_j g>
        for j in 0..2 {
            let lhs = r.components[j].inner(&g);
            let rhs = -f.inner(&rg.components[j]);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * l2(&f) * l2(&g));
        }
        let rn = l2(&r.components[0]).hypot(l2(&r.components[1]));
        prop_assert!((rn - l2(&f)).abs() <= 1e-12 * l2(&f));
    }

    #[test]
    fn leray_projects(seed in any::<u64>(), width in 0.05f64..0.9) {
        let v = SpectralVector::new(field(seed, width, 0.3), field(seed ^ 3, width, -0.1)).unwrap();
        let p = leray_project(&v);
        prop_assert!(divergence_defect(&p) <= 1e-12);
        prop_assert!((&leray_project(&p) - &p).coeff_norm() <= 1e-12 * v.coeff_norm());
        prop_assert!(p.coeff_norm() <= v.coeff_norm() * (1.0 + 1e-14));
    }

    #[test]
    fn fractional_powers_compose(seed in any::<u64>(), a in -1.0f64..2.0, b in -1.0f64..2.0) {
        let f = field(seed, 0.5, 0.0);
        let ab = fractional_laplacian(&fractional_laplacian(&f, a).unwrap(), b).unwrap();
        let direct = fractional_laplacian(&f, a + b).unwrap();
        prop_assert!((&ab - &direct).coeff_norm() <= 1e-12 * direct.coeff_norm());
    }

    #[test]
    fn semigroup_law(seed in any::<u64>(), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let f = field(seed, 0.5, 0.4);
        let a = poisson_evolve(&poisson_evolve(&f, s).unwrap(), t).unwrap();
        let b = poisson_evolve(&f, s + t).unwrap();
        prop_assert!((&a - &b).coeff_norm() <= 1e-13 * b.coeff_norm());
        let v = velocity(seed, 0.5);
        let ua = heat_evolve(&heat_evolve(&v, s).unwrap(), t).unwrap();
        let ub = heat_evolve(&v, s + t).unwrap();
        prop_assert!((&ua - &ub).coeff_norm() <= 1e-13 * ub.coeff_norm().max(1e-300));
    }

    #[test]
    fn semigroups_contract(seed in any::<u64>(), t in 0.0f64..3.0) {
        let f = field(seed, 0.5, 0.0);
        prop_assert!(l2(&poisson_evolve(&f, t).unwrap()) <= l2(&f) * (1.0 + 1e-14));
    }

    #[test]
    fn quadratic_terms_conserve_energy(seed in any::<u64>(), mean in -1.0f64..1.0, amp in 0.1f64..3.0) {
        let q = field(seed, 0.4, mean);
        let u = velocity(seed ^ 11, 0.4).scale(amp);
        let state = SimState::new(0.0, q.clone(), u.clone()).unwrap();
        let tend = tendency(&state).unwrap();
        let inv = fractional_laplacian(&q.mean_free(), -1.0).unwrap();
        let charge = inv.inner(&tend.q);
        let fluid = u.inner(&tend.u);
        let scale = charge.abs().max(fluid.abs()).max(1e-300);
        prop_assert!((charge + fluid).abs() <= 1e-10 * scale, "{charge} {fluid}");
        // transport alone neither creates nor destroys charge
        prop_assert!(tend.q.coeffs()[0].norm() <= 1e-15 * q.coeff_norm());
    }
}
