//! Library outputs against closed forms and quadratures computed here,
//! independently of the transform code.

use std::f64::consts::PI;

use electroconv::config::scenario;
use electroconv::diagnostics::{column, fit_exponent, moment};
use electroconv::harness::{initial_state, simulate};
use electroconv::semigroups::{heat_evolve, poisson_evolve};
use electroconv::spectral::{l2, make_grid, PhysicalScalar, SpectralScalar};

/// `int_0^inf f(k) dk` by composite Simpson on `[0, top]`.
fn simpson(f: impl Fn(f64) -> f64, top: f64, n: usize) -> f64 {
    let h = top / n as f64;
    let mut acc = f(0.0) + f(top);
    for i in 1..n {
        acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn poisson_kernel_norm_matches_closed_form() {
    let cfg = scenario("S4_linear_oracle").unwrap();
    let q0 = initial_state(&cfg).unwrap().q_hat;
    for t in [0.0, 1.0, 3.0, 8.0] {
        let q = poisson_evolve(&q0, t).unwrap();
        let exact = 1.0 / (8.0 * PI * (1.0 + t) * (1.0 + t));
        let measured = l2(&q).powi(2);
        assert!((measured / exact - 1.0).abs() < 0.01, "t = {t}: {measured} vs {exact}");
    }
}

#[test]
fn poisson_evolved_gaussian_against_quadrature() {
    // ||exp(-t Lambda) g||^2 = (1/2 pi) int exp(-s^2 k^2 - 2 t k) k dk for unit-mass g
    let s = 2.0;
    // a box large enough that the lattice sum tracks the integral up to t = 6
    let g = make_grid(512, 80.0 * PI).unwrap();
    let c = 1.0 / (2.0 * PI * s * s);
    let q0 = SpectralScalar::forward(&PhysicalScalar::from_fn(&g, |x, y| {
        c * (-(x * x + y * y) / (2.0 * s * s)).exp()
    }))
    .unwrap();
    for t in [0.0, 0.5, 2.0, 6.0] {
        let exact = simpson(|k| (-s * s * k * k - 2.0 * t * k).exp() * k, 8.0, 4000) / (2.0 * PI);
        let measured = l2(&poisson_evolve(&q0, t).unwrap()).powi(2);
        assert!((measured / exact - 1.0).abs() < 1e-3, "t = {t}: {measured} vs {exact}");
    }
}

#[test]
fn heat_evolved_vortex_closed_form() {
    // psi = a exp(-|x|^2 / (2 s^2)) gives ||e^{t Delta} grad-perp psi||^2 = pi a^2 s^4 / (s^2 + 2t)^2
    let mut cfg = scenario("S1_sharp_decay").unwrap();
    cfg.grid.n = 256;
    let u0 = initial_state(&cfg).unwrap().u_hat;
    let (a, s) = (cfg.init.params.vortex_amplitude, cfg.init.params.vortex_width);
    for t in [0.0, 1.0, 5.0, 20.0] {
        let u = heat_evolve(&u0, t).unwrap();
        let measured = u.inner(&u);
        let exact = PI * a * a * s.powi(4) / (s * s + 2.0 * t).powi(2);
        assert!((measured / exact - 1.0).abs() < 1e-6, "t = {t}: {measured} vs {exact}");
    }
}

#[test]
fn poisson_kernel_moment() {
    // int (1 + |x|^2) P_1^2 = 1/(8 pi) + 1/(8 pi)
    let g = make_grid(512, 40.0 * PI).unwrap();
    let p1 = SpectralScalar::forward(&PhysicalScalar::from_fn(&g, |x, y| {
        (1.0 + x * x + y * y).powf(-1.5) / (2.0 * PI)
    }))
    .unwrap();
    let exact = 0.5 / PI.sqrt();
    assert!((moment(&p1) / exact - 1.0).abs() < 0.01);
}

#[test]
fn linear_run_reproduces_oracle_slope_on_short_window() {
    // inside the early window the box is invisible and the slope is -2
    let mut cfg = scenario("S4_linear_oracle").unwrap();
    cfg.grid.n = 256;
    cfg.integrator.t_end = Some(10.0);
    cfg.sampling.per_decade = 60;
    let out = simulate(&cfg, None).unwrap();
    let fit = fit_exponent(&column(&out.records, "l2q2").unwrap(), (2.0, 8.0)).unwrap();
    assert!((fit.slope + 2.0).abs() < 0.02, "slope {}", fit.slope);
}
