//! Seeded random-field checks of the operator identities and inequalities
//! the decay analysis relies on.
//!
//! Products are evaluated on a grid refined by two, so for inputs
//! band-limited by the 2/3 rule every quadratic product and every quartic
//! quadrature below is exact up to rounding.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::diagnostics::{moment, support_tail, MOMENT_TAIL_LIMIT};
use crate::error::{Error, Result};
use crate::model::DIVERGENCE_TOLERANCE;
use crate::semigroups::{heat_evolve, poisson_evolve};
use crate::spectral::{
    divergence_defect, forward_many, fractional_laplacian, inverse_many, l2, lambda_pow_mean_free, leray_project,
    partial, riesz, sobolev_inhomogeneous, Dealias, Grid, PhysicalScalar, SpectralScalar, SpectralVector,
    MEAN_TOLERANCE,
};

/// Allowed relative change of a measured constant under `n -> 2n`.
pub const REFINEMENT_DRIFT: f64 = 0.20;

/// Slack of the Cordoba-Cordoba margin relative to `||q||_{L4}^4`.
pub const CORDOBA_SLACK: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub n_trials: usize,
    /// Worst normalized margin (inequalities) or largest ratio/error.
    pub worst: f64,
    /// Largest relative change under `n -> 2n`, for refinement studies.
    pub refinement_drift: Option<f64>,
    pub seed: u64,
    pub n: usize,
    pub half_period: f64,
    pub pass: bool,
}

/// Largest wavenumber kept by the 2/3 rule, `K pi / L`.
pub fn cutoff_wavenumber(grid: &Grid) -> f64 {
    grid.dealias_cutoff() as f64 * grid.k_min()
}

/// Real Gaussian random field with spectral envelope `exp(-|k|^2 / (2 k0^2))`,
/// truncated at the 2/3 cutoff, unit fluctuation norm and the given mean.
pub fn random_field(grid: &Arc<Grid>, seed: u64, envelope_k0: f64, mean: f64) -> Result<SpectralScalar> {
    let cutoff = cutoff_wavenumber(grid);
    if !(envelope_k0 > 0.0 && envelope_k0 < cutoff) {
        return Err(Error::EnvelopeTooWide {
            k0: envelope_k0,
            cutoff,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..grid.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let white = SpectralScalar::forward(&PhysicalScalar::new(grid.clone(), noise)?)?;
    let two_k0_sq = 2.0 * envelope_k0 * envelope_k0;
    let mut f = white.map_radial(|k| (-k * k / two_k0_sq).exp()).dealiased().mean_free();
    let norm = l2(&f);
    if norm > 0.0 {
        f = f.scale(1.0 / norm);
    }
    f.coeffs_mut()[0].re = mean;
    Ok(f)
}

/// Divergence-free random velocity `(-d2 psi, d1 psi)` of unit L2 norm.
pub fn random_velocity(grid: &Arc<Grid>, seed: u64, envelope_k0: f64) -> Result<SpectralVector> {
    let psi = random_field(grid, seed, envelope_k0, 0.0)?;
    let u = SpectralVector::new(partial(&psi, 1).scale(-1.0), partial(&psi, 0))?;
    let norm = l2(&u.components[0]).hypot(l2(&u.components[1]));
    Ok(if norm > 0.0 { u.scale(1.0 / norm) } else { u })
}

/// Zero-mass pair of Gaussians centred within `L/8` of the origin.
pub fn seeded_bump(grid: &Arc<Grid>, seed: u64) -> Result<SpectralScalar> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reach = Uniform::new_inclusive(-grid.half_period() / 8.0, grid.half_period() / 8.0);
    let width = Uniform::new_inclusive(1.0, 2.0);
    let (c1, c2) = (
        (reach.sample(&mut rng), reach.sample(&mut rng)),
        (reach.sample(&mut rng), reach.sample(&mut rng)),
    );
    let (w1, w2): (f64, f64) = (width.sample(&mut rng), width.sample(&mut rng));
    let gauss = |c: (f64, f64), w: f64| {
        PhysicalScalar::from_fn(grid, move |x, y| {
            (-((x - c.0).powi(2) + (y - c.1).powi(2)) / (2.0 * w * w)).exp()
        })
    };
    let a = gauss(c1, w1);
    let b = gauss(c2, w2);
    // match the discrete masses so the mean vanishes to rounding
    let ratio = a.integral() / b.integral();
    let values: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| x - ratio * y).collect();
    SpectralScalar::forward(&PhysicalScalar::new(grid.clone(), values)?)
}

/// Grid with twice the resolution over the same box.
pub fn refined_grid(grid: &Grid) -> Result<Arc<Grid>> {
    Grid::new(2 * grid.n(), grid.half_period())
}

/// Normalized Cordoba-Cordoba margin on a caller-supplied refined grid.
fn cordoba_on(q: &SpectralScalar, fine: &Arc<Grid>) -> Result<(f64, f64)> {
    let qf = q.resample(fine)?;
    let lq = fractional_laplacian(&qf, 1.0)?;
    let phys = inverse_many(fine, &[&qf, &lq]);
    let h = fine.spacing();
    let (mut lhs, mut scale) = (0.0, 0.0);
    let sq: Vec<f64> = phys[0].iter().map(|v| v * v).collect();
    for (v, w) in phys[0].iter().zip(&phys[1]) {
        lhs += v * v * v * w;
        scale += v.powi(4);
    }
    lhs *= h * h;
    scale *= h * h;
    let q2 = SpectralScalar::from_raw(fine.clone(), forward_many(fine, &[&sq]).pop().unwrap());
    let rhs = 0.5 * l2(&fractional_laplacian(&q2, 0.5)?).powi(2);
    Ok((lhs - rhs, scale))
}

/// `int q^3 Lambda q - 1/2 ||Lambda^{1/2}(q^2)||^2`, which must be non-negative.
pub fn check_cordoba(q: &SpectralScalar) -> Result<f64> {
    let fine = refined_grid(q.grid())?;
    Ok(cordoba_on(q, &fine)?.0)
}

fn weight(grid: &Arc<Grid>) -> PhysicalScalar {
    PhysicalScalar::from_fn(grid, |x, y| (1.0 + x * x + y * y).sqrt())
}

/// `||a Lambda q - Lambda(a q)|| / ||q||` with `a = sqrt(1 + |x|^2)`.
pub fn check_weight_commutator(q: &SpectralScalar) -> Result<f64> {
    let norm_q = l2(q);
    if norm_q == 0.0 {
        return Ok(0.0);
    }
    let tail = support_tail(q);
    if tail > MOMENT_TAIL_LIMIT {
        return Err(Error::SupportViolation { tail_fraction: tail });
    }
    let grid = q.grid().clone();
    let a = weight(&grid);
    let lq = fractional_laplacian(q, 1.0)?;
    let phys = inverse_many(&grid, &[q, &lq]);
    let aq: Vec<f64> = a.values().iter().zip(&phys[0]).map(|(w, v)| w * v).collect();
    let aq_hat = SpectralScalar::from_raw(grid.clone(), forward_many(&grid, &[&aq]).pop().unwrap());
    let l_aq = fractional_laplacian(&aq_hat, 1.0)?.inverse();
    let h = grid.spacing();
    let diff: f64 = a
        .values()
        .iter()
        .zip(&phys[1])
        .zip(l_aq.values())
        .map(|((w, lv), r)| (w * lv - r).powi(2))
        .sum();
    Ok((diff * h * h).sqrt() / norm_q)
}

fn advect_on(u: &[Vec<f64>], f: &SpectralScalar, fine: &Arc<Grid>) -> SpectralScalar {
    let d = inverse_many(fine, &[&partial(f, 0), &partial(f, 1)]);
    let prod: Vec<f64> = (0..fine.len()).map(|i| u[0][i] * d[0][i] + u[1][i] * d[1][i]).collect();
    SpectralScalar::from_raw(fine.clone(), forward_many(fine, &[&prod]).pop().unwrap())
}

fn halfinv_on(u: &SpectralVector, q: &SpectralScalar, fine: &Arc<Grid>) -> Result<f64> {
    let scale = sobolev_inhomogeneous(u, 2.0) * l2(q);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let uf = u.resample(fine)?;
    let qf = q.resample(fine)?;
    let up = inverse_many(fine, &[&uf.components[0], &uf.components[1]]);
    let first = lambda_pow_mean_free(&advect_on(&up, &qf, fine), -0.5);
    let second = advect_on(&up, &lambda_pow_mean_free(&qf, -0.5), fine);
    Ok(l2(&(&first - &second)) / scale)
}

/// `||Lambda^{-1/2}(u . grad q) - u . grad Lambda^{-1/2} q|| / (||u||_{H2} ||q||)`.
pub fn check_halfinv_commutator(u: &SpectralVector, q: &SpectralScalar) -> Result<f64> {
    let defect = divergence_defect(u);
    if defect > DIVERGENCE_TOLERANCE {
        return Err(Error::NotDivergenceFree(defect));
    }
    let mean = q.coeffs()[0].norm();
    if mean > MEAN_TOLERANCE * q.coeff_norm() {
        return Err(Error::NonzeroMean {
            mean,
            scale: q.coeff_norm(),
        });
    }
    let fine = refined_grid(q.grid())?;
    halfinv_on(u, q, &fine)
}

/// `P(q R q)` computed on the refined grid and read back on the modes of `q`.
pub fn projected_force(q: &SpectralScalar) -> Result<SpectralVector> {
    let fine = refined_grid(q.grid())?;
    let qf = q.resample(&fine)?;
    let rq = riesz(&qf)?;
    let p = inverse_many(&fine, &[&qf, &rq.components[0], &rq.components[1]]);
    let f1: Vec<f64> = p[0].iter().zip(&p[1]).map(|(a, b)| a * b).collect();
    let f2: Vec<f64> = p[0].iter().zip(&p[2]).map(|(a, b)| a * b).collect();
    let mut s = forward_many(&fine, &[&f1, &f2]).into_iter();
    let force = SpectralVector::new(
        SpectralScalar::from_raw(fine.clone(), s.next().unwrap()),
        SpectralScalar::from_raw(fine.clone(), s.next().unwrap()),
    )?;
    leray_project(&force).resample(q.grid())
}

/// `max_k |P(qRq)(k)| (2L)^2 / (|k| ||q|| M(q))` over `modes`.
pub fn check_force_lowmode(q: &SpectralScalar, modes: &[(i64, i64)]) -> Result<f64> {
    for &(m1, m2) in modes {
        if m1 == 0 && m2 == 0 {
            return Err(Error::ZeroMode(m1, m2));
        }
    }
    let norm_q = l2(q);
    if norm_q == 0.0 {
        return Ok(0.0);
    }
    let tail = support_tail(q);
    if tail > MOMENT_TAIL_LIMIT {
        return Err(Error::SupportViolation { tail_fraction: tail });
    }
    let force = projected_force(q)?;
    let probes = crate::diagnostics::fourier_probe_vector(&force, modes)?;
    let m = moment(q);
    Ok(probes.into_iter().fold(0.0, f64::max) / (norm_q * m))
}

/// Parameters for the seeded sweeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub n: usize,
    pub half_period: f64,
    pub seed: u64,
    pub trials: usize,
    pub bump_trials: usize,
    pub probe_modes: Vec<(i64, i64)>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: 128,
            half_period: 8.0 * std::f64::consts::PI,
            seed: 0,
            trials: 100,
            bump_trials: 20,
            probe_modes: crate::diagnostics::DEFAULT_PROBE_MODES.to_vec(),
        }
    }
}

fn report(name: &str, cfg: &SuiteConfig, n_trials: usize, worst: f64, drift: Option<f64>, pass: bool) -> CheckReport {
    CheckReport {
        name: name.into(),
        n_trials,
        worst,
        refinement_drift: drift,
        seed: cfg.seed,
        n: cfg.n,
        half_period: cfg.half_period,
        pass,
    }
}

fn trial_seed(base: u64, i: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64)
}

fn relative_change(coarse: f64, fine: f64) -> f64 {
    if fine == 0.0 && coarse == 0.0 {
        0.0
    } else {
        (fine - coarse).abs() / fine.abs().max(coarse.abs())
    }
}

/// Exact spectral identities on seeded band-limited fields.
pub fn identity_suite(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let grid = Grid::new(cfg.n, cfg.half_period)?;
    let k0 = cutoff_wavenumber(&grid) / 2.0;
    let (mut antisym, mut riesz_norm, mut parseval, mut round_trip) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut leray_div, mut leray_idem, mut semigroup, mut composition) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..cfg.trials {
        let seed = trial_seed(cfg.seed, i);
        let f = random_field(&grid, seed, k0, 0.0)?;
        let f2 = f.inner(&f);
        let r = riesz(&f)?;
        antisym = antisym.max(f.inner(&r.components[0]).abs().max(f.inner(&r.components[1]).abs()) / f2);
        let rn = l2(&r.components[0]).hypot(l2(&r.components[1]));
        riesz_norm = riesz_norm.max((rn - l2(&f)).abs() / l2(&f));

        let phys = f.inverse();
        parseval = parseval.max((phys.l2_norm() - l2(&f)).abs() / l2(&f));
        let back = SpectralScalar::forward(&phys)?;
        round_trip = round_trip.max((&back - &f).coeff_norm() / f.coeff_norm());

        let v = SpectralVector::new(
            random_field(&grid, seed ^ 1, k0, 0.0)?,
            random_field(&grid, seed ^ 2, k0, 0.0)?,
        )?;
        let p = leray_project(&v);
        let vn = v.coeff_norm();
        leray_div = leray_div.max(divergence_defect(&p));
        leray_idem = leray_idem.max((&leray_project(&p) - &p).coeff_norm() / vn);

        let (s, t) = (0.37, 1.9);
        let a = poisson_evolve(&poisson_evolve(&f, s)?, t)?;
        let b = poisson_evolve(&f, s + t)?;
        let ua = heat_evolve(&heat_evolve(&v, s)?, t)?;
        let ub = heat_evolve(&v, s + t)?;
        semigroup = semigroup
            .max((&a - &b).coeff_norm() / b.coeff_norm())
            .max((&ua - &ub).coeff_norm() / ub.coeff_norm());

        let ab = fractional_laplacian(&fractional_laplacian(&f, 0.5)?, -1.5)?;
        let direct = fractional_laplacian(&f, -1.0)?;
        composition = composition.max((&ab - &direct).coeff_norm() / direct.coeff_norm());
    }
    let n = cfg.trials;
    Ok(vec![
        report("riesz_antisymmetry", cfg, n, antisym, None, antisym <= 1e-12),
        report("riesz_isometry", cfg, n, riesz_norm, None, riesz_norm <= 1e-12),
        report("parseval", cfg, n, parseval, None, parseval <= 1e-12),
        report("transform_round_trip", cfg, n, round_trip, None, round_trip <= 1e-12),
        report("leray_divergence", cfg, n, leray_div, None, leray_div <= 1e-12),
        report("leray_idempotence", cfg, n, leray_idem, None, leray_idem <= 1e-12),
        report("semigroup_law", cfg, n, semigroup, None, semigroup <= 1e-13),
        report(
            "fractional_composition",
            cfg,
            n,
            composition,
            None,
            composition <= 1e-12,
        ),
    ])
}

/// Cordoba-Cordoba margins over seeded random fields.
pub fn cordoba_suite(cfg: &SuiteConfig) -> Result<CheckReport> {
    let grid = Grid::new(cfg.n, cfg.half_period)?;
    let fine = refined_grid(&grid)?;
    let k0 = cutoff_wavenumber(&grid) / 4.0;
    let mut worst = f64::INFINITY;
    for i in 0..cfg.trials {
        let q = random_field(&grid, trial_seed(cfg.seed, i), k0, 0.0)?;
        let (margin, scale) = cordoba_on(&q, &fine)?;
        worst = worst.min(margin / scale);
    }
    Ok(report("cordoba", cfg, cfg.trials, worst, None, worst >= -CORDOBA_SLACK))
}

fn refinement_report(
    name: &str,
    cfg: &SuiteConfig,
    trials: usize,
    mut ratio_at: impl FnMut(usize, bool) -> Result<f64>,
) -> Result<CheckReport> {
    let (mut worst, mut drift) = (0.0f64, 0.0f64);
    for i in 0..trials {
        let coarse = ratio_at(i, false)?;
        let fine = ratio_at(i, true)?;
        worst = worst.max(coarse).max(fine);
        drift = drift.max(relative_change(coarse, fine));
    }
    let pass = worst.is_finite() && drift <= REFINEMENT_DRIFT;
    Ok(report(name, cfg, trials, worst, Some(drift), pass))
}

/// Weighted commutator ratio on seeded bumps at `n` and `2n`.
pub fn weight_commutator_suite(cfg: &SuiteConfig) -> Result<CheckReport> {
    let coarse = Grid::new(cfg.n, cfg.half_period)?;
    let fine = refined_grid(&coarse)?;
    refinement_report("weight_commutator", cfg, cfg.bump_trials, |i, refined| {
        let g = if refined { &fine } else { &coarse };
        check_weight_commutator(&seeded_bump(g, trial_seed(cfg.seed, i))?)
    })
}

/// Half-inverse advection commutator on seeded pairs at `n` and `2n`.
pub fn halfinv_commutator_suite(cfg: &SuiteConfig) -> Result<CheckReport> {
    let coarse = Grid::new(cfg.n, cfg.half_period)?;
    let mid = refined_grid(&coarse)?;
    let top = refined_grid(&mid)?;
    let k0 = cutoff_wavenumber(&coarse) / 4.0;
    refinement_report("halfinv_commutator", cfg, cfg.trials, |i, refined| {
        let seed = trial_seed(cfg.seed, i);
        let u = random_velocity(&coarse, seed, k0)?;
        let q = random_field(&coarse, seed ^ 0x5a5a, k0, 0.0)?;
        if refined {
            halfinv_on(&u.resample(&mid)?, &q.resample(&mid)?, &top)
        } else {
            halfinv_on(&u, &q, &mid)
        }
    })
}

/// Low-mode force bound on seeded bumps at `n` and `2n`.
pub fn force_lowmode_suite(cfg: &SuiteConfig) -> Result<CheckReport> {
    let coarse = Grid::new(cfg.n, cfg.half_period)?;
    let fine = refined_grid(&coarse)?;
    refinement_report("force_lowmode", cfg, cfg.bump_trials, |i, refined| {
        let g = if refined { &fine } else { &coarse };
        check_force_lowmode(&seeded_bump(g, trial_seed(cfg.seed, i))?, &cfg.probe_modes)
    })
}

/// Everything above, in a fixed order.
pub fn full_suite(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let mut out = identity_suite(cfg)?;
    out.push(cordoba_suite(cfg)?);
    out.push(weight_commutator_suite(cfg)?);
    out.push(halfinv_commutator_suite(cfg)?);
    out.push(force_lowmode_suite(cfg)?);
    Ok(out)
}

/// Mean coefficient of `P(q R q)`; vanishes because `R` is antisymmetric.
pub fn force_mean(q: &SpectralScalar) -> Result<f64> {
    let f = projected_force(q)?;
    Ok(f.components[0].coeffs()[0]
        .norm()
        .hypot(f.components[1].coeffs()[0].norm()))
}
