//! Per-sample norms, moments, shell energies and low-mode probes, and the
//! log-log fits that turn a time series into a decay exponent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SimState;
use crate::spectral::{inverse_many, partial, Grid, SpectralScalar, SpectralVector};

/// Minimum number of samples a fit window must contain.
pub const MIN_FIT_SAMPLES: usize = 20;

/// Largest fraction of `||q||^2` allowed outside the central half of the box
/// before the moment is flagged.
pub const MOMENT_TAIL_LIMIT: f64 = 0.01;

/// Low modes probed by default: `|k|` between `k_min` and `sqrt(5) k_min`.
pub const DEFAULT_PROBE_MODES: [(i64, i64); 8] = [(1, 0), (0, 1), (1, 1), (1, -1), (2, 0), (0, 2), (2, 1), (1, 2)];

/// Fourier-splitting radius `coefficient * r^r_power / (1 + t)^time_exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingRadius {
    pub r: f64,
    pub coefficient: f64,
    pub r_power: f64,
    pub time_exponent: f64,
}

impl SplittingRadius {
    /// `rho(t) = r / (2 (t + 1))`, the charge-equation radius.
    pub fn charge(r: f64) -> Self {
        SplittingRadius {
            r,
            coefficient: 0.5,
            r_power: 1.0,
            time_exponent: 1.0,
        }
    }

    /// `rho_1(t) = sqrt(r / (t + 1))`, the velocity-equation radius.
    pub fn velocity(r: f64) -> Self {
        SplittingRadius {
            r,
            coefficient: 1.0,
            r_power: 0.5,
            time_exponent: 0.5,
        }
    }

    pub fn at(&self, t: f64) -> f64 {
        self.coefficient * self.r.powf(self.r_power) / (1.0 + t).powf(self.time_exponent)
    }
}

/// One sampling instant. Squared norms unless the name says otherwise.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub l2q2: f64,
    pub l2u2: f64,
    pub l4q4: f64,
    pub h1q2: f64,
    pub h1u2: f64,
    pub h2q2: f64,
    pub h2u2: f64,
    /// `||u||_{L4} + ||grad u||_{L4}` (not squared).
    pub w14u: f64,
    /// `||sqrt(1 + |x|^2) q||_{L2}` (not squared).
    pub moment: f64,
    pub mean_q: f64,
    pub diffq2: f64,
    pub diffu2: f64,
    pub shell_low_q: f64,
    pub shell_high_q: f64,
    /// `max_k |zeta(k)| / |k|` over the probe modes, whole-plane normalization.
    pub probe_zeta_max: f64,
    /// `max_k |v(k)| / |k|` over the probe modes, whole-plane normalization.
    pub probe_v_max: f64,
}

/// `(2L)^2 sum w(|k|) |c|^2`.
fn weighted_energy(f: &SpectralScalar, weight: impl Fn(f64) -> f64) -> f64 {
    let area = f.grid().box_size().powi(2);
    f.coeffs()
        .iter()
        .zip(f.grid().k_abs())
        .map(|(c, &k)| weight(k) * c.norm_sqr())
        .sum::<f64>()
        * area
}

fn vector_energy(u: &SpectralVector, weight: impl Fn(f64) -> f64 + Copy) -> f64 {
    weighted_energy(&u.components[0], weight) + weighted_energy(&u.components[1], weight)
}

fn l4_fourth(parts: &[&Vec<f64>], h: f64) -> f64 {
    let len = parts[0].len();
    let mut acc = 0.0;
    for i in 0..len {
        let s: f64 = parts.iter().map(|p| p[i] * p[i]).sum();
        acc += s * s;
    }
    acc * h * h
}

/// Moment and the fraction of `int q^2` outside `[-L/2, L/2)^2`.
fn moment_from_values(grid: &Grid, values: &[f64]) -> (f64, f64) {
    let n = grid.n();
    let h = grid.spacing();
    let half = grid.half_period() / 2.0;
    let xs = grid.coordinates();
    let (mut weighted, mut total, mut outside) = (0.0, 0.0, 0.0);
    for (j2, row) in values.chunks(n).enumerate() {
        let x2 = xs[j2];
        for (j1, &q) in row.iter().enumerate() {
            let x1 = xs[j1];
            let q2 = q * q;
            // collocation coordinates already are the minimal images in [-L, L)
            weighted += (1.0 + x1 * x1 + x2 * x2) * q2;
            total += q2;
            if !(-half..half).contains(&x1) || !(-half..half).contains(&x2) {
                outside += q2;
            }
        }
    }
    let tail = if total > 0.0 { outside / total } else { 0.0 };
    ((weighted * h * h).sqrt(), tail)
}

fn flag_support(tail: f64) {
    if tail > MOMENT_TAIL_LIMIT {
        log::warn!("moment: {tail:.3e} of ||q||^2 lies outside the central half of the box");
    }
}

/// `M = ||a q||_{L2}` with `a(x) = sqrt(|x|^2 + 1)`.
pub fn moment(q_hat: &SpectralScalar) -> f64 {
    let values = inverse_many(q_hat.grid(), &[q_hat]).pop().unwrap();
    let (m, tail) = moment_from_values(q_hat.grid(), &values);
    flag_support(tail);
    m
}

/// Fraction of `||q||^2` outside the central half of the box.
pub fn support_tail(q_hat: &SpectralScalar) -> f64 {
    let values = inverse_many(q_hat.grid(), &[q_hat]).pop().unwrap();
    moment_from_values(q_hat.grid(), &values).1
}

fn probe_indices(grid: &Grid, modes: &[(i64, i64)]) -> Result<Vec<(usize, f64)>> {
    let cutoff = grid.dealias_cutoff();
    modes
        .iter()
        .map(|&(m1, m2)| {
            if m1 == 0 && m2 == 0 {
                return Err(Error::ZeroMode(m1, m2));
            }
            if m1.abs() > cutoff || m2.abs() > cutoff {
                return Err(Error::ModeOutOfBand(m1, m2));
            }
            let idx = grid.index_of(m1, m2).ok_or(Error::ModeOutOfBand(m1, m2))?;
            Ok((idx, grid.k_abs()[idx]))
        })
        .collect()
}

/// `|c(k)| (2L)^2 / |k|` for each probe mode.
pub fn fourier_probe(f: &SpectralScalar, modes: &[(i64, i64)]) -> Result<Vec<f64>> {
    let area = f.grid().box_size().powi(2);
    Ok(probe_indices(f.grid(), modes)?
        .into_iter()
        .map(|(i, k)| f.coeffs()[i].norm() * area / k)
        .collect())
}

/// Vector version of [`fourier_probe`], using `|v(k)| = sqrt(|v1|^2 + |v2|^2)`.
pub fn fourier_probe_vector(v: &SpectralVector, modes: &[(i64, i64)]) -> Result<Vec<f64>> {
    let area = v.grid().box_size().powi(2);
    let [a, b] = &v.components;
    Ok(probe_indices(v.grid(), modes)?
        .into_iter()
        .map(|(i, k)| a.coeffs()[i].norm().hypot(b.coeffs()[i].norm()) * area / k)
        .collect())
}

/// Assemble one record. `q_ref` and `u_ref` are the linear evolutions of
/// the same initial data at `state.t`.
pub fn record(
    state: &SimState,
    q_ref: &SpectralScalar,
    u_ref: &SpectralVector,
    probe_modes: &[(i64, i64)],
    splitting: &SplittingRadius,
) -> Result<TimeSeriesRecord> {
    let grid = state.grid().clone();
    if !grid.same_as(q_ref.grid()) || !grid.same_as(u_ref.grid()) {
        return Err(Error::GridMismatch);
    }
    let h = grid.spacing();
    let q = &state.q_hat;
    let [u1, u2] = &state.u_hat.components;
    let (d11, d12, d21, d22) = (partial(u1, 0), partial(u1, 1), partial(u2, 0), partial(u2, 1));
    let phys = inverse_many(&grid, &[q, u1, u2, &d11, &d12, &d21, &d22]);

    let (moment, tail) = moment_from_values(&grid, &phys[0]);
    flag_support(tail);
    let l4u = l4_fourth(&[&phys[1], &phys[2]], h).powf(0.25);
    let l4du = l4_fourth(&[&phys[3], &phys[4], &phys[5], &phys[6]], h).powf(0.25);

    let rho = splitting.at(state.t);
    let shell_low_q = weighted_energy(q, |k| if k <= rho { 1.0 } else { 0.0 });
    let shell_high_q = weighted_energy(q, |k| if k <= rho { 0.0 } else { 1.0 });

    let zeta = q - q_ref;
    let v = &state.u_hat - u_ref;
    let max = |v: Vec<f64>| v.into_iter().fold(0.0, f64::max);

    Ok(TimeSeriesRecord {
        t: state.t,
        l2q2: weighted_energy(q, |_| 1.0),
        l2u2: vector_energy(&state.u_hat, |_| 1.0),
        l4q4: l4_fourth(&[&phys[0]], h),
        h1q2: weighted_energy(q, |k| k * k),
        h1u2: vector_energy(&state.u_hat, |k| k * k),
        h2q2: weighted_energy(q, |k| k.powi(4)),
        h2u2: vector_energy(&state.u_hat, |k| k.powi(4)),
        w14u: l4u + l4du,
        moment,
        mean_q: q.mean(),
        diffq2: weighted_energy(&zeta, |_| 1.0),
        diffu2: vector_energy(&v, |_| 1.0),
        shell_low_q,
        shell_high_q,
        probe_zeta_max: max(fourier_probe(&zeta, probe_modes)?),
        probe_v_max: max(fourier_probe_vector(&v, probe_modes)?),
    })
}

/// Least-squares power law `y ~ exp(intercept) (1 + t)^slope`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    pub n_samples: usize,
    pub rms_residual: f64,
}

/// Fit `ln y` against `ln(1 + t)` over samples with `t` in `window`.
pub fn fit_exponent(series: &[(f64, f64)], window: (f64, f64)) -> Result<FitResult> {
    if !(window.0 >= 1.0 && window.1 > window.0) {
        return Err(Error::Format {
            what: "fit window",
            message: format!("need 1 <= t_lo < t_hi, got [{}, {}]", window.0, window.1),
        });
    }
    let eps = 1e-9 * window.1.abs().max(1.0);
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, _)| *t >= window.0 - eps && *t <= window.1 + eps)
        .copied()
        .collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_FIT_SAMPLES,
            found: pts.len(),
        });
    }
    if let Some(&(t, y)) = pts.iter().find(|(_, y)| y.is_nan() || *y <= 0.0) {
        return Err(Error::NonPositive { t, y });
    }
    let xs: Vec<f64> = pts.iter().map(|(t, _)| (1.0 + t).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, y)| y.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(FitResult {
        slope,
        intercept,
        window,
        n_samples: pts.len(),
        rms_residual: (rss / n).sqrt(),
    })
}

/// `sup (1 + t)^p y(t)` over samples with `t` in `window`.
pub fn sup_constant(series: &[(f64, f64)], p: f64, window: (f64, f64)) -> f64 {
    let eps = 1e-9 * window.1.abs().max(1.0);
    series
        .iter()
        .filter(|(t, _)| *t >= window.0 - eps && *t <= window.1 + eps)
        .map(|(t, y)| (1.0 + t).powf(p) * y)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Extract `(t, column)` pairs from records by CSV column name.
pub fn column(records: &[TimeSeriesRecord], name: &str) -> Option<Vec<(f64, f64)>> {
    let idx = crate::io::SERIES_COLUMNS.iter().position(|c| *c == name)?;
    Some(
        records
            .iter()
            .map(|r| (r.t, crate::io::record_values(r)[idx]))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn power_series(p: f64) -> Vec<(f64, f64)> {
        (0..30)
            .map(|j| {
                let t = 10f64.powf(j as f64 / 29.0 * 1.5) * 1.0;
                (t, (1.0 + t).powf(p))
            })
            .collect()
    }

    #[test]
    fn exact_power_law_slope() {
        let fit = fit_exponent(&power_series(-2.0), (1.0, 40.0)).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-10);
        assert!(fit.rms_residual < 1e-12);
        assert_eq!(fit.n_samples, 30);
        let flat: Vec<_> = power_series(0.0);
        assert!(fit_exponent(&flat, (1.0, 40.0)).unwrap().slope.abs() < 1e-12);
    }

    #[test]
    fn fit_errors() {
        let s = power_series(-2.0);
        assert!(matches!(
            fit_exponent(&s[..10], (1.0, 40.0)),
            Err(Error::TooFewSamples { .. })
        ));
        let mut bad = s.clone();
        bad[5].1 = 0.0;
        assert!(matches!(
            fit_exponent(&bad, (1.0, 40.0)),
            Err(Error::NonPositive { .. })
        ));
        assert!(fit_exponent(&s, (0.5, 40.0)).is_err());
    }

    #[test]
    fn sup_constants() {
        let s = power_series(-2.0);
        assert!((sup_constant(&s, 2.0, (1.0, 40.0)) - 1.0).abs() < 1e-12);
        let s1 = power_series(-1.0);
        let t_hi = s1.last().unwrap().0;
        assert!((sup_constant(&s1, 2.0, (1.0, t_hi)) - (1.0 + t_hi)).abs() < 1e-9);
    }

    fn unit_mode_state() -> SimState {
        let g = make_grid(16, PI).unwrap();
        let q = SpectralScalar::from_fn(&g, |x, _| x.cos()).unwrap();
        SimState::new(0.0, q, SpectralVector::zeros(&g)).unwrap()
    }

    #[test]
    fn record_at_start_has_zero_differences() {
        let s = unit_mode_state();
        let r = record(&s, &s.q_hat, &s.u_hat, &[(1, 0)], &SplittingRadius::charge(4.0)).unwrap();
        assert_eq!(r.diffq2, 0.0);
        assert_eq!(r.diffu2, 0.0);
        assert_eq!(r.probe_zeta_max, 0.0);
        // rho(0) = 2 > |k| = 1
        assert!((r.shell_low_q - r.l2q2).abs() <= 1e-12 * r.l2q2);
        assert!(r.shell_high_q <= 1e-12 * r.l2q2);
        assert!((r.l2q2 - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn zero_record() {
        let g = make_grid(16, PI).unwrap();
        let s = SimState::zeros(&g);
        let r = record(&s, &s.q_hat, &s.u_hat, &[(1, 0)], &SplittingRadius::charge(4.0)).unwrap();
        assert_eq!(r, TimeSeriesRecord::default());
    }

    #[test]
    fn record_grid_mismatch() {
        let s = unit_mode_state();
        let other = make_grid(32, PI).unwrap();
        let q = SpectralScalar::zeros(&other);
        assert!(matches!(
            record(&s, &q, &s.u_hat, &[(1, 0)], &SplittingRadius::charge(4.0)),
            Err(Error::GridMismatch)
        ));
    }

    #[test]
    fn probe_of_single_mode() {
        let g = make_grid(16, PI).unwrap();
        let mut f = SpectralScalar::zeros(&g);
        f.set_mode(1, 0, Complex64::new(0.3, 0.4));
        let r = fourier_probe(&f, &[(1, 0), (0, 1)]).unwrap();
        assert!((r[0] - 0.5 * (2.0 * PI).powi(2)).abs() < 1e-13);
        assert_eq!(r[1], 0.0);
        assert!(matches!(fourier_probe(&f, &[(0, 0)]), Err(Error::ZeroMode(0, 0))));
        assert!(fourier_probe(&f, &[(7, 0)]).is_err());
    }

    #[test]
    fn moment_bounds() {
        let g = make_grid(32, 4.0).unwrap();
        let q = SpectralScalar::from_fn(&g, |x, y| (-(x * x + y * y)).exp()).unwrap();
        assert!(moment(&q) >= crate::spectral::l2(&q));
        assert_eq!(moment(&SpectralScalar::zeros(&g)), 0.0);
    }

    #[test]
    fn splitting_radii() {
        assert_eq!(SplittingRadius::charge(4.0).at(0.0), 2.0);
        assert_eq!(SplittingRadius::charge(4.0).at(1.0), 1.0);
        assert_eq!(SplittingRadius::velocity(4.0).at(3.0), 1.0);
    }
}
