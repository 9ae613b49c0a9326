//! Integrating-factor Heun stepping.
//!
//! The dissipative operators are diagonal in Fourier space, so they are
//! applied exactly: `exp(-|k| dt)` for the charge and `exp(-|k|^2 dt)` for
//! the velocity. Only the quadratic terms are treated explicitly, which
//! leaves an advective CFL limit and nothing else.

use crate::error::{Error, Result};
use crate::model::{tendency, SimState, Tendency};
use crate::spectral::{vector_norm, NormKind, SpectralScalar, SpectralVector};

/// Floor on `max |u|` in the CFL formula.
pub const VELOCITY_FLOOR: f64 = 1e-8;

/// Growth of `||q||_{L2}` between samples treated as blow-up.
pub const MAX_SAMPLE_GROWTH: f64 = 0.01;

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub dt_max: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub sample_times: Vec<f64>,
    /// Drop the quadratic terms: the run reduces to the two semigroups.
    pub linear_only: bool,
}

impl IntegratorConfig {
    pub fn new(dt_max: f64, t_end: f64, sample_times: Vec<f64>) -> Self {
        IntegratorConfig {
            dt_max,
            cfl: 0.4,
            t_end,
            sample_times,
            linear_only: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |path: &str, message: String| Error::Config {
            path: path.into(),
            message,
        };
        if !(self.dt_max.is_finite() && self.dt_max > 0.0) {
            return Err(bad("integrator.dt_max", format!("{} must be positive", self.dt_max)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(bad("integrator.cfl", format!("{} must lie in (0, 1]", self.cfl)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(bad("integrator.t_end", format!("{} must be non-negative", self.t_end)));
        }
        if self.sample_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(bad("sampling", "sample times must be strictly increasing".into()));
        }
        if self.sample_times.iter().any(|&t| !(0.0..=self.t_end).contains(&t)) {
            return Err(bad("sampling", format!("sample times must lie in [0, {}]", self.t_end)));
        }
        Ok(())
    }
}

/// Sample times `0`, then `1 + t` log-spaced at `per_decade` points per
/// decade, then `t_end`.
pub fn log_sample_times(t_end: f64, per_decade: usize) -> Vec<f64> {
    let mut times = vec![0.0];
    if t_end <= 0.0 {
        return times;
    }
    let mut j = 1;
    loop {
        let t = 10f64.powf(j as f64 / per_decade as f64) - 1.0;
        if t >= t_end * (1.0 - 1e-12) {
            break;
        }
        times.push(t);
        j += 1;
    }
    times.push(t_end);
    times
}

fn cfl_limit(u_max: f64, h: f64, config: &IntegratorConfig) -> f64 {
    config.dt_max.min(config.cfl * h / u_max.max(VELOCITY_FLOOR))
}

/// `min(dt_max, cfl h / max(||u||_inf, 1e-8))`.
pub fn cfl_dt(state: &SimState, config: &IntegratorConfig) -> Result<f64> {
    let u_max = vector_norm(&state.u_hat, NormKind::Linf)?;
    Ok(cfl_limit(u_max, state.grid().spacing(), config))
}

fn charge_factor(q: &SpectralScalar, dt: f64) -> SpectralScalar {
    q.map_radial(|k| (-k * dt).exp())
}

fn velocity_factor(u: &SpectralVector, dt: f64) -> SpectralVector {
    u.map_radial(|k| (-k * k * dt).exp())
}

fn linear_step(state: &SimState, dt: f64) -> SimState {
    SimState {
        t: state.t + dt,
        q_hat: charge_factor(&state.q_hat, dt),
        u_hat: velocity_factor(&state.u_hat, dt),
    }
}

fn heun_step(state: &SimState, dt: f64, slope: &Tendency) -> Result<SimState> {
    let q_pred = charge_factor(&state.q_hat.axpy(dt, &slope.q), dt);
    let u_pred = velocity_factor(&state.u_hat.axpy(dt, &slope.u), dt);
    let predicted = SimState {
        t: state.t + dt,
        q_hat: q_pred,
        u_hat: u_pred,
    };
    if !predicted.is_finite() {
        return Err(blow_up(state.t + dt, state.t, "non-finite predictor"));
    }
    let end = tendency(&predicted)?;
    // the slope at t is carried to t + dt by the same factor as the state
    let q = charge_factor(&state.q_hat.axpy(0.5 * dt, &slope.q), dt).axpy(0.5 * dt, &end.q);
    let u = velocity_factor(&state.u_hat.axpy(0.5 * dt, &slope.u), dt).axpy(0.5 * dt, &end.u);
    let next = SimState {
        t: state.t + dt,
        q_hat: q,
        u_hat: u,
    };
    if !next.is_finite() {
        return Err(blow_up(next.t, state.t, "non-finite state"));
    }
    Ok(next)
}

fn blow_up(t: f64, last_good_t: f64, reason: &str) -> Error {
    Error::BlowUp {
        t,
        last_good_t,
        reason: reason.into(),
    }
}

/// Advance the full nonlinear system by `dt`.
pub fn step(state: &SimState, dt: f64) -> Result<SimState> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::InvalidInterval {
            t_a: state.t,
            t_b: state.t + dt,
        });
    }
    let slope = tendency(state)?;
    heun_step(state, dt, &slope)
}

/// Integrate to `config.t_end`, landing exactly on each sample time and
/// handing the state to `sink` there.
pub fn run<F>(initial: &SimState, config: &IntegratorConfig, mut sink: F) -> Result<SimState>
where
    F: FnMut(&SimState) -> Result<()>,
{
    config.validate()?;
    initial.check_divergence()?;
    let h = initial.grid().spacing();
    let mut state = initial.clone();
    let mut samples = config.sample_times.iter().copied().peekable();
    let mut last_sample_t = state.t;
    let mut last_sample_norm = crate::spectral::l2(&state.q_hat);

    // a resumed run skips the samples it already emitted
    while let Some(&ts) = samples.peek() {
        if ts < state.t {
            samples.next();
        } else {
            if ts == state.t {
                sink(&state)?;
                samples.next();
            }
            break;
        }
    }

    while state.t < config.t_end {
        let target = samples.peek().copied().unwrap_or(config.t_end);
        let remaining = target - state.t;
        let (next, landed) = if config.linear_only {
            (linear_step(&state, remaining), true)
        } else {
            let slope = tendency(&state)?;
            let dt = cfl_limit(slope.u_max, h, config);
            if dt >= remaining * (1.0 - 1e-12) {
                (heun_step(&state, remaining, &slope)?, true)
            } else {
                (heun_step(&state, dt, &slope)?, false)
            }
        };
        state = next;
        if landed {
            state.t = target;
            if samples.peek().is_some() {
                samples.next();
                let norm = crate::spectral::l2(&state.q_hat);
                if norm > last_sample_norm * (1.0 + MAX_SAMPLE_GROWTH) {
                    return Err(blow_up(
                        state.t,
                        last_sample_t,
                        &format!("||q|| grew from {last_sample_norm:e} to {norm:e}"),
                    ));
                }
                last_sample_t = state.t;
                last_sample_norm = norm;
                sink(&state)?;
            }
        }
    }
    Ok(state)
}
