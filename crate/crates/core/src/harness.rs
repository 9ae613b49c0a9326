//! Run orchestration: initial data, sampling, output files, restarts and
//! the integrator order study.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::checks::{cutoff_wavenumber, random_field, random_velocity};
use crate::config::{scenario, ExperimentConfig, Preset};
use crate::diagnostics::{record, SplittingRadius, TimeSeriesRecord};
use crate::error::{Error, Result};
use crate::integrator::{run, IntegratorConfig};
use crate::io::{emit_series, load_checkpoint, read_series, save_checkpoint};
use crate::model::{dissipation, energy, energy_residual, SimState};
use crate::semigroups::{heat_evolve, poisson_evolve};
use crate::spectral::{partial, Dealias, Grid, PhysicalScalar, SpectralScalar, SpectralVector};

pub const SERIES_FILE: &str = "series.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CHECKPOINT_FILE: &str = "checkpoint.bin";
pub const ORDER_FILE: &str = "order.json";
pub const CHECKS_FILE: &str = "checks.json";
pub const COARSE_DIR: &str = "coarse";

/// Minimum wall time between periodic checkpoints.
const CHECKPOINT_INTERVAL: Duration = Duration::from_secs(60);

fn gaussian_charge(grid: &Arc<Grid>, mass: f64, width: f64) -> Result<SpectralScalar> {
    let c = mass / (2.0 * std::f64::consts::PI * width * width);
    let f = PhysicalScalar::from_fn(grid, |x, y| c * (-(x * x + y * y) / (2.0 * width * width)).exp());
    SpectralScalar::forward(&f)
}

/// `u = (-d2 psi, d1 psi)` with `psi = a exp(-|x - c|^2 / (2 w^2))`.
fn gaussian_vortex(grid: &Arc<Grid>, amplitude: f64, width: f64, c: (f64, f64)) -> Result<SpectralVector> {
    let psi = PhysicalScalar::from_fn(grid, |x, y| {
        amplitude * (-((x - c.0).powi(2) + (y - c.1).powi(2)) / (2.0 * width * width)).exp()
    });
    let psi = SpectralScalar::forward(&psi)?;
    SpectralVector::new(partial(&psi, 1).scale(-1.0), partial(&psi, 0))
}

/// `P_s(x) = mass * s / (2 pi (s^2 + |x|^2)^{3/2})`, transform `mass * exp(-s |xi|)`.
fn poisson_kernel(grid: &Arc<Grid>, mass: f64, s: f64) -> Result<SpectralScalar> {
    let c = mass * s / (2.0 * std::f64::consts::PI);
    let f = PhysicalScalar::from_fn(grid, |x, y| c * (s * s + x * x + y * y).powf(-1.5));
    SpectralScalar::forward(&f)
}

/// Dealiased initial state of a configuration.
pub fn initial_state(cfg: &ExperimentConfig) -> Result<SimState> {
    let grid = Grid::new(cfg.grid.n, cfg.grid.half_period)?;
    let p = &cfg.init.params;
    let (q, u) = match cfg.init.preset {
        Preset::GaussianVortex => (
            gaussian_charge(&grid, p.charge_mass, p.charge_width)?,
            gaussian_vortex(&grid, p.vortex_amplitude, p.vortex_width, p.vortex_center)?,
        ),
        Preset::PoissonKernel => (
            poisson_kernel(&grid, p.charge_mass, p.kernel_time)?,
            SpectralVector::zeros(&grid),
        ),
        Preset::Random => {
            let k0 = p.envelope_k0.unwrap_or(cutoff_wavenumber(&grid) / 4.0);
            let area = grid.box_size().powi(2);
            let q = random_field(&grid, cfg.seed, k0, p.charge_mass / area)?;
            let u = random_velocity(&grid, cfg.seed.wrapping_add(1), k0)?.scale(p.velocity_scale);
            (q, u)
        }
    };
    SimState::new(0.0, q.dealiased(), u.dealiased())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: f64,
    pub energy: f64,
    pub dissipation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: ExperimentConfig,
    pub energy: Vec<EnergySample>,
    pub final_t: f64,
    /// Set when the run stopped on a blow-up.
    pub blow_up: Option<String>,
}

pub struct RunOutput {
    pub records: Vec<TimeSeriesRecord>,
    pub summary: RunSummary,
    pub final_state: SimState,
}

impl RunOutput {
    pub fn blew_up(&self) -> bool {
        self.summary.blow_up.is_some()
    }
}

/// Where a restarted run picks up.
pub struct Resume {
    pub state: SimState,
    pub records: Vec<TimeSeriesRecord>,
    pub energy: Vec<EnergySample>,
}

/// Integrate a configuration in memory. A blow-up ends the run early and is
/// reported in the summary rather than as an error.
pub fn simulate(cfg: &ExperimentConfig, resume: Option<Resume>) -> Result<RunOutput> {
    simulate_with(cfg, resume, |_| Ok(()))
}

/// As [`simulate`], calling `on_sample` after every recorded sample.
pub fn simulate_with<F>(cfg: &ExperimentConfig, resume: Option<Resume>, mut on_sample: F) -> Result<RunOutput>
where
    F: FnMut(&SimState) -> Result<()>,
{
    cfg.validate()?;
    let initial = initial_state(cfg)?;
    let splitting = SplittingRadius::charge(cfg.splitting.r);
    let modes = cfg.probes.modes.clone();
    let (start, mut records, mut energies) = match resume {
        Some(r) => {
            if !r.state.grid().same_as(initial.grid()) {
                return Err(Error::GridMismatch);
            }
            let t = r.state.t;
            let records = r.records.into_iter().filter(|x| x.t < t).collect();
            let energies = r.energy.into_iter().filter(|x| x.t < t).collect();
            (r.state, records, energies)
        }
        None => (initial.clone(), vec![], vec![]),
    };
    let q0 = initial.q_hat;
    let u0 = initial.u_hat;
    let mut last_good = start.clone();
    let result = run(&start, &cfg.integrator_config(), |state| {
        let q_ref = poisson_evolve(&q0, state.t)?;
        let u_ref = heat_evolve(&u0, state.t)?;
        records.push(record(state, &q_ref, &u_ref, &modes, &splitting)?);
        energies.push(EnergySample {
            t: state.t,
            energy: energy(state),
            dissipation: dissipation(state),
        });
        last_good = state.clone();
        on_sample(state)
    });
    let (final_state, blow_up) = match result {
        Ok(s) => (s, None),
        Err(e @ Error::BlowUp { .. }) => {
            log::error!("{e}");
            (last_good, Some(e.to_string()))
        }
        Err(e) => return Err(e),
    };
    Ok(RunOutput {
        records,
        summary: RunSummary {
            config: cfg.clone(),
            energy: energies,
            final_t: final_state.t,
            blow_up,
        },
        final_state,
    })
}

pub fn write_summary(summary: &RunSummary, path: &Path) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(summary)?)?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<RunSummary> {
    let text = fs::read_to_string(path).map_err(|e| missing(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        what: "run summary",
        message: format!("{}: {e}", path.display()),
    })
}

fn missing(path: &Path, e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::NotFound {
        Error::MissingInput(path.display().to_string())
    } else {
        Error::Io(e)
    }
}

pub fn write_run(out: &RunOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    emit_series(&out.records, &dir.join(SERIES_FILE))?;
    write_summary(&out.summary, &dir.join(SUMMARY_FILE))?;
    save_checkpoint(&out.final_state, &dir.join(CHECKPOINT_FILE))
}

/// Run a configuration and write series, summary and final checkpoint to
/// `dir`. With `resume`, continue from the checkpoint already in `dir`.
pub fn run_to_dir(cfg: &ExperimentConfig, dir: &Path, resume: bool) -> Result<RunOutput> {
    fs::create_dir_all(dir)?;
    let from = if resume {
        let grid = Grid::new(cfg.grid.n, cfg.grid.half_period)?;
        let state = load_checkpoint(&dir.join(CHECKPOINT_FILE), Some(grid))?;
        let records = read_series(&dir.join(SERIES_FILE))?;
        let energy = read_summary(&dir.join(SUMMARY_FILE))?.energy;
        log::info!("resuming {} at t = {}", dir.display(), state.t);
        Some(Resume { state, records, energy })
    } else {
        None
    };
    let ckpt = dir.join(CHECKPOINT_FILE);
    let mut last_write = Instant::now();
    let out = simulate_with(cfg, from, |state| {
        log::debug!("sample t = {:.4}", state.t);
        if last_write.elapsed() >= CHECKPOINT_INTERVAL {
            save_checkpoint(state, &ckpt)?;
            last_write = Instant::now();
        }
        Ok(())
    })?;
    write_run(&out, dir)?;
    Ok(out)
}

/// Global error and energy-identity residual under step halving.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderStudy {
    pub t_end: f64,
    /// `dt`, `dt/2`; the reference uses `dt/8`.
    pub dts: Vec<f64>,
    /// `||state_dt - state_ref||` at `t_end`, over `q` and `u` together.
    pub errors: Vec<f64>,
    /// Largest one-step energy-identity residual along each run.
    pub residuals: Vec<f64>,
}

impl OrderStudy {
    pub fn error_ratio(&self) -> f64 {
        self.errors[0] / self.errors[1]
    }

    pub fn residual_ratio(&self) -> f64 {
        self.residuals[0] / self.residuals[1]
    }
}

/// Fixed-step run sampling every step; returns the final state and the
/// largest one-step energy residual.
fn fixed_step_run(initial: &SimState, dt: f64, t_end: f64) -> Result<(SimState, f64)> {
    let steps = (t_end / dt).round() as usize;
    let times: Vec<f64> = (0..=steps).map(|i| i as f64 * dt).collect();
    let cfg = IntegratorConfig {
        dt_max: dt,
        cfl: 1.0,
        t_end: times[steps],
        sample_times: times,
        linear_only: false,
    };
    let mut prev: Option<SimState> = None;
    let mut worst: f64 = 0.0;
    let end = run(initial, &cfg, |s| {
        if let Some(p) = &prev {
            worst = worst.max(energy_residual(p, s)?);
        }
        prev = Some(s.clone());
        Ok(())
    })?;
    Ok((end, worst))
}

fn state_distance(a: &SimState, b: &SimState) -> f64 {
    (&a.q_hat - &b.q_hat)
        .coeff_norm()
        .hypot((&a.u_hat - &b.u_hat).coeff_norm())
}

/// Integrate `cfg` to `t_end` with `dt`, `dt/2` and a `dt/8` reference.
pub fn order_study(cfg: &ExperimentConfig, t_end: f64, dt: f64) -> Result<OrderStudy> {
    let initial = initial_state(cfg)?;
    let dts = vec![dt, dt / 2.0];
    let (reference, _) = fixed_step_run(&initial, dt / 8.0, t_end)?;
    let mut errors = vec![];
    let mut residuals = vec![];
    for &h in &dts {
        let (end, residual) = fixed_step_run(&initial, h, t_end)?;
        errors.push(state_distance(&end, &reference));
        residuals.push(residual);
    }
    Ok(OrderStudy {
        t_end,
        dts,
        errors,
        residuals,
    })
}

/// Coarse companion grid used for resolution checks.
pub fn coarse_config(cfg: &ExperimentConfig) -> ExperimentConfig {
    let mut coarse = cfg.clone();
    coarse.grid.n = cfg.grid.n / 2;
    coarse
}

/// Time horizon and step of the order study.
pub const ORDER_T_END: f64 = 5.0;
pub const ORDER_DT: f64 = 0.1;

/// Produce every output file a scenario contributes to the acceptance gate.
/// Returns `Err(BlowUp)` after writing partial outputs if a run blew up.
pub fn run_scenario(name: &str, out: &Path) -> Result<()> {
    let cfg = scenario(name)?;
    fs::create_dir_all(out)?;
    fs::write(out.join("config.json"), cfg.to_json())?;
    if name == "S5_property_suite" {
        let reports = crate::acceptance::property_reports(cfg.seed)?;
        fs::write(out.join(CHECKS_FILE), serde_json::to_string_pretty(&reports)?)?;
        return Ok(());
    }
    let main = run_to_dir(&cfg, out, false)?;
    raise_blow_up(&main)?;
    match name {
        "S1_sharp_decay" => {
            let study = order_study(&cfg, ORDER_T_END, ORDER_DT)?;
            fs::write(out.join(ORDER_FILE), serde_json::to_string_pretty(&study)?)?;
        }
        "S2_difference_decay" => {
            let coarse = run_to_dir(&coarse_config(&cfg), &out.join(COARSE_DIR), false)?;
            raise_blow_up(&coarse)?;
        }
        _ => {}
    }
    Ok(())
}

fn raise_blow_up(out: &RunOutput) -> Result<()> {
    match &out.summary.blow_up {
        Some(reason) => Err(Error::BlowUp {
            t: out.final_state.t,
            last_good_t: out.final_state.t,
            reason: reason.clone(),
        }),
        None => Ok(()),
    }
}

/// Directory of a scenario inside an acceptance tree.
pub fn scenario_dir(root: &Path, name: &str) -> PathBuf {
    root.join(name)
}
