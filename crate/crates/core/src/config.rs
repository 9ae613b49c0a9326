//! Experiment configuration: a single JSON document, every key optional.
//!
//! ```json
//! {
//!   "grid": { "n": 512, "half_period": 125.66 },
//!   "init": { "preset": "gaussian_vortex", "params": { "charge_mass": 1.0 } },
//!   "model": { "linear": false },
//!   "integrator": { "dt_max": 0.1, "cfl": 0.4, "t_end": 31.4 },
//!   "sampling": { "per_decade": 30 },
//!   "splitting": { "r": 4.0 },
//!   "probes": { "modes": [[1, 0], [0, 1]] },
//!   "seed": 0,
//!   "output": { "dir": "out" }
//! }
//! ```

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{log_sample_times, IntegratorConfig};
use crate::spectral::{MAX_N, MIN_N};

pub const SCENARIOS: [&str; 5] = [
    "S1_sharp_decay",
    "S2_difference_decay",
    "S3_moment_growth",
    "S4_linear_oracle",
    "S5_property_suite",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: usize,
    pub half_period: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            n: 256,
            half_period: 40.0 * PI,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Gaussian charge and a vortex from a Gaussian stream function.
    GaussianVortex,
    /// Poisson kernel charge `P_s`, fluid at rest.
    PoissonKernel,
    /// Seeded band-limited random charge and velocity.
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitParams {
    /// `int q0`.
    pub charge_mass: f64,
    /// Standard deviation of the Gaussian charge.
    pub charge_width: f64,
    /// Peak of the stream function.
    pub vortex_amplitude: f64,
    pub vortex_width: f64,
    /// Centre of the stream function; off the charge centre so that the
    /// transport and forcing terms do not vanish by symmetry.
    pub vortex_center: (f64, f64),
    /// Poisson kernel parameter `s` in `P_s`.
    pub kernel_time: f64,
    /// Gaussian envelope wavenumber of the random preset; defaults to a
    /// quarter of the dealiasing cutoff.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope_k0: Option<f64>,
    /// `||u0||_{L2}` of the random preset.
    pub velocity_scale: f64,
}

impl Default for InitParams {
    fn default() -> Self {
        InitParams {
            charge_mass: 1.0,
            charge_width: 2.0,
            vortex_amplitude: 1.0,
            vortex_width: 2.0,
            vortex_center: (2.0, 0.0),
            kernel_time: 1.0,
            envelope_k0: None,
            velocity_scale: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitSection {
    pub preset: Preset,
    pub params: InitParams,
}

impl Default for InitSection {
    fn default() -> Self {
        InitSection {
            preset: Preset::GaussianVortex,
            params: InitParams::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    /// Drop the coupling and transport terms.
    pub linear: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    pub dt_max: f64,
    pub cfl: f64,
    /// Defaults to `L / 4`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        IntegratorSection {
            dt_max: 0.1,
            cfl: 0.4,
            t_end: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingSection {
    pub per_decade: usize,
}

impl Default for SamplingSection {
    fn default() -> Self {
        SamplingSection { per_decade: 30 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplittingSection {
    pub r: f64,
}

impl Default for SplittingSection {
    fn default() -> Self {
        SplittingSection { r: 4.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeSection {
    pub modes: Vec<(i64, i64)>,
}

impl Default for ProbeSection {
    fn default() -> Self {
        ProbeSection {
            modes: crate::diagnostics::DEFAULT_PROBE_MODES.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: "out".into() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub grid: GridSection,
    pub init: InitSection,
    pub model: ModelSection,
    pub integrator: IntegratorSection,
    pub sampling: SamplingSection,
    pub splitting: SplittingSection,
    pub probes: ProbeSection,
    pub seed: u64,
    pub output: OutputSection,
}

fn config_error(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

/// Parse and validate one JSON document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        config_error(if path == "." { "" } else { &path }, e.into_inner().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn t_end(&self) -> f64 {
        self.integrator.t_end.unwrap_or(self.grid.half_period / 4.0)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.grid.n;
        if !(MIN_N..=MAX_N).contains(&n) || !n.is_multiple_of(2) {
            return Err(config_error(
                "grid.n",
                format!("{n} must be even and in [{MIN_N}, {MAX_N}]"),
            ));
        }
        let l = self.grid.half_period;
        if !(l.is_finite() && l > 0.0) {
            return Err(config_error("grid.half_period", format!("{l} must be positive")));
        }
        let p = &self.init.params;
        let positive = [
            ("init.params.charge_width", p.charge_width),
            ("init.params.vortex_width", p.vortex_width),
            ("init.params.kernel_time", p.kernel_time),
        ];
        for (path, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(config_error(path, format!("{v} must be positive")));
            }
        }
        let finite = [
            ("init.params.charge_mass", p.charge_mass),
            ("init.params.vortex_amplitude", p.vortex_amplitude),
            ("init.params.velocity_scale", p.velocity_scale),
            ("init.params.vortex_center", p.vortex_center.0),
            ("init.params.vortex_center", p.vortex_center.1),
        ];
        for (path, v) in finite {
            if !v.is_finite() {
                return Err(config_error(path, format!("{v} must be finite")));
            }
        }
        if let Some(k0) = p.envelope_k0 {
            if !(k0.is_finite() && k0 > 0.0) {
                return Err(config_error(
                    "init.params.envelope_k0",
                    format!("{k0} must be positive"),
                ));
            }
        }
        if self.sampling.per_decade == 0 {
            return Err(config_error("sampling.per_decade", "must be at least 1"));
        }
        let r = self.splitting.r;
        if !(r.is_finite() && r > 0.0) {
            return Err(config_error("splitting.r", format!("{r} must be positive")));
        }
        for (i, &(m1, m2)) in self.probes.modes.iter().enumerate() {
            let bound = (n as i64 - 1) / 3;
            if (m1, m2) == (0, 0) || m1.abs() > bound || m2.abs() > bound {
                return Err(config_error(
                    &format!("probes.modes[{i}]"),
                    format!("({m1}, {m2}) must be nonzero and within |m| <= {bound}"),
                ));
            }
        }
        if let Some(t) = self.integrator.t_end {
            if !(t.is_finite() && t >= 0.0) {
                return Err(config_error("integrator.t_end", format!("{t} must be non-negative")));
            }
        }
        self.integrator_config().validate()
    }

    pub fn integrator_config(&self) -> IntegratorConfig {
        let t_end = self.t_end();
        IntegratorConfig {
            dt_max: self.integrator.dt_max,
            cfl: self.integrator.cfl,
            t_end,
            sample_times: log_sample_times(t_end, self.sampling.per_decade.max(1)),
            linear_only: self.model.linear,
        }
    }
}

/// The named presets of the verification campaign.
pub fn scenario(name: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    cfg.grid.n = 512;
    cfg.output.dir = name.into();
    match name {
        "S1_sharp_decay" | "S2_difference_decay" | "S3_moment_growth" => {}
        "S4_linear_oracle" => {
            cfg.init.preset = Preset::PoissonKernel;
            cfg.model.linear = true;
        }
        "S5_property_suite" => {
            cfg.grid.n = 128;
            cfg.grid.half_period = 8.0 * PI;
            cfg.init.preset = Preset::Random;
        }
        _ => {
            return Err(Error::UnknownScenario {
                name: name.into(),
                valid: SCENARIOS.join(", "),
            })
        }
    }
    Ok(cfg)
}
