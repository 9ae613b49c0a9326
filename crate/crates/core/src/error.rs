use thiserror::Error;

/// Errors raised by the spectral operators, the solver and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field contains non-finite values")]
    NonFinite,

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("operator requires a mean-free field (mean coefficient {mean:e}, scale {scale:e})")]
    NonzeroMean { mean: f64, scale: f64 },

    #[error("velocity is not divergence-free (relative divergence {0:e})")]
    NotDivergenceFree(f64),

    #[error("exponent {0} outside the supported range [-2, 4]")]
    ExponentOutOfRange(f64),

    #[error("negative evolution time {0}")]
    NegativeTime(f64),

    #[error("invalid time interval: t_b = {t_b} must exceed t_a = {t_a}")]
    InvalidInterval { t_a: f64, t_b: f64 },

    #[error("probe mode ({0}, {1}) has zero wavevector")]
    ZeroMode(i64, i64),

    #[error("probe mode ({0}, {1}) outside the resolved band")]
    ModeOutOfBand(i64, i64),

    #[error("fit needs at least {needed} samples in window, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("non-positive value {y:e} at t = {t} in fit window")]
    NonPositive { t: f64, y: f64 },

    #[error("envelope k0 = {k0} must be below the dealiasing cutoff {cutoff}")]
    EnvelopeTooWide { k0: f64, cutoff: f64 },

    #[error("field support leaves the central half of the box ({tail_fraction:.3e} of mass outside)")]
    SupportViolation { tail_fraction: f64 },

    #[error("blow-up at t = {t} (last good sample t = {last_good_t}): {reason}")]
    BlowUp { t: f64, last_good_t: f64, reason: String },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("unknown scenario `{name}`; valid names: {valid}")]
    UnknownScenario { name: String, valid: String },

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error("malformed {what}: {message}")]
    Format { what: &'static str, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
