use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: String },

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("exponent range exceeded in {0}")]
    PrecisionOverflow(&'static str),

    #[error("quadrature did not converge after {levels} levels (relative change {change:.3e})")]
    QuadratureNoConvergence { levels: u32, change: f64 },

    #[error("invalid precision policy: {0}")]
    InvalidPolicy(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parity error: {0}")]
    Parity(String),

    #[error("series diverges at z = {0}")]
    Divergence(String),

    #[error("coefficient a_{0} is zero")]
    ZeroCoefficient(usize),

    #[error("operation not defined for family {0}")]
    Family(String),

    #[error("no index in {lo}..={hi} satisfies the selection condition")]
    EmptySelection { lo: usize, hi: usize },

    #[error("degenerate polynomial: {0}")]
    DegenerateDegree(String),

    #[error("root finder did not converge up to {max_bits} bits: {detail}")]
    RootNoConvergence { max_bits: u32, detail: String },

    #[error(
        "Enestrom-Kakeya bounds need strictly positive real coefficients (a_{index} violates)"
    )]
    Positivity { index: usize },

    #[error("radial bracketing failed at theta = {theta}")]
    Bracketing { theta: f64 },

    #[error("angle theta = {theta} lies outside the curve's admissible region")]
    RegionEmpty { theta: f64 },

    #[error("insufficient zeros for N = {n}: {kept} kept, need at least {need}")]
    InsufficientZeros { n: usize, kept: usize, need: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Newton iteration did not converge: {0}")]
    NewtonNoConvergence(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
