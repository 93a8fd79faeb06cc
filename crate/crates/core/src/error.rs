use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (symmetry defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("channel strength gamma = {0} is outside [0, 1]")]
    GammaOutOfRange(f64),

    #[error("probability p = {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("noise width sigma_a = {0} must be finite and non-negative")]
    InvalidNoiseWidth(f64),

    #[error("coin amplitudes are not normalized (norm defect {defect:.3e})")]
    NotNormalized { defect: f64 },

    #[error("lattice half-width must be at least 1, got {0}")]
    LatticeTooSmall(usize),

    #[error("light cone overflow: step {next} does not fit a lattice of half-width {t_max}")]
    LightConeOverflow { next: usize, t_max: usize },

    #[error("the chirality-total identity only holds for the Grover coin")]
    NotGroverCoin,

    #[error("distribution has zero spread")]
    ZeroSpread,

    #[error("distributions cover different site ranges ({left} vs {right} half-width)")]
    RangeMismatch { left: usize, right: usize },

    #[error("sigma series too short: need at least {needed} points, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("sigma series has no early-time growth")]
    DegenerateSlope,

    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
