use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("no cooling chain: the first Raman step out of m = {start_m} has zero coupling")]
    EmptyChain { start_m: i32 },

    #[error("negative Fock index: {0}")]
    NegativeIndex(i64),

    #[error("Bessel approximation only covers |delta_n| <= 1, got {0}")]
    BesselOutOfRange(i64),

    #[error("distribution has zero total mass")]
    ZeroMass,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("suppression window [{lo}, {hi}] contains a zero-probability bin at n = {n}")]
    ZeroProbabilityInWindow { lo: usize, hi: usize, n: usize },

    #[error("history is not geometric: R^2 = {r_squared:.4} below threshold {threshold}")]
    NonGeometricHistory { r_squared: f64, threshold: f64 },

    #[error("heating step tau = {tau:e} s exceeds the small-step bound 1/(n_max*A_max) = {bound:e} s")]
    HeatingStepTooLarge { tau: f64, bound: f64 },

    #[error("no scattering channel: {0}")]
    NoScatteringChannel(String),

    #[error("probability out of range: {0}")]
    ProbabilityOutOfRange(f64),

    #[error("absorbing state is not dark: {0}")]
    NonDarkAbsorber(String),

    #[error("absorption unreachable from states: {0:?}")]
    AbsorptionUnreachable(Vec<(i32, i32)>),

    #[error("blue sideband excitation is zero; cannot infer a sideband ratio")]
    ZeroBlueSideband,

    #[error("sideband ratio {0} is not below one; no mean occupation can be inferred")]
    SidebandRatioNotBelowOne(f64),

    #[error("Raman dark preparation retained zero mass")]
    ZeroRetainedMass,
}

pub type Result<T> = std::result::Result<T, Error>;
