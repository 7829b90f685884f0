use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid scheme constant {name}: {value} (must be >= 1)")]
    InvalidSchemeConstant { name: &'static str, value: u64 },

    #[error("unknown scheme preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid noise model: {0}")]
    InvalidNoiseModel(String),

    #[error("level {k} is outside the tabulated range 0..={max}")]
    LevelOutOfRange { k: u32, max: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("lattice too large for direct summation: {0}")]
    LatticeTooLarge(String),

    #[error("outside the long-ranged regime: z = {z} > d = {d}")]
    ShortRanged { z: f64, d: u32 },

    #[error("integration did not converge after {steps} steps")]
    NonConvergent { steps: usize },
}
