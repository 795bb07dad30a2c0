use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("stencil/equilibrium mismatch: {0}")]
    StencilMismatch(String),

    #[error("ghost strip for velocity {velocity} is not filled")]
    UnfilledGhost { velocity: &'static str },

    #[error("inadmissible Euler state (rho = {rho}, p = {pressure})")]
    Inadmissible { rho: f64, pressure: f64 },

    #[error("cell ({ix}, {iy}) stays inadmissible after fallback to omega = 1")]
    InadmissibleCell { ix: usize, iy: usize },

    #[error("non-finite value detected after step {step}")]
    NonFinite { step: usize },

    #[error("CFL violation: dt * max|flux'| / dx = {0}")]
    Cfl(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operation requires a scalar flux model")]
    NotScalar,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
