//! Diagnostics, boundary-layer theory and convergence tooling.

pub mod convergence;
pub mod layer;
pub mod norms;
pub mod props;

pub use convergence::{convergence_rate, restrict_average};
pub use norms::{DiagnosticsRecord, Norm};
