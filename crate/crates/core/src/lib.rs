//! Exact lattice point counting for the shear family of unimodular lattices.
//!
//! For `z = x + iy` in the upper half plane the lattice
//!
//! ```text
//! Λ_z = { (m√y, (mx + n)/√y) : m, n ∈ ℤ }
//! ```
//!
//! has covolume one and satisfies `Λ_{z+1} = Λ_z`. This crate counts the
//! points of `Λ_z` strictly inside the circle of radius `T`, splits that count
//! into a smooth main term plus a sawtooth sum, and measures the mean and
//! mean square of the remainder `N(T) - πT²` over the shear parameter
//! `x ∈ [0, 1)`.
//!
//! The modules build on each other:
//!
//! * [`lattice`]: the parameterization and two independent exact counters.
//! * [`formula`]: the sawtooth decomposition of the count and the error
//!   analysis of the main term `P(T)`.
//! * [`fourier`]: the cosine expansion of the sawtooth sum, its Parseval
//!   mean square and an explicit upper-bound certificate.
//! * [`stats`]: exact (breakpoint sweep) and approximate (grid) integration
//!   over `x`, bound ratios and lower-bound witnesses.
//! * [`sweep`] and [`csvio`]: parameter sweeps and their CSV formats.
//!
//! All floating point work is `f64`. Inputs are restricted to
//! `T/√y ≤ 10⁶` ([`MAX_SCALED_RADIUS`]); beyond that fractional parts of the
//! row endpoints lose too many digits and the functions return
//! [`Error::RangeExceeded`].

pub mod csvio;
pub mod formula;
pub mod fourier;
pub mod lattice;
mod quad;
pub mod stats;
mod sum;
pub mod sweep;

pub use formula::DecompositionResult;
pub use fourier::{FourierSpectrum, ParsevalResult};
pub use lattice::{CountMethod, CountResult, ShearPoint};
pub use stats::{BreakpointSweep, IntegrationMethod, MeanSquareReport};
pub use sum::NeumaierSum;

/// Largest accepted value of `T/√y`.
pub const MAX_SCALED_RADIUS: f64 = 1e6;

/// Default relative tolerance used to flag boundary ties.
pub const DEFAULT_TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("range exceeded: {0}")]
    RangeExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// Checks a radius against the supported precision regime.
pub(crate) fn check_radius(sqrt_y: f64, radius: f64) -> Result<()> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(invalid(format!("radius must be a positive finite number, got {radius}")));
    }
    let scaled = radius / sqrt_y;
    if scaled > MAX_SCALED_RADIUS {
        return Err(Error::RangeExceeded(format!(
            "T/sqrt(y) = {scaled:e} exceeds the supported limit {MAX_SCALED_RADIUS:e}"
        )));
    }
    Ok(())
}

pub(crate) fn check_height(y: f64) -> Result<()> {
    if !(y.is_finite() && y > 0.0) {
        return Err(invalid(format!("y must be a positive finite number, got {y}")));
    }
    Ok(())
}
