use thiserror::Error;

use crate::sector::BasisKet;
use crate::wei_norman::Cavity;

/// Failures raised by the propagators and their coefficient integrators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ket {ket} does not belong to the M = {m_total} sector")]
    SectorMismatch { ket: BasisKet, m_total: u32 },

    #[error("state lives in the M = {found} sector, expected M = {expected}")]
    BasisMismatch { expected: u32, found: u32 },

    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),

    #[error("invalid time grid: {0}")]
    InvalidGrid(&'static str),

    #[error("numerical failure: {0}")]
    NumericalFailure(&'static str),

    #[error("RK4 norm drift {drift:.3e} at tau = {tau}; retry with a smaller step")]
    Instability { tau: f64, drift: f64 },

    #[error("Wei-Norman factorization breaks down at tau = {tau}: {reason}")]
    FactorizationBreakdown { tau: f64, reason: &'static str },

    #[error("photon number {n} exceeds the factorial table (max 20)")]
    OutOfRange { n: u32 },

    #[error("cavity {cavity} ladder M = 0 evolves trivially (identity factor)")]
    IdentityLadder { cavity: Cavity },

    #[error("no coefficient table for cavity {cavity}, ladder M = {m}")]
    MissingLadder { cavity: Cavity, m: u32 },
}

pub type Result<T> = core::result::Result<T, Error>;
