//! Two coupled Jaynes-Cummings cavities with photon hopping.
//!
//! Two propagators share one excitation sector: an exact reference built from
//! the Hermitian eigendecomposition of the full Hamiltonian, and the
//! product-form approximation `U = U0 U1 Ujc1 Ujc2` whose coefficients come
//! from Wei-Norman ODEs. [`observables`] compares the two.
#![no_std]
extern crate alloc;

pub mod analytic;
pub mod error;
pub mod exact;
pub mod observables;
pub mod ode;
pub mod params;
pub mod presets;
pub mod sector;
pub mod wei_norman;

pub use num_complex::Complex;

pub use error::{Error, Result};
pub use params::{OdeTolerance, SimParams};
pub use sector::{
    basis_state, build_sector_basis, BasisKet, Level, Observable, PureState, SectorBasis,
};

pub type C64 = Complex<f64>;

#[inline]
pub(crate) const fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
