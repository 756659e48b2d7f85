//! Quantum modulation of a nonrelativistic electron current by a standing
//! electromagnetic wave combined with a traveling wave.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure numerics:
//!
//! * [`model`] turns SI wave and beam specifications into the derived
//!   constants of the problem (ponderomotive potential, grating number,
//!   coupling rate, modulation length, detunings).
//! * [`dynamics`] evolves the sideband amplitude ladder `a_n(y)` and provides
//!   the first-order closed form and the semiclassical phase.
//! * [`current`] assembles the modulated current density `j(x, y, z, t)`.
//! * [`ensemble`] averages the modulation over a Gaussian velocity spread.
//! * [`ode`] and [`quadrature`] are the numerical building blocks.
//!
//! All quantities crossing the public API are SI. The amplitude dynamics run
//! internally in the dimensionless coordinate `ŷ = q·y`.
#![no_std]
// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod constants;
pub mod current;
pub mod dynamics;
pub mod ensemble;
mod error;
pub mod model;
pub mod ode;
pub mod quadrature;
mod sinc;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
pub use model::{
    BeamSpec, Branch, DerivedParams, Interaction, MomentumLadder, RegimeFlags, StandingWaveSpec,
    TravelingWaveSpec,
};
pub use num_complex::Complex64;
