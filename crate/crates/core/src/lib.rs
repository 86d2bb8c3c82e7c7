//! Floquet-engineered gauge fields in coupled phonon cavities: drive
//! harmonics, effective hopping lattices, full time-dependent simulation
//! and steady-state transport.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`). Frequencies are
//! given in MHz and multiplied by `2π` internally; times are in µs.

// Range guards are written `!(x > 0)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod floquet;
pub mod integrate;
pub mod lattice;
pub mod presets;
pub mod quantum;
pub mod scalar;
pub mod transport;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Lattice = lattice::GaugeLattice<f64>;
pub type Sweep = transport::SweepResult<f64>;
pub type Model = quantum::TimeDependentModel<f64>;
