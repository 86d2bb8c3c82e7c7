//! Truncated multi-mode Hilbert spaces, dense operators, and fixed-step
//! Schrödinger evolution.

mod evolve;
mod model;
mod operator;
mod space;

pub use evolve::{evolve, evolve_with_step, linear_grid, Trajectory, LEAKAGE_WARN};
pub use model::{DrivenTerm, Envelope, TimeDependentModel};
pub use operator::{basis_state, excitation_number, mode_operator, ModeOp, Operator};
pub use space::{build_space, SpaceDescriptor, SubsystemKind, SubsystemSpec};
