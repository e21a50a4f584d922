//! Simulation of the relative phase between two spin states carried through
//! counter-rotating magnetic-field cycles.
//!
//! A spin starts in an eigenstate of the field at t = 0. Two copies are
//! propagated for half a period, one with the transverse field rotating each
//! way, and the phase of their overlap is tracked while the static field
//! components (b1, bz) are moved around a closed circuit. Circuits enclosing
//! a degeneracy wind that phase by a multiple of 2 pi; the solid angle
//! subtended by the field loop gives an independent adiabatic prediction.

// `!(x < tol)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuits;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod io;
pub mod phase;
pub mod spinsys;

pub use circuits::{preset_circuit, sample_circuit, sweep_plane, trace_circuit, Circuit, Preset};
pub use error::{Error, Result};
pub use geometry::{oracle_phase_trace, solid_angle, LoopGeometry, MonopoleScene};
pub use phase::{pancharatnam, winding, PhaseTrace};
pub use spinsys::{evolve_arms, FieldParams, PropagationSettings, SpinState};
