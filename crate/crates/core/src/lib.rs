//! Numerical electrodynamics for the magnetic Aharonov-Bohm effect and the
//! phase of a polarized neutron in a time-dependent solenoid field.
//!
//! Every result is obtained by explicit quadrature or discretization so it
//! can be compared with the corresponding closed form. Natural units,
//! `c = ħ = 1`; actions are phases in radians.

// `!(x > 0.0)` style guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ab_scenario;
pub mod classical_device;
pub mod error;
pub mod fields;
pub mod neutron_scenario;
pub mod numerics;

pub use error::{Error, Result};
pub use numerics::{QuadResult, Tolerance, Vec3};
