//! Simulation core for chains of actively contracting lymphatic vessels.
//!
//! A collecting lymphatic is modelled as a chain of lymphangions separated by
//! one-way valves. Each lymphangion carries
//!
//! * a 1D hyperbolic flow model (cross-sectional area `A` and flow `q`) closed
//!   by a nonlinear elastic tube law whose stiffness is modulated by a
//!   contraction state `s` ([`wall`], [`solver`]),
//! * a four-variable excitable contraction system driving `s` from wall
//!   stretch and wall-shear-stress feedback ([`efmc`]),
//! * lumped-parameter valves at its interfaces, including stenotic and
//!   regurgitant variants ([`valve`]).
//!
//! The PDEs are advanced with a second-order finite-volume scheme (SLIC:
//! MUSCL-Hancock reconstruction with FORCE fluxes), the ODE subsystems with a
//! two-stage L-stable implicit Runge-Kutta method ([`ode`]), and the pieces
//! are coupled through Riemann-invariant boundary solves ([`coupling`],
//! [`collector`]). [`riemann`] provides the exact solver used to verify the
//! finite-volume scheme, and [`analysis`] computes lymphodynamical indexes,
//! pressure-sweep maps and parameter sensitivities from recorded runs.
//!
//! Everything is plain `f64` arithmetic on value types; the crate is
//! `no_std`-compatible (with `alloc`) and all heavy lifting is deterministic.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analysis;
pub mod collector;
pub mod coupling;
pub mod efmc;
pub mod math;
pub mod ode;
pub mod presets;
pub mod quadrature;
pub mod riemann;
pub mod solver;
pub mod units;
pub mod valve;
pub mod wall;

mod error;

pub use error::{ParamError, SimError};
