//! Allen-Cahn phase-field flow on the two-dimensional space forms.
//!
//! The crate evolves `∂ₜu = Δu − f(u)/ε²` on a flat torus, the round sphere
//! and a geodesic disk of the hyperbolic plane, and measures how the diffuse
//! interface approaches mean curvature flow: discrepancy decay, weighted
//! backward-heat-kernel energies, density ratios, BV bounds and extinction
//! times against closed-form curve-shortening oracles.
//!
//! Module map:
//!
//! * [`geometry`]: space forms, grid charts, discrete differential operators.
//! * [`profile`]: the weighted one-dimensional transition profile.
//! * [`initial_data`]: well-prepared and general initial fields.
//! * [`evolution`]: explicit and IMEX time stepping.
//! * [`diagnostics`]: energy, discrepancy, kernel, density and BV functionals.
//! * [`harness`]: configuration, experiment orchestration and acceptance verdicts.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop, clippy::too_many_arguments)]

pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod harness;
pub mod initial_data;
pub mod numerics;
pub mod potential;
pub mod profile;

pub use error::{Error, Result};
pub use geometry::{ChartPoint, GridChart, ScalarField, SpaceForm};
pub use potential::Potential;
pub use profile::{ProfileSolution, WeightSpec};
