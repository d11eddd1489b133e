//! Numerical toolkit for the half-Laplacian, Riesz/logarithmic/Newtonian
//! potentials, conformal bubble solutions and Kelvin transforms, with
//! verification suites for mixed-order conformally invariant systems on ℝ²
//! and ℝ³.

pub mod bubbles;
pub mod cli;
pub mod error;
pub mod fields;
pub mod fraclap;
pub mod inequalities;
pub mod par;
pub mod potentials;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
pub use fields::{field_power, make_radial_field, DecayHint, Point, ScalarField};
pub use quadrature::{QuadResult, QuadratureConfig, Truncation};
