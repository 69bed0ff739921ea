//! Numerical toolkit for the effective one-dimensional models of surface
//! superconductivity between the second and third critical fields.
//!
//! * [`spectral`]: the de Gennes constant `Θ0` and the linear half-line mode.
//! * [`profile1d`]: nonlinear half-plane and curvature-weighted profiles.
//! * [`identities`]: integral identities satisfied by the half-plane minimizer
//!   and the curvature correction `E_corr`.
//! * [`coefficients`]: the boundary coefficients `C1(b)`, `C2(b)` and their
//!   checks.
//! * [`geometry`]: smooth closed boundary curves and predictions for the
//!   boundary concentration of `|Ψ|⁴`.
//! * [`disc2d`]: radial Ginzburg-Landau solver on a disc at fixed field.

pub mod coefficients;
pub mod disc2d;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod identities;
mod numerics;
pub mod profile1d;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::HalfLineGrid;
