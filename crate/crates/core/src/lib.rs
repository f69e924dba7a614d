//! Operator algebra, spectra and classical dynamics of the Pais–Uhlenbeck
//! oscillator at its resonant point.
//!
//! Differential operators live in [`weyl::WeylOp`], wavefunctions in
//! [`states::GaussPolyState`]. Every verification routine returns a
//! [`report::Report`] of named residual checks.

pub mod algebra;
pub mod classical;
pub mod factorization;
pub mod params;
pub mod poly;
pub mod report;
pub mod sampling;
pub mod spectrum;
pub mod states;
pub mod suites;
pub mod weyl;

pub use params::{ModelParams, ParamError, PhaseState, PuState, Sector};
pub use poly::Poly2;
pub use report::{Check, Report};
pub use states::{GaussPolyState, Gaussian};
pub use weyl::{Multi, Vars, WeylOp};
