//! Spectral solver for conformal metrics on the unit disk with prescribed
//! Gaussian curvature in the interior and geodesic curvature on the boundary.
//!
//! The crate is organized around a polar spectral grid (`diskgrid`), the
//! curvature data derived from it (`curvature`), an exact bubble-solution
//! oracle (`oracle`), the mean-field formulation of the problem (`meanfield`),
//! and the constrained-minimization / homotopy machinery that produces
//! solutions (`solver`). `expr` supplies the small expression language used to
//! describe curvature data in config files, and `cli` implements the command
//! line pipeline on top of everything else.

pub mod cli;
pub mod curvature;
pub mod diskgrid;
pub mod expr;
pub mod meanfield;
pub mod oracle;
pub mod solver;
