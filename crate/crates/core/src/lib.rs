//! Geometric hydrodynamics on periodic domains.
//!
//! Densities carry two Riemannian structures: the Wasserstein-Otto metric of
//! optimal transport and the Fisher-Rao metric of information geometry.
//! Newton equations for potential functionals on either side give the
//! compressible fluid models, the μCH and Neumann systems, and, through the
//! Madelung transform, linear and nonlinear Schrödinger equations. The crate
//! provides the geometry, the transforms between the fluid and wave pictures,
//! pseudo-spectral time integrators for all of these systems, and Casimir
//! functionals with a coadjoint-action perturbation to test their invariance.
//!
//! Every domain is a flat torus of dimension 1 to 3 with the volume form
//! normalized to total mass 1.

pub mod casimirs;
pub mod dynamics_fr;
pub mod dynamics_wo;
mod error;
pub mod field;
pub mod grid;
pub mod integrate;
pub mod interp;
pub mod potentials;
pub mod quantum;
pub mod snapshot;
pub mod spaces;
pub mod transforms;

pub use error::{Error, Result};
pub use field::{ComplexField, ScalarField, VectorField};
pub use grid::Grid;
pub use potentials::{Nonlinearity, Potential, StateFunction};
pub use spaces::{Density, TangentDensity, ThetaFR, ThetaWO, WaveFunction};
