//! Bifurcation analysis of all-to-all coupled second-order phase-locked loops
//! with transmission delay.
//!
//! The crate covers three formulations of the same network: the full-phase
//! model (double-frequency term kept), the phase model (term dropped, which
//! adds a translation symmetry) and the phase-difference model. Every
//! operation works on normalized parameters, see [`model::normalize`].

pub mod acceptance;
pub mod charfun;
pub mod error;
mod linalg;
pub mod model;
pub mod phasediff;
pub mod phasemodel;
pub mod simulator;
pub mod snmap;
pub mod spectrum;

pub use charfun::{
    build_blocks, full_determinant, isotypic_basis, Block, BlockSet, LinearizationPoint,
    QuasiPolynomial,
};
pub use error::{Error, Result};
pub use model::{
    equilibria, normalize, rhs, Equilibrium, EquilibriumBranch, ModelKind, NetworkParams,
    StateVector,
};
