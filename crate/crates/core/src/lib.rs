//! Simulation and analysis of two-mode Gaussian quantum thermometers.
//!
//! Two bosonic modes, each damped into its own thermal bath and coupled
//! through an `x_a x_b` interaction, are described entirely by their 4×4
//! covariance matrix. The crate provides
//!
//! - [`gaussian`]: covariance matrices, symplectic invariants, separability;
//! - [`dynamics`]: drift/diffusion, steady state and exact propagation;
//! - [`geometry`]: Bures line element and Riemannian speed of evolution;
//! - [`metrology`]: Uhlmann fidelity and Fisher information for the bath
//!   occupation and temperature;
//! - [`sampler`]: random states by purity invariants and the GMEMS bound.
//!
//! Units: `ħ = k_B = 1`; the vacuum covariance is the identity.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN too

pub mod dynamics;
pub mod error;
mod expm;
pub mod gaussian;
pub mod geometry;
pub mod metrology;
pub mod sampler;

pub use dynamics::{Propagator, RouthHurwitz, Spacing, SystemParams, TimeGrid, Trajectory};
pub use error::{Error, Result};
pub use expm::expm;
pub use gaussian::{CovarianceMatrix, Mode, Separability, SimonInvariants};
pub use geometry::SpeedSample;
pub use metrology::{BathShift, QfiPoint};
pub use sampler::{PurityTriple, Region, SeedSpec};
