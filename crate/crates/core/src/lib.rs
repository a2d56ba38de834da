//! Polytropic Euler equations on a star-shaped pipe network.
//!
//! * [`euler`]: gas states, conversions, fluxes, flow classification.
//! * [`riemann`]: exact two-state Riemann solver and Lax curves.
//! * [`junction`]: generalised Riemann problem at the junction, with the
//!   entropy-mix coupling and pressure-based comparison couplings.
//! * [`network`]: Godunov finite-volume simulation of the whole network with
//!   operator-split source terms.

pub mod euler;
pub mod junction;
pub mod network;
pub mod riemann;

pub use euler::{Conserved, FlowClass, Flux, GasParams, GasState, PipeSpec, StateError};
pub use junction::{
    CouplingMode, CouplingParams, JunctionError, JunctionFluxes, JunctionProblem, StarSolution,
};
pub use network::{Network, Scenario, SimError};
pub use riemann::{RiemannError, StarState, WaveFan};

/// Linear-algebra types used in public signatures (Jacobians, residuals).
pub use nalgebra;
