use serde::{Deserialize, Serialize};

use super::Network;
use crate::euler::{
    conservative_to_primitive, eigenvalues, physical_flux, FlowClass, Flux, GasParams, GasState,
    PipeSpec,
};
use crate::junction::{solve_junction, CouplingMode, JunctionError, JunctionProblem, StarSolution};
use crate::riemann::{RiemannError, WaveFan};

/// State of the exact Riemann solution at `x/t = 0`.
pub(crate) fn interface_state(
    left: &GasState,
    right: &GasState,
    params: &GasParams,
) -> Result<GasState, RiemannError> {
    if left == right {
        left.validate()?;
        return Ok(*left);
    }
    Ok(WaveFan::new(left, right, params)?.sample(0.0, params))
}

/// Godunov flux: physical flux of the exact Riemann solution at `x/t = 0`.
pub fn godunov_interface_flux(
    left: &GasState,
    right: &GasState,
    params: &GasParams,
) -> Result<Flux, RiemannError> {
    Ok(physical_flux(
        &interface_state(left, right, params)?,
        params,
    ))
}

/// Junction-face flux of every pipe, in caller order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JunctionBoundary {
    pub solution: StarSolution,
    pub fluxes: Vec<Flux>,
    /// `q s` of each star trace.
    pub entropy_fluxes: Vec<f64>,
}

/// Solves the generalised Riemann problem on the given traces and returns
/// `F(Y*_i)` for every pipe.
pub fn junction_boundary_flux(
    pipes: &[PipeSpec],
    traces: &[GasState],
    classes: &[FlowClass],
    mode: CouplingMode,
) -> Result<JunctionBoundary, JunctionError> {
    let problem = JunctionProblem::new(pipes.to_vec(), traces.to_vec(), classes.to_vec(), mode)?;
    let solution = solve_junction(&problem, None)?;
    let fluxes = pipes
        .iter()
        .zip(&solution.star_states)
        .map(|(p, y)| physical_flux(y, &p.params))
        .collect();
    let entropy_fluxes = pipes
        .iter()
        .zip(&solution.star_states)
        .map(|(p, y)| y.mass_flux() * y.entropy(&p.params))
        .collect();
    Ok(JunctionBoundary {
        solution,
        fluxes,
        entropy_fluxes,
    })
}

/// `cfl * min dx / max(|u - c|, |u + c|)` over all cells.
pub fn cfl_dt(network: &Network, cfl: f64) -> f64 {
    let mut dt = f64::INFINITY;
    for pipe in &network.pipes {
        let dx = pipe.dx();
        for c in &pipe.cells {
            if let Ok(s) = conservative_to_primitive(c, &pipe.spec.params) {
                let [l1, _, l3] = eigenvalues(&s, &pipe.spec.params);
                let speed = l1.abs().max(l3.abs());
                dt = dt.min(dx / speed);
            }
        }
    }
    cfl * dt
}
