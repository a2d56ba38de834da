use serde::{Deserialize, Serialize};

use super::flux::junction_boundary_flux;
use super::{Network, SimError};
use crate::euler::conservative_to_primitive;
use crate::junction::JunctionFluxes;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub step: usize,
    pub mass: f64,
    pub energy: f64,
    pub entropy: f64,
    /// Junction sums of the generalised Riemann solution on the current traces.
    pub junction: JunctionFluxes,
    pub max_mach: f64,
    /// `sum_j |rho_{j+1} - rho_j| + |q_{j+1} - q_j| + |E_{j+1} - E_j|` per pipe.
    pub total_variation: Vec<f64>,
}

/// Snapshot of the network integrals. Solves the junction problem on the
/// current traces, so it fails where the next step would.
pub fn diagnostics(network: &Network) -> Result<DiagnosticsRecord, SimError> {
    let traces = network.traces()?;
    let classes = network.classify(&traces)?;
    let boundary = junction_boundary_flux(&network.specs(), &traces, &classes, network.mode)
        .map_err(|source| SimError::Junction {
            step: network.steps,
            time: network.time,
            source,
        })?;

    let mut max_mach: f64 = 0.0;
    let mut total_variation = Vec::with_capacity(network.pipes.len());
    for pipe in &network.pipes {
        for c in &pipe.cells {
            if let Ok(s) = conservative_to_primitive(c, &pipe.spec.params) {
                max_mach = max_mach.max(s.mach(&pipe.spec.params));
            }
        }
        let tv = pipe.cells.windows(2).map(|w| (w[1] - w[0]).norm_l1()).sum();
        total_variation.push(tv);
    }

    Ok(DiagnosticsRecord {
        time: network.time,
        step: network.steps,
        mass: network.total_mass(),
        energy: network.total_energy(),
        entropy: network.total_entropy(),
        junction: boundary.solution.fluxes,
        max_mach,
        total_variation,
    })
}
