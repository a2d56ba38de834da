use serde::{Deserialize, Serialize};

use super::flux::{interface_state, junction_boundary_flux, JunctionBoundary};
use super::source::{advance_source, SourceModel, Splitting};
use super::{FarEnd, Network, SimError};
use crate::euler::{conservative_to_primitive, physical_flux, Conserved, Flux};

/// Boundary fluxes used by one hyperbolic step, for conservation audits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFluxes {
    pub dt: f64,
    pub nu: Vec<f64>,
    pub junction: JunctionBoundary,
    pub far: Vec<Flux>,
    pub far_entropy: Vec<f64>,
}

impl StepFluxes {
    /// `dt * sum_i |nu_i| (F_i(0) - F_i(L))`: the change of the network
    /// integrals of `(rho, q, E)` implied by the boundary fluxes.
    pub fn boundary_change(&self) -> Conserved {
        let mut net = Conserved::ZERO;
        for ((nu, fj), ff) in self.nu.iter().zip(&self.junction.fluxes).zip(&self.far) {
            net += (self.dt * nu) * (*fj - *ff);
        }
        net
    }

    /// Same as [`boundary_change`](Self::boundary_change) for `rho s`.
    pub fn entropy_boundary_change(&self) -> f64 {
        self.nu
            .iter()
            .zip(&self.junction.entropy_fluxes)
            .zip(&self.far_entropy)
            .map(|((nu, qj), qf)| self.dt * nu * (qj - qf))
            .sum()
    }
}

/// One Godunov step of the homogeneous system. The network is left untouched
/// on error. Time and step counters are not advanced; see [`step`].
pub fn advance_hyperbolic(network: &mut Network, dt: f64) -> Result<StepFluxes, SimError> {
    let (step, time) = (network.steps, network.time);
    let traces = network.traces()?;
    let classes = network.classify(&traces)?;
    let junction = junction_boundary_flux(&network.specs(), &traces, &classes, network.mode)
        .map_err(|source| SimError::Junction { step, time, source })?;

    let mut updated = Vec::with_capacity(network.pipes.len());
    let mut far = Vec::with_capacity(network.pipes.len());
    let mut far_entropy = Vec::with_capacity(network.pipes.len());
    for (i, pipe) in network.pipes.iter().enumerate() {
        let params = &pipe.spec.params;
        let invalid = |cell, source| SimError::InvalidCell {
            step,
            time,
            pipe: pipe.spec.label.clone(),
            cell,
            source,
        };
        let states = pipe
            .cells
            .iter()
            .enumerate()
            .map(|(j, c)| conservative_to_primitive(c, params).map_err(|e| invalid(j, e)))
            .collect::<Result<Vec<_>, _>>()?;
        let m = states.len();

        let mut faces = Vec::with_capacity(m + 1);
        faces.push(junction.fluxes[i]);
        for j in 1..m {
            let y = interface_state(&states[j - 1], &states[j], params).map_err(|source| {
                SimError::Riemann {
                    step,
                    time,
                    pipe: pipe.spec.label.clone(),
                    interface: j,
                    source,
                }
            })?;
            faces.push(physical_flux(&y, params));
        }
        let last = &states[m - 1];
        let ghost = match pipe.far_end {
            FarEnd::Outflow => *last,
            FarEnd::Wall => last.mirrored(),
        };
        let y = interface_state(last, &ghost, params).map_err(|source| SimError::Riemann {
            step,
            time,
            pipe: pipe.spec.label.clone(),
            interface: m,
            source,
        })?;
        faces.push(physical_flux(&y, params));
        far.push(faces[m]);
        far_entropy.push(y.mass_flux() * y.entropy(params));

        let ratio = dt / pipe.dx();
        let cells = pipe
            .cells
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let next = *c - ratio * (faces[j + 1] - faces[j]);
                conservative_to_primitive(&next, params)
                    .map(|_| next)
                    .map_err(|e| invalid(j, e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        updated.push(cells);
    }

    for (pipe, cells) in network.pipes.iter_mut().zip(updated) {
        pipe.cells = cells;
    }
    network.set_classes(&classes);
    Ok(StepFluxes {
        dt,
        nu: network.pipes.iter().map(|p| p.spec.nu_norm).collect(),
        junction,
        far,
        far_entropy,
    })
}

/// One split step over `dt`, advancing the network clock.
pub fn step(
    network: &mut Network,
    dt: f64,
    source: &SourceModel,
    splitting: Splitting,
) -> Result<Vec<StepFluxes>, SimError> {
    step_subcycled(network, dt, 1, source, splitting)
}

/// Split step whose hyperbolic part is taken as `substeps` Godunov steps of
/// size `dt / substeps`.
pub fn step_subcycled(
    network: &mut Network,
    dt: f64,
    substeps: usize,
    source: &SourceModel,
    splitting: Splitting,
) -> Result<Vec<StepFluxes>, SimError> {
    let substeps = substeps.max(1);
    let h = dt / substeps as f64;
    let active = source.is_active();
    if active && splitting == Splitting::Strang {
        advance_source(network, 0.5 * dt, source)?;
    }
    let mut fluxes = Vec::with_capacity(substeps);
    for _ in 0..substeps {
        fluxes.push(advance_hyperbolic(network, h)?);
    }
    if active {
        let tail = match splitting {
            Splitting::Lie => dt,
            Splitting::Strang => 0.5 * dt,
        };
        advance_source(network, tail, source)?;
    }
    network.time += dt;
    network.steps += 1;
    Ok(fluxes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{FlowClass, GasParams, GasState, PipeSpec};
    use crate::junction::CouplingMode;
    use crate::network::GridPipe;

    fn tee() -> Network {
        let p = GasParams::default();
        let pipe = |label: &str, nu, state: GasState, hint| {
            GridPipe::uniform(
                PipeSpec::new(label, nu, p).unwrap(),
                1.0,
                20,
                FarEnd::Outflow,
                state,
            )
            .unwrap()
            .with_flow_hint(hint)
        };
        let pipes = vec![
            pipe(
                "a",
                1.0,
                GasState::new(1.0, 0.0, 1.0).unwrap(),
                FlowClass::Outgoing,
            ),
            pipe(
                "b",
                1.0,
                GasState::new(1.5, 0.0, 1.6).unwrap(),
                FlowClass::Incoming,
            ),
            pipe(
                "c",
                0.5,
                GasState::new(1.2, 0.0, 1.3).unwrap(),
                FlowClass::Incoming,
            ),
        ];
        Network::new(pipes, CouplingMode::EntropyMix).unwrap()
    }

    #[test]
    fn conservation_and_entropy_per_step() {
        let mut net = tee();
        for _ in 0..40 {
            let dt = crate::network::cfl_dt(&net, 0.8);
            let (m0, e0, s0) = (net.total_mass(), net.total_energy(), net.total_entropy());
            let f = step(&mut net, dt, &SourceModel::NONE, Splitting::Strang)
                .unwrap()
                .remove(0);
            let b = f.boundary_change();
            assert!((net.total_mass() - m0 - b.rho).abs() <= 1e-12 * m0);
            assert!((net.total_energy() - e0 - b.e).abs() <= 1e-12 * e0);
            let gain = net.total_entropy() - s0 - f.entropy_boundary_change();
            assert!(gain >= -1e-10 * net.entropy_scale(), "{gain}");
        }
        assert!(net.classes().iter().all(|c| c.is_some()));
    }

    #[test]
    fn failed_step_leaves_network_unchanged() {
        let mut net = tee();
        let before = net.clone();
        assert!(advance_hyperbolic(&mut net, 50.0).is_err());
        assert_eq!(net, before);
    }
}
