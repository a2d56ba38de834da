//! Construction of constant subsonic junction data that satisfies the
//! entropy-mix coupling exactly (up to rounding), i.e. stationary coupled
//! states.

use rand::Rng;

use super::{CouplingMode, JunctionError, JunctionProblem};
use crate::euler::{FlowClass, GasParams, GasState, PipeSpec};

/// One incoming pipe: cross-section, gas, density and (negative) Mach number.
#[derive(Debug, Clone)]
pub struct IncomingDesign {
    pub nu_norm: f64,
    pub params: GasParams,
    pub rho: f64,
    pub mach: f64,
}

/// One outgoing pipe: gas, (positive) Mach number and a relative weight used
/// to share the outflow between outgoing pipes.
#[derive(Debug, Clone)]
pub struct OutgoingDesign {
    pub params: GasParams,
    pub mach: f64,
    pub weight: f64,
}

/// Common total enthalpy plus per-pipe designs.
#[derive(Debug, Clone)]
pub struct StationaryDesign {
    pub enthalpy: f64,
    pub outgoing: Vec<OutgoingDesign>,
    pub incoming: Vec<IncomingDesign>,
}

/// Sound speed giving total enthalpy `h` at Mach `m`.
fn sound_speed_for(h: f64, mach: f64, params: &GasParams) -> f64 {
    (h / (1.0 / (params.gamma - 1.0) + 0.5 * mach * mach)).sqrt()
}

impl StationaryDesign {
    /// Builds pipes (outgoing first, labelled `o0, o1, .., i0, i1, ..`) and
    /// traces. The outgoing cross-sections are chosen to balance mass.
    pub fn build(&self) -> Result<(Vec<PipeSpec>, Vec<GasState>), JunctionError> {
        let h = self.enthalpy;
        let mut in_pipes = Vec::new();
        let mut in_states = Vec::new();
        let (mut inflow, mut weighted_entropy) = (0.0, 0.0);
        for (j, d) in self.incoming.iter().enumerate() {
            let c = sound_speed_for(h, d.mach, &d.params);
            let state = GasState::new(d.rho, d.mach * c, d.rho * c * c / d.params.gamma)?;
            inflow += d.nu_norm * state.mass_flux();
            weighted_entropy += d.nu_norm * state.mass_flux() * state.entropy(&d.params);
            in_pipes.push(PipeSpec::new(format!("i{j}"), d.nu_norm, d.params)?);
            in_states.push(state);
        }
        let s_star = weighted_entropy / inflow;

        let mut out_states = Vec::new();
        for d in &self.outgoing {
            let g = d.params.gamma;
            let c = sound_speed_for(h, d.mach, &d.params);
            // p / rho^g = exp(s*/c_v) with p = rho c^2 / g
            let k = (s_star / d.params.c_v).exp();
            let rho = (c * c / (g * k)).powf(1.0 / (g - 1.0));
            out_states.push(GasState::new(rho, d.mach * c, rho * c * c / g)?);
        }
        let weighted_out: f64 = self
            .outgoing
            .iter()
            .zip(&out_states)
            .map(|(d, s)| d.weight * s.mass_flux())
            .sum();
        let mut pipes = Vec::new();
        for (i, d) in self.outgoing.iter().enumerate() {
            let nu = -inflow * d.weight / weighted_out;
            pipes.push(PipeSpec::new(format!("o{i}"), nu, d.params)?);
        }
        pipes.extend(in_pipes);
        let mut states = out_states;
        states.extend(in_states);
        Ok((pipes, states))
    }

    pub fn problem(&self, mode: CouplingMode) -> Result<JunctionProblem, JunctionError> {
        let (pipes, traces) = self.build()?;
        let classes = (0..pipes.len())
            .map(|i| {
                if i < self.outgoing.len() {
                    FlowClass::Outgoing
                } else {
                    FlowClass::Incoming
                }
            })
            .collect();
        JunctionProblem::new(pipes, traces, classes, mode)
    }

    /// Random design with `n` pipes of which `n_out` are outgoing.
    /// Mach numbers lie in `[0.05, 0.7]`; the heat capacity is shared by all
    /// pipes while the adiabatic exponents vary per pipe.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, n_out: usize) -> Self {
        assert!(n > n_out && n_out > 0, "need N > N_o > 0");
        let c_v = rng.random_range(0.5..2.5);
        let gas = |rng: &mut R| GasParams {
            gamma: rng.random_range(1.2..1.67),
            c_v,
        };
        let outgoing = (0..n_out)
            .map(|_| OutgoingDesign {
                params: gas(rng),
                mach: rng.random_range(0.05..0.7),
                weight: rng.random_range(0.5..2.0),
            })
            .collect();
        let incoming = (n_out..n)
            .map(|_| IncomingDesign {
                nu_norm: rng.random_range(0.5..2.0),
                params: gas(rng),
                rho: rng.random_range(0.5..2.0),
                mach: -rng.random_range(0.05..0.7),
            })
            .collect();
        Self {
            enthalpy: rng.random_range(2.0..6.0),
            outgoing,
            incoming,
        }
    }
}
