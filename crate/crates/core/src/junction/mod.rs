//! Generalised Riemann problem at a junction of `N` pipes.
//!
//! Every pipe is parameterised by `x > 0` away from the junction. The trace
//! of pipe `i` at `x = 0+` is reached from the pipe data through the 3-Lax
//! curve (incoming pipes) or the 2-Lax curve composed with the 3-Lax curve
//! (outgoing pipes). The unknowns are one pressure `sigma_i` per pipe and one
//! density offset `tau_i` per outgoing pipe.
//!
//! Internally the pipes are held in canonical order: outgoing pipes first,
//! then the incoming pipe of maximal entropy, then the remaining incoming
//! pipes. [`JunctionProblem::order`] maps canonical indices back to the
//! caller's indices; [`StarSolution::star_states`] is in caller order.

mod lipschitz;
mod newton;
mod residual;
pub mod stationary;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::euler::{classify_flow, FlowClass, GasState, PipeSpec, StateError};
use crate::riemann::RiemannError;

pub use lipschitz::{lipschitz_probe, LipschitzStats};
pub use newton::{
    fallback_starts, solve_junction, solve_junction_pressure_mode, NEWTON_MAX_HALVINGS,
    NEWTON_MAX_ITERATIONS, NEWTON_TOLERANCE,
};
pub use residual::{
    coupling_jacobian, coupling_residual, entropy_mix, mix_entropy, star_trace_quantities, Inflow,
    TraceQuantities,
};

/// Degenerate inflow threshold relative to `max_i |nu_i| rho_i c_i`.
pub const DEGENERATE_INFLOW_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JunctionError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Riemann(#[from] RiemannError),
    #[error("pipe `{pipe}`: {source}")]
    PipeState { pipe: String, source: StateError },
    #[error("invalid junction topology: N = {n}, N_o = {n_out} (need N > N_o > 0)")]
    InvalidTopology { n: usize, n_out: usize },
    #[error("pressure-based coupling requires exactly one outgoing pipe, got {n_out}")]
    PressureModeTopology { n_out: usize },
    #[error("entropy-mix coupling expected, got {0:?}")]
    WrongMode(CouplingMode),
    #[error("{0}")]
    Dimension(String),
    #[error("duplicate pipe label `{0}`")]
    DuplicateLabel(String),
    #[error(
        "degenerate inflow: net incoming mass flux {net_inflow:e} below threshold {threshold:e}"
    )]
    DegenerateInflow { net_inflow: f64, threshold: f64 },
    #[error("Newton iteration did not converge after {iterations} iterations (scaled residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("singular coupling Jacobian at iteration {iteration}")]
    SingularJacobian { iteration: usize },
    #[error("flow reversal in pipe `{pipe}`: declared {declared:?}, star velocity {u_star}")]
    FlowReversal {
        pipe: String,
        declared: FlowClass,
        u_star: f64,
    },
    #[error("star state in pipe `{pipe}` is not subsonic (Mach {mach})")]
    Supersonic { pipe: String, mach: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingMode {
    /// Mass balance, equal total enthalpy, outgoing entropy equal to the
    /// inflow entropy mix.
    #[default]
    EntropyMix,
    /// Mass and energy balance with equal pressure.
    PressureEqual,
    /// Mass and energy balance with equal momentum flux.
    DynamicPressureEqual,
}

impl CouplingMode {
    pub fn is_pressure_based(self) -> bool {
        !matches!(self, CouplingMode::EntropyMix)
    }

    pub fn name(self) -> &'static str {
        match self {
            CouplingMode::EntropyMix => "entropy-mix",
            CouplingMode::PressureEqual => "pressure-equal",
            CouplingMode::DynamicPressureEqual => "dynamic-pressure-equal",
        }
    }
}

/// Lax curve parameters in canonical order: `sigma` has one entry per pipe,
/// `tau` one entry per outgoing pipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingParams {
    pub sigma: Vec<f64>,
    pub tau: Vec<f64>,
}

impl CouplingParams {
    pub fn dim(&self) -> usize {
        self.sigma.len() + self.tau.len()
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.sigma.iter().chain(self.tau.iter()).copied(),
        )
    }

    pub fn from_vector(v: &DVector<f64>, n: usize) -> Self {
        Self {
            sigma: v.iter().take(n).copied().collect(),
            tau: v.iter().skip(n).copied().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JunctionProblem {
    pipes: Vec<PipeSpec>,
    traces: Vec<GasState>,
    order: Vec<usize>,
    n_out: usize,
    mode: CouplingMode,
}

impl JunctionProblem {
    /// Builds a problem from caller-ordered pipes, traces and declared flow
    /// classes.
    pub fn new(
        pipes: Vec<PipeSpec>,
        traces: Vec<GasState>,
        classes: Vec<FlowClass>,
        mode: CouplingMode,
    ) -> Result<Self, JunctionError> {
        let n = pipes.len();
        if traces.len() != n || classes.len() != n {
            return Err(JunctionError::Dimension(format!(
                "{} pipes, {} traces, {} flow classes",
                n,
                traces.len(),
                classes.len()
            )));
        }
        for (i, pipe) in pipes.iter().enumerate() {
            pipe.validate()?;
            if pipes[..i].iter().any(|other| other.label == pipe.label) {
                return Err(JunctionError::DuplicateLabel(pipe.label.clone()));
            }
            let trace = &traces[i];
            trace
                .validate()
                .map_err(|source| JunctionError::PipeState {
                    pipe: pipe.label.clone(),
                    source,
                })?;
            let c = trace.sound_speed(&pipe.params);
            if trace.u.abs() >= c {
                return Err(JunctionError::PipeState {
                    pipe: pipe.label.clone(),
                    source: StateError::NotSubsonic {
                        speed: trace.u.abs(),
                        sound_speed: c,
                    },
                });
            }
        }
        let n_out = classes
            .iter()
            .filter(|c| **c == FlowClass::Outgoing)
            .count();
        if n < 2 || n_out == 0 || n_out == n {
            return Err(JunctionError::InvalidTopology { n, n_out });
        }
        if mode.is_pressure_based() && n_out != 1 {
            return Err(JunctionError::PressureModeTopology { n_out });
        }

        let mut order: Vec<usize> = (0..n)
            .filter(|&i| classes[i] == FlowClass::Outgoing)
            .collect();
        let mut incoming: Vec<usize> = (0..n)
            .filter(|&i| classes[i] == FlowClass::Incoming)
            .collect();
        let entropy = |i: usize| traces[i].entropy(&pipes[i].params);
        let mut best = 0;
        for (k, &i) in incoming.iter().enumerate() {
            if entropy(i) > entropy(incoming[best]) {
                best = k;
            }
        }
        let reference = incoming.remove(best);
        order.push(reference);
        order.extend(incoming);

        Ok(Self {
            pipes: order.iter().map(|&i| pipes[i].clone()).collect(),
            traces: order.iter().map(|&i| traces[i]).collect(),
            order,
            n_out,
            mode,
        })
    }

    /// Builds a problem classifying each trace by the sign of its velocity.
    pub fn classified(
        pipes: Vec<PipeSpec>,
        traces: Vec<GasState>,
        mode: CouplingMode,
    ) -> Result<Self, JunctionError> {
        let classes = pipes
            .iter()
            .zip(&traces)
            .map(|(pipe, trace)| {
                classify_flow(trace, &pipe.params).map_err(|source| JunctionError::PipeState {
                    pipe: pipe.label.clone(),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(pipes, traces, classes, mode)
    }

    pub fn n(&self) -> usize {
        self.pipes.len()
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn n_in(&self) -> usize {
        self.n() - self.n_out
    }

    /// Dimension `N + N_o` of the parameter space.
    pub fn dim(&self) -> usize {
        self.n() + self.n_out
    }

    /// Canonical index of the maximal-entropy incoming pipe.
    pub fn reference(&self) -> usize {
        self.n_out
    }

    pub fn mode(&self) -> CouplingMode {
        self.mode
    }

    /// Pipes in canonical order.
    pub fn pipes(&self) -> &[PipeSpec] {
        &self.pipes
    }

    /// Traces in canonical order.
    pub fn traces(&self) -> &[GasState] {
        &self.traces
    }

    /// `order()[k]` is the caller index of canonical pipe `k`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn class(&self, k: usize) -> FlowClass {
        if k < self.n_out {
            FlowClass::Outgoing
        } else {
            FlowClass::Incoming
        }
    }

    /// Pipes in caller order.
    pub fn caller_pipes(&self) -> Vec<PipeSpec> {
        self.to_caller_order(&self.pipes)
    }

    /// Traces in caller order.
    pub fn caller_traces(&self) -> Vec<GasState> {
        self.to_caller_order(&self.traces)
    }

    pub fn caller_classes(&self) -> Vec<FlowClass> {
        let classes: Vec<FlowClass> = (0..self.n()).map(|k| self.class(k)).collect();
        self.to_caller_order(&classes)
    }

    pub(crate) fn to_caller_order<T: Clone>(&self, canonical: &[T]) -> Vec<T> {
        let mut out: Vec<Option<T>> = vec![None; canonical.len()];
        for (k, &i) in self.order.iter().enumerate() {
            out[i] = Some(canonical[k].clone());
        }
        out.into_iter()
            .map(|v| v.expect("order is a permutation"))
            .collect()
    }

    /// Same pipes and classes with new caller-ordered traces.
    pub fn with_traces(&self, traces: Vec<GasState>) -> Result<Self, JunctionError> {
        Self::new(
            self.caller_pipes(),
            traces,
            self.caller_classes(),
            self.mode,
        )
    }

    /// Same traces and classes with new caller-ordered cross-section norms.
    pub fn with_nu_norms(&self, nu: &[f64]) -> Result<Self, JunctionError> {
        let mut pipes = self.caller_pipes();
        for (pipe, &v) in pipes.iter_mut().zip(nu) {
            pipe.nu_norm = v;
        }
        Self::new(
            pipes,
            self.caller_traces(),
            self.caller_classes(),
            self.mode,
        )
    }

    /// `sigma = trace pressures`, `tau = 0`.
    pub fn base_params(&self) -> CouplingParams {
        CouplingParams {
            sigma: self.traces.iter().map(|t| t.p).collect(),
            tau: vec![0.0; self.n_out],
        }
    }

    /// Base parameters with the incoming pressures lowered by one percent, so
    /// that every incoming pipe feeds the junction. Used when all incoming
    /// traces are at rest and the entropy mix is undefined at the base point.
    pub fn inflow_params(&self) -> CouplingParams {
        let mut params = self.base_params();
        for sigma in &mut params.sigma[self.n_out..] {
            *sigma *= 0.99;
        }
        params
    }

    /// `max_i |nu_i| rho_i c_i` over the traces.
    pub fn mass_flux_scale(&self) -> f64 {
        self.pipes
            .iter()
            .zip(&self.traces)
            .map(|(pipe, t)| pipe.nu_norm * t.rho * t.sound_speed(&pipe.params))
            .fold(0.0, f64::max)
    }

    /// Characteristic magnitude of each residual row, used to form the
    /// scaled convergence norm.
    pub fn row_scales(&self) -> Vec<f64> {
        let n = self.n();
        let mass = self.mass_flux_scale();
        let max_over = |f: &dyn Fn(usize) -> f64| (0..n).map(f).fold(0.0, f64::max);
        let mut scales = Vec::with_capacity(self.dim());
        scales.push(mass);
        match self.mode {
            CouplingMode::EntropyMix => {
                let h = max_over(&|k| {
                    let c = self.traces[k].sound_speed(&self.pipes[k].params);
                    c * c
                });
                let s = max_over(&|k| self.pipes[k].params.c_v);
                scales.extend(std::iter::repeat_n(h, n - 1));
                scales.extend(std::iter::repeat_n(s, self.n_out));
            }
            CouplingMode::PressureEqual | CouplingMode::DynamicPressureEqual => {
                let h = max_over(&|k| self.traces[k].enthalpy(&self.pipes[k].params));
                scales.push(mass * h);
                let p = max_over(&|k| {
                    let t = &self.traces[k];
                    t.p + t.rho * t.u * t.u
                });
                scales.extend(std::iter::repeat_n(p, n - 1));
            }
        }
        scales
    }

    /// `max_k |r_k| / scale_k`.
    pub fn scaled_norm(&self, residual: &DVector<f64>) -> f64 {
        residual
            .iter()
            .zip(self.row_scales())
            .map(|(r, s)| r.abs() / s)
            .fold(0.0, f64::max)
    }
}

/// Junction sums of mass, energy and entropy flux together with the largest
/// single-pipe magnitude of each.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JunctionFluxes {
    pub mass: f64,
    pub energy: f64,
    pub entropy: f64,
    pub mass_scale: f64,
    pub energy_scale: f64,
    pub entropy_scale: f64,
}

impl JunctionFluxes {
    /// Junction sums from caller-ordered pipes and star states.
    pub fn from_states(pipes: &[PipeSpec], states: &[GasState]) -> Self {
        let mut out = Self::default();
        for (pipe, y) in pipes.iter().zip(states) {
            let nu = pipe.nu_norm;
            let f = crate::euler::physical_flux(y, &pipe.params);
            let s = y.entropy(&pipe.params);
            out.mass += nu * f.rho;
            out.energy += nu * f.e;
            out.entropy += nu * f.rho * s;
            out.mass_scale = out.mass_scale.max(nu * f.rho.abs());
            out.energy_scale = out.energy_scale.max(nu * f.e.abs());
            // entropy is defined up to a constant; c_v keeps the scale meaningful when s ~ 0
            out.entropy_scale = out
                .entropy_scale
                .max(nu * f.rho.abs() * s.abs().max(pipe.params.c_v));
        }
        out
    }

    /// Sums divided by their scales; a zero scale yields the raw sum.
    pub fn relative(&self) -> [f64; 3] {
        let rel = |v: f64, s: f64| if s > 0.0 { v.abs() / s } else { v.abs() };
        [
            rel(self.mass, self.mass_scale),
            rel(self.energy, self.energy_scale),
            rel(self.entropy, self.entropy_scale),
        ]
    }

    pub fn max_relative(&self) -> f64 {
        self.relative().into_iter().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarSolution {
    pub mode: CouplingMode,
    /// Root in canonical order.
    pub params: CouplingParams,
    /// Canonical index to caller index.
    pub order: Vec<usize>,
    /// Junction traces in caller order.
    pub star_states: Vec<GasState>,
    /// Scaled max-norm of the residual at the root.
    pub residual_norm: f64,
    pub iterations: usize,
    pub fluxes: JunctionFluxes,
}

impl StarSolution {
    /// `sigma` for the pipe with caller index `i`.
    pub fn sigma_of(&self, i: usize) -> f64 {
        let k = self
            .order
            .iter()
            .position(|&o| o == i)
            .expect("caller index in range");
        self.params.sigma[k]
    }

    /// `tau` for the pipe with caller index `i`, if it is outgoing.
    pub fn tau_of(&self, i: usize) -> Option<f64> {
        let k = self
            .order
            .iter()
            .position(|&o| o == i)
            .expect("caller index in range");
        self.params.tau.get(k).copied()
    }
}

/// Mass, energy and entropy flux sums of a solved junction.
pub fn verify_conservation(sol: &StarSolution, problem: &JunctionProblem) -> JunctionFluxes {
    JunctionFluxes::from_states(&problem.caller_pipes(), &sol.star_states)
}
