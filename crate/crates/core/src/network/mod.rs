//! Finite-volume simulation of the Cauchy problem on a star network.
//!
//! Each pipe is a uniform grid over `[0, L]` with the junction at `x = 0`.
//! Cells hold conservative averages and are advanced by the first-order
//! Godunov scheme with exact Riemann fluxes; the junction face of every pipe
//! uses the flux of the generalised Riemann solution on the first-cell
//! traces. Source terms are added by Lie or Strang splitting.

mod diagnostics;
mod flux;
mod line;
mod scenario;
mod source;
mod step;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::euler::{classify_flow, StateError};
use crate::euler::{
    conservative_to_primitive, primitive_to_conservative, Conserved, FlowClass, GasState, PipeSpec,
};
use crate::junction::{CouplingMode, JunctionError};
use crate::riemann::RiemannError;

pub use diagnostics::{diagnostics, DiagnosticsRecord};
pub use flux::{cfl_dt, godunov_interface_flux, junction_boundary_flux, JunctionBoundary};
pub use line::LineDomain;
pub use scenario::{
    run_scenario, ConservationAudit, OutputPlan, Probe, ProbeSample, ProfileSnapshot, RunFailure,
    RunOutput, Scenario,
};
pub use source::{advance_source, SourceModel, Splitting};
pub use step::{advance_hyperbolic, step, step_subcycled, StepFluxes};

pub const MIN_CELLS: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("step {step}, t = {time}: junction: {source}")]
    Junction {
        step: usize,
        time: f64,
        source: JunctionError,
    },
    #[error("step {step}, t = {time}: pipe `{pipe}` interface {interface}: {source}")]
    Riemann {
        step: usize,
        time: f64,
        pipe: String,
        interface: usize,
        source: RiemannError,
    },
    #[error("step {step}, t = {time}: pipe `{pipe}` cell {cell} invalid: {source}")]
    InvalidCell {
        step: usize,
        time: f64,
        pipe: String,
        cell: usize,
        source: StateError,
    },
    #[error("step {step}, t = {time}: cannot classify junction trace of pipe `{pipe}`: {source}")]
    Classification {
        step: usize,
        time: f64,
        pipe: String,
        source: StateError,
    },
    #[error("invalid network: {0}")]
    Setup(String),
}

impl SimError {
    pub fn junction_error(&self) -> Option<&JunctionError> {
        match self {
            SimError::Junction { source, .. } => Some(source),
            _ => None,
        }
    }
}

/// Boundary treatment at the far end `x = L` of a pipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FarEnd {
    /// Zero-gradient ghost cell.
    #[default]
    Outflow,
    /// Reflective wall.
    Wall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPipe {
    pub spec: PipeSpec,
    pub length: f64,
    pub cells: Vec<Conserved>,
    pub far_end: FarEnd,
    /// Flow class used at the junction while the first-cell velocity is
    /// exactly zero and no earlier classification exists.
    pub flow_hint: Option<FlowClass>,
}

impl GridPipe {
    pub fn from_profile(
        spec: PipeSpec,
        length: f64,
        cells: usize,
        far_end: FarEnd,
        profile: impl Fn(f64) -> GasState,
    ) -> Result<Self, SimError> {
        spec.validate()
            .map_err(|e| SimError::Setup(e.to_string()))?;
        if cells < MIN_CELLS {
            return Err(SimError::Setup(format!(
                "pipe `{}` needs at least {MIN_CELLS} cells, got {cells}",
                spec.label
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(SimError::Setup(format!(
                "pipe `{}` has invalid length {length}",
                spec.label
            )));
        }
        let dx = length / cells as f64;
        let data = (0..cells)
            .map(|j| {
                let x = (j as f64 + 0.5) * dx;
                primitive_to_conservative(&profile(x), &spec.params)
                    .map_err(|e| SimError::Setup(format!("pipe `{}` cell {j}: {e}", spec.label)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            spec,
            length,
            cells: data,
            far_end,
            flow_hint: None,
        })
    }

    pub fn uniform(
        spec: PipeSpec,
        length: f64,
        cells: usize,
        far_end: FarEnd,
        state: GasState,
    ) -> Result<Self, SimError> {
        Self::from_profile(spec, length, cells, far_end, |_| state)
    }

    pub fn with_flow_hint(mut self, hint: FlowClass) -> Self {
        self.flow_hint = Some(hint);
        self
    }

    pub fn dx(&self) -> f64 {
        self.length / self.cells.len() as f64
    }

    pub fn cell_center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dx()
    }

    pub fn primitives(&self) -> Result<Vec<GasState>, StateError> {
        self.cells
            .iter()
            .map(|c| conservative_to_primitive(c, &self.spec.params))
            .collect()
    }

    /// Cell containing position `x`, clamped to the grid.
    pub fn cell_at(&self, x: f64) -> usize {
        ((x / self.dx()).floor().max(0.0) as usize).min(self.cells.len() - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub pipes: Vec<GridPipe>,
    pub mode: CouplingMode,
    pub time: f64,
    pub steps: usize,
    classes: Vec<Option<FlowClass>>,
}

impl Network {
    pub fn new(pipes: Vec<GridPipe>, mode: CouplingMode) -> Result<Self, SimError> {
        if pipes.len() < 2 {
            return Err(SimError::Setup(format!(
                "a junction needs at least 2 pipes, got {}",
                pipes.len()
            )));
        }
        for (i, p) in pipes.iter().enumerate() {
            if pipes[..i].iter().any(|o| o.spec.label == p.spec.label) {
                return Err(SimError::Setup(format!(
                    "duplicate pipe label `{}`",
                    p.spec.label
                )));
            }
        }
        let n = pipes.len();
        Ok(Self {
            pipes,
            mode,
            time: 0.0,
            steps: 0,
            classes: vec![None; n],
        })
    }

    /// First-cell states of every pipe.
    pub fn traces(&self) -> Result<Vec<GasState>, SimError> {
        self.pipes
            .iter()
            .enumerate()
            .map(|(i, p)| {
                conservative_to_primitive(&p.cells[0], &p.spec.params).map_err(|source| {
                    SimError::InvalidCell {
                        step: self.steps,
                        time: self.time,
                        pipe: self.pipes[i].spec.label.clone(),
                        cell: 0,
                        source,
                    }
                })
            })
            .collect()
    }

    /// Classification used at the last junction solve.
    pub fn classes(&self) -> &[Option<FlowClass>] {
        &self.classes
    }

    /// Classifies the junction traces. A trace with zero velocity keeps the
    /// previous class, falling back to the pipe's flow hint.
    pub fn classify(&self, traces: &[GasState]) -> Result<Vec<FlowClass>, SimError> {
        self.pipes
            .iter()
            .zip(traces)
            .zip(&self.classes)
            .map(|((pipe, trace), prev)| {
                match classify_flow(trace, &pipe.spec.params) {
                    Ok(c) => Ok(c),
                    Err(StateError::StagnantFlow) => {
                        prev.or(pipe.flow_hint).ok_or(StateError::StagnantFlow)
                    }
                    Err(e) => Err(e),
                }
                .map_err(|source| SimError::Classification {
                    step: self.steps,
                    time: self.time,
                    pipe: pipe.spec.label.clone(),
                    source,
                })
            })
            .collect()
    }

    pub(crate) fn set_classes(&mut self, classes: &[FlowClass]) {
        self.classes = classes.iter().map(|c| Some(*c)).collect();
    }

    pub fn specs(&self) -> Vec<PipeSpec> {
        self.pipes.iter().map(|p| p.spec.clone()).collect()
    }

    /// `sum_i |nu_i| sum_j f(U_ij) dx_i`.
    fn integrate(&self, f: impl Fn(&GridPipe, &Conserved) -> f64) -> f64 {
        self.pipes
            .iter()
            .map(|p| p.spec.nu_norm * p.dx() * p.cells.iter().map(|c| f(p, c)).sum::<f64>())
            .sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.integrate(|_, c| c.rho)
    }

    pub fn total_momentum(&self) -> f64 {
        self.integrate(|_, c| c.q)
    }

    pub fn total_energy(&self) -> f64 {
        self.integrate(|_, c| c.e)
    }

    /// `sum_i |nu_i| integral rho s dx`.
    pub fn total_entropy(&self) -> f64 {
        self.integrate(|p, c| match conservative_to_primitive(c, &p.spec.params) {
            Ok(s) => s.rho * s.entropy(&p.spec.params),
            Err(_) => f64::NAN,
        })
    }

    /// `sum_i |nu_i| integral rho (|s| + c_v) dx`, the magnitude against
    /// which entropy tolerances are measured.
    pub fn entropy_scale(&self) -> f64 {
        self.integrate(|p, c| match conservative_to_primitive(c, &p.spec.params) {
            Ok(s) => s.rho * (s.entropy(&p.spec.params).abs() + p.spec.params.c_v),
            Err(_) => f64::NAN,
        })
    }
}
