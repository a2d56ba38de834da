use serde::{Deserialize, Serialize};

use super::diagnostics::{diagnostics, DiagnosticsRecord};
use super::flux::cfl_dt;
use super::source::{SourceModel, Splitting};
use super::step::step;
use super::{Network, SimError};
use crate::euler::{conservative_to_primitive, GasState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub pipe: String,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputPlan {
    /// Diagnostics are recorded at `t = 0, dt_s, 2 dt_s, ..` and at the end
    /// time. `None` records only the initial and final states.
    pub sample_interval: Option<f64>,
    pub probes: Vec<Probe>,
    /// Keep full per-pipe profiles at every sample time.
    pub profiles: bool,
}

impl Default for OutputPlan {
    fn default() -> Self {
        Self {
            sample_interval: None,
            probes: Vec::new(),
            profiles: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub network: Network,
    pub end_time: f64,
    pub cfl: f64,
    pub source: SourceModel,
    pub splitting: Splitting,
    pub output: OutputPlan,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Setup(m));
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return bad(format!("cfl must lie in (0, 1), got {}", self.cfl));
        }
        if !(self.end_time > 0.0 && self.end_time.is_finite()) {
            return bad(format!("end_time must be positive, got {}", self.end_time));
        }
        self.source.validate().map_err(SimError::Setup)?;
        if let Some(dt) = self.output.sample_interval {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("sample_interval must be positive, got {dt}"));
            }
        }
        for probe in &self.output.probes {
            match self
                .network
                .pipes
                .iter()
                .find(|p| p.spec.label == probe.pipe)
            {
                None => return bad(format!("probe refers to unknown pipe `{}`", probe.pipe)),
                Some(p) if !(probe.x >= 0.0 && probe.x <= p.length) => {
                    return bad(format!(
                        "probe position {} outside pipe `{}`",
                        probe.x, probe.pipe
                    ))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Cell states of every pipe at one sample time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSnapshot {
    pub time: f64,
    pub pipes: Vec<Vec<GasState>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSample {
    pub time: f64,
    pub states: Vec<GasState>,
}

/// Step-by-step balance of the network integrals against the boundary
/// fluxes. Energy and entropy are only audited when the source is inactive.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConservationAudit {
    pub initial_mass: f64,
    pub initial_energy: f64,
    pub boundary_mass: f64,
    pub boundary_energy: f64,
    /// Largest `|dM - boundary| / M` over all steps.
    pub max_step_mass_defect: f64,
    pub max_step_energy_defect: f64,
    /// Smallest `(dS - boundary) / scale` over all steps; negative values
    /// mean entropy was destroyed.
    pub min_entropy_production: f64,
    /// `(M_final - M_0 - boundary) / M_0`.
    pub mass_drift: f64,
    pub energy_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub records: Vec<DiagnosticsRecord>,
    pub profiles: Vec<ProfileSnapshot>,
    pub probes: Vec<ProbeSample>,
    pub audit: ConservationAudit,
    pub network: Network,
}

/// A failed run: everything recorded before the failure plus the error.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub partial: RunOutput,
    pub error: SimError,
}

struct Recorder<'a> {
    scenario: &'a Scenario,
    probe_cells: Vec<(usize, usize)>,
    out: RunOutput,
}

impl Recorder<'_> {
    fn sample(&mut self, net: &Network) -> Result<(), SimError> {
        self.out.records.push(diagnostics(net)?);
        let states = |i: usize| {
            net.pipes[i]
                .primitives()
                .map_err(|source| SimError::InvalidCell {
                    step: net.steps,
                    time: net.time,
                    pipe: net.pipes[i].spec.label.clone(),
                    cell: 0,
                    source,
                })
        };
        if self.scenario.output.profiles {
            let pipes = (0..net.pipes.len()).map(states).collect::<Result<_, _>>()?;
            self.out.profiles.push(ProfileSnapshot {
                time: net.time,
                pipes,
            });
        }
        if !self.probe_cells.is_empty() {
            let mut values = Vec::with_capacity(self.probe_cells.len());
            for &(i, j) in &self.probe_cells {
                let pipe = &net.pipes[i];
                let s = conservative_to_primitive(&pipe.cells[j], &pipe.spec.params).map_err(
                    |source| SimError::InvalidCell {
                        step: net.steps,
                        time: net.time,
                        pipe: pipe.spec.label.clone(),
                        cell: j,
                        source,
                    },
                )?;
                values.push(s);
            }
            self.out.probes.push(ProbeSample {
                time: net.time,
                states: values,
            });
        }
        Ok(())
    }
}

/// Advances the scenario to its end time, recording diagnostics at the
/// sample times. Deterministic for a given scenario.
pub fn run_scenario(scenario: &Scenario) -> Result<RunOutput, Box<RunFailure>> {
    let mut net = scenario.network.clone();
    let empty = |net: &Network| RunOutput {
        records: Vec::new(),
        profiles: Vec::new(),
        probes: Vec::new(),
        audit: ConservationAudit::default(),
        network: net.clone(),
    };
    if let Err(error) = scenario.validate() {
        return Err(Box::new(RunFailure {
            partial: empty(&net),
            error,
        }));
    }
    let probe_cells = scenario
        .output
        .probes
        .iter()
        .map(|p| {
            let i = net
                .pipes
                .iter()
                .position(|q| q.spec.label == p.pipe)
                .expect("validated");
            (i, net.pipes[i].cell_at(p.x))
        })
        .collect();
    let mut rec = Recorder {
        scenario,
        probe_cells,
        out: empty(&net),
    };

    let result = advance(scenario, &mut net, &mut rec);
    rec.out.network = net;
    let audit = &mut rec.out.audit;
    if audit.initial_mass != 0.0 {
        let final_mass = rec.out.network.total_mass();
        let final_energy = rec.out.network.total_energy();
        audit.mass_drift =
            (final_mass - audit.initial_mass - audit.boundary_mass) / audit.initial_mass;
        audit.energy_drift =
            (final_energy - audit.initial_energy - audit.boundary_energy) / audit.initial_energy;
    }
    match result {
        Ok(()) => Ok(rec.out),
        Err(error) => Err(Box::new(RunFailure {
            partial: rec.out,
            error,
        })),
    }
}

fn advance(scenario: &Scenario, net: &mut Network, rec: &mut Recorder) -> Result<(), SimError> {
    let end = scenario.end_time;
    let audit_energy = !scenario.source.is_active();
    rec.out.audit.initial_mass = net.total_mass();
    rec.out.audit.initial_energy = net.total_energy();
    rec.out.audit.min_entropy_production = f64::INFINITY;
    rec.sample(net)?;

    let mut k = 1usize;
    while net.time < end {
        let target = match scenario.output.sample_interval {
            Some(interval) => (k as f64 * interval).min(end),
            None => end,
        };
        while net.time < target {
            let dt_cfl = cfl_dt(net, scenario.cfl);
            if !(dt_cfl > 0.0 && dt_cfl.is_finite()) {
                return Err(SimError::Setup(format!(
                    "CFL step {dt_cfl} at t = {}",
                    net.time
                )));
            }
            let hit = net.time + dt_cfl >= target;
            let dt = if hit { target - net.time } else { dt_cfl };

            let (m0, e0, s0) = (net.total_mass(), net.total_energy(), net.total_entropy());
            let fluxes = step(net, dt, &scenario.source, scenario.splitting)?;
            if hit {
                net.time = target;
            }

            let audit = &mut rec.out.audit;
            let mut boundary = crate::euler::Conserved::ZERO;
            let mut entropy_boundary = 0.0;
            for f in &fluxes {
                boundary += f.boundary_change();
                entropy_boundary += f.entropy_boundary_change();
            }
            audit.boundary_mass += boundary.rho;
            audit.boundary_energy += boundary.e;
            let mass_defect = (net.total_mass() - m0 - boundary.rho).abs() / m0;
            audit.max_step_mass_defect = audit.max_step_mass_defect.max(mass_defect);
            if audit_energy {
                let energy_defect = (net.total_energy() - e0 - boundary.e).abs() / e0.abs();
                audit.max_step_energy_defect = audit.max_step_energy_defect.max(energy_defect);
                let production =
                    (net.total_entropy() - s0 - entropy_boundary) / net.entropy_scale();
                audit.min_entropy_production = audit.min_entropy_production.min(production);
            }
        }
        rec.sample(net)?;
        k += 1;
    }
    Ok(())
}
