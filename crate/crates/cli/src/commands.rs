use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use pipenet_core::euler::classify_flow;
use pipenet_core::network::{run_scenario, RunOutput, Scenario};
use pipenet_core::riemann::{sample_wave_fan, WaveFan, WaveKind};
use pipenet_core::{CouplingMode, FlowClass, JunctionProblem, StateError};

use crate::config::{load_file, ScenarioFile};
use crate::output::{num, write_bundle, Metadata, Tolerances};
use crate::verify::{run_all, JacobianFn, VerifyOptions};
use crate::{CliError, Exit};

/// Text for stdout and stderr plus the exit status of a finished command.
#[derive(Debug, Default)]
pub struct Report {
    pub stdout: String,
    pub stderr: String,
    pub failed_checks: bool,
}

fn classes(
    file: &ScenarioFile,
    states: &[pipenet_core::GasState],
) -> Result<Vec<FlowClass>, CliError> {
    file.pipes
        .iter()
        .zip(states)
        .map(|(p, s)| {
            let params = pipenet_core::GasParams {
                gamma: p.gamma,
                c_v: p.c_v,
            };
            match classify_flow(s, &params) {
                Err(StateError::StagnantFlow) => p.flow_hint.ok_or_else(|| {
                    CliError::new(
                        Exit::Numerical,
                        format!(
                            "pipe `{}` is at rest; set `flow_hint` to classify it",
                            p.label
                        ),
                    )
                }),
                other => other.map_err(|e| {
                    CliError::new(Exit::Numerical, format!("pipe `{}`: {e}", p.label))
                }),
            }
        })
        .collect()
}

pub fn solve_junction(path: &Path) -> Result<Report, CliError> {
    let file = load_file(path)?;
    let states = file.constant_states()?;
    let pipes = file.pipe_specs()?;
    let classes = classes(&file, &states)?;
    let problem = JunctionProblem::new(pipes.clone(), states, classes.clone(), file.junction.mode)?;
    let sol = pipenet_core::junction::solve_junction(&problem, None)?;

    let mut out = String::new();
    writeln!(out, "mode = {}", sol.mode.name()).unwrap();
    writeln!(out, "iterations = {}", sol.iterations).unwrap();
    writeln!(out, "residual_norm = {}", num(sol.residual_norm)).unwrap();
    writeln!(out, "pipe,class,sigma,tau,rho,u,p").unwrap();
    for (i, (pipe, y)) in pipes.iter().zip(&sol.star_states).enumerate() {
        let class = match classes[i] {
            FlowClass::Incoming => "incoming",
            FlowClass::Outgoing => "outgoing",
        };
        let tau = sol.tau_of(i).map(num).unwrap_or_else(|| "-".into());
        writeln!(
            out,
            "{},{class},{},{tau},{},{},{}",
            pipe.label,
            num(sol.sigma_of(i)),
            num(y.rho),
            num(y.u),
            num(y.p)
        )
        .unwrap();
    }
    let f = &sol.fluxes;
    let [rm, re, rs] = f.relative();
    writeln!(
        out,
        "mass_flux_sum = {} (relative {})",
        num(f.mass),
        num(rm)
    )
    .unwrap();
    writeln!(
        out,
        "energy_flux_sum = {} (relative {})",
        num(f.energy),
        num(re)
    )
    .unwrap();
    writeln!(
        out,
        "entropy_flux_sum = {} (relative {})",
        num(f.entropy),
        num(rs)
    )
    .unwrap();
    Ok(Report {
        stdout: out,
        ..Report::default()
    })
}

fn wave_name(kind: WaveKind) -> &'static str {
    match kind {
        WaveKind::Shock => "shock",
        WaveKind::Rarefaction => "rarefaction",
        WaveKind::Contact => "contact",
    }
}

/// Standard Riemann problem of a two-pipe file: the second pipe, mirrored,
/// on the left of the first.
pub fn shock_tube(path: &Path, profile: Option<&Path>) -> Result<Report, CliError> {
    let file = load_file(path)?;
    if file.pipes.len() != 2 {
        return Err(CliError::new(
            Exit::Config,
            format!("shock-tube needs exactly 2 pipes, got {}", file.pipes.len()),
        ));
    }
    let (a, b) = (&file.pipes[0], &file.pipes[1]);
    if a.gamma != b.gamma || a.c_v != b.c_v {
        return Err(CliError::new(
            Exit::Config,
            "shock-tube pipes must share gamma and c_v",
        ));
    }
    let params = pipenet_core::GasParams {
        gamma: a.gamma,
        c_v: a.c_v,
    };
    let states = file.constant_states()?;
    let (left, right) = (states[1].mirrored(), states[0]);
    let fan = WaveFan::new(&left, &right, &params)
        .map_err(|e| CliError::new(Exit::Numerical, e.to_string()))?;
    let star = fan.star;

    let mut out = String::new();
    writeln!(out, "p_star = {}", num(star.p_star)).unwrap();
    writeln!(out, "u_star = {}", num(star.u_star)).unwrap();
    writeln!(out, "rho_star_left = {}", num(star.rho_l_star)).unwrap();
    writeln!(out, "rho_star_right = {}", num(star.rho_r_star)).unwrap();
    for (k, w) in fan.waves.iter().enumerate() {
        writeln!(
            out,
            "wave{} = {} [{}, {}]",
            k + 1,
            wave_name(w.kind),
            num(w.slow),
            num(w.fast)
        )
        .unwrap();
    }
    let y = sample_wave_fan(&fan, 0.0, &params);
    writeln!(out, "trace = {},{},{}", num(y.rho), num(y.u), num(y.p)).unwrap();

    if let Some(target) = profile {
        let t = file.run.end_time;
        let dx = (b.length + a.length) / (a.cells + b.cells) as f64;
        let mut csv = String::from("x,rho,u,p\n");
        for j in 0..a.cells + b.cells {
            let x = -b.length + (j as f64 + 0.5) * dx;
            let s = sample_wave_fan(&fan, x / t, &params);
            writeln!(csv, "{},{},{},{}", num(x), num(s.rho), num(s.u), num(s.p)).unwrap();
        }
        std::fs::write(target, csv)?;
    }
    Ok(Report {
        stdout: out,
        ..Report::default()
    })
}

struct RunSummary {
    line: String,
    max_entropy_flux: f64,
}

fn run_one(file: &ScenarioFile, scenario: &Scenario, dir: &Path) -> Result<RunSummary, CliError> {
    let started = Instant::now();
    let result = run_scenario(scenario);
    let wall = started.elapsed().as_secs_f64();
    let (run, error): (RunOutput, _) = match result {
        Ok(run) => (run, None),
        Err(failure) => (failure.partial, Some(failure.error)),
    };
    let audit = &run.audit;
    let config = file.to_toml();
    let metadata = Metadata {
        program: "pipenet",
        version: env!("CARGO_PKG_VERSION"),
        config: &config,
        mode: scenario.network.mode.name(),
        tolerances: Tolerances::default(),
        steps: run.network.steps,
        final_time: run.network.time,
        mass_drift: audit.mass_drift,
        energy_drift: audit.energy_drift,
        max_step_mass_defect: audit.max_step_mass_defect,
        max_step_energy_defect: audit.max_step_energy_defect,
        min_entropy_production: audit
            .min_entropy_production
            .is_finite()
            .then_some(audit.min_entropy_production),
        error: error.as_ref().map(|e| e.to_string()),
        wall_time_seconds: wall,
    };
    let labels: Vec<String> = scenario
        .output
        .probes
        .iter()
        .map(|p| p.pipe.clone())
        .collect();
    write_bundle(dir, &run, &labels, &metadata)?;
    let line = format!(
        "{}: steps = {}, final time = {}, mass drift = {:.3e}, energy drift = {:.3e}",
        scenario.network.mode.name(),
        run.network.steps,
        num(run.network.time),
        audit.mass_drift,
        audit.energy_drift
    );
    if let Some(e) = error {
        let mut err = CliError::from(e);
        err.message = format!("{} (partial output in {})", err.message, dir.display());
        return Err(err);
    }
    let max_entropy_flux = run
        .records
        .iter()
        .map(|r| r.junction.entropy.abs())
        .fold(0.0, f64::max);
    Ok(RunSummary {
        line,
        max_entropy_flux,
    })
}

pub fn simulate(path: &Path, mode_compare: bool, out: Option<&Path>) -> Result<Report, CliError> {
    let file = load_file(path)?;
    let dir: PathBuf = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| file.output.directory.clone());
    let mut report = Report::default();
    if !mode_compare {
        let scenario = file.to_scenario()?;
        let summary = run_one(&file, &scenario, &dir)?;
        report.stdout = summary.line + "\n";
        return Ok(report);
    }
    let mut fluxes = Vec::new();
    for mode in [CouplingMode::EntropyMix, CouplingMode::PressureEqual] {
        let mut variant = file.clone();
        variant.junction.mode = mode;
        let scenario = variant.to_scenario()?;
        let summary = run_one(&variant, &scenario, &dir.join(mode.name()))?;
        report.stdout += &summary.line;
        report.stdout.push('\n');
        fluxes.push(summary.max_entropy_flux);
    }
    writeln!(
        report.stdout,
        "max |junction entropy flux|: entropy-mix = {}, pressure-equal = {}",
        num(fluxes[0]),
        num(fluxes[1])
    )
    .unwrap();
    Ok(report)
}

pub fn verify(opts: &VerifyOptions, jacobian: &JacobianFn) -> Report {
    let mut report = Report::default();
    if opts.trials == 0 {
        report.stderr = "warning: no trials requested, nothing was checked\n".into();
    }
    writeln!(
        report.stdout,
        "seed = {}, trials = {}",
        opts.seed, opts.trials
    )
    .unwrap();
    for r in run_all(opts, jacobian) {
        let status = if r.passed { "PASS" } else { "FAIL" };
        writeln!(
            report.stdout,
            "{status} {:<22} trials = {:<4} worst = {:.3e} threshold = {:.1e}  {}",
            r.name, r.trials, r.worst, r.threshold, r.detail
        )
        .unwrap();
        report.failed_checks |= !r.passed;
    }
    report
}
