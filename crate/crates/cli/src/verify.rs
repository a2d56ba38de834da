//! Randomised self-checks behind `pipenet verify`.

use pipenet_core::junction::stationary::StationaryDesign;
use pipenet_core::junction::{
    coupling_jacobian, coupling_residual, lipschitz_probe, solve_junction,
};
use pipenet_core::nalgebra::{DMatrix, Matrix3};
use pipenet_core::network::{advance_hyperbolic, cfl_dt, FarEnd, GridPipe, LineDomain};
use pipenet_core::riemann::{sample_wave_fan, WaveFan};
use pipenet_core::{
    CouplingMode, CouplingParams, FlowClass, GasParams, GasState, JunctionError, JunctionProblem,
    Network, PipeSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const FD_STEP: f64 = 1e-6;
pub const JACOBIAN_TOLERANCE: f64 = 1e-5;
pub const DET_MARGIN: f64 = 1e-12;
pub const TWO_PIPE_STAR_TOLERANCE: f64 = 1e-9;
pub const TWO_PIPE_EVOLUTION_TOLERANCE: f64 = 1e-12;
pub const TWO_PIPE_STEPS: usize = 50;
pub const LIPSCHITZ_DELTAS: [f64; 3] = [1e-2, 1e-3, 1e-4];
pub const LIPSCHITZ_TRIALS: usize = 50;
pub const LIPSCHITZ_GROWTH: f64 = 2.0;

pub type JacobianFn<'a> =
    dyn Fn(&CouplingParams, &JunctionProblem) -> Result<DMatrix<f64>, JunctionError> + 'a;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    pub trials: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 20240607,
            trials: 100,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub trials: usize,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckReport {
    fn no_trials(name: &'static str, threshold: f64) -> Self {
        Self {
            name,
            passed: true,
            trials: 0,
            worst: f64::NAN,
            threshold,
            detail: "no trials".into(),
        }
    }
}

/// Random stationary junction with `N` in `2..=6` and `N_o` in `1..N`.
pub fn random_stationary(rng: &mut ChaCha8Rng) -> JunctionProblem {
    loop {
        let n = rng.random_range(2..=6);
        let n_out = rng.random_range(1..n);
        if let Ok(p) = StationaryDesign::random(rng, n, n_out).problem(CouplingMode::EntropyMix) {
            return p;
        }
    }
}

/// Central-difference Jacobian of the coupling residual.
pub fn finite_difference_jacobian(
    params: &CouplingParams,
    problem: &JunctionProblem,
    h: f64,
) -> Result<DMatrix<f64>, JunctionError> {
    let x = params.to_vector();
    let dim = x.len();
    let n = problem.n();
    let mut jac = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        let mut plus = x.clone();
        let mut minus = x.clone();
        plus[k] += h;
        minus[k] -= h;
        let rp = coupling_residual(&CouplingParams::from_vector(&plus, n), problem)?;
        let rm = coupling_residual(&CouplingParams::from_vector(&minus, n), problem)?;
        jac.set_column(k, &((rp - rm) / (2.0 * h)));
    }
    Ok(jac)
}

/// Row of the enthalpy condition `h_ref - h_k` for canonical pipe `k`.
fn enthalpy_row(problem: &JunctionProblem, k: usize) -> usize {
    if k < problem.reference() {
        1 + k
    } else {
        k
    }
}

/// Sign conditions of the Jacobian at a stationary base point. Returns a
/// description of the first violation.
pub fn sign_violation(jac: &DMatrix<f64>, problem: &JunctionProblem) -> Option<String> {
    let n = problem.n();
    let n_out = problem.n_out();
    let r = problem.reference();
    let tol = 1e-12;
    for k in 0..n {
        if !(jac[(0, k)] > 0.0) {
            return Some(format!("q_sigma[{k}] = {} not > 0", jac[(0, k)]));
        }
        let h_sigma = if k == r {
            jac[(1, r)]
        } else {
            -jac[(enthalpy_row(problem, k), k)]
        };
        if !(h_sigma > 0.0) {
            return Some(format!("h_sigma[{k}] = {h_sigma} not > 0"));
        }
    }
    for i in 0..n_out {
        if !(jac[(0, n + i)] > 0.0) {
            return Some(format!("q_tau[{i}] = {} not > 0", jac[(0, n + i)]));
        }
        let h_tau = -jac[(1 + i, n + i)];
        if !(h_tau < 0.0) {
            return Some(format!("h_tau[{i}] = {h_tau} not < 0"));
        }
        let s_tau = jac[(n + i, n + i)];
        if !(s_tau < 0.0) {
            return Some(format!("s_tau[{i}] = {s_tau} not < 0"));
        }
        let s_mix = -jac[(n + i, r)];
        if s_mix > tol * problem.pipes()[r].params.c_v {
            return Some(format!("s*_sigma[ref] = {s_mix} not <= 0"));
        }
    }
    None
}

/// Compares `jacobian` against central differences at stationary base
/// points and checks the sign pattern of the analytic entries.
pub fn jacobian_audit(opts: &VerifyOptions, jacobian: &JacobianFn) -> CheckReport {
    const NAME: &str = "jacobian";
    if opts.trials == 0 {
        return CheckReport::no_trials(NAME, JACOBIAN_TOLERANCE);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for t in 0..opts.trials {
        let problem = random_stationary(&mut rng);
        let base = problem.base_params();
        let result = jacobian(&base, &problem)
            .and_then(|j| Ok((j, finite_difference_jacobian(&base, &problem, FD_STEP)?)));
        match result {
            Ok((analytic, fd)) => {
                let dev = (&analytic - &fd).abs().max();
                worst = worst.max(dev);
                if dev > JACOBIAN_TOLERANCE {
                    failures.push(format!("trial {t}: deviation {dev:.3e}"));
                }
                if let Some(v) = sign_violation(&analytic, &problem) {
                    failures.push(format!("trial {t}: {v}"));
                }
            }
            Err(e) => failures.push(format!("trial {t}: {e}")),
        }
    }
    finish(NAME, opts.trials, worst, JACOBIAN_TOLERANCE, failures)
}

/// `D_i` of outgoing pipe `i` with rows scaled by the residual row scales
/// and columns by the pressure and density magnitudes.
pub fn scaled_block(jac: &DMatrix<f64>, problem: &JunctionProblem, i: usize) -> Matrix3<f64> {
    let n = problem.n();
    let r = problem.reference();
    let rows = [0, 1 + i, n + i];
    let cols = [i, r, n + i];
    let scales = problem.row_scales();
    let p_scale = problem.traces().iter().map(|t| t.p).fold(0.0, f64::max);
    let rho_scale = problem.traces().iter().map(|t| t.rho).fold(0.0, f64::max);
    let col_scale = [p_scale, p_scale, rho_scale];
    Matrix3::from_fn(|a, b| jac[(rows[a], cols[b])] * col_scale[b] / scales[rows[a]])
}

/// Every `D_i` of every configuration of the Jacobian audit has a strictly
/// negative scaled determinant.
pub fn determinant_sweep(opts: &VerifyOptions) -> CheckReport {
    const NAME: &str = "det(D_i)";
    if opts.trials == 0 {
        return CheckReport::no_trials(NAME, -DET_MARGIN);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    for t in 0..opts.trials {
        let problem = random_stationary(&mut rng);
        match coupling_jacobian(&problem.base_params(), &problem) {
            Ok(jac) => {
                for i in 0..problem.n_out() {
                    let det = scaled_block(&jac, &problem, i).determinant();
                    worst = worst.max(det);
                    if !(det < -DET_MARGIN) {
                        failures.push(format!("trial {t}, D_{i}: det = {det:.3e}"));
                    }
                }
            }
            Err(e) => failures.push(format!("trial {t}: {e}")),
        }
    }
    finish(NAME, opts.trials, worst, -DET_MARGIN, failures)
}

/// Random subsonic pair `(left, right)` whose star region keeps the flow
/// direction, so the mirrored two-pipe junction has one incoming and one
/// outgoing pipe.
pub fn random_mirrored_pair(rng: &mut ChaCha8Rng) -> (GasParams, GasState, GasState) {
    loop {
        let params = GasParams {
            gamma: rng.random_range(1.2..1.67),
            c_v: rng.random_range(0.5..2.0),
        };
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let rho_l = rng.random_range(0.5..2.0);
        let p_l = rng.random_range(0.5..2.0);
        let rho_r = rho_l * rng.random_range(0.7..1.3);
        let p_r = p_l * rng.random_range(0.7..1.3);
        let c = |rho: f64, p: f64| (params.gamma * p / rho).sqrt();
        let u_l = sign * rng.random_range(0.05..0.5) * c(rho_l, p_l);
        let u_r = sign * rng.random_range(0.05..0.5) * c(rho_r, p_r);
        let (Ok(left), Ok(right)) = (
            GasState::new(rho_l, u_l, p_l),
            GasState::new(rho_r, u_r, p_r),
        ) else {
            continue;
        };
        let Ok(fan) = WaveFan::new(&left, &right, &params) else {
            continue;
        };
        let u = fan.star.u_star;
        let subsonic = fan.star.left_state().mach(&params) < 0.95
            && fan.star.right_state().mach(&params) < 0.95;
        if u * sign > 0.0 && subsonic {
            return (params, left, right);
        }
    }
}

/// Two-pipe network gluing `left` (mirrored) and `right` at the junction.
/// Pipe 0 carries the right state, pipe 1 the mirrored left state.
pub fn mirrored_network(
    params: GasParams,
    left: GasState,
    right: GasState,
    cells: usize,
) -> Network {
    let pipe = |label: &str, state: GasState| {
        let spec = PipeSpec::new(label, 1.0, params).expect("valid spec");
        let class = if state.u > 0.0 {
            FlowClass::Outgoing
        } else {
            FlowClass::Incoming
        };
        GridPipe::uniform(spec, 1.0, cells, FarEnd::Outflow, state)
            .expect("valid pipe")
            .with_flow_hint(class)
    };
    Network::new(
        vec![pipe("right", right), pipe("left", left.mirrored())],
        CouplingMode::EntropyMix,
    )
    .expect("two pipes")
}

fn max_state_diff(a: &GasState, b: &GasState) -> f64 {
    (a.rho - b.rho)
        .abs()
        .max((a.u - b.u).abs())
        .max((a.p - b.p).abs())
}

/// Largest cell deviation between the network and the merged domain after
/// `steps` Godunov steps.
pub fn merged_domain_deviation(
    network: &mut Network,
    steps: usize,
    cfl: f64,
) -> Result<f64, String> {
    let mut line =
        LineDomain::merged(&network.pipes[1], &network.pipes[0]).map_err(|e| e.to_string())?;
    let m = network.pipes[1].cells.len();
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        let dt = cfl_dt(network, cfl);
        advance_hyperbolic(network, dt).map_err(|e| e.to_string())?;
        line.advance(dt).map_err(|e| e.to_string())?;
        let (left, right) = line.split(m);
        for (a, b) in network.pipes[1]
            .cells
            .iter()
            .zip(&left)
            .chain(network.pipes[0].cells.iter().zip(&right))
        {
            worst = worst.max((*a - *b).norm_inf());
        }
    }
    Ok(worst)
}

/// Junction star traces of mirrored two-pipe problems against the standard
/// Riemann solution at `x/t = 0`, and the network evolution against the
/// merged single-domain evolution.
pub fn two_pipe_check(opts: &VerifyOptions) -> CheckReport {
    const NAME: &str = "two-pipe equivalence";
    if opts.trials == 0 {
        return CheckReport::no_trials(NAME, TWO_PIPE_STAR_TOLERANCE);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let mut worst_star: f64 = 0.0;
    let mut worst_grid: f64 = 0.0;
    let mut failures = Vec::new();
    let evolutions = opts.trials.div_ceil(10);
    for t in 0..opts.trials {
        let (params, left, right) = random_mirrored_pair(&mut rng);
        let network = mirrored_network(params, left, right, 40);
        let traces = network.traces().expect("valid traces");
        let specs = network.specs();
        let star = JunctionProblem::classified(specs, traces, CouplingMode::EntropyMix)
            .and_then(|p| solve_junction(&p, None));
        let fan = WaveFan::new(&left, &right, &params).expect("non-vacuum pair");
        let reference = sample_wave_fan(&fan, 0.0, &params);
        match star {
            Ok(sol) => {
                let d = max_state_diff(&sol.star_states[0], &reference)
                    .max(max_state_diff(&sol.star_states[1], &reference.mirrored()));
                worst_star = worst_star.max(d);
                if d > TWO_PIPE_STAR_TOLERANCE {
                    failures.push(format!("trial {t}: star deviation {d:.3e}"));
                }
            }
            Err(e) => failures.push(format!("trial {t}: {e}")),
        }
        if t < evolutions {
            let mut net = network;
            match merged_domain_deviation(&mut net, TWO_PIPE_STEPS, 0.9) {
                Ok(d) => {
                    worst_grid = worst_grid.max(d);
                    if d > TWO_PIPE_EVOLUTION_TOLERANCE {
                        failures.push(format!("trial {t}: evolution deviation {d:.3e}"));
                    }
                }
                Err(e) => failures.push(format!("trial {t}: {e}")),
            }
        }
    }
    let mut report = finish(
        NAME,
        opts.trials,
        worst_star,
        TWO_PIPE_STAR_TOLERANCE,
        failures,
    );
    report.detail = format!(
        "evolution worst {worst_grid:.3e} over {evolutions} runs; {}",
        report.detail
    );
    report
}

/// Largest growth of the perturbation ratio as the perturbation size
/// shrinks, for trace and cross-section perturbations.
pub fn lipschitz_check(opts: &VerifyOptions) -> CheckReport {
    const NAME: &str = "lipschitz";
    if opts.trials == 0 {
        return CheckReport::no_trials(NAME, LIPSCHITZ_GROWTH);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x11b5);
    let designs = opts.trials.div_ceil(20);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for t in 0..designs {
        let problem = random_stationary(&mut rng);
        let seed = rng.random();
        let stats: Result<Vec<_>, _> = LIPSCHITZ_DELTAS
            .iter()
            .map(|&d| lipschitz_probe(&problem, d, LIPSCHITZ_TRIALS, seed))
            .collect();
        match stats {
            Ok(stats) => {
                for w in stats.windows(2) {
                    for (a, b) in [
                        (w[0].trace_ratio, w[1].trace_ratio),
                        (w[0].nu_ratio, w[1].nu_ratio),
                    ] {
                        let (Some(a), Some(b)) = (a, b) else { continue };
                        let growth = b / a;
                        worst = worst.max(growth);
                        if !(growth <= LIPSCHITZ_GROWTH) {
                            failures.push(format!(
                                "design {t}: ratio grew {growth:.3} from delta {} to {}",
                                w[0].delta, w[1].delta
                            ));
                        }
                    }
                }
            }
            Err(e) => failures.push(format!("design {t}: {e}")),
        }
    }
    finish(NAME, designs, worst, LIPSCHITZ_GROWTH, failures)
}

fn finish(
    name: &'static str,
    trials: usize,
    worst: f64,
    threshold: f64,
    failures: Vec<String>,
) -> CheckReport {
    let detail = match failures.len() {
        0 => "ok".to_string(),
        k => format!("{k} failure(s); first: {}", failures[0]),
    };
    CheckReport {
        name,
        passed: failures.is_empty(),
        trials,
        worst,
        threshold,
        detail,
    }
}

pub fn run_all(opts: &VerifyOptions, jacobian: &JacobianFn) -> Vec<CheckReport> {
    vec![
        jacobian_audit(opts, jacobian),
        determinant_sweep(opts),
        two_pipe_check(opts),
        lipschitz_check(opts),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_trials_passes_with_note() {
        let opts = VerifyOptions { seed: 1, trials: 0 };
        for r in run_all(&opts, &coupling_jacobian) {
            assert!(r.passed);
            assert_eq!(r.detail, "no trials");
        }
    }

    #[test]
    fn small_sweep_passes() {
        let opts = VerifyOptions {
            seed: 7,
            trials: 10,
        };
        for r in run_all(&opts, &coupling_jacobian) {
            assert!(r.passed, "{r:?}");
        }
    }
}
