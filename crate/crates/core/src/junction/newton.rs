//! Damped Newton iteration for `Phi(sigma, tau) = 0`.

use super::residual::{assemble, mix_entropy, star_trace_quantities, trace_points, Inflow};
use super::{
    CouplingMode, CouplingParams, JunctionError, JunctionFluxes, JunctionProblem, StarSolution,
    DEGENERATE_INFLOW_RATIO,
};
use crate::euler::FlowClass;
use crate::riemann::lax3;

pub const NEWTON_MAX_ITERATIONS: usize = 50;
pub const NEWTON_MAX_HALVINGS: usize = 40;
/// Convergence threshold on the row-scaled residual max-norm.
pub const NEWTON_TOLERANCE: f64 = 1e-11;

/// Solves the generalised Riemann problem for the problem's coupling mode,
/// starting from `initial_guess` or from `(trace pressures, 0)`.
///
/// Without an initial guess, a failed or inadmissible run from the base
/// point is retried from entropy-matched starts (see [`fallback_starts`]);
/// the error of the first attempt is reported if none succeeds.
pub fn solve_junction(
    problem: &JunctionProblem,
    initial_guess: Option<&CouplingParams>,
) -> Result<StarSolution, JunctionError> {
    if let Some(guess) = initial_guess {
        return newton(problem, guess.clone());
    }
    let primary = match newton(problem, problem.base_params()) {
        Err(JunctionError::DegenerateInflow { .. }) => newton(problem, problem.inflow_params()),
        other => other,
    };
    let error = match primary {
        Ok(sol) => return Ok(sol),
        Err(
            e @ (JunctionError::NoConvergence { .. }
            | JunctionError::SingularJacobian { .. }
            | JunctionError::Supersonic { .. }
            | JunctionError::FlowReversal { .. }),
        ) => e,
        Err(e) => return Err(e),
    };
    fallback_starts(problem)
        .into_iter()
        .find_map(|start| newton(problem, start).ok())
        .ok_or(error)
}

/// Alternative Newton starts: `sigma` at the trace pressures and at their
/// mean, with each outgoing `tau` chosen so that the outgoing entropy
/// already equals the inflow mix. This puts the start on the entropy rows'
/// zero set, which the base point misses when the contact jump is large.
pub fn fallback_starts(problem: &JunctionProblem) -> Vec<CouplingParams> {
    let n_out = problem.n_out();
    let base = problem.base_params();
    let mean = base.sigma.iter().sum::<f64>() / base.sigma.len() as f64;
    let threshold = DEGENERATE_INFLOW_RATIO * problem.mass_flux_scale();
    [base.sigma.clone(), vec![mean; base.sigma.len()]]
        .into_iter()
        .filter_map(|sigma| {
            let inflows = (n_out..problem.n())
                .map(|j| {
                    let q = star_trace_quantities(
                        sigma[j],
                        None,
                        &problem.traces()[j],
                        &problem.pipes()[j].params,
                    )
                    .ok()?;
                    Some(Inflow {
                        nu_norm: problem.pipes()[j].nu_norm,
                        q: q.q,
                        s: q.s,
                    })
                })
                .collect::<Option<Vec<_>>>()?;
            let s_star = mix_entropy(&inflows, threshold).ok()?;
            let tau = (0..n_out)
                .map(|i| {
                    let params = &problem.pipes()[i].params;
                    let behind = lax3(sigma[i], &problem.traces()[i], params).ok()?;
                    let rho = ((behind.p.ln() - s_star / params.c_v) / params.gamma).exp();
                    Some(rho - behind.rho)
                })
                .collect::<Option<Vec<_>>>()?;
            Some(CouplingParams { sigma, tau })
        })
        .collect()
}

fn newton(problem: &JunctionProblem, start: CouplingParams) -> Result<StarSolution, JunctionError> {
    let n = problem.n();
    let mut x = start;
    let (mut r, _) = assemble(&x, problem, false)?;
    let mut norm = problem.scaled_norm(&r);
    let mut iterations = 0;

    while norm > NEWTON_TOLERANCE {
        if iterations == NEWTON_MAX_ITERATIONS {
            return Err(JunctionError::NoConvergence {
                iterations,
                residual: norm,
            });
        }
        let (_, jac) = assemble(&x, problem, true)?;
        let jac = jac.expect("jacobian requested");
        let step = jac
            .lu()
            .solve(&(-&r))
            .filter(|s| s.iter().all(|v| v.is_finite()))
            .ok_or(JunctionError::SingularJacobian {
                iteration: iterations,
            })?;
        iterations += 1;

        let current = x.to_vector();
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=NEWTON_MAX_HALVINGS {
            let trial = CouplingParams::from_vector(&(&current + alpha * &step), n);
            if let Ok((rt, _)) = assemble(&trial, problem, false) {
                let nt = problem.scaled_norm(&rt);
                if nt < norm {
                    accepted = Some((trial, rt, nt));
                    break;
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((trial, rt, nt)) => {
                x = trial;
                r = rt;
                norm = nt;
            }
            None => {
                return Err(JunctionError::NoConvergence {
                    iterations,
                    residual: norm,
                })
            }
        }
    }

    // Polishing step: quadratic convergence takes the root from the
    // tolerance to rounding level. Skipped at an exact base point so that
    // stationary data reproduce their traces bit for bit.
    if iterations > 0 {
        let (_, jac) = assemble(&x, problem, true)?;
        if let Some(step) = jac.expect("jacobian requested").lu().solve(&(-&r)) {
            let trial = CouplingParams::from_vector(&(x.to_vector() + step), n);
            if let Ok((rt, _)) = assemble(&trial, problem, false) {
                let nt = problem.scaled_norm(&rt);
                if nt <= norm {
                    x = trial;
                    norm = nt;
                }
            }
        }
    }

    let points = trace_points(&x, problem)?;
    let canonical: Vec<_> = points.iter().map(|t| t.state).collect();
    for (k, state) in canonical.iter().enumerate() {
        let pipe = &problem.pipes()[k];
        let mach = state.mach(&pipe.params);
        if !(mach < 1.0) {
            return Err(JunctionError::Supersonic {
                pipe: pipe.label.clone(),
                mach,
            });
        }
        let declared = problem.class(k);
        let reversed = match declared {
            FlowClass::Outgoing => state.u < 0.0,
            FlowClass::Incoming => state.u > 0.0,
        };
        if reversed {
            return Err(JunctionError::FlowReversal {
                pipe: pipe.label.clone(),
                declared,
                u_star: state.u,
            });
        }
    }
    let star_states = problem.to_caller_order(&canonical);
    let fluxes = JunctionFluxes::from_states(&problem.caller_pipes(), &star_states);
    Ok(StarSolution {
        mode: problem.mode(),
        params: x,
        order: problem.order().to_vec(),
        star_states,
        residual_norm: norm,
        iterations,
        fluxes,
    })
}

/// Newton solve for the pressure or dynamic-pressure coupling.
pub fn solve_junction_pressure_mode(
    problem: &JunctionProblem,
) -> Result<StarSolution, JunctionError> {
    match problem.mode() {
        CouplingMode::EntropyMix => Err(JunctionError::WrongMode(problem.mode())),
        _ if problem.n_out() != 1 => Err(JunctionError::PressureModeTopology {
            n_out: problem.n_out(),
        }),
        _ => solve_junction(problem, None),
    }
}
