//! Coupling residual and its analytic Jacobian.
//!
//! Row layout for the entropy-mix coupling (canonical order, `r` the
//! reference incoming pipe at index `N_o`):
//!
//! ```text
//! 0            sum_k |nu_k| q_k
//! 1 .. N-1     h_r - h_k           for k != r, increasing k
//! N .. N+N_o-1 s_i - s*            for outgoing i
//! ```
//!
//! Pressure-based couplings (one outgoing pipe, canonical index 0) use
//!
//! ```text
//! 0            sum_k |nu_k| q_k
//! 1            sum_k |nu_k| (q h)_k
//! 2 .. N       X_0 - X_k           for k = 1 .. N-1, X = p or rho u^2 + p
//! ```
//!
//! Columns are `sigma_0 .. sigma_{N-1}` followed by `tau_0 .. tau_{N_o-1}`.

use nalgebra::{DMatrix, DVector};

use super::{
    CouplingMode, CouplingParams, JunctionError, JunctionProblem, DEGENERATE_INFLOW_RATIO,
};
use crate::euler::{GasParams, GasState};
use crate::riemann::{lax2, lax3, phi_derivative_unchecked, psi_derivative_unchecked};

/// Value and gradient with respect to `(sigma, tau)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Jet {
    pub v: f64,
    pub d: [f64; 2],
}

/// Junction trace of one pipe as a function of its curve parameters.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TracePoint {
    pub state: GasState,
    pub q: Jet,
    pub h: Jet,
    pub s: Jet,
    pub p: Jet,
    pub momentum_flux: Jet,
    pub energy_flux: Jet,
}

impl TracePoint {
    pub(crate) fn evaluate(
        sigma: f64,
        tau: Option<f64>,
        base: &GasState,
        params: &GasParams,
    ) -> Result<Self, JunctionError> {
        let behind = lax3(sigma, base, params)?;
        let state = match tau {
            Some(t) => lax2(t, &behind)?,
            None => behind,
        };
        let (rho, u, p) = (state.rho, state.u, state.p);
        let g = params.gamma;
        let drho = [
            phi_derivative_unchecked(sigma, base, params),
            if tau.is_some() { 1.0 } else { 0.0 },
        ];
        let du = [psi_derivative_unchecked(sigma, base, params), 0.0];
        let dp = [1.0, 0.0];

        let map = |f: &dyn Fn(usize) -> f64| [f(0), f(1)];
        let q = Jet {
            v: rho * u,
            d: map(&|k| u * drho[k] + rho * du[k]),
        };
        let h = Jet {
            v: g * p / ((g - 1.0) * rho) + 0.5 * u * u,
            d: map(&|k| g / (g - 1.0) * (dp[k] / rho - p * drho[k] / (rho * rho)) + u * du[k]),
        };
        let s = Jet {
            v: state.entropy(params),
            d: map(&|k| params.c_v * (dp[k] / p - g * drho[k] / rho)),
        };
        let momentum_flux = Jet {
            v: rho * u * u + p,
            d: map(&|k| drho[k] * u * u + 2.0 * rho * u * du[k] + dp[k]),
        };
        let energy_flux = Jet {
            v: q.v * h.v,
            d: map(&|k| q.d[k] * h.v + q.v * h.d[k]),
        };
        Ok(Self {
            state,
            q,
            h,
            s,
            p: Jet { v: p, d: dp },
            momentum_flux,
            energy_flux,
        })
    }
}

/// Mass flux, total enthalpy and specific entropy of a junction trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceQuantities {
    pub q: f64,
    pub h: f64,
    pub s: f64,
}

/// `(q, h, s)` of `L3(sigma, base)` or, when `tau` is given,
/// `L2(tau, L3(sigma, base))`.
pub fn star_trace_quantities(
    sigma: f64,
    tau: Option<f64>,
    base: &GasState,
    params: &GasParams,
) -> Result<TraceQuantities, JunctionError> {
    let t = TracePoint::evaluate(sigma, tau, base, params)?;
    Ok(TraceQuantities {
        q: t.q.v,
        h: t.h.v,
        s: t.s.v,
    })
}

/// One incoming stream entering the entropy mix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inflow {
    pub nu_norm: f64,
    pub q: f64,
    pub s: f64,
}

/// Mass-flux weighted mean of the inflow entropies. A single stream returns
/// its own entropy; otherwise `|sum nu q| < threshold` is an error.
pub fn mix_entropy(inflows: &[Inflow], threshold: f64) -> Result<f64, JunctionError> {
    match inflows {
        [] => Err(JunctionError::Dimension(
            "entropy mix needs at least one inflow".into(),
        )),
        [single] => Ok(single.s),
        _ => {
            let den: f64 = inflows.iter().map(|f| f.nu_norm * f.q).sum();
            if !(den.abs() >= threshold) {
                return Err(JunctionError::DegenerateInflow {
                    net_inflow: den,
                    threshold,
                });
            }
            let num: f64 = inflows.iter().map(|f| f.nu_norm * f.q * f.s).sum();
            Ok(num / den)
        }
    }
}

fn check_dims(params: &CouplingParams, problem: &JunctionProblem) -> Result<(), JunctionError> {
    if params.sigma.len() != problem.n() || params.tau.len() != problem.n_out() {
        return Err(JunctionError::Dimension(format!(
            "expected {} sigma and {} tau entries, got {} and {}",
            problem.n(),
            problem.n_out(),
            params.sigma.len(),
            params.tau.len()
        )));
    }
    Ok(())
}

pub(crate) fn trace_points(
    params: &CouplingParams,
    problem: &JunctionProblem,
) -> Result<Vec<TracePoint>, JunctionError> {
    check_dims(params, problem)?;
    (0..problem.n())
        .map(|k| {
            TracePoint::evaluate(
                params.sigma[k],
                params.tau.get(k).copied(),
                &problem.traces()[k],
                &problem.pipes()[k].params,
            )
        })
        .collect()
}

/// Entropy mix `s*` and its derivatives with respect to the incoming
/// `sigma_j` (indexed canonically; zero for outgoing pipes).
fn entropy_mix_jet(
    points: &[TracePoint],
    problem: &JunctionProblem,
) -> Result<(f64, Vec<f64>), JunctionError> {
    let n = problem.n();
    let n_out = problem.n_out();
    let mut grad = vec![0.0; n];
    let inflows: Vec<Inflow> = (n_out..n)
        .map(|j| Inflow {
            nu_norm: problem.pipes()[j].nu_norm,
            q: points[j].q.v,
            s: points[j].s.v,
        })
        .collect();
    let threshold = DEGENERATE_INFLOW_RATIO * problem.mass_flux_scale();
    let s_star = mix_entropy(&inflows, threshold)?;
    if inflows.len() == 1 {
        grad[n_out] = points[n_out].s.d[0];
    } else {
        let den: f64 = inflows.iter().map(|f| f.nu_norm * f.q).sum();
        for j in n_out..n {
            let nu = problem.pipes()[j].nu_norm;
            let t = &points[j];
            grad[j] = nu * (t.q.v * t.s.d[0] + (t.s.v - s_star) * t.q.d[0]) / den;
        }
    }
    Ok((s_star, grad))
}

/// `s*` evaluated at the incoming `sigma` of `params`.
pub fn entropy_mix(
    params: &CouplingParams,
    problem: &JunctionProblem,
) -> Result<f64, JunctionError> {
    let points = trace_points(params, problem)?;
    entropy_mix_jet(&points, problem).map(|(s, _)| s)
}

pub(crate) fn assemble(
    params: &CouplingParams,
    problem: &JunctionProblem,
    with_jacobian: bool,
) -> Result<(DVector<f64>, Option<DMatrix<f64>>), JunctionError> {
    let points = trace_points(params, problem)?;
    let n = problem.n();
    let n_out = problem.n_out();
    let d = problem.dim();
    let mut r = DVector::zeros(d);
    let mut jac = with_jacobian.then(|| DMatrix::zeros(d, d));
    let tau_col = |k: usize| (k < n_out).then_some(n + k);
    let nu = |k: usize| problem.pipes()[k].nu_norm;

    // Adds `sign * jet` of canonical pipe `k` to row `row`.
    let add = |r: &mut DVector<f64>,
               jac: &mut Option<DMatrix<f64>>,
               row: usize,
               k: usize,
               jet: Jet,
               sign: f64| {
        r[row] += sign * jet.v;
        if let Some(j) = jac.as_mut() {
            j[(row, k)] += sign * jet.d[0];
            if let Some(c) = tau_col(k) {
                j[(row, c)] += sign * jet.d[1];
            }
        }
    };

    for k in 0..n {
        add(&mut r, &mut jac, 0, k, points[k].q, nu(k));
    }

    match problem.mode() {
        CouplingMode::EntropyMix => {
            let reference = problem.reference();
            for (row, k) in (1..).zip((0..n).filter(|&k| k != reference)) {
                add(&mut r, &mut jac, row, reference, points[reference].h, 1.0);
                add(&mut r, &mut jac, row, k, points[k].h, -1.0);
            }
            let (s_star, grad) = entropy_mix_jet(&points, problem)?;
            for i in 0..n_out {
                let row = n + i;
                add(&mut r, &mut jac, row, i, points[i].s, 1.0);
                r[row] -= s_star;
                if let Some(j) = jac.as_mut() {
                    for (col, g) in grad.iter().enumerate().skip(n_out) {
                        j[(row, col)] -= g;
                    }
                }
            }
        }
        mode @ (CouplingMode::PressureEqual | CouplingMode::DynamicPressureEqual) => {
            for k in 0..n {
                add(&mut r, &mut jac, 1, k, points[k].energy_flux, nu(k));
            }
            let pick = |t: &TracePoint| match mode {
                CouplingMode::PressureEqual => t.p,
                _ => t.momentum_flux,
            };
            for k in 1..n {
                let row = k + 1;
                add(&mut r, &mut jac, row, 0, pick(&points[0]), 1.0);
                add(&mut r, &mut jac, row, k, pick(&points[k]), -1.0);
            }
        }
    }
    Ok((r, jac))
}

/// Coupling residual `Phi(sigma, tau)` for the problem's coupling mode.
pub fn coupling_residual(
    params: &CouplingParams,
    problem: &JunctionProblem,
) -> Result<DVector<f64>, JunctionError> {
    assemble(params, problem, false).map(|(r, _)| r)
}

/// Analytic Jacobian `D_(sigma, tau) Phi`.
pub fn coupling_jacobian(
    params: &CouplingParams,
    problem: &JunctionProblem,
) -> Result<DMatrix<f64>, JunctionError> {
    assemble(params, problem, true).map(|(_, j)| j.expect("jacobian requested"))
}
