//! Exact solver for the two-state Riemann problem of the polytropic Euler
//! equations, the Lax wave curves, and self-similar sampling of the wave fan.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::euler::{GasParams, GasState, StateError};

pub const STAR_MAX_ITERATIONS: usize = 100;
pub const STAR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiemannError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("pressure parameter must be positive, got {0}")]
    NonPositivePressure(f64),
    #[error("vacuum generated: u_R - u_L = {velocity_jump} >= {critical}")]
    Vacuum { velocity_jump: f64, critical: f64 },
    #[error("star pressure iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

/// Velocity increment across a 1- or 3-wave connecting `state` to pressure
/// `p_star`. Rarefaction branch for `p_star <= p`, shock branch otherwise.
pub fn psi(p_star: f64, state: &GasState, params: &GasParams) -> Result<f64, RiemannError> {
    check_pressure(p_star)?;
    Ok(psi_unchecked(p_star, state, params))
}

/// `d psi / d p_star`.
pub fn psi_derivative(
    p_star: f64,
    state: &GasState,
    params: &GasParams,
) -> Result<f64, RiemannError> {
    check_pressure(p_star)?;
    Ok(psi_derivative_unchecked(p_star, state, params))
}

/// Density behind a 1- or 3-wave at pressure `p_star`.
pub fn phi(p_star: f64, state: &GasState, params: &GasParams) -> Result<f64, RiemannError> {
    check_pressure(p_star)?;
    Ok(phi_unchecked(p_star, state, params))
}

/// `d phi / d p_star`.
pub fn phi_derivative(
    p_star: f64,
    state: &GasState,
    params: &GasParams,
) -> Result<f64, RiemannError> {
    check_pressure(p_star)?;
    Ok(phi_derivative_unchecked(p_star, state, params))
}

fn check_pressure(p: f64) -> Result<(), RiemannError> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(RiemannError::NonPositivePressure(p))
    }
}

pub(crate) fn psi_unchecked(p_star: f64, k: &GasState, params: &GasParams) -> f64 {
    let g = params.gamma;
    if p_star <= k.p {
        let c = k.sound_speed(params);
        2.0 * c / (g - 1.0) * ((p_star / k.p).powf((g - 1.0) / (2.0 * g)) - 1.0)
    } else {
        let mu2 = params.mu2();
        (p_star - k.p) * ((1.0 - mu2) / (k.rho * (p_star + mu2 * k.p))).sqrt()
    }
}

pub(crate) fn psi_derivative_unchecked(p_star: f64, k: &GasState, params: &GasParams) -> f64 {
    let g = params.gamma;
    if p_star <= k.p {
        let c = k.sound_speed(params);
        (p_star / k.p).powf(-(g + 1.0) / (2.0 * g)) / (k.rho * c)
    } else {
        let mu2 = params.mu2();
        let a = (1.0 - mu2) / (k.rho * (p_star + mu2 * k.p));
        a.sqrt() * (1.0 - 0.5 * (p_star - k.p) / (p_star + mu2 * k.p))
    }
}

pub(crate) fn phi_unchecked(p_star: f64, k: &GasState, params: &GasParams) -> f64 {
    if p_star <= k.p {
        k.rho * (p_star / k.p).powf(1.0 / params.gamma)
    } else {
        let mu2 = params.mu2();
        k.rho * (p_star + mu2 * k.p) / (mu2 * p_star + k.p)
    }
}

pub(crate) fn phi_derivative_unchecked(p_star: f64, k: &GasState, params: &GasParams) -> f64 {
    let g = params.gamma;
    if p_star <= k.p {
        k.rho / (g * k.p) * (p_star / k.p).powf(1.0 / g - 1.0)
    } else {
        let mu2 = params.mu2();
        let d = mu2 * p_star + k.p;
        k.rho * k.p * (1.0 - mu2 * mu2) / (d * d)
    }
}

/// Pressure, velocity and the two densities of the star region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarState {
    pub p_star: f64,
    pub u_star: f64,
    pub rho_l_star: f64,
    pub rho_r_star: f64,
}

impl StarState {
    pub fn left_state(&self) -> GasState {
        GasState {
            rho: self.rho_l_star,
            u: self.u_star,
            p: self.p_star,
        }
    }

    pub fn right_state(&self) -> GasState {
        GasState {
            rho: self.rho_r_star,
            u: self.u_star,
            p: self.p_star,
        }
    }

    pub fn left_energy(&self, params: &GasParams) -> f64 {
        self.left_state().energy(params)
    }

    pub fn right_energy(&self, params: &GasParams) -> f64 {
        self.right_state().energy(params)
    }
}

/// `g(p) = psi(p, U_L) + psi(p, U_R) + u_R - u_L`, written so that mirroring
/// the problem reproduces it bit for bit.
fn star_function(p: f64, left: &GasState, right: &GasState, params: &GasParams) -> f64 {
    (psi_unchecked(p, left, params) + psi_unchecked(p, right, params)) + (right.u - left.u)
}

fn star_function_derivative(p: f64, left: &GasState, right: &GasState, params: &GasParams) -> f64 {
    psi_derivative_unchecked(p, left, params) + psi_derivative_unchecked(p, right, params)
}

/// Solves the star-pressure equation by safeguarded Newton iteration.
pub fn solve_star(
    left: &GasState,
    right: &GasState,
    params: &GasParams,
) -> Result<StarState, RiemannError> {
    left.validate()?;
    right.validate()?;
    let cl = left.sound_speed(params);
    let cr = right.sound_speed(params);
    let jump = right.u - left.u;
    let critical = 2.0 * (cl + cr) / (params.gamma - 1.0);
    if jump >= critical {
        return Err(RiemannError::Vacuum {
            velocity_jump: jump,
            critical,
        });
    }
    let scale = 1f64.max(left.u.abs()).max(right.u.abs()).max(cl).max(cr);
    let tol = STAR_TOLERANCE * scale;

    // g(0+) < 0 by the non-vacuum condition; grow the upper end until g > 0.
    let mut lo = 0.0;
    let mut hi = left.p.max(right.p);
    let mut grow = 0;
    while star_function(hi, left, right, params) < 0.0 {
        lo = hi;
        hi *= 4.0;
        grow += 1;
        if grow > 2000 {
            return Err(RiemannError::NoConvergence {
                iterations: 0,
                residual: f64::NAN,
            });
        }
    }

    let mut p = (0.5 * (left.p + right.p)).max(f64::MIN_POSITIVE);
    if !(p > lo && p <= hi) {
        p = 0.5 * (lo + hi);
    }
    let mut residual = f64::NAN;
    let mut converged = false;
    for _ in 0..STAR_MAX_ITERATIONS {
        residual = star_function(p, left, right, params);
        if residual.abs() <= tol {
            converged = true;
            break;
        }
        if residual < 0.0 {
            lo = p;
        } else {
            hi = p;
        }
        let slope = star_function_derivative(p, left, right, params);
        let next = p - residual / slope;
        p = if next > lo && next < hi && next.is_finite() {
            next
        } else {
            0.5 * (lo + hi)
        };
    }
    if !converged {
        return Err(RiemannError::NoConvergence {
            iterations: STAR_MAX_ITERATIONS,
            residual,
        });
    }
    // One extra Newton step brings the root to rounding level.
    if residual != 0.0 {
        let next = p - residual / star_function_derivative(p, left, right, params);
        if next > 0.0
            && next.is_finite()
            && star_function(next, left, right, params).abs() < residual.abs()
        {
            p = next;
        }
    }

    let psi_l = psi_unchecked(p, left, params);
    let psi_r = psi_unchecked(p, right, params);
    Ok(StarState {
        p_star: p,
        u_star: 0.5 * (left.u + right.u) + 0.5 * (psi_r - psi_l),
        rho_l_star: phi_unchecked(p, left, params),
        rho_r_star: phi_unchecked(p, right, params),
    })
}

/// 1-Lax curve through `left`: states reachable to the right of a 1-wave.
pub fn lax1(sigma: f64, left: &GasState, params: &GasParams) -> Result<GasState, RiemannError> {
    check_pressure(sigma)?;
    left.validate()?;
    Ok(GasState {
        rho: phi_unchecked(sigma, left, params),
        u: left.u - psi_unchecked(sigma, left, params),
        p: sigma,
    })
}

/// 3-Lax curve through `right`: states reachable to the left of a 3-wave.
pub fn lax3(sigma: f64, right: &GasState, params: &GasParams) -> Result<GasState, RiemannError> {
    check_pressure(sigma)?;
    right.validate()?;
    Ok(GasState {
        rho: phi_unchecked(sigma, right, params),
        u: right.u + psi_unchecked(sigma, right, params),
        p: sigma,
    })
}

/// 2-Lax curve: contact discontinuity shifting the density by `tau`.
/// Pressure and velocity are unchanged.
pub fn lax2(tau: f64, base: &GasState) -> Result<GasState, RiemannError> {
    base.validate()?;
    let s = GasState {
        rho: base.rho + tau,
        u: base.u,
        p: base.p,
    };
    s.validate()?;
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WaveKind {
    Shock,
    Rarefaction,
    Contact,
}

/// One elementary wave of the fan, with `slow <= fast`. Shocks and contacts
/// have a single speed, rarefactions a tail and a head.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub kind: WaveKind,
    pub slow: f64,
    pub fast: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveFan {
    pub left: GasState,
    pub right: GasState,
    pub star: StarState,
    /// 1-wave, contact, 3-wave.
    pub waves: [Wave; 3],
}

impl WaveFan {
    pub fn new(
        left: &GasState,
        right: &GasState,
        params: &GasParams,
    ) -> Result<Self, RiemannError> {
        let star = solve_star(left, right, params)?;
        Ok(Self::from_star(left, right, star, params))
    }

    pub fn from_star(
        left: &GasState,
        right: &GasState,
        star: StarState,
        params: &GasParams,
    ) -> Self {
        let g = params.gamma;
        let p = star.p_star;
        let u = star.u_star;

        let cl = left.sound_speed(params);
        let w1 = if p > left.p {
            let s =
                left.u - cl * ((g + 1.0) / (2.0 * g) * p / left.p + (g - 1.0) / (2.0 * g)).sqrt();
            Wave {
                kind: WaveKind::Shock,
                slow: s,
                fast: s,
            }
        } else {
            let c_star = cl * (p / left.p).powf((g - 1.0) / (2.0 * g));
            Wave {
                kind: WaveKind::Rarefaction,
                slow: left.u - cl,
                fast: u - c_star,
            }
        };

        let cr = right.sound_speed(params);
        let w3 = if p > right.p {
            let s =
                right.u + cr * ((g + 1.0) / (2.0 * g) * p / right.p + (g - 1.0) / (2.0 * g)).sqrt();
            Wave {
                kind: WaveKind::Shock,
                slow: s,
                fast: s,
            }
        } else {
            let c_star = cr * (p / right.p).powf((g - 1.0) / (2.0 * g));
            Wave {
                kind: WaveKind::Rarefaction,
                slow: u + c_star,
                fast: right.u + cr,
            }
        };

        Self {
            left: *left,
            right: *right,
            star,
            waves: [
                w1,
                Wave {
                    kind: WaveKind::Contact,
                    slow: u,
                    fast: u,
                },
                w3,
            ],
        }
    }

    /// Value of the self-similar solution at `xi = x / t`.
    pub fn sample(&self, xi: f64, params: &GasParams) -> GasState {
        let g = params.gamma;
        let [w1, _, w3] = self.waves;
        if xi <= self.star.u_star {
            let l = &self.left;
            if xi < w1.slow {
                return *l;
            }
            if xi >= w1.fast {
                return self.star.left_state();
            }
            // inside the left rarefaction fan
            let cl = l.sound_speed(params);
            let base = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * cl) * (l.u - xi);
            GasState {
                rho: l.rho * base.powf(2.0 / (g - 1.0)),
                u: 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * l.u + xi),
                p: l.p * base.powf(2.0 * g / (g - 1.0)),
            }
        } else {
            let r = &self.right;
            if xi > w3.fast {
                return *r;
            }
            if xi <= w3.slow {
                return self.star.right_state();
            }
            let cr = r.sound_speed(params);
            let base = 2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * cr) * (r.u - xi);
            GasState {
                rho: r.rho * base.powf(2.0 / (g - 1.0)),
                u: 2.0 / (g + 1.0) * (-cr + 0.5 * (g - 1.0) * r.u + xi),
                p: r.p * base.powf(2.0 * g / (g - 1.0)),
            }
        }
    }
}

pub fn sample_wave_fan(fan: &WaveFan, xi: f64, params: &GasParams) -> GasState {
    fan.sample(xi, params)
}
