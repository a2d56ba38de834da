//! Thermodynamic state of a polytropic gas in one pipe cell.
//!
//! Primitive variables `(rho, u, p)` are the canonical representation; the
//! conservative triple `(rho, q, E)` only appears at flux and update
//! boundaries.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("non-positive density {0}")]
    NonPositiveDensity(f64),
    #[error("non-positive pressure {0}")]
    NonPositivePressure(f64),
    #[error("non-finite state component")]
    NonFinite,
    #[error("invalid gas parameters: gamma = {gamma} (must be > 1), c_v = {c_v} (must be > 0)")]
    InvalidParams { gamma: f64, c_v: f64 },
    #[error("invalid pipe `{label}`: {reason}")]
    InvalidPipe { label: String, reason: String },
    #[error("state is not subsonic: |u| = {speed}, c = {sound_speed}")]
    NotSubsonic { speed: f64, sound_speed: f64 },
    #[error("zero velocity: flow direction is undefined")]
    StagnantFlow,
}

/// Adiabatic exponent and specific heat capacity of an ideal polytropic gas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    pub gamma: f64,
    pub c_v: f64,
}

impl GasParams {
    pub fn new(gamma: f64, c_v: f64) -> Result<Self, StateError> {
        let params = Self { gamma, c_v };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), StateError> {
        if self.gamma > 1.0 && self.c_v > 0.0 && self.gamma.is_finite() && self.c_v.is_finite() {
            Ok(())
        } else {
            Err(StateError::InvalidParams {
                gamma: self.gamma,
                c_v: self.c_v,
            })
        }
    }

    /// `(gamma - 1) / (gamma + 1)`.
    #[inline]
    pub fn mu2(&self) -> f64 {
        (self.gamma - 1.0) / (self.gamma + 1.0)
    }
}

impl Default for GasParams {
    fn default() -> Self {
        Self {
            gamma: 1.4,
            c_v: 1.0,
        }
    }
}

/// A pipe attached to the junction. Only the norm of the pipe vector enters
/// the equations; it plays the role of the cross-section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipeSpec {
    pub label: String,
    pub nu_norm: f64,
    pub params: GasParams,
}

impl PipeSpec {
    pub fn new(
        label: impl Into<String>,
        nu_norm: f64,
        params: GasParams,
    ) -> Result<Self, StateError> {
        let pipe = Self {
            label: label.into(),
            nu_norm,
            params,
        };
        pipe.validate()?;
        Ok(pipe)
    }

    pub fn validate(&self) -> Result<(), StateError> {
        if !(self.nu_norm > 0.0 && self.nu_norm.is_finite()) {
            return Err(StateError::InvalidPipe {
                label: self.label.clone(),
                reason: format!("cross-section norm must be positive, got {}", self.nu_norm),
            });
        }
        self.params.validate().map_err(|e| StateError::InvalidPipe {
            label: self.label.clone(),
            reason: e.to_string(),
        })
    }
}

/// Primitive state: density, velocity, pressure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasState {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

impl GasState {
    pub fn new(rho: f64, u: f64, p: f64) -> Result<Self, StateError> {
        let s = Self { rho, u, p };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), StateError> {
        if !(self.rho.is_finite() && self.u.is_finite() && self.p.is_finite()) {
            return Err(StateError::NonFinite);
        }
        if self.rho <= 0.0 {
            return Err(StateError::NonPositiveDensity(self.rho));
        }
        if self.p <= 0.0 {
            return Err(StateError::NonPositivePressure(self.p));
        }
        Ok(())
    }

    /// The same gas seen from a pipe with the opposite orientation.
    pub fn mirrored(&self) -> Self {
        Self {
            rho: self.rho,
            u: -self.u,
            p: self.p,
        }
    }

    #[inline]
    pub fn mass_flux(&self) -> f64 {
        self.rho * self.u
    }

    #[inline]
    pub fn energy(&self, params: &GasParams) -> f64 {
        self.p / (params.gamma - 1.0) + 0.5 * self.rho * self.u * self.u
    }

    #[inline]
    pub fn sound_speed(&self, params: &GasParams) -> f64 {
        (params.gamma * self.p / self.rho).sqrt()
    }

    /// Specific entropy `c_v ln(p / rho^gamma)`.
    #[inline]
    pub fn entropy(&self, params: &GasParams) -> f64 {
        params.c_v * (self.p.ln() - params.gamma * self.rho.ln())
    }

    /// Total enthalpy `(E + p) / rho`.
    #[inline]
    pub fn enthalpy(&self, params: &GasParams) -> f64 {
        (self.energy(params) + self.p) / self.rho
    }

    #[inline]
    pub fn mach(&self, params: &GasParams) -> f64 {
        self.u.abs() / self.sound_speed(params)
    }
}

/// Conservative triple `(rho, q, E)`. Also used for flux vectors.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Conserved {
    pub rho: f64,
    pub q: f64,
    pub e: f64,
}

pub type Flux = Conserved;

impl Conserved {
    pub const ZERO: Self = Self {
        rho: 0.0,
        q: 0.0,
        e: 0.0,
    };

    pub fn new(rho: f64, q: f64, e: f64) -> Self {
        Self { rho, q, e }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.rho, self.q, self.e]
    }

    pub fn norm_inf(&self) -> f64 {
        self.rho.abs().max(self.q.abs()).max(self.e.abs())
    }

    pub fn norm_l1(&self) -> f64 {
        self.rho.abs() + self.q.abs() + self.e.abs()
    }

    /// Flux or state components under reversal of the pipe orientation.
    pub fn mirrored(&self) -> Self {
        Self {
            rho: self.rho,
            q: -self.q,
            e: self.e,
        }
    }
}

impl Add for Conserved {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.rho + rhs.rho, self.q + rhs.q, self.e + rhs.e)
    }
}

impl AddAssign for Conserved {
    fn add_assign(&mut self, rhs: Self) {
        self.rho += rhs.rho;
        self.q += rhs.q;
        self.e += rhs.e;
    }
}

impl Sub for Conserved {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.rho - rhs.rho, self.q - rhs.q, self.e - rhs.e)
    }
}

impl Mul<Conserved> for f64 {
    type Output = Conserved;
    fn mul(self, rhs: Conserved) -> Conserved {
        Conserved::new(self * rhs.rho, self * rhs.q, self * rhs.e)
    }
}

impl Neg for Conserved {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.rho, -self.q, -self.e)
    }
}

pub fn primitive_to_conservative(
    state: &GasState,
    params: &GasParams,
) -> Result<Conserved, StateError> {
    state.validate()?;
    Ok(Conserved {
        rho: state.rho,
        q: state.rho * state.u,
        e: state.energy(params),
    })
}

pub fn conservative_to_primitive(
    cons: &Conserved,
    params: &GasParams,
) -> Result<GasState, StateError> {
    if !(cons.rho.is_finite() && cons.q.is_finite() && cons.e.is_finite()) {
        return Err(StateError::NonFinite);
    }
    if cons.rho <= 0.0 {
        return Err(StateError::NonPositiveDensity(cons.rho));
    }
    let u = cons.q / cons.rho;
    let p = (params.gamma - 1.0) * (cons.e - 0.5 * cons.q * u);
    if p <= 0.0 {
        return Err(StateError::NonPositivePressure(p));
    }
    Ok(GasState {
        rho: cons.rho,
        u,
        p,
    })
}

/// Characteristic speeds `(u - c, u, u + c)`.
pub fn eigenvalues(state: &GasState, params: &GasParams) -> [f64; 3] {
    let c = state.sound_speed(params);
    [state.u - c, state.u, state.u + c]
}

pub fn physical_flux(state: &GasState, params: &GasParams) -> Flux {
    let q = state.rho * state.u;
    Flux {
        rho: q,
        q: q * state.u + state.p,
        e: state.u * (state.energy(params) + state.p),
    }
}

/// Flow direction relative to the junction, pipes being oriented away from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowClass {
    /// Flow towards the junction, `u < 0`.
    Incoming,
    /// Flow away from the junction, `u > 0`.
    Outgoing,
}

/// Classifies a strictly subsonic state as incoming or outgoing.
pub fn classify_flow(state: &GasState, params: &GasParams) -> Result<FlowClass, StateError> {
    state.validate()?;
    let c = state.sound_speed(params);
    if state.u.abs() >= c {
        return Err(StateError::NotSubsonic {
            speed: state.u.abs(),
            sound_speed: c,
        });
    }
    if state.u > 0.0 {
        Ok(FlowClass::Outgoing)
    } else if state.u < 0.0 {
        Ok(FlowClass::Incoming)
    } else {
        Err(StateError::StagnantFlow)
    }
}
