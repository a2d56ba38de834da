use serde::{Deserialize, Serialize};

use super::{Network, SimError};
use crate::euler::{conservative_to_primitive, Conserved};

/// Local gravity and wall-friction model
/// `G = (0, -rho g - f rho u |u| / (2 D), -rho g u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    /// Acceleration component along the pipe axis.
    pub gravity: f64,
    pub friction_factor: f64,
    pub diameter: f64,
}

impl Default for SourceModel {
    fn default() -> Self {
        Self::NONE
    }
}

impl SourceModel {
    pub const NONE: SourceModel = SourceModel {
        gravity: 0.0,
        friction_factor: 0.0,
        diameter: 1.0,
    };

    pub fn validate(&self) -> Result<(), String> {
        if !self.gravity.is_finite() {
            return Err(format!("gravity must be finite, got {}", self.gravity));
        }
        if !(self.friction_factor >= 0.0 && self.friction_factor.is_finite()) {
            return Err(format!(
                "friction_factor must be >= 0, got {}",
                self.friction_factor
            ));
        }
        if self.friction_factor > 0.0 && !(self.diameter > 0.0 && self.diameter.is_finite()) {
            return Err(format!(
                "diameter must be > 0 when friction is active, got {}",
                self.diameter
            ));
        }
        Ok(())
    }

    pub fn is_active(&self) -> bool {
        self.gravity != 0.0 || self.friction_factor != 0.0
    }

    pub fn rate(&self, u: &Conserved) -> Conserved {
        let mut friction = 0.0;
        if self.friction_factor != 0.0 {
            friction = self.friction_factor * u.q * u.q.abs() / (2.0 * self.diameter * u.rho);
        }
        Conserved::new(0.0, -u.rho * self.gravity - friction, -self.gravity * u.q)
    }

    /// One Heun (explicit trapezoidal) step of `U' = G(U)`.
    pub fn heun_step(&self, u: &Conserved, dt: f64) -> Conserved {
        let k1 = self.rate(u);
        let k2 = self.rate(&(*u + dt * k1));
        *u + (0.5 * dt) * (k1 + k2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Splitting {
    Lie,
    #[default]
    Strang,
}

/// Advances every cell by the source ODE over `dt`. Does nothing when the
/// model is inactive.
pub fn advance_source(network: &mut Network, dt: f64, model: &SourceModel) -> Result<(), SimError> {
    if !model.is_active() {
        return Ok(());
    }
    let (step, time) = (network.steps, network.time);
    for pipe in &mut network.pipes {
        for (j, cell) in pipe.cells.iter_mut().enumerate() {
            let next = model.heun_step(cell, dt);
            conservative_to_primitive(&next, &pipe.spec.params).map_err(|source| {
                SimError::InvalidCell {
                    step,
                    time,
                    pipe: pipe.spec.label.clone(),
                    cell: j,
                    source,
                }
            })?;
            *cell = next;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{primitive_to_conservative, GasParams, GasState};

    #[test]
    fn friction_decay_matches_closed_form() {
        // rho frozen, q' = -k q |q| with k = f / (2 D rho): q(t) = q0 / (1 + k q0 t)
        let model = SourceModel {
            gravity: 0.0,
            friction_factor: 0.02,
            diameter: 0.5,
        };
        let params = GasParams::default();
        let u0 =
            primitive_to_conservative(&GasState::new(1.2, 3.0, 1.0).unwrap(), &params).unwrap();
        let k = model.friction_factor / (2.0 * model.diameter * u0.rho);
        let t_end = 2.0;
        let exact = u0.q / (1.0 + k * u0.q * t_end);
        let error = |steps: usize| {
            let dt = t_end / steps as f64;
            let mut u = u0;
            for _ in 0..steps {
                u = model.heun_step(&u, dt);
                assert_eq!(u.rho, u0.rho);
            }
            (u.q - exact).abs()
        };
        let (e1, e2) = (error(20), error(40));
        let order = (e1 / e2).log2();
        assert!(order > 1.9 && order < 2.1, "order {order}");
    }

    #[test]
    fn gravity_on_still_gas() {
        let model = SourceModel {
            gravity: 9.81,
            ..SourceModel::NONE
        };
        let params = GasParams::default();
        let u0 =
            primitive_to_conservative(&GasState::new(1.0, 0.0, 1.0).unwrap(), &params).unwrap();
        let dt = 1e-3;
        let u1 = model.heun_step(&u0, dt);
        let velocity = u1.q / u1.rho;
        assert!((velocity + 9.81 * dt).abs() < 1e-12);
        // E' = -g q with q = -rho g t gives E(dt) - E(0) = rho g^2 dt^2 / 2
        assert!((u1.e - u0.e - 0.5 * 9.81 * 9.81 * dt * dt).abs() < 1e-12);
    }

    #[test]
    fn inactive_model_is_identity() {
        let u = Conserved::new(1.0, 0.5, 3.0);
        assert!(!SourceModel::NONE.is_active());
        assert_eq!(SourceModel::NONE.rate(&u), Conserved::new(0.0, -0.0, -0.0));
    }
}
