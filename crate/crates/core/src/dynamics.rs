//! Unicycle kinematics in a flowfield: `ṙ = v⋆ T̂ + w(t)`, `v⋆ dT̂/dt = a_N`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{cross_k, UnitVec2, Vec2};
use crate::wind::WindModel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("airspeed must be positive and finite, got {0}")]
    InvalidAirspeed(f64),
    #[error("position must be finite")]
    NonFinitePosition,
    #[error("time step must be positive and finite, got {0}")]
    InvalidTimeStep(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleState {
    pub position: Vec2,
    pub heading: UnitVec2,
    pub airspeed: f64,
}

impl VehicleState {
    pub fn new(position: Vec2, heading: UnitVec2, airspeed: f64) -> Result<Self, DynamicsError> {
        let s = VehicleState {
            position,
            heading,
            airspeed,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.airspeed > 0.0 && self.airspeed.is_finite()) {
            return Err(DynamicsError::InvalidAirspeed(self.airspeed));
        }
        if !self.position.is_finite() {
            return Err(DynamicsError::NonFinitePosition);
        }
        Ok(())
    }

    pub fn air_velocity(&self) -> Vec2 {
        self.heading * self.airspeed
    }

    pub fn ground_velocity(&self, w: Vec2) -> Vec2 {
        self.air_velocity() + w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Rk4,
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    #[serde(default)]
    pub method: Method,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 0.01,
            method: Method::Rk4,
        }
    }
}

impl IntegratorConfig {
    pub fn new(dt: f64, method: Method) -> Result<Self, DynamicsError> {
        let c = IntegratorConfig { dt, method };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(DynamicsError::InvalidTimeStep(self.dt));
        }
        Ok(())
    }
}

/// Time derivatives of position and heading.
pub fn derivatives(state: &VehicleState, accel: Vec2, w: Vec2) -> (Vec2, Vec2) {
    (state.air_velocity() + w, accel / state.airspeed)
}

/// Advances one step with the command held over the step.
///
/// The hold is applied to the signed normal acceleration: inside the step
/// the acceleration stays perpendicular to the current heading, so a
/// constant command turns the vehicle on an exact circle of the air mass.
pub fn step(state: &VehicleState, accel: Vec2, wind: &WindModel, t: f64, cfg: &IntegratorConfig) -> VehicleState {
    let a_n = cross_k(state.heading.vec(), accel);
    let h = cfg.dt;
    let f = |heading: Vec2, t: f64| {
        (
            heading * state.airspeed + wind.sample(t),
            heading.perp() * (a_n / state.airspeed),
        )
    };
    let (r0, h0) = (state.position, state.heading.vec());
    let (position, heading) = match cfg.method {
        Method::Euler => {
            let (dr, dh) = f(h0, t);
            (r0 + dr * h, h0 + dh * h)
        }
        Method::Rk4 => {
            let (k1r, k1h) = f(h0, t);
            let (k2r, k2h) = f(h0 + k1h * (h / 2.0), t + h / 2.0);
            let (k3r, k3h) = f(h0 + k2h * (h / 2.0), t + h / 2.0);
            let (k4r, k4h) = f(h0 + k3h * h, t + h);
            (
                r0 + (k1r + k2r * 2.0 + k3r * 2.0 + k4r) * (h / 6.0),
                h0 + (k1h + k2h * 2.0 + k3h * 2.0 + k4h) * (h / 6.0),
            )
        }
    };
    VehicleState {
        position,
        heading: UnitVec2::new(heading).unwrap_or(state.heading),
        airspeed: state.airspeed,
    }
}
