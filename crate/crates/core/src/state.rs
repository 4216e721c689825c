//! Shared state, error and parameter types.
//!
//! Frame conventions: world frame is Z-up with gravity along `-g·e3`. Attitude
//! is represented by Z-Y-X (yaw, pitch, roll) Euler angles.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

pub type Vec3 = Vector3<f64>;

/// Unit vertical `e3`.
pub fn e3() -> Vec3 {
    Vec3::new(0.0, 0.0, 1.0)
}

/// Distance kept from the pitch singularity at ±π/2.
pub const THETA_MARGIN: f64 = 0.2;

/// Largest admissible |pitch| before the Euler-rate map is treated as singular.
pub const PITCH_LIMIT: f64 = std::f64::consts::FRAC_PI_2 - THETA_MARGIN;

/// Roll, pitch, yaw in radians (Z-Y-X convention).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerAngles {
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

impl EulerAngles {
    pub const ZERO: EulerAngles = EulerAngles {
        roll: 0.0,
        pitch: 0.0,
        yaw: 0.0,
    };

    pub fn new(roll: f64, pitch: f64, yaw: f64) -> Self {
        Self { roll, pitch, yaw }
    }

    pub fn from_vec(v: &Vec3) -> Self {
        Self::new(v.x, v.y, v.z)
    }

    pub fn to_vec(self) -> Vec3 {
        Vec3::new(self.roll, self.pitch, self.yaw)
    }

    /// True while the pitch stays clear of gimbal lock.
    pub fn is_valid(&self) -> bool {
        self.pitch.abs() < PITCH_LIMIT && self.roll.is_finite() && self.yaw.is_finite()
    }
}

/// Full rigid-body state of the vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidBodyState {
    /// Position `s` in the world frame (m).
    pub position: Vec3,
    /// Velocity `v` in the world frame (m/s).
    pub velocity: Vec3,
    /// Euler angles `η` (rad).
    pub attitude: EulerAngles,
    /// Euler angle rates `η̇` (rad/s).
    pub attitude_rate: Vec3,
    /// Time (s).
    pub time: f64,
}

impl RigidBodyState {
    pub fn at_rest(position: Vec3) -> Self {
        Self {
            position,
            velocity: Vec3::zeros(),
            attitude: EulerAngles::ZERO,
            attitude_rate: Vec3::zeros(),
            time: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.position.iter().all(|x| x.is_finite())
            && self.velocity.iter().all(|x| x.is_finite())
            && self.attitude.to_vec().iter().all(|x| x.is_finite())
            && self.attitude_rate.iter().all(|x| x.is_finite())
            && self.time.is_finite()
    }

    /// The 12-element vector `[s, v, η, η̇]`.
    pub fn to_array(&self) -> [f64; 12] {
        let mut out = [0.0; 12];
        out[0..3].copy_from_slice(self.position.as_slice());
        out[3..6].copy_from_slice(self.velocity.as_slice());
        out[6..9].copy_from_slice(self.attitude.to_vec().as_slice());
        out[9..12].copy_from_slice(self.attitude_rate.as_slice());
        out
    }

    pub fn from_array(x: &[f64; 12], time: f64) -> Self {
        Self {
            position: Vec3::new(x[0], x[1], x[2]),
            velocity: Vec3::new(x[3], x[4], x[5]),
            attitude: EulerAngles::new(x[6], x[7], x[8]),
            attitude_rate: Vec3::new(x[9], x[10], x[11]),
            time,
        }
    }
}

/// Tracking errors, always reference minus actual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackingError {
    pub position: Vec3,
    pub velocity: Vec3,
    pub attitude: Vec3,
    pub attitude_rate: Vec3,
}

impl TrackingError {
    pub fn zero() -> Self {
        Self {
            position: Vec3::zeros(),
            velocity: Vec3::zeros(),
            attitude: Vec3::zeros(),
            attitude_rate: Vec3::zeros(),
        }
    }
}

impl std::ops::Neg for TrackingError {
    type Output = TrackingError;

    fn neg(self) -> TrackingError {
        TrackingError {
            position: -self.position,
            velocity: -self.velocity,
            attitude: -self.attitude,
            attitude_rate: -self.attitude_rate,
        }
    }
}

/// `e_s = s_d − s`, `e_v = v_d − v`, `e_η = η_d − η` and the matching rate error.
pub fn tracking_error(state: &RigidBodyState, reference: &RigidBodyState) -> TrackingError {
    TrackingError {
        position: reference.position - state.position,
        velocity: reference.velocity - state.velocity,
        attitude: reference.attitude.to_vec() - state.attitude.to_vec(),
        attitude_rate: reference.attitude_rate - state.attitude_rate,
    }
}

/// Physical and nominal vehicle parameters.
///
/// `nominal_mass` and `nominal_inertia` are what the controllers and observers
/// believe; `mass` and `inertia` drive the plant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct VehicleParams {
    /// True mass (kg).
    pub mass: f64,
    /// Nominal mass used by the controllers (kg).
    pub nominal_mass: f64,
    /// True diagonal body inertia (kg·m²).
    pub inertia: [f64; 3],
    /// Nominal diagonal body inertia (kg·m²).
    pub nominal_inertia: [f64; 3],
    /// Gravitational acceleration (m/s²).
    pub gravity: f64,
    /// Motor-to-motor diagonal distance of the X frame (m).
    pub axis_distance: f64,
    /// Per-rotor thrust limit (N).
    pub max_rotor_thrust: f64,
    /// Ratio of rotor drag torque to rotor thrust (m).
    pub yaw_torque_coefficient: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            mass: 2.7,
            nominal_mass: 2.7,
            inertia: [0.021, 0.021, 0.036],
            nominal_inertia: [0.021, 0.021, 0.036],
            gravity: 9.81,
            axis_distance: 0.333,
            max_rotor_thrust: 15.0,
            yaw_torque_coefficient: 0.016,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::invalid(
                    format!("vehicle.{name}"),
                    format!("must be finite and > 0, got {v}"),
                ))
            }
        };
        positive("mass", self.mass)?;
        positive("nominal_mass", self.nominal_mass)?;
        positive("gravity", self.gravity)?;
        positive("axis_distance", self.axis_distance)?;
        positive("max_rotor_thrust", self.max_rotor_thrust)?;
        positive("yaw_torque_coefficient", self.yaw_torque_coefficient)?;
        for i in 0..3 {
            positive(&format!("inertia[{i}]"), self.inertia[i])?;
            positive(&format!("nominal_inertia[{i}]"), self.nominal_inertia[i])?;
        }
        Ok(())
    }

    pub fn inertia_vec(&self) -> Vec3 {
        Vec3::from(self.inertia)
    }

    pub fn nominal_inertia_vec(&self) -> Vec3 {
        Vec3::from(self.nominal_inertia)
    }

    /// Collective thrust that balances gravity for the true mass.
    pub fn hover_thrust(&self) -> f64 {
        self.mass * self.gravity
    }
}

/// Wrap an angle into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut w = a.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}
