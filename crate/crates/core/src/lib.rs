//! Quadrotor closed-loop simulator with extended high-gain observers.
//!
//! The crate models a rigid-body quadrotor in Euler-angle coordinates and
//! closes the position and attitude loops with one of three controllers:
//! observer-based saturated feedback using a cascaded extended high-gain
//! observer, the same feedback with a classical third-order observer, or a
//! PID baseline. Scenarios add smoothed force and torque disturbances and
//! produce trajectory logs, error statistics and comparison reports.

pub mod control;
pub mod disturbance;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod observers;
pub mod scaling;
pub mod scenario;
pub mod sim;
pub mod state;

pub use error::{ConfigError, Error, Fault, ModelError};
pub use scenario::{ControllerKind, Scenario};
pub use sim::{run, TrajectoryLog};
