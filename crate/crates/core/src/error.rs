use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A configuration problem detected before any simulation step.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}

impl ConfigError {
    pub fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn path(&self) -> &str {
        match self {
            ConfigError::Invalid { path, .. } | ConfigError::Parse { path, .. } => path,
        }
    }
}

/// Terminal fault recorded in a trajectory log. Faults are data: a faulted run
/// still yields every record up to the fault.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Error)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fault {
    #[error("gimbal lock at t={time}s (pitch {pitch} rad)")]
    GimbalLock { time: f64, pitch: f64 },
    #[error("non-finite state at t={time}s")]
    NonFinite { time: f64 },
    #[error("demanded tilt {tilt} rad exceeds the attitude guard at t={time}s")]
    TiltLimit { time: f64, tilt: f64 },
}

impl Fault {
    pub fn time(&self) -> f64 {
        match *self {
            Fault::GimbalLock { time, .. }
            | Fault::NonFinite { time }
            | Fault::TiltLimit { time, .. } => time,
        }
    }
}

/// Errors returned by the pure model functions when their domain is violated.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ModelError {
    #[error("pitch {pitch} rad is inside the gimbal-lock guard")]
    GimbalLock { pitch: f64 },
    #[error("demanded tilt {tilt} rad exceeds the attitude guard")]
    TiltLimit { tilt: f64 },
    #[error("observer step {dt}s exceeds the stiffness limit {limit}s")]
    StiffStep { dt: f64, limit: f64 },
}

/// Top-level error for the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("simulation fault: {0}")]
    Fault(Fault),
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::Config(_) => 3,
            Error::Fault(_) => 4,
            Error::Io { .. } => 5,
        }
    }
}
