//! Extended high-gain observers.
//!
//! Both observers estimate, per axis, the derivative of a measured output `y`
//! and the lumped "extended" acceleration term `x3` of a second-order loop
//! `ÿ = x3 + G·u`, where `G` is the nominal input gain (`I/m₀` for the position
//! loop, `M₀⁻¹` for the attitude loop).
//!
//! [`CascadedEhgo`] chains two first-order high-gain stages:
//!
//! ```text
//! ξ̇1 = (l1/ε)·e1,            e1 = y − ξ1,   x̂2 = (l1/ε)·e1
//! ξ̇2 = (l2/ε)·e2 + G·u,      e2 = x̂2 − ξ2,  x̂3 = (l2/ε)·e2
//! ```
//!
//! [`StandardEhgo`] is the classical third-order observer with gains
//! `α_i/εⁱ`. Both are discretised with forward Euler; a step is rejected when
//! `dt` exceeds a tenth of the inverse spectral radius of the observer's error
//! dynamics.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, ModelError};
use crate::state::Vec3;

/// Derivative and extended-state estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObserverEstimates {
    /// Estimate of `ẏ`.
    pub rate: Vec3,
    /// Estimate of the extended state (acceleration units).
    pub extended: Vec3,
}

impl ObserverEstimates {
    pub fn zero() -> Self {
        Self {
            rate: Vec3::zeros(),
            extended: Vec3::zeros(),
        }
    }
}

/// Common interface of the extended observers.
pub trait ExtendedObserver: Send {
    /// Estimates implied by the current internal state and the measurement
    /// `y`. Does not advance the observer.
    fn output(&self, y: &Vec3) -> ObserverEstimates;

    /// Advance one forward-Euler step with measurement `y` and the input `u`
    /// held over `[t, t + dt]`. Returns the estimates at the start of the step.
    fn step(&mut self, y: &Vec3, u: &Vec3, dt: f64) -> Result<ObserverEstimates, ModelError>;

    /// Largest admissible step.
    fn max_step(&self) -> f64;

    fn epsilon(&self) -> f64;

    /// Overwrite the internal state so that `output(y0)` returns the given
    /// estimates.
    fn reset(&mut self, y0: &Vec3, estimates: &ObserverEstimates);

    /// The internal state flattened for diagnostics.
    fn internal_state(&self) -> Vec<Vec3>;
}

fn check_step(dt: f64, limit: f64) -> Result<(), ModelError> {
    // Allow for the rounding in ε/(10·l) when dt sits exactly on the limit.
    if dt > 0.0 && dt <= limit * (1.0 + 1e-12) {
        Ok(())
    } else {
        Err(ModelError::StiffStep { dt, limit })
    }
}

/// Injection gains of the cascaded observer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CascadedGains {
    pub l1: f64,
    pub l2: f64,
    pub epsilon: f64,
}

impl Default for CascadedGains {
    fn default() -> Self {
        Self {
            l1: 2.0,
            l2: 2.0,
            epsilon: 0.02,
        }
    }
}

impl CascadedGains {
    pub fn validate(&self, path: &str) -> Result<(), ConfigError> {
        for (name, v) in [("l1", self.l1), ("l2", self.l2), ("epsilon", self.epsilon)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::invalid(
                    format!("{path}.{name}"),
                    format!("must be finite and > 0, got {v}"),
                ));
            }
        }
        Ok(())
    }

    /// Spectral radius of the open-loop error dynamics, `max(l1, l2)/ε`.
    pub fn spectral_radius(&self) -> f64 {
        self.l1.max(self.l2) / self.epsilon
    }
}

/// Two cascaded first-order high-gain observers per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadedEhgo {
    xi1: Vec3,
    xi2: Vec3,
    gains: CascadedGains,
    nominal_gain: Matrix3<f64>,
}

impl CascadedEhgo {
    pub fn new(gains: CascadedGains, nominal_gain: Matrix3<f64>) -> Result<Self, ConfigError> {
        gains.validate("observer.cascaded")?;
        Ok(Self {
            xi1: Vec3::zeros(),
            xi2: Vec3::zeros(),
            gains,
            nominal_gain,
        })
    }

    pub fn from_state(
        xi1: Vec3,
        xi2: Vec3,
        gains: CascadedGains,
        nominal_gain: Matrix3<f64>,
    ) -> Result<Self, ConfigError> {
        let mut o = Self::new(gains, nominal_gain)?;
        o.xi1 = xi1;
        o.xi2 = xi2;
        Ok(o)
    }

    pub fn xi(&self) -> (Vec3, Vec3) {
        (self.xi1, self.xi2)
    }

    pub fn gains(&self) -> CascadedGains {
        self.gains
    }
}

impl ExtendedObserver for CascadedEhgo {
    fn output(&self, y: &Vec3) -> ObserverEstimates {
        let CascadedGains { l1, l2, epsilon } = self.gains;
        let rate = (l1 / epsilon) * (y - self.xi1);
        let extended = (l2 / epsilon) * (rate - self.xi2);
        ObserverEstimates { rate, extended }
    }

    fn step(&mut self, y: &Vec3, u: &Vec3, dt: f64) -> Result<ObserverEstimates, ModelError> {
        check_step(dt, self.max_step())?;
        let est = self.output(y);
        // ξ̇1 = x̂2 and ξ̇2 = x̂3 + G·u by construction of the outputs.
        self.xi1 += dt * est.rate;
        self.xi2 += dt * (est.extended + self.nominal_gain * u);
        Ok(est)
    }

    fn max_step(&self) -> f64 {
        self.gains.epsilon / (10.0 * self.gains.l1.max(self.gains.l2))
    }

    fn epsilon(&self) -> f64 {
        self.gains.epsilon
    }

    fn reset(&mut self, y0: &Vec3, estimates: &ObserverEstimates) {
        let CascadedGains { l1, l2, epsilon } = self.gains;
        self.xi1 = y0 - (epsilon / l1) * estimates.rate;
        self.xi2 = estimates.rate - (epsilon / l2) * estimates.extended;
    }

    fn internal_state(&self) -> Vec<Vec3> {
        vec![self.xi1, self.xi2]
    }
}

/// Gains of the third-order observer; `s³ + α1·s² + α2·s + α3` must be Hurwitz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct StandardGains {
    pub alpha: [f64; 3],
    pub epsilon: f64,
}

impl Default for StandardGains {
    fn default() -> Self {
        Self {
            alpha: [6.0, 11.0, 6.0],
            epsilon: 0.02,
        }
    }
}

impl StandardGains {
    pub fn validate(&self, path: &str) -> Result<(), ConfigError> {
        let [a1, a2, a3] = self.alpha;
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(ConfigError::invalid(
                format!("{path}.epsilon"),
                format!("must be finite and > 0, got {}", self.epsilon),
            ));
        }
        // Routh-Hurwitz for a cubic.
        if !(a1 > 0.0 && a2 > 0.0 && a3 > 0.0 && a1 * a2 > a3) {
            return Err(ConfigError::invalid(
                format!("{path}.alpha"),
                format!("s^3 + {a1}s^2 + {a2}s + {a3} is not Hurwitz"),
            ));
        }
        Ok(())
    }

    /// Largest pole magnitude of the error dynamics, `max|root|/ε`.
    pub fn spectral_radius(&self) -> f64 {
        let [a1, a2, a3] = self.alpha;
        let companion = Matrix3::new(0.0, 1.0, 0.0, 0.0, 0.0, 1.0, -a3, -a2, -a1);
        let max_root = companion
            .complex_eigenvalues()
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        max_root / self.epsilon
    }
}

/// Classical third-order extended high-gain observer per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardEhgo {
    x1: Vec3,
    x2: Vec3,
    x3: Vec3,
    gains: StandardGains,
    nominal_gain: Matrix3<f64>,
    max_step: f64,
}

impl StandardEhgo {
    pub fn new(gains: StandardGains, nominal_gain: Matrix3<f64>) -> Result<Self, ConfigError> {
        gains.validate("observer.standard")?;
        Ok(Self {
            x1: Vec3::zeros(),
            x2: Vec3::zeros(),
            x3: Vec3::zeros(),
            max_step: 1.0 / (10.0 * gains.spectral_radius()),
            gains,
            nominal_gain,
        })
    }

    pub fn states(&self) -> (Vec3, Vec3, Vec3) {
        (self.x1, self.x2, self.x3)
    }

    pub fn set_states(&mut self, x1: Vec3, x2: Vec3, x3: Vec3) {
        self.x1 = x1;
        self.x2 = x2;
        self.x3 = x3;
    }
}

impl ExtendedObserver for StandardEhgo {
    fn output(&self, _y: &Vec3) -> ObserverEstimates {
        ObserverEstimates {
            rate: self.x2,
            extended: self.x3,
        }
    }

    fn step(&mut self, y: &Vec3, u: &Vec3, dt: f64) -> Result<ObserverEstimates, ModelError> {
        check_step(dt, self.max_step)?;
        let est = self.output(y);
        let [a1, a2, a3] = self.gains.alpha;
        let eps = self.gains.epsilon;
        let e = y - self.x1;
        let d1 = self.x2 + (a1 / eps) * e;
        let d2 = self.x3 + self.nominal_gain * u + (a2 / (eps * eps)) * e;
        let d3 = (a3 / (eps * eps * eps)) * e;
        self.x1 += dt * d1;
        self.x2 += dt * d2;
        self.x3 += dt * d3;
        Ok(est)
    }

    fn max_step(&self) -> f64 {
        self.max_step
    }

    fn epsilon(&self) -> f64 {
        self.gains.epsilon
    }

    fn reset(&mut self, y0: &Vec3, estimates: &ObserverEstimates) {
        self.x1 = *y0;
        self.x2 = estimates.rate;
        self.x3 = estimates.extended;
    }

    fn internal_state(&self) -> Vec<Vec3> {
        vec![self.x1, self.x2, self.x3]
    }
}
