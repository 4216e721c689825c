//! Estimation-error scaling experiment on a closed-loop double integrator.
//!
//! The plant is `ẍ = a(t) + u/m` with `a(t) = A·sin(2πft)`. The observer
//! estimates `x3 = a` and the loop is closed with `u = m(k1·x + k2·x̂2 − x̂3)`.
//! For each ε the steady-state residual `max|x̂3 − a|` is recorded and a
//! least-squares slope of `log residual` against `log ε` is fitted.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::control::FeedbackGains;
use crate::error::ConfigError;
use crate::observers::{
    CascadedEhgo, CascadedGains, ExtendedObserver, StandardEhgo, StandardGains,
};
use crate::state::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum ObserverKind {
    Cascaded,
    Standard,
}

impl std::fmt::Display for ObserverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ObserverKind::Cascaded => "cascaded",
            ObserverKind::Standard => "standard",
        })
    }
}

/// Default ε sweep.
pub const DEFAULT_EPSILONS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

/// Residuals below this are treated as numerical noise.
pub const RESIDUAL_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingConfig {
    pub amplitude: f64,
    pub frequency: f64,
    pub mass: f64,
    pub duration: f64,
    /// Residuals are taken over the final `window` seconds.
    pub window: f64,
    pub dt: f64,
    pub gains: FeedbackGains,
    pub l: (f64, f64),
    pub alpha: [f64; 3],
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            frequency: 0.5,
            mass: 1.0,
            duration: 10.0,
            window: 4.0,
            dt: 2e-5,
            gains: FeedbackGains { k1: -4.0, k2: -4.0 },
            l: (2.0, 2.0),
            alpha: [6.0, 11.0, 6.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingStatus {
    Ok,
    /// All residuals at the numerical floor; no slope can be fitted.
    FloorLimited,
    /// A run diverged or produced non-finite estimates.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub observer: ObserverKind,
    /// Ascending.
    pub epsilons: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `None` unless `status` is `Ok`.
    pub slope: Option<f64>,
    pub status: ScalingStatus,
}

impl ScalingReport {
    /// True when the fitted slope lies in `[lo, hi]`.
    pub fn slope_within(&self, lo: f64, hi: f64) -> bool {
        self.slope.is_some_and(|s| (lo..=hi).contains(&s))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "observer: {}\n{:>10}  {:>14}\n",
            self.observer, "epsilon", "residual"
        );
        for (e, r) in self.epsilons.iter().zip(&self.residuals) {
            s.push_str(&format!("{e:>10.5}  {r:>14.6e}\n"));
        }
        match self.slope {
            Some(k) => s.push_str(&format!("log-log slope: {k:.4}\n")),
            None => s.push_str(&format!("log-log slope: n/a ({:?})\n", self.status)),
        }
        s
    }
}

/// Least-squares slope of `y` against `x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Steady-state `max|x̂3 − a|` for one observer at one ε. `None` on divergence.
pub fn steady_state_residual(
    kind: ObserverKind,
    epsilon: f64,
    cfg: &ScalingConfig,
) -> Result<Option<f64>, ConfigError> {
    let g = Matrix3::identity() / cfg.mass;
    let mut obs: Box<dyn ExtendedObserver> = match kind {
        ObserverKind::Cascaded => Box::new(CascadedEhgo::new(
            CascadedGains {
                l1: cfg.l.0,
                l2: cfg.l.1,
                epsilon,
            },
            g,
        )?),
        ObserverKind::Standard => Box::new(StandardEhgo::new(
            StandardGains {
                alpha: cfg.alpha,
                epsilon,
            },
            g,
        )?),
    };
    if cfg.dt > obs.max_step() {
        return Err(ConfigError::invalid(
            "dt",
            format!(
                "step {} exceeds the observer stiffness limit {} at epsilon {epsilon}",
                cfg.dt,
                obs.max_step()
            ),
        ));
    }
    let w = std::f64::consts::TAU * cfg.frequency;
    let accel = |t: f64| cfg.amplitude * (w * t).sin();
    let steps = (cfg.duration / cfg.dt).round() as usize;
    let window_start = cfg.duration - cfg.window;
    let (mut x, mut v) = (0.0f64, 0.0f64);
    let mut worst: f64 = 0.0;
    for k in 0..steps {
        let t = k as f64 * cfg.dt;
        let y = Vec3::new(x, 0.0, 0.0);
        let est = obs.output(&y);
        if t >= window_start {
            worst = worst.max((est.extended.x - accel(t)).abs());
        }
        let u = cfg.mass * (cfg.gains.k1 * x + cfg.gains.k2 * est.rate.x - est.extended.x);
        obs.step(&y, &Vec3::new(u, 0.0, 0.0), cfg.dt)
            .expect("step checked above");
        // RK4 with u held over the step
        let f = |t: f64, v: f64| (v, accel(t) + u / cfg.mass);
        let h = cfg.dt;
        let (a1, b1) = f(t, v);
        let (a2, b2) = f(t + h / 2.0, v + h / 2.0 * b1);
        let (a3, b3) = f(t + h / 2.0, v + h / 2.0 * b2);
        let (a4, b4) = f(t + h, v + h * b3);
        x += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        v += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
        if !(x.is_finite() && v.is_finite()) || x.abs() > 1e6 {
            return Ok(None);
        }
    }
    Ok(worst.is_finite().then_some(worst))
}

/// Residual-vs-ε sweep with a fitted log-log slope. The ε list may be given in
/// any order; at least three distinct positive values are required.
pub fn estimation_error_scaling(
    kind: ObserverKind,
    epsilons: &[f64],
    cfg: &ScalingConfig,
) -> Result<ScalingReport, ConfigError> {
    let mut eps: Vec<f64> = epsilons.to_vec();
    if eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(ConfigError::invalid(
            "epsilon",
            "values must be finite and > 0",
        ));
    }
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    if eps.len() < 3 {
        return Err(ConfigError::invalid(
            "epsilon",
            format!("need at least 3 distinct values, got {}", eps.len()),
        ));
    }
    let runs: Vec<Option<f64>> = eps
        .iter()
        .map(|&e| steady_state_residual(kind, e, cfg))
        .collect::<Result<_, _>>()?;
    let (residuals, status) = if runs.iter().any(Option::is_none) {
        (
            runs.iter().map(|r| r.unwrap_or(f64::NAN)).collect(),
            ScalingStatus::Failed,
        )
    } else {
        let r: Vec<f64> = runs.into_iter().flatten().collect();
        let status = if r.iter().all(|v| *v < RESIDUAL_FLOOR) {
            ScalingStatus::FloorLimited
        } else {
            ScalingStatus::Ok
        };
        (r, status)
    };
    let slope = (status == ScalingStatus::Ok).then(|| {
        let lx: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
        let ly: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
        least_squares_slope(&lx, &ly)
    });
    Ok(ScalingReport {
        observer: kind,
        epsilons: eps,
        residuals,
        slope,
        status,
    })
}
