//! Time-parameterised force and torque disturbances with a bounded derivative.
//!
//! Every shape except `constant` switches on and off through a quintic
//! smoothstep, so profiles are C² in time and `‖ḋ‖` has a closed-form bound.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::state::Vec3;

/// Which channel of the plant a primitive acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// World-frame force `d_f` (N).
    Force,
    /// Generalised torque `d_τ` (N·m) in Euler coordinates.
    Torque,
}

/// Time shape of a primitive. All times in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    /// `A` for all `t`.
    Constant,
    /// Slope `A` per second from `start` until `end`, held afterwards.
    Ramp {
        start: f64,
        #[serde(default)]
        end: Option<f64>,
        rise: f64,
    },
    /// `A·sin(2π·frequency·t + phase)`.
    Sinusoid {
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Plateau of full width at half maximum `width` centred on `center`.
    Pulse { center: f64, width: f64, rise: f64 },
    /// On at `start`, off at `end` (or never).
    Window {
        start: f64,
        #[serde(default)]
        end: Option<f64>,
        rise: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Primitive {
    pub target: Target,
    /// Direction; normalised on evaluation.
    pub direction: [f64; 3],
    /// Peak value (N, N·m), or slope (N/s, N·m/s) for ramps.
    pub amplitude: f64,
    pub shape: Shape,
}

/// Ordered sum of primitives.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceProfile {
    #[serde(default)]
    pub primitives: Vec<Primitive>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DisturbanceSample {
    pub force: Vec3,
    pub torque: Vec3,
}

/// Quintic smoothstep on `[0, 1]`, clamped outside.
pub fn smoothstep(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    }
}

/// Largest slope of [`smoothstep`].
pub const SMOOTHSTEP_MAX_SLOPE: f64 = 15.0 / 8.0;

/// Smoothed unit ramp: zero before 0, `s − rise/2` after `rise`, with
/// derivative `smoothstep(s/rise)`.
fn smooth_ramp(s: f64, rise: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= rise {
        s - 0.5 * rise
    } else {
        let u = s / rise;
        rise * u.powi(4) * (2.5 + u * (-3.0 + u))
    }
}

impl Shape {
    /// Unit-amplitude value at `t`.
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Shape::Constant => 1.0,
            Shape::Ramp { start, end, rise } => {
                let up = smooth_ramp(t - start, rise);
                let down = end.map_or(0.0, |e| smooth_ramp(t - e, rise));
                up - down
            }
            Shape::Sinusoid { frequency, phase } => {
                (std::f64::consts::TAU * frequency * t + phase).sin()
            }
            Shape::Pulse {
                center,
                width,
                rise,
            } => {
                let on = center - 0.5 * width - 0.5 * rise;
                let off = center + 0.5 * width - 0.5 * rise;
                smoothstep((t - on) / rise) - smoothstep((t - off) / rise)
            }
            Shape::Window { start, end, rise } => {
                let down = end.map_or(0.0, |e| smoothstep((t - e) / rise));
                smoothstep((t - start) / rise) - down
            }
        }
    }

    /// Analytic bound on `|d/dt value|` for unit amplitude.
    pub fn derivative_bound(&self) -> f64 {
        match *self {
            Shape::Constant => 0.0,
            Shape::Ramp { .. } => 1.0,
            Shape::Sinusoid { frequency, .. } => std::f64::consts::TAU * frequency,
            Shape::Pulse { rise, .. } | Shape::Window { rise, .. } => SMOOTHSTEP_MAX_SLOPE / rise,
        }
    }

    /// Interval outside which the shape is constant, if bounded.
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            Shape::Constant => None,
            Shape::Sinusoid { .. } => Some((0.0, f64::INFINITY)),
            Shape::Ramp { start, end, rise } => {
                Some((start, end.map_or(f64::INFINITY, |e| e + rise)))
            }
            Shape::Pulse {
                center,
                width,
                rise,
            } => {
                let on = center - 0.5 * width - 0.5 * rise;
                Some((on, on + width + rise))
            }
            Shape::Window { start, end, rise } => {
                Some((start, end.map_or(f64::INFINITY, |e| e + rise)))
            }
        }
    }

    fn rise(&self) -> Option<f64> {
        match *self {
            Shape::Ramp { rise, .. } | Shape::Pulse { rise, .. } | Shape::Window { rise, .. } => {
                Some(rise)
            }
            _ => None,
        }
    }
}

impl Primitive {
    fn unit_direction(&self) -> Vec3 {
        let d = Vec3::from(self.direction);
        d / d.norm()
    }

    pub fn validate(&self, path: &str) -> Result<(), ConfigError> {
        let d = Vec3::from(self.direction);
        if !(d.iter().all(|x| x.is_finite()) && d.norm() > 0.0) {
            return Err(ConfigError::invalid(
                format!("{path}.direction"),
                "must be finite and nonzero",
            ));
        }
        if !self.amplitude.is_finite() {
            return Err(ConfigError::invalid(
                format!("{path}.amplitude"),
                "must be finite",
            ));
        }
        let shape = format!("{path}.shape");
        if let Some(rise) = self.shape.rise() {
            if !(rise.is_finite() && rise > 0.0) {
                return Err(ConfigError::invalid(
                    format!("{shape}.rise"),
                    "must be finite and > 0",
                ));
            }
        }
        match self.shape {
            Shape::Ramp {
                start,
                end: Some(end),
                ..
            }
            | Shape::Window {
                start,
                end: Some(end),
                ..
            } if end < start => Err(ConfigError::invalid(
                format!("{shape}.end"),
                "must not precede start",
            )),
            Shape::Pulse { width, rise, .. } if !(width.is_finite() && width >= rise) => {
                Err(ConfigError::invalid(
                    format!("{shape}.width"),
                    "must be finite and at least the rise time",
                ))
            }
            Shape::Sinusoid { frequency, phase }
                if !(frequency.is_finite() && frequency >= 0.0 && phase.is_finite()) =>
            {
                Err(ConfigError::invalid(
                    format!("{shape}.frequency"),
                    "must be finite and >= 0",
                ))
            }
            _ => Ok(()),
        }
    }

    pub fn value(&self, t: f64) -> Vec3 {
        self.amplitude * self.shape.value(t) * self.unit_direction()
    }
}

impl DisturbanceProfile {
    pub fn new(primitives: Vec<Primitive>) -> Self {
        Self { primitives }
    }

    pub fn validate(&self, path: &str) -> Result<(), ConfigError> {
        for (i, p) in self.primitives.iter().enumerate() {
            p.validate(&format!("{path}.primitives[{i}]"))?;
        }
        Ok(())
    }

    /// `(d_f(t), d_τ(t))`.
    pub fn evaluate(&self, t: f64) -> DisturbanceSample {
        let mut out = DisturbanceSample::default();
        for p in &self.primitives {
            let v = p.value(t);
            match p.target {
                Target::Force => out.force += v,
                Target::Torque => out.torque += v,
            }
        }
        out
    }

    /// Declared `d̄` for one channel: sum of per-primitive analytic bounds.
    pub fn declared_bound(&self, target: Target) -> f64 {
        self.primitives
            .iter()
            .filter(|p| p.target == target)
            .map(|p| p.amplitude.abs() * p.shape.derivative_bound())
            .sum()
    }

    /// Shortest smoothing time among the primitives.
    pub fn min_rise(&self) -> Option<f64> {
        self.primitives
            .iter()
            .filter_map(|p| p.shape.rise())
            .reduce(f64::min)
    }

    /// Hull of the intervals where any primitive varies.
    pub fn active_interval(&self) -> Option<(f64, f64)> {
        self.primitives
            .iter()
            .filter_map(|p| p.shape.support())
            .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }

    /// Wind force along `direction` over `[start, end]` from the drag law
    /// `½ρ·CdA·v²`, plus a coupled torque of 10% of the force times half the
    /// axis distance about `torque_direction`.
    pub fn wind_gust(wind: &WindGust) -> Self {
        let force = wind.drag_force();
        let shape = Shape::Window {
            start: wind.start,
            end: Some(wind.end),
            rise: wind.rise,
        };
        Self::new(vec![
            Primitive {
                target: Target::Force,
                direction: wind.direction,
                amplitude: force,
                shape,
            },
            Primitive {
                target: Target::Torque,
                direction: wind.torque_direction,
                amplitude: wind.torque_fraction * force * 0.5 * wind.axis_distance,
                shape,
            },
        ])
    }

    /// Smoothed torque pulse modelling the perch strike.
    pub fn perch_impact(center: f64, width: f64, rise: f64, peak: f64) -> Self {
        Self::new(vec![Primitive {
            target: Target::Torque,
            direction: [0.0, 1.0, 0.0],
            amplitude: peak,
            shape: Shape::Pulse {
                center,
                width,
                rise,
            },
        }])
    }
}

/// Parameters of the wind-gust preset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindGust {
    pub speed: f64,
    pub air_density: f64,
    /// Drag coefficient times frontal area (m²); a calibration constant.
    pub drag_area: f64,
    pub start: f64,
    pub end: f64,
    pub rise: f64,
    pub direction: [f64; 3],
    pub torque_direction: [f64; 3],
    pub torque_fraction: f64,
    pub axis_distance: f64,
}

impl Default for WindGust {
    fn default() -> Self {
        Self {
            speed: 10.0,
            air_density: 1.225,
            drag_area: 0.046,
            start: 6.0,
            end: 10.0,
            rise: 0.5,
            direction: [0.0, 1.0, 0.0],
            torque_direction: [-1.0, 0.0, 0.0],
            torque_fraction: 0.1,
            axis_distance: 0.333,
        }
    }
}

impl WindGust {
    pub fn drag_force(&self) -> f64 {
        0.5 * self.air_density * self.drag_area * self.speed * self.speed
    }
}

/// Result of a dense finite-difference scan of `‖ḋ‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeCheck {
    pub max_force_rate: f64,
    pub max_torque_rate: f64,
    pub declared_force_bound: f64,
    pub declared_torque_bound: f64,
}

impl DerivativeCheck {
    pub fn within_bounds(&self) -> bool {
        self.max_force_rate <= self.declared_force_bound * (1.0 + 1e-9) + 1e-12
            && self.max_torque_rate <= self.declared_torque_bound * (1.0 + 1e-9) + 1e-12
    }
}

/// Central-difference scan of `‖ḋ_f‖` and `‖ḋ_τ‖` over `[0, horizon]` at
/// spacing `dt`, which must resolve every smoothing edge (`dt ≤ rise/10`).
pub fn derivative_bound_check(
    profile: &DisturbanceProfile,
    dt: f64,
    horizon: f64,
) -> Result<DerivativeCheck, ConfigError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(ConfigError::invalid(
            "dt",
            "grid spacing must be finite and > 0",
        ));
    }
    if let Some(rise) = profile.min_rise() {
        if dt > rise / 10.0 {
            return Err(ConfigError::invalid(
                "dt",
                format!("grid spacing {dt} does not resolve the shortest rise time {rise} (need <= rise/10)"),
            ));
        }
    }
    let n = (horizon / dt).ceil() as usize;
    let mut max_f: f64 = 0.0;
    let mut max_t: f64 = 0.0;
    let h = 0.5 * dt;
    for k in 0..=n {
        let t = k as f64 * dt;
        let a = profile.evaluate(t + h);
        let b = profile.evaluate((t - h).max(0.0));
        let span = t + h - (t - h).max(0.0);
        max_f = max_f.max((a.force - b.force).norm() / span);
        max_t = max_t.max((a.torque - b.torque).norm() / span);
    }
    Ok(DerivativeCheck {
        max_force_rate: max_f,
        max_torque_rate: max_t,
        declared_force_bound: profile.declared_bound(Target::Force),
        declared_torque_bound: profile.declared_bound(Target::Torque),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sinusoid(a: f64, f: f64) -> DisturbanceProfile {
        DisturbanceProfile::new(vec![Primitive {
            target: Target::Force,
            direction: [1.0, 0.0, 0.0],
            amplitude: a,
            shape: Shape::Sinusoid {
                frequency: f,
                phase: 0.0,
            },
        }])
    }

    #[test]
    fn empty_profile_is_zero() {
        let p = DisturbanceProfile::default();
        for t in [0.0, 1.0, 17.5, 1e4] {
            assert_eq!(p.evaluate(t), DisturbanceSample::default());
        }
        assert_eq!(p.active_interval(), None);
    }

    #[test]
    fn constant_has_zero_rate() {
        let p = DisturbanceProfile::new(vec![Primitive {
            target: Target::Torque,
            direction: [0.0, 0.0, 2.0],
            amplitude: 0.3,
            shape: Shape::Constant,
        }]);
        assert_eq!(p.evaluate(3.0).torque, Vec3::new(0.0, 0.0, 0.3));
        let c = derivative_bound_check(&p, 1e-3, 5.0).unwrap();
        assert_eq!(c.max_torque_rate, 0.0);
    }

    #[test]
    fn sinusoid_rate_matches_analytic() {
        let (a, f) = (1.5, 0.5);
        let c = derivative_bound_check(&sinusoid(a, f), 1e-3, 4.0).unwrap();
        let w = a * std::f64::consts::TAU * f;
        assert!((c.max_force_rate - w).abs() < 0.01 * w);
        assert!(c.within_bounds());
    }

    #[test]
    fn perch_preset_is_finite_and_bounded() {
        let p = DisturbanceProfile::perch_impact(17.5, 0.1, 0.02, 0.8);
        let peak = p.evaluate(17.5).torque;
        assert!((peak - Vec3::new(0.0, 0.8, 0.0)).norm() < 1e-12);
        assert_eq!(p.evaluate(17.0).torque, Vec3::zeros());
        let c = derivative_bound_check(&p, 1e-4, 20.0).unwrap();
        assert!(c.max_torque_rate.is_finite());
        assert!(c.within_bounds());
        // the slope bound is attained mid-edge
        assert!(c.max_torque_rate > 0.99 * c.declared_torque_bound);
    }

    #[test]
    fn pulse_has_requested_half_width() {
        let p = Shape::Pulse {
            center: 2.0,
            width: 0.3,
            rise: 0.05,
        };
        assert!((p.value(1.85) - 0.5).abs() < 1e-12);
        assert!((p.value(2.15) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn wind_preset_magnitude() {
        let w = WindGust::default();
        assert!((w.drag_force() - 2.8175).abs() < 1e-12);
        let p = DisturbanceProfile::wind_gust(&w);
        let s = p.evaluate(8.0);
        assert!((s.force - Vec3::new(0.0, 2.8175, 0.0)).norm() < 1e-12);
        assert!((s.torque.x + 0.1 * 2.8175 * 0.1665).abs() < 1e-12);
        assert_eq!(p.evaluate(5.9), DisturbanceSample::default());
        assert_eq!(p.evaluate(10.6), DisturbanceSample::default());
        assert_eq!(p.active_interval(), Some((6.0, 10.5)));
    }

    #[test]
    fn ramp_slope_and_hold() {
        let s = Shape::Ramp {
            start: 1.0,
            end: Some(3.0),
            rise: 0.1,
        };
        // slope 1 on the plateau, value held at end − start after end + rise
        let d = (s.value(2.0 + 1e-6) - s.value(2.0 - 1e-6)) / 2e-6;
        assert!((d - 1.0).abs() < 1e-6);
        assert!((s.value(5.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let p = DisturbanceProfile::perch_impact(1.0, 0.1, 0.02, 0.8);
        assert!(derivative_bound_check(&p, 0.01, 2.0).is_err());
    }

    #[test]
    fn validation_names_the_field() {
        let p = DisturbanceProfile::perch_impact(1.0, 0.01, 0.02, 0.8);
        let e = p.validate("disturbance").unwrap_err();
        assert_eq!(e.path(), "disturbance.primitives[0].shape.width");
    }

    fn arb_shape() -> impl Strategy<Value = Shape> {
        prop_oneof![
            Just(Shape::Constant),
            (0.0f64..5.0, 0.5f64..3.0, 0.01f64..0.5).prop_map(|(s, l, r)| Shape::Ramp {
                start: s,
                end: Some(s + l),
                rise: r
            }),
            (0.05f64..3.0, -3.0f64..3.0).prop_map(|(f, p)| Shape::Sinusoid {
                frequency: f,
                phase: p
            }),
            (0.5f64..5.0, 0.0f64..1.0, 0.01f64..0.5).prop_map(|(c, w, r)| Shape::Pulse {
                center: c + 0.5,
                width: w + r,
                rise: r
            }),
            (0.0f64..5.0, 0.0f64..3.0, 0.01f64..0.5).prop_map(|(s, l, r)| Shape::Window {
                start: s,
                end: Some(s + l),
                rise: r
            }),
        ]
    }

    fn arb_profile() -> impl Strategy<Value = DisturbanceProfile> {
        let prim = (
            prop::bool::ANY,
            prop::array::uniform3(-1.0f64..1.0),
            -3.0f64..3.0,
            arb_shape(),
        )
            .prop_filter("nonzero direction", |(_, d, _, _)| {
                Vec3::from(*d).norm() > 1e-3
            })
            .prop_map(|(f, d, a, s)| Primitive {
                target: if f { Target::Force } else { Target::Torque },
                direction: d,
                amplitude: a,
                shape: s,
            });
        prop::collection::vec(prim, 0..4).prop_map(DisturbanceProfile::new)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn measured_rate_never_exceeds_declared(p in arb_profile()) {
            let dt = p.min_rise().map_or(1e-3, |r| (r / 10.0).min(1e-3));
            let c = derivative_bound_check(&p, dt, 6.0).unwrap();
            prop_assert!(c.within_bounds(), "{:?}", c);
        }

        #[test]
        fn profiles_are_c1(p in arb_profile(), t in 0.1f64..8.0) {
            // Second difference of d converges as O(h²) for a C¹ (here C²)
            // signal: the centred derivative estimates at h and h/2 agree.
            let h = 1e-4;
            let d = |h: f64| {
                let a = p.evaluate(t + h);
                let b = p.evaluate(t - h);
                ((a.force - b.force) / (2.0 * h), (a.torque - b.torque) / (2.0 * h))
            };
            let (f1, t1) = d(h);
            let (f2, t2) = d(h / 2.0);
            // centred-difference error is h²/6 times the third derivative, so
            // the two estimates differ by at most h²/8 times its bound
            let third: f64 = p
                .primitives
                .iter()
                .map(|q| q.amplitude.abs() * match q.shape {
                    Shape::Constant => 0.0,
                    Shape::Ramp { rise, .. } => 2.0 * 6.0 / (rise * rise),
                    Shape::Sinusoid { frequency, .. } => (std::f64::consts::TAU * frequency).powi(3),
                    Shape::Pulse { rise, .. } | Shape::Window { rise, .. } => 2.0 * 60.0 / rise.powi(3),
                })
                .sum();
            let tol = h * h * third / 8.0 + 1e-9 * (1.0 + third);
            prop_assert!((f1 - f2).norm() <= tol, "{} > {}", (f1 - f2).norm(), tol);
            prop_assert!((t1 - t2).norm() <= tol);
        }

        #[test]
        fn evaluation_is_pure(p in arb_profile(), t in 0.0f64..10.0) {
            prop_assert_eq!(p.evaluate(t), p.evaluate(t));
        }
    }
}
