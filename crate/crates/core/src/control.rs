//! Saturated observer-based control laws and the PID baseline.

use nalgebra::{Matrix2, Matrix3};
use serde::{Deserialize, Serialize};

use crate::dynamics::thrust_direction;
use crate::error::{ConfigError, ModelError};
use crate::state::{e3, EulerAngles, TrackingError, Vec3, PITCH_LIMIT};

/// Shape of the unit saturation outside `[−1, 1]`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, schemars::JsonSchema,
)]
#[serde(rename_all = "snake_case")]
pub enum SatMode {
    /// Bounded, approaching `1 + h` from below.
    #[default]
    Bounded,
    /// Unbounded with asymptotic slope `h`.
    SlopeLimited,
    /// No saturation at all.
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SatConfig {
    /// Saturation level `B` (N for the position loop, N·m for the attitude loop).
    pub bound: f64,
    /// Overshoot fraction `h` in `(0, 1]`.
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default)]
    pub mode: SatMode,
}

fn default_h() -> f64 {
    0.1
}

impl SatConfig {
    pub fn new(bound: f64, h: f64) -> Self {
        Self {
            bound,
            h,
            mode: SatMode::Bounded,
        }
    }

    pub fn validate(&self, path: &str) -> Result<(), ConfigError> {
        if !(self.bound.is_finite() && self.bound > 0.0) {
            return Err(ConfigError::invalid(
                format!("{path}.bound"),
                format!("must be finite and > 0, got {}", self.bound),
            ));
        }
        if !(self.h > 0.0 && self.h <= 1.0) {
            return Err(ConfigError::invalid(
                format!("{path}.h"),
                format!("must lie in (0, 1], got {}", self.h),
            ));
        }
        Ok(())
    }

    /// `‖u‖∞` can never exceed this under [`SatMode::Bounded`].
    pub fn limit(&self) -> f64 {
        self.bound * (1.0 + self.h)
    }
}

/// Odd, C¹, nondecreasing unit saturation; the identity on `[−1, 1]`.
pub fn sat(v: f64, cfg: &SatConfig) -> f64 {
    let a = v.abs();
    if a <= 1.0 || cfg.mode == SatMode::Off {
        return v;
    }
    let x = a - 1.0;
    let h = cfg.h;
    let tail = match cfg.mode {
        SatMode::Bounded => h * x / (h + x),
        SatMode::SlopeLimited => h * x + (1.0 - h) * x.tanh(),
        SatMode::Off => unreachable!(),
    };
    v.signum() * (1.0 + tail)
}

/// `d sat / dv`.
pub fn sat_derivative(v: f64, cfg: &SatConfig) -> f64 {
    let a = v.abs();
    if a <= 1.0 || cfg.mode == SatMode::Off {
        return 1.0;
    }
    let x = a - 1.0;
    let h = cfg.h;
    match cfg.mode {
        SatMode::Bounded => (h / (h + x)).powi(2),
        SatMode::SlopeLimited => h + (1.0 - h) / x.cosh().powi(2),
        SatMode::Off => unreachable!(),
    }
}

/// `B·sat(v/B)` per component. The flag reports whether any component left
/// the linear region.
pub fn saturate(v: &Vec3, cfg: &SatConfig) -> (Vec3, bool) {
    let b = cfg.bound;
    let active = v.iter().any(|x| x.abs() > b);
    (
        v.map(|x| b * sat(x / b, cfg)),
        active && cfg.mode != SatMode::Off,
    )
}

/// Feedback row `K = [k1, k2]`; `[[0, 1], [k1, k2]]` must be Hurwitz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct FeedbackGains {
    pub k1: f64,
    pub k2: f64,
}

impl FeedbackGains {
    pub fn new(k1: f64, k2: f64) -> Result<Self, ConfigError> {
        let g = Self { k1, k2 };
        g.validate("gains")?;
        Ok(g)
    }

    pub fn validate(&self, path: &str) -> Result<(), ConfigError> {
        if self.k1 < 0.0 && self.k2 < 0.0 {
            Ok(())
        } else {
            Err(ConfigError::invalid(
                path,
                format!(
                    "K = [{}, {}] does not make [[0, 1], [k1, k2]] Hurwitz (need k1 < 0 and k2 < 0)",
                    self.k1, self.k2
                ),
            ))
        }
    }

    pub fn companion(&self) -> Matrix2<f64> {
        Matrix2::new(0.0, 1.0, self.k1, self.k2)
    }

    /// Solution `P` of `P·E + Eᵀ·P = −I`.
    pub fn lyapunov_matrix(&self) -> Matrix2<f64> {
        let (k1, k2) = (self.k1, self.k2);
        let p12 = -1.0 / (2.0 * k1);
        let p22 = (-0.5 - p12) / k2;
        let p11 = -p12 * k2 - p22 * k1;
        Matrix2::new(p11, p12, p12, p22)
    }

    /// `K·[x1, x2]` per component.
    pub fn apply(&self, x1: &Vec3, x2: &Vec3) -> Vec3 {
        self.k1 * x1 + self.k2 * x2
    }
}

/// Output of one control update. Commands are zero-order held between ticks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlCommand {
    /// Position-loop force demand `u_p` (N, world frame).
    pub force_demand: Vec3,
    /// Attitude-loop torque demand `u_a` (N·m, Euler coordinates).
    pub torque_demand: Vec3,
    /// Collective thrust (N).
    pub thrust: f64,
    /// Attitude setpoint handed from the position loop to the attitude loop.
    pub attitude_setpoint: EulerAngles,
    pub position_saturated: bool,
    pub attitude_saturated: bool,
}

impl ControlCommand {
    pub fn idle() -> Self {
        Self {
            force_demand: Vec3::zeros(),
            torque_demand: Vec3::zeros(),
            thrust: 0.0,
            attitude_setpoint: EulerAngles::ZERO,
            position_saturated: false,
            attitude_saturated: false,
        }
    }
}

/// `u_p = B_p·sat(m₀(K·x̂_p − x̂_p3)/B_p)` per axis.
///
/// `error` is the loop state `x1` (measured) and `rate_error` the estimate of
/// `x2`, both expressed as actual minus reference.
pub fn position_control(
    error: &Vec3,
    rate_error: &Vec3,
    extended: &Vec3,
    gains: &FeedbackGains,
    cfg: &SatConfig,
    nominal_mass: f64,
) -> (Vec3, bool) {
    let raw = nominal_mass * (gains.apply(error, rate_error) - extended);
    saturate(&raw, cfg)
}

/// `u_a = B_a·sat(M₀(K·x̂_a − x̂_a3)/B_a)` per axis.
pub fn attitude_control(
    error: &Vec3,
    rate_error: &Vec3,
    extended: &Vec3,
    gains: &FeedbackGains,
    cfg: &SatConfig,
    nominal_inertia: &Matrix3<f64>,
) -> (Vec3, bool) {
    let raw = nominal_inertia * (gains.apply(error, rate_error) - extended);
    saturate(&raw, cfg)
}

/// Collective thrust and attitude that realise the world-frame force demand
/// `u_p` with heading `yaw`, i.e. `thrust·R(η_d)·e3 = u_p`.
pub fn attitude_setpoint(force: &Vec3, yaw: f64) -> Result<(f64, EulerAngles), ModelError> {
    let thrust = force.norm();
    if thrust == 0.0 {
        return Ok((0.0, EulerAngles::new(0.0, 0.0, yaw)));
    }
    let tilt = force.xy().norm().atan2(force.z);
    if tilt >= PITCH_LIMIT {
        return Err(ModelError::TiltLimit { tilt });
    }
    let b = force / thrust;
    let (sy, cy) = yaw.sin_cos();
    // heading-aligned components
    let bx = cy * b.x + sy * b.y;
    let by = -sy * b.x + cy * b.y;
    let pitch = bx.atan2(b.z);
    let roll = (-by).atan2(bx.hypot(b.z));
    Ok((thrust, EulerAngles::new(roll, pitch, yaw)))
}

/// Per-axis PID gains in physical units (N/m, N·m/rad, ...).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct PidGains {
    pub kp: [f64; 3],
    pub ki: [f64; 3],
    pub kd: [f64; 3],
}

impl PidGains {
    pub fn uniform(kp: f64, ki: f64, kd: f64) -> Self {
        Self {
            kp: [kp; 3],
            ki: [ki; 3],
            kd: [kd; 3],
        }
    }

    /// Gains placing a triple pole at `−ω` for a double integrator with the
    /// given per-axis inertia (mass or moment of inertia).
    pub fn triple_pole(omega: f64, inertia: &Vec3) -> Self {
        let i = inertia;
        Self {
            kp: [0, 1, 2].map(|k| 3.0 * omega * omega * i[k]),
            ki: [0, 1, 2].map(|k| omega.powi(3) * i[k]),
            kd: [0, 1, 2].map(|k| 3.0 * omega * i[k]),
        }
    }

    pub fn validate(&self, path: &str) -> Result<(), ConfigError> {
        for (name, g) in [("kp", self.kp), ("ki", self.ki), ("kd", self.kd)] {
            if g.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(ConfigError::invalid(
                    format!("{path}.{name}"),
                    "gains must be finite and non-negative",
                ));
            }
        }
        Ok(())
    }
}

/// Three-axis PID with integral clamping at the loop's saturation level.
#[derive(Debug, Clone, PartialEq)]
pub struct PidLoop {
    gains: PidGains,
    sat: SatConfig,
    integral: Vec3,
}

impl PidLoop {
    pub fn new(gains: PidGains, sat: SatConfig) -> Self {
        Self {
            gains,
            sat,
            integral: Vec3::zeros(),
        }
    }

    pub fn integral(&self) -> Vec3 {
        self.integral
    }

    /// `kp·e + ki·∫e + kd·ė + feedforward`, clamped to `±B(1+h)` per axis.
    pub fn update(
        &mut self,
        error: &Vec3,
        error_rate: &Vec3,
        feedforward: &Vec3,
        dt: f64,
    ) -> (Vec3, bool) {
        let b = self.sat.bound;
        let limit = self.sat.limit();
        let mut out = Vec3::zeros();
        let mut active = false;
        for i in 0..3 {
            let ki = self.gains.ki[i];
            let mut integral = self.integral[i] + error[i] * dt;
            if ki > 0.0 {
                integral = integral.clamp(-b / ki, b / ki);
            }
            self.integral[i] = integral;
            let raw = self.gains.kp[i] * error[i]
                + ki * integral
                + self.gains.kd[i] * error_rate[i]
                + feedforward[i];
            active |= raw.abs() > limit;
            out[i] = raw.clamp(-limit, limit);
        }
        (out, active)
    }
}

/// Both PID loops of the baseline controller.
#[derive(Debug, Clone, PartialEq)]
pub struct PidState {
    pub position: PidLoop,
    pub attitude: PidLoop,
    /// Hover feedforward `m₀·g` on the vertical axis.
    pub hover_feedforward: f64,
    pub yaw_setpoint: f64,
}

/// One synchronous update of both PID loops on the given tracking error.
pub fn pid_control(
    error: &TrackingError,
    state: &mut PidState,
    dt: f64,
) -> Result<ControlCommand, ModelError> {
    let ff = state.hover_feedforward * e3();
    let (force, position_saturated) =
        state
            .position
            .update(&error.position, &error.velocity, &ff, dt);
    let (thrust, setpoint) = attitude_setpoint(&force, state.yaw_setpoint)?;
    let (torque, attitude_saturated) =
        state
            .attitude
            .update(&error.attitude, &error.attitude_rate, &Vec3::zeros(), dt);
    Ok(ControlCommand {
        force_demand: force,
        torque_demand: torque,
        thrust,
        attitude_setpoint: setpoint,
        position_saturated,
        attitude_saturated,
    })
}

/// World-frame force produced by `thrust` along the body axis at attitude `eta`.
pub fn realised_force(thrust: f64, eta: &EulerAngles) -> Vec3 {
    thrust * thrust_direction(eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix4, Vector4};
    use proptest::prelude::*;

    fn cfg() -> SatConfig {
        SatConfig::new(1.0, 0.1)
    }

    #[test]
    fn sat_identity_region() {
        assert_eq!(sat(0.5, &cfg()), 0.5);
        assert_eq!(sat(-1.0, &cfg()), -1.0);
        assert_eq!(sat_derivative(0.3, &cfg()), 1.0);
    }

    #[test]
    fn sat_far_tail() {
        let v = sat(10.0, &cfg());
        assert!(v > 1.0 && v < 1.1, "{v}");
        assert!(sat_derivative(10.0, &cfg()) < 0.01);
        // closed form 1 + h·x/(h + x) at x = 9
        assert!((v - (1.0 + 0.9 / 9.1)).abs() < 1e-15);
    }

    #[test]
    fn sat_is_c1_at_the_knee() {
        for mode in [SatMode::Bounded, SatMode::SlopeLimited] {
            let c = SatConfig { mode, ..cfg() };
            let h = 1e-7;
            let right = (sat(1.0 + h, &c) - sat(1.0, &c)) / h;
            assert!((right - 1.0).abs() < 1e-5, "{mode:?} {right}");
        }
    }

    #[test]
    fn slope_limited_is_unbounded_and_off_is_identity() {
        let c = SatConfig {
            mode: SatMode::SlopeLimited,
            ..cfg()
        };
        assert!(sat(1e6, &c) > 1e4);
        assert!((sat_derivative(1e3, &c) - 0.1).abs() < 1e-12);
        let off = SatConfig {
            mode: SatMode::Off,
            ..cfg()
        };
        assert_eq!(sat(123.0, &off), 123.0);
    }

    #[test]
    fn hurwitz_gate() {
        assert!(FeedbackGains::new(-4.0, -4.0).is_ok());
        assert!(FeedbackGains::new(0.0, -4.0).is_err());
        assert!(FeedbackGains::new(-1.0, 0.5).is_err());
    }

    #[test]
    fn lyapunov_solution() {
        let g = FeedbackGains::new(-4.0, -4.0).unwrap();
        let p = g.lyapunov_matrix();
        let e = g.companion();
        let r = p * e + e.transpose() * p + Matrix2::identity();
        assert!(r.norm() < 1e-12);
        assert!(p.cholesky().is_some());
    }

    #[test]
    fn lyapunov_matches_kronecker_solve() {
        // Independent route: vec(P E + Eᵀ P) = (Eᵀ ⊗ I + I ⊗ Eᵀ) vec(P)
        let g = FeedbackGains::new(-25.0, -10.0).unwrap();
        let e = g.companion();
        let et = e.transpose();
        let i2 = Matrix2::<f64>::identity();
        let mut a = Matrix4::zeros();
        for r in 0..2 {
            for c in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        a[(2 * c + r, 2 * l + k)] +=
                            et[(c, l)] * i2[(r, k)] + i2[(c, l)] * et[(r, k)];
                    }
                }
            }
        }
        let rhs = Vector4::new(-1.0, 0.0, 0.0, -1.0);
        let vec_p = a.lu().solve(&rhs).unwrap();
        let p = g.lyapunov_matrix();
        // column-major vec
        assert!((vec_p[0] - p[(0, 0)]).abs() < 1e-12);
        assert!((vec_p[1] - p[(1, 0)]).abs() < 1e-12);
        assert!((vec_p[2] - p[(0, 1)]).abs() < 1e-12);
        assert!((vec_p[3] - p[(1, 1)]).abs() < 1e-12);
    }

    #[test]
    fn zero_estimates_give_zero_commands() {
        let g = FeedbackGains::new(-4.0, -4.0).unwrap();
        let z = Vec3::zeros();
        let (u, active) = position_control(&z, &z, &z, &g, &SatConfig::new(53.0, 0.1), 2.7);
        assert_eq!(u, z);
        assert!(!active);
        let (u, _) = attitude_control(
            &z,
            &z,
            &z,
            &g,
            &SatConfig::new(1.5, 0.1),
            &Matrix3::identity(),
        );
        assert_eq!(u, z);
    }

    #[test]
    fn gravity_in_extended_state_yields_hover_thrust() {
        let g = FeedbackGains::new(-4.0, -4.0).unwrap();
        let z = Vec3::zeros();
        let (u, _) = position_control(
            &z,
            &z,
            &Vec3::new(0.0, 0.0, -9.81),
            &g,
            &SatConfig::new(2.0 * 2.7 * 9.81, 0.1),
            2.7,
        );
        assert!((u - Vec3::new(0.0, 0.0, 26.487)).norm() < 1e-12);
    }

    #[test]
    fn linear_region_matches_unsaturated_law() {
        let g = FeedbackGains::new(-4.0, -4.0).unwrap();
        let x1 = Vec3::new(0.1, -0.2, 0.05);
        let x2 = Vec3::new(-0.3, 0.1, 0.0);
        let x3 = Vec3::new(0.2, 0.4, -9.81);
        let (u, active) = position_control(&x1, &x2, &x3, &g, &SatConfig::new(53.0, 0.1), 2.7);
        assert_eq!(u, 2.7 * (g.apply(&x1, &x2) - x3));
        assert!(!active);
        let m0 = Matrix3::from_diagonal(&Vec3::new(0.021, 0.021, 0.036));
        let ga = FeedbackGains::new(-25.0, -10.0).unwrap();
        let (ua, _) = attitude_control(&x1, &x2, &x3, &ga, &SatConfig::new(1.5, 0.1), &m0);
        assert_eq!(ua, m0 * (ga.apply(&x1, &x2) - x3));
    }

    #[test]
    fn vertical_demand_maps_to_level_attitude() {
        let (f, eta) = attitude_setpoint(&Vec3::new(0.0, 0.0, 26.487), 0.0).unwrap();
        assert_eq!(f, 26.487);
        assert_eq!(eta, EulerAngles::ZERO);
    }

    #[test]
    fn small_forward_demand_pitches_by_ratio() {
        let u = Vec3::new(0.5, 0.0, 26.487);
        let (f, eta) = attitude_setpoint(&u, 0.0).unwrap();
        assert!((eta.pitch - u.x / f).abs() < 1e-4);
        assert!(eta.roll.abs() < 1e-15);
    }

    #[test]
    fn excessive_tilt_faults() {
        assert!(matches!(
            attitude_setpoint(&Vec3::new(30.0, 0.0, 1.0), 0.0),
            Err(ModelError::TiltLimit { .. })
        ));
        assert!(attitude_setpoint(&Vec3::new(0.0, 0.0, -5.0), 0.0).is_err());
    }

    fn pid_state(gains: PidGains) -> PidState {
        PidState {
            position: PidLoop::new(gains, SatConfig::new(53.0, 0.1)),
            attitude: PidLoop::new(gains, SatConfig::new(1.5, 0.1)),
            hover_feedforward: 26.487,
            yaw_setpoint: 0.0,
        }
    }

    #[test]
    fn pid_zero_error_outputs_hover_feedforward() {
        let mut s = pid_state(PidGains::uniform(3.0, 1.0, 0.5));
        let c = pid_control(&TrackingError::zero(), &mut s, 0.01).unwrap();
        assert_eq!(c.force_demand, Vec3::new(0.0, 0.0, 26.487));
        assert_eq!(c.torque_demand, Vec3::zeros());
        assert_eq!(c.thrust, 26.487);
    }

    #[test]
    fn proportional_only_pid() {
        let mut s = pid_state(PidGains::uniform(0.8, 0.0, 0.0));
        let mut e = TrackingError::zero();
        e.attitude = Vec3::new(0.1, -0.2, 0.3);
        e.position = Vec3::new(0.0, 0.0, 0.5);
        for _ in 0..5 {
            let c = pid_control(&e, &mut s, 0.01).unwrap();
            assert_eq!(c.torque_demand, 0.8 * e.attitude);
            assert_eq!(c.force_demand, Vec3::new(0.0, 0.0, 0.4 + 26.487));
        }
    }

    #[test]
    fn pid_integral_is_clamped() {
        let mut l = PidLoop::new(PidGains::uniform(0.0, 2.0, 0.0), SatConfig::new(1.0, 0.1));
        for _ in 0..10_000 {
            l.update(&Vec3::repeat(1.0), &Vec3::zeros(), &Vec3::zeros(), 0.01);
        }
        assert!((l.integral().x - 0.5).abs() < 1e-12);
        let (u, _) = l.update(&Vec3::repeat(1.0), &Vec3::zeros(), &Vec3::zeros(), 0.01);
        assert!((u.x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pid_step_response_matches_discrete_closed_form() {
        // Double integrator m·ẍ = u under ZOH at dt, PID with forward-Euler
        // integral. Closed form: z_{k+1} = A_cl z_k with z = [x, v, I].
        let (m, dt) = (2.0, 0.01);
        let (kp, ki, kd) = (12.0, 8.0, 6.0);
        let r = 1.0;
        let mut pid = PidLoop::new(PidGains::uniform(kp, ki, kd), SatConfig::new(1e9, 0.1));
        let (mut x, mut v) = (0.0f64, 0.0f64);
        let mut xs = Vec::new();
        for _ in 0..300 {
            let (u, _) = pid.update(
                &Vec3::new(r - x, 0.0, 0.0),
                &Vec3::new(-v, 0.0, 0.0),
                &Vec3::zeros(),
                dt,
            );
            let a = u.x / m;
            x += v * dt + 0.5 * a * dt * dt;
            v += a * dt;
            xs.push(x);
        }
        // e = r − x, I_{k+1} = I_k + e_k·dt, u_k = kp·e_k + ki·I_{k+1} − kd·v_k
        let a_cl = {
            let c = dt / m;
            let ux = -kp - ki * dt;
            let uv = -kd;
            let ui = ki;
            nalgebra::Matrix4::new(
                1.0 + 0.5 * dt * c * ux,
                dt + 0.5 * dt * c * uv,
                0.5 * dt * c * ui,
                0.5 * dt * c * (kp + ki * dt) * r,
                c * ux,
                1.0 + c * uv,
                c * ui,
                c * (kp + ki * dt) * r,
                -dt,
                0.0,
                1.0,
                dt * r,
                0.0,
                0.0,
                0.0,
                1.0,
            )
        };
        let mut z = Vector4::new(0.0, 0.0, 0.0, 1.0);
        for (k, xk) in xs.iter().enumerate() {
            z = a_cl * z;
            assert!((z[0] - xk).abs() < 1e-12, "step {k}: {} vs {}", z[0], xk);
        }
        assert!((xs.last().unwrap() - r).abs() < 0.05);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn sat_contract(v in -1e6f64..1e6, h in 0.01f64..1.0, dv in 0.0f64..10.0) {
            let c = SatConfig::new(1.0, h);
            let s = sat(v, &c);
            prop_assert_eq!(sat(-v, &c), -s);
            prop_assert!(s.abs() < 1.0 + h);
            prop_assert!(sat(v + dv, &c) >= s);
            prop_assert!(sat_derivative(v, &c) <= 1.0);
            if v.abs() <= 1.0 { prop_assert_eq!(s, v); }
        }

        #[test]
        fn attitude_law_respects_bound(
            x1 in prop::array::uniform3(-10.0f64..10.0),
            x2 in prop::array::uniform3(-100.0f64..100.0),
            x3 in prop::array::uniform3(-1e4f64..1e4),
        ) {
            let g = FeedbackGains::new(-25.0, -10.0).unwrap();
            let c = SatConfig::new(1.5, 0.1);
            let m0 = Matrix3::from_diagonal(&Vec3::new(0.021, 0.021, 0.036));
            let (u, _) = attitude_control(&Vec3::from(x1), &Vec3::from(x2), &Vec3::from(x3), &g, &c, &m0);
            prop_assert!(u.amax() <= c.limit());
            let (up, _) = position_control(&Vec3::from(x1), &Vec3::from(x2), &Vec3::from(x3), &FeedbackGains::new(-4.0, -4.0).unwrap(), &SatConfig::new(53.0, 0.1), 2.7);
            prop_assert!(up.amax() <= 53.0 * 1.1);
        }

        #[test]
        fn setpoint_reproduces_force(
            fx in -20.0f64..20.0, fy in -20.0f64..20.0, fz in 5.0f64..60.0, yaw in -3.0f64..3.0
        ) {
            let u = Vec3::new(fx, fy, fz);
            if let Ok((f, eta)) = attitude_setpoint(&u, yaw) {
                prop_assert!((realised_force(f, &eta) - u).norm() < 1e-9 * (1.0 + u.norm()));
                prop_assert!(eta.is_valid());
            }
        }
    }
}
