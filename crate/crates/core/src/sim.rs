//! Fixed-step closed-loop simulation.
//!
//! Each plant tick `k` (time `k·dt`):
//! 1. measure position and attitude (optionally with seeded jitter),
//! 2. read observer outputs for the measurement,
//! 3. on position ticks update the force demand and attitude setpoint, on
//!    attitude ticks update the torque demand (both held in between),
//! 4. advance the observers with the measurement and the applied input,
//! 5. log the record,
//! 6. integrate the plant one RK4 step with the held thrust and torque.
//!
//! A run with `N` steps produces `N + 1` records unless a fault stops it.

use std::fmt::Write as _;

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::control::{
    attitude_control, attitude_setpoint, position_control, realised_force, PidLoop, SatConfig,
};
use crate::disturbance::DisturbanceSample;
use crate::dynamics::{
    attitude_matrices, euler_rate_transform, motor_mixing, rotational_accel, thrust_direction,
    translational_accel,
};
use crate::error::{ConfigError, Fault, ModelError};
use crate::observers::{CascadedEhgo, ExtendedObserver, ObserverEstimates, StandardEhgo};
use crate::scenario::{ControllerKind, ObserverInit, ReferenceSample, Scenario};
use crate::state::{
    e3, tracking_error, wrap_angle, EulerAngles, RigidBodyState, TrackingError, Vec3, VehicleParams,
};

/// One plant tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub time: f64,
    pub state: RigidBodyState,
    pub reference: ReferenceSample,
    pub attitude_setpoint: EulerAngles,
    /// Reference minus actual, with the attitude error wrapped.
    pub error: TrackingError,
    pub position_estimate: ObserverEstimates,
    pub attitude_estimate: ObserverEstimates,
    pub force_demand: Vec3,
    pub torque_demand: Vec3,
    pub thrust: f64,
    pub disturbance: DisturbanceSample,
    pub position_saturated: bool,
    pub attitude_saturated: bool,
    pub rotor_infeasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryLog {
    pub scenario: String,
    pub controller: ControllerKind,
    pub plant_dt: f64,
    pub records: Vec<Record>,
    pub fault: Option<Fault>,
}

/// Column order of the trajectory CSV.
pub const CSV_HEADER: &str = "t,\
x,y,z,vx,vy,vz,roll,pitch,yaw,roll_rate,pitch_rate,yaw_rate,\
x_ref,y_ref,z_ref,vx_ref,vy_ref,vz_ref,yaw_ref,\
roll_sp,pitch_sp,yaw_sp,\
ex,ey,ez,e_roll,e_pitch,e_yaw,\
p_rate_hat_x,p_rate_hat_y,p_rate_hat_z,p_ext_hat_x,p_ext_hat_y,p_ext_hat_z,\
a_rate_hat_x,a_rate_hat_y,a_rate_hat_z,a_ext_hat_x,a_ext_hat_y,a_ext_hat_z,\
up_x,up_y,up_z,ua_x,ua_y,ua_z,thrust,\
df_x,df_y,df_z,dtau_x,dtau_y,dtau_z,\
sat_p,sat_a,rotor_infeasible";

impl TrajectoryLog {
    pub fn is_faulted(&self) -> bool {
        self.fault.is_some()
    }

    pub fn last(&self) -> Option<&Record> {
        self.records.last()
    }

    /// Records with `t0 <= t <= t1`.
    pub fn window(&self, t0: f64, t1: f64) -> impl Iterator<Item = &Record> {
        self.records
            .iter()
            .filter(move |r| r.time >= t0 && r.time <= t1)
    }

    /// One row per record under [`CSV_HEADER`].
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.records.len() * 600);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let s = &r.state;
            let mut cols: Vec<f64> = vec![r.time];
            cols.extend(s.to_array());
            cols.extend(r.reference.position.iter());
            cols.extend(r.reference.velocity.iter());
            cols.push(r.reference.yaw);
            cols.extend(r.attitude_setpoint.to_vec().iter());
            cols.extend(r.error.position.iter());
            cols.extend(r.error.attitude.iter());
            for est in [&r.position_estimate, &r.attitude_estimate] {
                cols.extend(est.rate.iter());
                cols.extend(est.extended.iter());
            }
            cols.extend(r.force_demand.iter());
            cols.extend(r.torque_demand.iter());
            cols.push(r.thrust);
            cols.extend(r.disturbance.force.iter());
            cols.extend(r.disturbance.torque.iter());
            for (i, c) in cols.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{c}").expect("string write");
            }
            for flag in [
                r.position_saturated,
                r.attitude_saturated,
                r.rotor_infeasible,
            ] {
                out.push_str(if flag { ",1" } else { ",0" });
            }
            out.push('\n');
        }
        out
    }
}

/// Plant parameters plus the disturbance needed by the integrator.
struct Plant<'a> {
    params: &'a VehicleParams,
    disturbance: &'a crate::disturbance::DisturbanceProfile,
}

fn derivative(
    plant: &Plant,
    x: &[f64; 12],
    t: f64,
    thrust: f64,
    torque: &Vec3,
) -> Result<[f64; 12], ModelError> {
    let s = RigidBodyState::from_array(x, t);
    let d = plant.disturbance.evaluate(t);
    let lift = thrust * thrust_direction(&s.attitude);
    let a = translational_accel(&s, &lift, &d.force, plant.params);
    let alpha = rotational_accel(
        &s.attitude,
        &s.attitude_rate,
        torque,
        &d.torque,
        &plant.params.inertia_vec(),
    )?;
    let mut dx = [0.0; 12];
    dx[0..3].copy_from_slice(s.velocity.as_slice());
    dx[3..6].copy_from_slice(a.as_slice());
    dx[6..9].copy_from_slice(s.attitude_rate.as_slice());
    dx[9..12].copy_from_slice(alpha.as_slice());
    Ok(dx)
}

/// One classical RK4 step of the 12-state model with thrust and torque held
/// and the disturbance evaluated at the stage times.
pub fn step_plant(
    state: &RigidBodyState,
    thrust: f64,
    torque: &Vec3,
    params: &VehicleParams,
    disturbance: &crate::disturbance::DisturbanceProfile,
    dt: f64,
) -> Result<RigidBodyState, ModelError> {
    let plant = Plant {
        params,
        disturbance,
    };
    let x0 = state.to_array();
    let t = state.time;
    let add = |a: &[f64; 12], b: &[f64; 12], h: f64| {
        let mut o = *a;
        for i in 0..12 {
            o[i] += h * b[i];
        }
        o
    };
    let k1 = derivative(&plant, &x0, t, thrust, torque)?;
    let k2 = derivative(
        &plant,
        &add(&x0, &k1, dt / 2.0),
        t + dt / 2.0,
        thrust,
        torque,
    )?;
    let k3 = derivative(
        &plant,
        &add(&x0, &k2, dt / 2.0),
        t + dt / 2.0,
        thrust,
        torque,
    )?;
    let k4 = derivative(&plant, &add(&x0, &k3, dt), t + dt, thrust, torque)?;
    let mut x = x0;
    for i in 0..12 {
        x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(RigidBodyState::from_array(&x, t + dt))
}

#[allow(clippy::large_enum_variant)] // one per run
enum Laws {
    Observer {
        position: Box<dyn ExtendedObserver>,
        attitude: Box<dyn ExtendedObserver>,
    },
    Pid {
        position: PidLoop,
        attitude: PidLoop,
    },
    Off,
}

/// Mutable controller state of one run.
struct Controller {
    laws: Laws,
    pos_sat: SatConfig,
    att_sat: SatConfig,
    nominal_mass: f64,
    nominal_inertia: Matrix3<f64>,
    gains: crate::scenario::GainSet,
    // held commands
    force: Vec3,
    torque: Vec3,
    thrust: f64,
    setpoint: EulerAngles,
    pos_saturated: bool,
    att_saturated: bool,
}

fn build_controller(
    sc: &Scenario,
    y0: &Vec3,
    eta0: &EulerAngles,
) -> Result<Controller, ConfigError> {
    let v = &sc.vehicle;
    let nominal_inertia =
        attitude_matrices(&EulerAngles::ZERO, &Vec3::zeros(), &v.nominal_inertia_vec())
            .expect("level attitude is valid")
            .inertia;
    let inv_inertia = nominal_inertia
        .try_inverse()
        .expect("nominal inertia is positive");
    let g_pos = Matrix3::identity() / v.nominal_mass;
    let (pos_sat, att_sat) = sc.saturation.resolve(v);
    let o = &sc.observer;
    let rate_err = Vec3::from(o.initial_rate_error);
    let laws = match sc.controller {
        ControllerKind::CascadedEhgo | ControllerKind::StandardEhgo => {
            let (mut p, mut a): (Box<dyn ExtendedObserver>, Box<dyn ExtendedObserver>) =
                match sc.controller {
                    ControllerKind::CascadedEhgo => (
                        Box::new(CascadedEhgo::new(o.cascaded_position, g_pos)?),
                        Box::new(CascadedEhgo::new(o.cascaded_attitude, inv_inertia)?),
                    ),
                    _ => (
                        Box::new(StandardEhgo::new(o.standard_position, g_pos)?),
                        Box::new(StandardEhgo::new(o.standard_attitude, inv_inertia)?),
                    ),
                };
            let pos_prior = match o.init {
                ObserverInit::Prior => -v.gravity * e3(),
                // second cascade stage (or third standard state) at zero
                ObserverInit::Raw => match sc.controller {
                    ControllerKind::CascadedEhgo => {
                        rate_err * o.cascaded_position.l2 / o.cascaded_position.epsilon
                    }
                    _ => Vec3::zeros(),
                },
            };
            p.reset(
                y0,
                &ObserverEstimates {
                    rate: rate_err,
                    extended: pos_prior,
                },
            );
            a.reset(&eta0.to_vec(), &ObserverEstimates::zero());
            Laws::Observer {
                position: p,
                attitude: a,
            }
        }
        ControllerKind::Pid => Laws::Pid {
            position: PidLoop::new(sc.gains.pid_position, pos_sat),
            attitude: PidLoop::new(sc.gains.pid_attitude, att_sat),
        },
        ControllerKind::Off => Laws::Off,
    };
    Ok(Controller {
        laws,
        pos_sat,
        att_sat,
        nominal_mass: v.nominal_mass,
        nominal_inertia,
        gains: sc.gains,
        force: Vec3::zeros(),
        torque: Vec3::zeros(),
        thrust: 0.0,
        setpoint: EulerAngles::ZERO,
        pos_saturated: false,
        att_saturated: false,
    })
}

fn attitude_error(eta: &EulerAngles, setpoint: &EulerAngles) -> Vec3 {
    (eta.to_vec() - setpoint.to_vec()).map(wrap_angle)
}

struct Measurement {
    position: Vec3,
    attitude: EulerAngles,
    velocity: Vec3,
    attitude_rate: Vec3,
}

impl Controller {
    /// Steps 2 to 4 of the tick. Returns the estimates used.
    fn tick(
        &mut self,
        m: &Measurement,
        r: &ReferenceSample,
        pos_tick: bool,
        att_tick: bool,
        dts: (f64, f64, f64),
        gravity: f64,
    ) -> Result<(ObserverEstimates, ObserverEstimates), ModelError> {
        let (plant_dt, att_dt, pos_dt) = dts;
        match &mut self.laws {
            Laws::Off => Ok((ObserverEstimates::zero(), ObserverEstimates::zero())),
            Laws::Observer { position, attitude } => {
                let y_eta = m.attitude.to_vec();
                let est_p = position.output(&m.position);
                let est_a = attitude.output(&y_eta);
                if pos_tick {
                    let (u, sat) = position_control(
                        &(m.position - r.position),
                        &(est_p.rate - r.velocity),
                        &(est_p.extended - r.acceleration),
                        &self.gains.position,
                        &self.pos_sat,
                        self.nominal_mass,
                    );
                    let (f, sp) = attitude_setpoint(&u, r.yaw)?;
                    self.force = u;
                    self.thrust = f;
                    self.setpoint = sp;
                    self.pos_saturated = sat;
                }
                if att_tick {
                    let (u, sat) = attitude_control(
                        &attitude_error(&m.attitude, &self.setpoint),
                        &est_a.rate,
                        &est_a.extended,
                        &self.gains.attitude,
                        &self.att_sat,
                        &self.nominal_inertia,
                    );
                    self.torque = u;
                    self.att_saturated = sat;
                }
                let applied = realised_force(self.thrust, &m.attitude);
                position.step(&m.position, &applied, plant_dt)?;
                attitude.step(&y_eta, &self.torque, plant_dt)?;
                Ok((est_p, est_a))
            }
            Laws::Pid { position, attitude } => {
                if pos_tick {
                    let ff = self.nominal_mass * (gravity * e3() + r.acceleration);
                    let (u, sat) = position.update(
                        &(r.position - m.position),
                        &(r.velocity - m.velocity),
                        &ff,
                        pos_dt,
                    );
                    let (f, sp) = attitude_setpoint(&u, r.yaw)?;
                    self.force = u;
                    self.thrust = f;
                    self.setpoint = sp;
                    self.pos_saturated = sat;
                }
                if att_tick {
                    let (u, sat) = attitude.update(
                        &-attitude_error(&m.attitude, &self.setpoint),
                        &-m.attitude_rate,
                        &Vec3::zeros(),
                        att_dt,
                    );
                    self.torque = u;
                    self.att_saturated = sat;
                }
                Ok((ObserverEstimates::zero(), ObserverEstimates::zero()))
            }
        }
    }
}

fn fault_from(e: ModelError, time: f64) -> Fault {
    match e {
        ModelError::GimbalLock { pitch } => Fault::GimbalLock { time, pitch },
        ModelError::TiltLimit { tilt } => Fault::TiltLimit { time, tilt },
        // stiffness is screened by validation; treat a late violation as divergence
        ModelError::StiffStep { .. } => Fault::NonFinite { time },
    }
}

/// Run one scenario with its configured controller.
pub fn run(sc: &Scenario) -> Result<TrajectoryLog, ConfigError> {
    sc.validate()?;
    let (att_div, pos_div_rel) = sc.rates.dividers()?;
    let pos_div = att_div * pos_div_rel;
    let dt = sc.rates.plant_dt;
    let steps = sc.steps();
    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);

    let r0 = sc.reference.sample(0.0);
    let mut p0 = r0.position + Vec3::from(sc.initial.position_offset);
    if sc.initial.perturbation > 0.0 {
        let a = sc.initial.perturbation;
        p0 += Vec3::from_fn(|_, _| rng.random_range(-a..=a));
    }
    let mut state = RigidBodyState {
        position: p0,
        attitude: EulerAngles::new(0.0, 0.0, r0.yaw),
        ..RigidBodyState::at_rest(p0)
    };
    let mut ctrl = build_controller(sc, &state.position, &state.attitude)?;
    let mut records = Vec::with_capacity(steps + 1);
    let mut fault = None;

    for k in 0..=steps {
        let t = k as f64 * dt;
        state.time = t;
        let reference = sc.reference.sample(t);
        let m = match sc.measurement_jitter {
            Some(j) if j > 0.0 => {
                let mut n = || Vec3::from_fn(|_, _| rng.random_range(-j..=j));
                let (np, na) = (n(), n());
                Measurement {
                    position: state.position + np,
                    attitude: EulerAngles::from_vec(&(state.attitude.to_vec() + na)),
                    velocity: state.velocity,
                    attitude_rate: state.attitude_rate,
                }
            }
            _ => Measurement {
                position: state.position,
                attitude: state.attitude,
                velocity: state.velocity,
                attitude_rate: state.attitude_rate,
            },
        };
        let (est_p, est_a) = match ctrl.tick(
            &m,
            &reference,
            k % pos_div == 0,
            k % att_div == 0,
            (dt, sc.rates.attitude_dt, sc.rates.position_dt),
            sc.vehicle.gravity,
        ) {
            Ok(e) => e,
            Err(e) => {
                fault = Some(fault_from(e, t));
                break;
            }
        };
        let body_torque = euler_rate_transform(&state.attitude)
            .ok()
            .and_then(|w| w.transpose().try_inverse())
            .map(|wt_inv| wt_inv * ctrl.torque)
            .unwrap_or(ctrl.torque);
        let mixing = motor_mixing(ctrl.thrust, &body_torque, &sc.vehicle);
        let mut error = tracking_error(
            &state,
            &RigidBodyState {
                position: reference.position,
                velocity: reference.velocity,
                attitude: ctrl.setpoint,
                attitude_rate: Vec3::zeros(),
                time: t,
            },
        );
        error.attitude = -attitude_error(&state.attitude, &ctrl.setpoint);
        records.push(Record {
            time: t,
            state,
            reference,
            attitude_setpoint: ctrl.setpoint,
            error,
            position_estimate: est_p,
            attitude_estimate: est_a,
            force_demand: ctrl.force,
            torque_demand: ctrl.torque,
            thrust: ctrl.thrust,
            disturbance: sc.disturbance.evaluate(t),
            position_saturated: ctrl.pos_saturated,
            attitude_saturated: ctrl.att_saturated,
            rotor_infeasible: !mixing.feasible,
        });
        if k == steps {
            break;
        }
        match step_plant(
            &state,
            ctrl.thrust,
            &ctrl.torque,
            &sc.vehicle,
            &sc.disturbance,
            dt,
        ) {
            Ok(next) if !next.is_finite() => {
                fault = Some(Fault::NonFinite { time: t + dt });
                break;
            }
            Ok(next) if !next.attitude.is_valid() => {
                fault = Some(Fault::GimbalLock {
                    time: t + dt,
                    pitch: next.attitude.pitch,
                });
                break;
            }
            Ok(next) => state = next,
            Err(e) => {
                fault = Some(fault_from(e, t));
                break;
            }
        }
    }
    Ok(TrajectoryLog {
        scenario: sc.name.clone(),
        controller: sc.controller,
        plant_dt: dt,
        records,
        fault,
    })
}

/// Compact end-of-run summary written next to the trajectory CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub controller: ControllerKind,
    pub records: usize,
    pub completed: bool,
    pub fault: Option<Fault>,
    pub final_time: f64,
    pub final_state: Option<RigidBodyState>,
    pub max_position_error_m: f64,
    pub metrics_window: [f64; 2],
    pub stats: Option<crate::metrics::ErrorStats>,
}

impl RunSummary {
    pub fn new(log: &TrajectoryLog, window: (f64, f64)) -> Self {
        let last = log.last();
        Self {
            scenario: log.scenario.clone(),
            controller: log.controller,
            records: log.records.len(),
            completed: log.fault.is_none(),
            fault: log.fault,
            final_time: last.map_or(0.0, |r| r.time),
            final_state: last.map(|r| r.state),
            max_position_error_m: log
                .records
                .iter()
                .map(|r| r.error.position.norm())
                .fold(0.0, f64::max),
            metrics_window: [window.0, window.1],
            stats: crate::metrics::error_stats(log, window).ok(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disturbance::DisturbanceProfile;

    fn hover_params() -> VehicleParams {
        VehicleParams::default()
    }

    #[test]
    fn hover_fixed_point_is_exact() {
        let p = hover_params();
        let s0 = RigidBodyState::at_rest(Vec3::new(1.0, -2.0, 3.0));
        let mut s = s0;
        for _ in 0..1000 {
            s = step_plant(
                &s,
                p.hover_thrust(),
                &Vec3::zeros(),
                &p,
                &DisturbanceProfile::default(),
                1e-3,
            )
            .unwrap();
        }
        assert_eq!(s.position, s0.position);
        assert_eq!(s.velocity, Vec3::zeros());
        assert_eq!(s.attitude, EulerAngles::ZERO);
    }

    #[test]
    fn free_fall_matches_kinematics() {
        let mut sc = Scenario::hover(2.0);
        sc.controller = ControllerKind::Off;
        sc.reference = crate::scenario::Reference::Hover {
            position: [0.0, 0.0, 50.0],
            yaw: 0.0,
        };
        let log = run(&sc).unwrap();
        assert!(log.fault.is_none());
        assert_eq!(log.records.len(), sc.steps() + 1);
        for r in &log.records {
            let expect = 50.0 - 0.5 * 9.81 * r.time * r.time;
            assert!((r.state.position.z - expect).abs() < 1e-9, "t={}", r.time);
        }
    }

    #[test]
    fn energy_drift_without_control() {
        // ballistic arc with some initial velocity: ½m‖v‖² + m·g·z conserved
        let p = hover_params();
        let mut s = RigidBodyState::at_rest(Vec3::zeros());
        s.velocity = Vec3::new(3.0, -1.0, 12.0);
        let energy = |s: &RigidBodyState| {
            0.5 * p.mass * s.velocity.norm_squared() + p.mass * p.gravity * s.position.z
        };
        let e0 = energy(&s);
        for _ in 0..10_000 {
            s = step_plant(
                &s,
                0.0,
                &Vec3::zeros(),
                &p,
                &DisturbanceProfile::default(),
                1e-3,
            )
            .unwrap();
        }
        assert!(((energy(&s) - e0) / e0).abs() < 1e-7);
    }

    #[test]
    fn torque_free_spin_conserves_rate() {
        let p = hover_params();
        let mut s = RigidBodyState::at_rest(Vec3::zeros());
        s.attitude_rate = Vec3::new(0.0, 0.0, 2.0);
        for _ in 0..2000 {
            s = step_plant(
                &s,
                0.0,
                &Vec3::zeros(),
                &p,
                &DisturbanceProfile::default(),
                1e-3,
            )
            .unwrap();
        }
        assert!((s.attitude_rate - Vec3::new(0.0, 0.0, 2.0)).norm() < 1e-12);
        assert!((s.attitude.yaw - 4.0).abs() < 1e-9);
        assert!(s.attitude.roll.abs() < 1e-12 && s.attitude.pitch.abs() < 1e-12);
    }

    #[test]
    fn record_count_and_monotone_time() {
        let log = run(&Scenario::hover(0.5)).unwrap();
        assert_eq!(log.records.len(), 1001);
        assert!(log.records.windows(2).all(|w| w[1].time > w[0].time));
    }

    #[test]
    fn hover_holds_position() {
        for c in ControllerKind::COMPARED {
            let log = run(&Scenario::hover(4.0).with_controller(c)).unwrap();
            assert!(log.fault.is_none(), "{c}");
            let worst = log
                .window(2.0, 4.0)
                .map(|r| r.error.position.norm())
                .fold(0.0, f64::max);
            assert!(worst < 1e-3, "{c}: {worst}");
        }
    }

    #[test]
    fn identical_runs_are_identical() {
        let mut sc = Scenario::hover(1.0);
        sc.initial.perturbation = 0.05;
        sc.measurement_jitter = Some(1e-4);
        sc.seed = 7;
        let a = run(&sc).unwrap();
        let b = run(&sc).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        sc.seed = 8;
        assert_ne!(run(&sc).unwrap().to_csv(), a.to_csv());
    }

    #[test]
    fn commands_are_held_between_ticks() {
        let mut sc = Scenario::hover(1.0);
        sc.initial.position_offset = [0.1, -0.1, 0.05];
        let log = run(&sc).unwrap();
        let (att_div, pos_rel) = sc.rates.dividers().unwrap();
        let pos_div = att_div * pos_rel;
        for (k, w) in log.records.windows(2).enumerate() {
            let next = k + 1;
            if next % pos_div != 0 {
                assert_eq!(w[0].force_demand, w[1].force_demand, "tick {next}");
            }
            if next % att_div != 0 {
                assert_eq!(w[0].torque_demand, w[1].torque_demand, "tick {next}");
            }
        }
        // and they do change on ticks
        assert_ne!(
            log.records[0].force_demand,
            log.records[pos_div].force_demand
        );
    }

    #[test]
    fn estimates_are_causal() {
        // Altering the trajectory after tick k must not change estimates at
        // or before k: a disturbance that starts at t = 0.5 leaves all
        // earlier records untouched.
        let mut sc = Scenario::hover(1.0);
        sc.initial.position_offset = [0.05, 0.0, 0.0];
        let base = run(&sc).unwrap();
        sc.disturbance = DisturbanceProfile::new(vec![crate::disturbance::Primitive {
            target: crate::disturbance::Target::Force,
            direction: [1.0, 0.0, 0.0],
            amplitude: 1.0,
            shape: crate::disturbance::Shape::Window {
                start: 0.5,
                end: None,
                rise: 0.05,
            },
        }]);
        let pert = run(&sc).unwrap();
        // the plant step from 0.5 to 0.5 + dt sees the disturbance, so the
        // first affected measurement is at 0.5 + dt
        let k = (0.5 / sc.rates.plant_dt).round() as usize;
        for i in 0..=k {
            assert_eq!(
                base.records[i].position_estimate, pert.records[i].position_estimate,
                "tick {i}"
            );
            assert_eq!(base.records[i].state, pert.records[i].state);
        }
        assert_ne!(base.records[k + 2].state, pert.records[k + 2].state);
    }

    #[test]
    fn gimbal_lock_is_a_recorded_fault() {
        let mut sc = Scenario::hover(2.0);
        sc.controller = ControllerKind::Off;
        sc.disturbance = DisturbanceProfile::new(vec![crate::disturbance::Primitive {
            target: crate::disturbance::Target::Torque,
            direction: [0.0, 1.0, 0.0],
            amplitude: 0.5,
            shape: crate::disturbance::Shape::Constant,
        }]);
        let log = run(&sc).unwrap();
        assert!(
            matches!(log.fault, Some(Fault::GimbalLock { .. })),
            "{:?}",
            log.fault
        );
        assert!(log.records.len() < sc.steps() + 1);
        assert!(log.records.iter().all(|r| r.state.attitude.is_valid()));
    }

    #[test]
    fn csv_has_fixed_columns() {
        let log = run(&Scenario::hover(0.01)).unwrap();
        let csv = log.to_csv();
        let cols = CSV_HEADER.split(',').count();
        for line in csv.lines() {
            assert_eq!(line.split(',').count(), cols);
        }
        assert_eq!(csv.lines().count(), log.records.len() + 1);
    }
}
