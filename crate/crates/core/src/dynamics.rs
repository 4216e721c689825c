//! Continuous-time vehicle model.
//!
//! Translation: `m·v̇ = F − m·g·e3 + d_f` with `F` the world-frame lift.
//! Attitude: `M(η)·η̈ + C(η, η̇)·η̇ = τ + d_τ` in Euler coordinates, where
//! `M = Wᵀ J W` and `C = Wᵀ J Ẇ + Wᵀ S(ω) W` with `ω = W η̇` and `S(ω)` the
//! skew-symmetric factorisation of the gyroscopic term `ω × Jω`.

use nalgebra::{Matrix3, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::state::{e3, EulerAngles, RigidBodyState, Vec3, VehicleParams, PITCH_LIMIT};

/// Euler-coordinate inertia and Coriolis matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeMatrices {
    pub inertia: Matrix3<f64>,
    pub coriolis: Matrix3<f64>,
}

fn check_attitude(eta: &EulerAngles) -> Result<(), ModelError> {
    if eta.pitch.abs() < PITCH_LIMIT {
        Ok(())
    } else {
        Err(ModelError::GimbalLock { pitch: eta.pitch })
    }
}

fn skew(v: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// `W(η)` mapping Euler rates to body angular rates, `ω = W·η̇`.
pub fn euler_rate_transform(eta: &EulerAngles) -> Result<Matrix3<f64>, ModelError> {
    check_attitude(eta)?;
    Ok(rate_transform_unchecked(eta))
}

fn rate_transform_unchecked(eta: &EulerAngles) -> Matrix3<f64> {
    let (sp, cp) = eta.roll.sin_cos();
    let (st, ct) = eta.pitch.sin_cos();
    Matrix3::new(1.0, 0.0, -st, 0.0, cp, sp * ct, 0.0, -sp, cp * ct)
}

/// Time derivative `Ẇ(η, η̇)`.
pub fn euler_rate_transform_derivative(eta: &EulerAngles, eta_dot: &Vec3) -> Matrix3<f64> {
    let (sp, cp) = eta.roll.sin_cos();
    let (st, ct) = eta.pitch.sin_cos();
    let (dphi, dtheta) = (eta_dot.x, eta_dot.y);
    Matrix3::new(
        0.0,
        0.0,
        -ct * dtheta,
        0.0,
        -sp * dphi,
        cp * ct * dphi - sp * st * dtheta,
        0.0,
        -cp * dphi,
        -sp * ct * dphi - cp * st * dtheta,
    )
}

/// Body-to-world rotation for Z-Y-X Euler angles.
pub(crate) fn rotation(eta: &EulerAngles) -> Matrix3<f64> {
    let (sp, cp) = eta.roll.sin_cos();
    let (st, ct) = eta.pitch.sin_cos();
    let (ss, cs) = eta.yaw.sin_cos();
    Matrix3::new(
        cs * ct,
        cs * st * sp - ss * cp,
        cs * st * cp + ss * sp,
        ss * ct,
        ss * st * sp + cs * cp,
        ss * st * cp - cs * sp,
        -st,
        ct * sp,
        ct * cp,
    )
}

/// World-frame direction of the body thrust axis, `R(η)·e3`.
pub fn thrust_direction(eta: &EulerAngles) -> Vec3 {
    rotation(eta) * e3()
}

/// Body angular velocity for the given Euler rates.
pub fn body_rates(eta: &EulerAngles, eta_dot: &Vec3) -> Vec3 {
    rate_transform_unchecked(eta) * eta_dot
}

pub fn attitude_matrices(
    eta: &EulerAngles,
    eta_dot: &Vec3,
    inertia: &Vec3,
) -> Result<AttitudeMatrices, ModelError> {
    let w = euler_rate_transform(eta)?;
    let w_dot = euler_rate_transform_derivative(eta, eta_dot);
    let j = Matrix3::from_diagonal(inertia);
    let omega = w * eta_dot;
    let gyro = 0.5 * (skew(&omega) * j + j * skew(&omega) - skew(&(j * omega)));
    Ok(AttitudeMatrices {
        inertia: w.transpose() * j * w,
        coriolis: w.transpose() * j * w_dot + w.transpose() * gyro * w,
    })
}

/// `(F − m·g·e3 + d_f) / m`.
pub fn translational_accel(
    _state: &RigidBodyState,
    lift: &Vec3,
    force_disturbance: &Vec3,
    params: &VehicleParams,
) -> Vec3 {
    (lift - params.mass * params.gravity * e3() + force_disturbance) / params.mass
}

/// `η̈ = M⁻¹(τ + d_τ − C·η̇)`.
pub fn rotational_accel(
    eta: &EulerAngles,
    eta_dot: &Vec3,
    torque: &Vec3,
    torque_disturbance: &Vec3,
    inertia: &Vec3,
) -> Result<Vec3, ModelError> {
    let m = attitude_matrices(eta, eta_dot, inertia)?;
    let rhs = torque + torque_disturbance - m.coriolis * eta_dot;
    // M is SPD inside the guard; Cholesky cannot fail there.
    let chol = m
        .inertia
        .cholesky()
        .ok_or(ModelError::GimbalLock { pitch: eta.pitch })?;
    Ok(chol.solve(&rhs))
}

/// Individual rotor thrusts produced by the allocation inverse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotorThrusts {
    /// Exact allocation (may fall outside the rotor limits).
    pub demanded: [f64; 4],
    /// Demanded thrusts clamped to `[0, max_rotor_thrust]`.
    pub clamped: [f64; 4],
    pub feasible: bool,
}

/// Allocation matrix mapping rotor thrusts to `[F, τx, τy, τz]` (body axes).
///
/// Rotors sit on the X-frame diagonals; rotors 1 and 3 spin one way, 2 and 4
/// the other.
pub fn allocation_matrix(params: &VehicleParams) -> Matrix4<f64> {
    let a = 0.5 * params.axis_distance / std::f64::consts::SQRT_2;
    let k = params.yaw_torque_coefficient;
    let pos = [(a, -a), (-a, -a), (-a, a), (a, a)];
    let spin = [1.0, -1.0, 1.0, -1.0];
    let mut m = Matrix4::zeros();
    for i in 0..4 {
        m[(0, i)] = 1.0;
        m[(1, i)] = pos[i].1;
        m[(2, i)] = -pos[i].0;
        m[(3, i)] = spin[i] * k;
    }
    m
}

/// Rotor thrusts that realise a collective thrust and body torque.
pub fn motor_mixing(total_thrust: f64, torque: &Vec3, params: &VehicleParams) -> RotorThrusts {
    let alloc = allocation_matrix(params);
    let inv = alloc
        .try_inverse()
        .expect("X-frame allocation is invertible for positive geometry");
    let f = inv * Vector4::new(total_thrust, torque.x, torque.y, torque.z);
    let demanded = [f[0], f[1], f[2], f[3]];
    let max = params.max_rotor_thrust;
    let feasible = demanded.iter().all(|&t| (0.0..=max).contains(&t));
    let clamped = demanded.map(|t| t.clamp(0.0, max));
    RotorThrusts {
        demanded,
        clamped,
        feasible,
    }
}

/// Collective thrust and body torque generated by four rotor thrusts.
pub fn assemble_wrench(thrusts: &[f64; 4], params: &VehicleParams) -> (f64, Vec3) {
    let w = allocation_matrix(params) * Vector4::from(*thrusts);
    (w[0], Vec3::new(w[1], w[2], w[3]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn j() -> Vec3 {
        Vec3::new(0.021, 0.023, 0.036)
    }

    #[test]
    fn rate_transform_identity_at_level() {
        let w = euler_rate_transform(&EulerAngles::ZERO).unwrap();
        assert_eq!(w, Matrix3::identity());
    }

    #[test]
    fn rate_transform_faults_near_vertical_pitch() {
        let eta = EulerAngles::new(0.0, std::f64::consts::FRAC_PI_2 - 0.01, 0.0);
        assert!(matches!(
            euler_rate_transform(&eta),
            Err(ModelError::GimbalLock { .. })
        ));
    }

    #[test]
    fn hover_matrices() {
        let m = attitude_matrices(&EulerAngles::ZERO, &Vec3::zeros(), &j()).unwrap();
        assert_eq!(m.inertia, Matrix3::from_diagonal(&j()));
        assert_eq!(m.coriolis, Matrix3::zeros());
        let s = attitude_matrices(&EulerAngles::ZERO, &Vec3::zeros(), &Vec3::repeat(0.05)).unwrap();
        assert_eq!(s.inertia, Matrix3::identity() * 0.05);
    }

    #[test]
    fn hover_is_unaccelerated() {
        let p = VehicleParams::default();
        let s = RigidBodyState::at_rest(Vec3::zeros());
        let lift = Vec3::new(0.0, 0.0, 26.487);
        let a = translational_accel(&s, &lift, &Vec3::zeros(), &p);
        assert!(a.norm() < 1e-12, "{a}");
        let fall = translational_accel(&s, &Vec3::zeros(), &Vec3::zeros(), &p);
        assert_eq!(fall, Vec3::new(0.0, 0.0, -9.81));
        let pushed = translational_accel(&s, &lift, &Vec3::new(1.0, 0.0, 0.0), &p);
        assert!((pushed.x - 1.0 / 2.7).abs() < 1e-12);
        assert!((pushed.x - 0.3704).abs() < 1e-4);
    }

    #[test]
    fn decoupled_roll_acceleration_at_level() {
        let a = rotational_accel(
            &EulerAngles::ZERO,
            &Vec3::zeros(),
            &Vec3::new(0.3, 0.0, 0.0),
            &Vec3::zeros(),
            &j(),
        )
        .unwrap();
        assert!((a - Vec3::new(0.3 / 0.021, 0.0, 0.0)).norm() < 1e-12);
        let rest = rotational_accel(
            &EulerAngles::ZERO,
            &Vec3::zeros(),
            &Vec3::zeros(),
            &Vec3::zeros(),
            &j(),
        )
        .unwrap();
        assert_eq!(rest, Vec3::zeros());
    }

    #[test]
    fn symmetric_hover_mixing() {
        let p = VehicleParams::default();
        let r = motor_mixing(26.487, &Vec3::zeros(), &p);
        for t in r.demanded {
            assert!((t - 6.62175).abs() < 1e-4, "{t}");
        }
        assert!(r.feasible);
        let z = motor_mixing(0.0, &Vec3::zeros(), &p);
        assert!(z.demanded.iter().all(|t| t.abs() < 1e-15));
    }

    #[test]
    fn infeasible_mix_is_flagged_and_clamped() {
        let p = VehicleParams::default();
        let r = motor_mixing(5.0, &Vec3::new(2.0, 0.0, 0.0), &p);
        assert!(!r.feasible);
        assert!(r
            .clamped
            .iter()
            .all(|&t| (0.0..=p.max_rotor_thrust).contains(&t)));
    }

    fn arb_eta() -> impl Strategy<Value = EulerAngles> {
        (-1.2f64..1.2, -1.3f64..1.3, -3.1f64..3.1).prop_map(|(a, b, c)| EulerAngles::new(a, b, c))
    }

    fn arb_vec(r: f64) -> impl Strategy<Value = Vec3> {
        prop::array::uniform3(-r..r).prop_map(Vec3::from)
    }

    fn arb_inertia() -> impl Strategy<Value = Vec3> {
        prop::array::uniform3(0.005f64..0.1).prop_map(Vec3::from)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn rate_transform_determinant_is_cos_pitch(eta in arb_eta()) {
            let w = euler_rate_transform(&eta).unwrap();
            // symbolic: det W = cosφ·cosφ·cosθ + sinφ·sinφ·cosθ
            let (sp, cp) = eta.roll.sin_cos();
            let symbolic = cp * cp * eta.pitch.cos() + sp * sp * eta.pitch.cos();
            prop_assert!((w.determinant() - eta.pitch.cos()).abs() < 1e-12);
            prop_assert!((symbolic - eta.pitch.cos()).abs() < 1e-12);
        }

        #[test]
        fn inertia_matrix_is_spd(eta in arb_eta(), rate in arb_vec(5.0), j in arb_inertia()) {
            let m = attitude_matrices(&eta, &rate, &j).unwrap();
            prop_assert!((m.inertia - m.inertia.transpose()).norm() < 1e-12);
            prop_assert!(m.inertia.cholesky().is_some());
        }

        #[test]
        fn rate_transform_derivative_matches_finite_difference(eta in arb_eta(), rate in arb_vec(3.0)) {
            let h = 1e-6;
            let fwd = EulerAngles::from_vec(&(eta.to_vec() + rate * h));
            let bwd = EulerAngles::from_vec(&(eta.to_vec() - rate * h));
            let fd = (rate_transform_unchecked(&fwd) - rate_transform_unchecked(&bwd)) / (2.0 * h);
            prop_assert!((fd - euler_rate_transform_derivative(&eta, &rate)).norm() < 1e-7);
        }

        #[test]
        fn rotational_accel_round_trip(
            eta in arb_eta(), rate in arb_vec(4.0), tau in arb_vec(2.0), dist in arb_vec(1.0), j in arb_inertia()
        ) {
            let acc = rotational_accel(&eta, &rate, &tau, &dist, &j).unwrap();
            let m = attitude_matrices(&eta, &rate, &j).unwrap();
            let back = m.inertia * acc + m.coriolis * rate - dist;
            prop_assert!((back - tau).norm() < 1e-9 * (1.0 + tau.norm()), "{} vs {}", back, tau);
        }

        #[test]
        fn mixing_round_trip(f in 0.0f64..60.0, tau in arb_vec(1.5)) {
            let p = VehicleParams::default();
            let r = motor_mixing(f, &tau, &p);
            let (f2, tau2) = assemble_wrench(&r.demanded, &p);
            prop_assert!((f2 - f).abs() < 1e-9);
            prop_assert!((tau2 - tau).norm() < 1e-9);
        }

        #[test]
        fn coriolis_structure_is_skew(eta in arb_eta(), rate in arb_vec(3.0), x in arb_vec(1.0), j in arb_inertia()) {
            let h = 1e-6;
            let fwd = EulerAngles::from_vec(&(eta.to_vec() + rate * h));
            let bwd = EulerAngles::from_vec(&(eta.to_vec() - rate * h));
            let m_dot = (attitude_matrices(&fwd, &rate, &j).unwrap().inertia
                - attitude_matrices(&bwd, &rate, &j).unwrap().inertia) / (2.0 * h);
            let c = attitude_matrices(&eta, &rate, &j).unwrap().coriolis;
            let n = m_dot - 2.0 * c;
            prop_assert!((x.transpose() * n * x)[0].abs() < 1e-6);
        }

        #[test]
        fn body_rates_match_rotation_kinematics(eta in arb_eta(), rate in arb_vec(2.0)) {
            // Ṙ = R·[ω]×
            let h = 1e-6;
            let fwd = EulerAngles::from_vec(&(eta.to_vec() + rate * h));
            let bwd = EulerAngles::from_vec(&(eta.to_vec() - rate * h));
            let r_dot = (rotation(&fwd) - rotation(&bwd)) / (2.0 * h);
            let omega = body_rates(&eta, &rate);
            prop_assert!((r_dot - rotation(&eta) * skew(&omega)).norm() < 1e-7);
        }

        #[test]
        fn rotation_is_orthonormal(eta in arb_eta()) {
            let r = rotation(&eta);
            prop_assert!((r.transpose() * r - Matrix3::identity()).norm() < 1e-12);
            prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
        }
    }
}
