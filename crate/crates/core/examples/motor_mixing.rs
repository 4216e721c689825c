//! Map a thrust and torque demand to the four rotor thrusts and back, and show
//! what happens when the demand exceeds the rotor limits.
//!
//! `cargo run --release --example motor_mixing`

use ehgo_quad::dynamics::{assemble_wrench, motor_mixing};
use ehgo_quad::state::{Vec3, VehicleParams};

fn main() {
    let params = VehicleParams::default();
    let demands = [
        ("hover", params.hover_thrust(), Vec3::zeros()),
        (
            "roll + yaw",
            params.hover_thrust(),
            Vec3::new(0.5, 0.0, 0.05),
        ),
        (
            "saturating pitch",
            params.hover_thrust(),
            Vec3::new(0.0, 4.0, 0.0),
        ),
        ("over thrust", 70.0, Vec3::zeros()),
    ];
    for (name, f, tau) in demands {
        let rotors = motor_mixing(f, &tau, &params);
        let (f_back, tau_back) = assemble_wrench(&rotors.clamped, &params);
        println!("{name}");
        println!(
            "  demanded rotors {:?}",
            rotors.demanded.map(|x| (x * 1e3).round() / 1e3)
        );
        println!(
            "  clamped rotors  {:?} feasible: {}",
            rotors.clamped.map(|x| (x * 1e3).round() / 1e3),
            rotors.feasible
        );
        println!(
            "  delivered F = {f_back:.3} N (asked {f:.3}), tau = [{:.3}, {:.3}, {:.4}]",
            tau_back.x, tau_back.y, tau_back.z
        );
    }
}
