//! Compose smoothed disturbance primitives, sample them, and check the
//! measured rate of change against the declared bound.
//!
//! `cargo run --release --example disturbance_profiles`

use ehgo_quad::disturbance::{
    derivative_bound_check, DisturbanceProfile, Primitive, Shape, Target,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let profile = DisturbanceProfile::new(vec![
        Primitive {
            target: Target::Force,
            direction: [1.0, 0.0, 0.0],
            amplitude: 1.5,
            shape: Shape::Window {
                start: 1.0,
                end: Some(4.0),
                rise: 0.3,
            },
        },
        Primitive {
            target: Target::Force,
            direction: [0.0, 0.0, 1.0],
            amplitude: 0.4,
            shape: Shape::Sinusoid {
                frequency: 0.5,
                phase: 0.0,
            },
        },
        Primitive {
            target: Target::Torque,
            direction: [0.0, 1.0, 0.0],
            amplitude: 0.2,
            shape: Shape::Pulse {
                center: 5.0,
                width: 0.2,
                rise: 0.05,
            },
        },
    ]);
    profile.validate("disturbance")?;

    println!("{:>6} {:>24} {:>24}", "t (s)", "force (N)", "torque (N m)");
    for k in 0..=12 {
        let t = 0.5 * k as f64;
        let s = profile.evaluate(t);
        println!(
            "{t:>6.2} [{:6.3} {:6.3} {:6.3}] [{:6.3} {:6.3} {:6.3}]",
            s.force.x, s.force.y, s.force.z, s.torque.x, s.torque.y, s.torque.z
        );
    }
    let chk = derivative_bound_check(&profile, 0.001, 8.0)?;
    println!(
        "force rate  {:.3} <= declared {:.3}\ntorque rate {:.3} <= declared {:.3}\nwithin bounds: {}",
        chk.max_force_rate,
        chk.declared_force_bound,
        chk.max_torque_rate,
        chk.declared_torque_bound,
        chk.within_bounds()
    );
    println!("active interval {:?}", profile.active_interval());
    Ok(())
}
