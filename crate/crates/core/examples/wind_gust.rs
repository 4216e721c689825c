//! Wind gust: a lateral drag force with a small roll torque, built from the
//! gust parameters instead of the bundled preset. Prints the lateral drift.
//!
//! `cargo run --release --example wind_gust -- 14`   (wind speed in m/s)

use ehgo_quad::disturbance::{DisturbanceProfile, WindGust};
use ehgo_quad::scenario::Reference;
use ehgo_quad::{run, ControllerKind, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let speed: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(10.0);
    let gust = WindGust {
        speed,
        ..WindGust::default()
    };
    println!("wind {speed} m/s -> drag {:.3} N", gust.drag_force());

    let mut sc = Scenario::hover(14.0);
    sc.name = "wind_gust_example".into();
    sc.reference = Reference::Hover {
        position: [0.0, 0.0, 1.5],
        yaw: 0.0,
    };
    sc.disturbance = DisturbanceProfile::wind_gust(&gust);
    sc.validate()?;

    for c in ControllerKind::COMPARED {
        let log = run(&sc.with_controller(c))?;
        let peak = log
            .records
            .iter()
            .map(|r| r.error.position.y.abs())
            .fold(0.0, f64::max);
        let last = log.last().expect("non-empty log");
        println!(
            "{:<15} peak y drift {:6.2} cm, final {:7.4} cm",
            c.name(),
            100.0 * peak,
            100.0 * last.error.position.y
        );
    }
    Ok(())
}
