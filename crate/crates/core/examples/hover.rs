//! Hold a hover point with the cascaded observer controller and print the
//! settling behaviour and a run summary.
//!
//! `cargo run --release --example hover`

use ehgo_quad::sim::RunSummary;
use ehgo_quad::{run, ControllerKind, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut sc = Scenario::hover(5.0).with_controller(ControllerKind::CascadedEhgo);
    // start 20 cm off the hover point
    sc.initial.position_offset = [0.2, -0.1, 0.1];
    let log = run(&sc)?;
    for t in [0.0, 0.5, 1.0, 2.0, 3.0, 5.0] {
        let r = log
            .records
            .iter()
            .find(|r| r.time >= t - 1e-9)
            .expect("record exists");
        println!(
            "t = {:4.1} s  |position error| = {:8.5} m  thrust = {:6.3} N",
            r.time,
            r.error.position.norm(),
            r.thrust
        );
    }
    println!(
        "{}",
        RunSummary::new(&log, sc.resolved_metrics_window()).to_json()
    );
    Ok(())
}
