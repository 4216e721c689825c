//! Observer peaking: start the position observer with a 1 m/s rate error and
//! no gravity prior, then compare the force demand with and without the
//! control saturation.
//!
//! `cargo run --release --example peaking`

use ehgo_quad::control::SatMode;
use ehgo_quad::scenario::ObserverInit;
use ehgo_quad::{run, ControllerKind, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut sc = Scenario::hover(2.0).with_controller(ControllerKind::CascadedEhgo);
    sc.observer.init = ObserverInit::Raw;
    sc.observer.initial_rate_error = [0.0, 0.0, -1.0];
    let (pos_sat, _) = sc.saturation.resolve(&sc.vehicle);
    println!(
        "B_p = {:.2} N, saturation limit B_p(1+h) = {:.2} N",
        pos_sat.bound,
        pos_sat.limit()
    );

    for mode in [SatMode::Bounded, SatMode::SlopeLimited, SatMode::Off] {
        sc.saturation.mode = mode;
        let log = run(&sc)?;
        let peak = log
            .records
            .iter()
            .map(|r| r.force_demand.amax())
            .fold(0.0, f64::max);
        let alt = log
            .records
            .iter()
            .map(|r| r.error.position.z.abs())
            .fold(0.0, f64::max);
        println!(
            "{mode:<14?} peak force demand {peak:8.2} N ({:5.2} B_p), peak altitude error {:6.2} cm",
            peak / pos_sat.bound,
            100.0 * alt
        );
    }
    Ok(())
}
