//! Perch impact: a short torque pulse about the pitch axis while holding the
//! perch point. Prints the pitch error around the impact for each controller.
//!
//! `cargo run --release --example perch_impact`

use ehgo_quad::{run, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sc = Scenario::load(
        concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/perch_impact.json").as_ref(),
    )?;
    let (t0, t1) = sc
        .disturbance
        .active_interval()
        .expect("preset has a pulse");
    println!("pulse active on [{t0:.3}, {t1:.3}] s");
    println!(
        "{:<15} {:>12} {:>12} {:>12}",
        "controller", "peak (deg)", "at (s)", "mean (deg)"
    );
    for c in &sc.compare {
        let log = run(&sc.with_controller(*c))?;
        let win: Vec<_> = log.window(t0 - 2.0, t1 + 2.0).collect();
        let (peak, at) = win
            .iter()
            .map(|r| (r.error.attitude.y.abs().to_degrees(), r.time))
            .fold((0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
        let mean = win
            .iter()
            .map(|r| r.error.attitude.y.abs().to_degrees())
            .sum::<f64>()
            / win.len() as f64;
        println!("{:<15} {peak:>12.3} {at:>12.3} {mean:>12.4}", c.name());
    }
    Ok(())
}
