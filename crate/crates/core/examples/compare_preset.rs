//! Run every compared controller on a bundled preset and print the report.
//!
//! `cargo run --release --example compare_preset -- crates/core/scenarios/wind_gust.json`
//!
//! Defaults to the perch-impact preset.

use ehgo_quad::metrics::ComparisonReport;
use ehgo_quad::{run, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/perch_impact.json").into()
    });
    let sc = Scenario::load(path.as_ref())?;
    let logs: Vec<_> = sc
        .compare
        .iter()
        .map(|c| run(&sc.with_controller(*c)))
        .collect::<Result<_, _>>()?;
    let report = ComparisonReport::from_logs(&sc.name, &logs, sc.resolved_metrics_window());
    print!("{}", report.to_text());
    for log in &logs {
        let peak_att = log
            .records
            .iter()
            .map(|r| r.error.attitude.amax().to_degrees())
            .fold(0.0, f64::max);
        let peak_pos = log
            .records
            .iter()
            .map(|r| r.error.position.norm() * 100.0)
            .fold(0.0, f64::max);
        println!(
            "{:<15} peak attitude error {peak_att:.3} deg, peak position error {peak_pos:.3} cm",
            log.controller.name()
        );
    }
    Ok(())
}
