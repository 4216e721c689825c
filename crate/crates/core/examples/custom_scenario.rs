//! Build a scenario in code (circular reference, measurement jitter), save it
//! as JSON, load it back and run it. The saved file works with the CLI:
//! `ehgo-quad run --scenario <file>`.
//!
//! `cargo run --release --example custom_scenario -- circle.json`

use ehgo_quad::scenario::Reference;
use ehgo_quad::sim::RunSummary;
use ehgo_quad::{run, ControllerKind, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "circle.json".into());
    let mut sc = Scenario::hover(12.0).with_controller(ControllerKind::StandardEhgo);
    sc.name = "circle".into();
    sc.description = "1 m circle at 1.2 m altitude with small measurement jitter".into();
    sc.reference = Reference::Circle {
        center: [0.0, 0.0, 1.2],
        radius: 1.0,
        period: 6.0,
    };
    sc.measurement_jitter = Some(1e-4);
    sc.seed = 42;
    sc.validate()?;
    std::fs::write(&path, sc.to_json())?;

    let loaded = Scenario::load(path.as_ref())?;
    assert_eq!(loaded, sc);
    let log = run(&loaded)?;
    let summary = RunSummary::new(&log, (6.0, 12.0));
    println!("wrote {path}");
    println!("{}", summary.to_json());
    Ok(())
}
