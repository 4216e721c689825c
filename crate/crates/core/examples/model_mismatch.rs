//! Nominal-model mismatch: the controllers assume a mass and inertia scaled
//! by a factor while the plant keeps its true values. Runs the wind-gust
//! preset for each factor and prints the peak position error.
//!
//! `cargo run --release --example model_mismatch -- 0.5,1,2,4`

use ehgo_quad::{run, ControllerKind, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let factors: Vec<f64> = match std::env::args().nth(1) {
        Some(list) => list.split(',').map(str::parse).collect::<Result<_, _>>()?,
        None => vec![0.5, 1.0, 2.0, 4.0],
    };
    let base =
        Scenario::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/wind_gust.json").as_ref())?;
    println!(
        "{:>8} {:>15} {:>15} {:>15}",
        "factor", "cascaded (cm)", "standard (cm)", "pid (cm)"
    );
    for k in factors {
        let mut sc = base.clone();
        sc.vehicle.nominal_mass = k * sc.vehicle.mass;
        sc.vehicle.nominal_inertia = sc.vehicle.inertia.map(|j| k * j);
        let cells: Vec<String> = ControllerKind::COMPARED
            .iter()
            .map(|c| match run(&sc.with_controller(*c)) {
                Ok(log) if log.is_faulted() => format!("fault@{:.2}s", log.fault.unwrap().time()),
                Ok(log) => {
                    let peak = log
                        .records
                        .iter()
                        .map(|r| r.error.position.norm())
                        .fold(0.0, f64::max);
                    format!("{:.3}", 100.0 * peak)
                }
                Err(e) => format!("config: {e}"),
            })
            .collect();
        println!(
            "{k:>8.2} {:>15} {:>15} {:>15}",
            cells[0], cells[1], cells[2]
        );
    }
    Ok(())
}
