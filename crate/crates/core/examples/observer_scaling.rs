//! Steady-state disturbance-estimation residual against ε on a closed-loop
//! double integrator, for both observer structures.
//!
//! `cargo run --release --example observer_scaling -- 0.1,0.05,0.025,0.0125,0.00625`

use ehgo_quad::scaling::{estimation_error_scaling, ObserverKind, ScalingConfig, DEFAULT_EPSILONS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eps: Vec<f64> = match std::env::args().nth(1) {
        Some(list) => list.split(',').map(str::parse).collect::<Result<_, _>>()?,
        None => DEFAULT_EPSILONS.to_vec(),
    };
    let cfg = ScalingConfig::default();
    for kind in [ObserverKind::Cascaded, ObserverKind::Standard] {
        let rep = estimation_error_scaling(kind, &eps, &cfg)?;
        println!("{}", rep.to_text());
    }
    Ok(())
}
