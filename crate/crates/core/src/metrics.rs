//! Error statistics and multi-controller comparison reports.
//!
//! Statistics are over per-tick absolute errors inside a time window, with a
//! population standard deviation. Attitude errors are reported in degrees and
//! position errors in centimetres.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Fault;
use crate::scenario::ControllerKind;
use crate::sim::TrajectoryLog;

pub const AXES: [&str; 3] = ["x", "y", "z"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisStats {
    pub mean: f64,
    pub std: f64,
}

/// Mean and population standard deviation of `|x|`.
pub fn abs_mean_std(samples: &[f64]) -> Option<AxisStats> {
    if samples.is_empty() {
        return None;
    }
    let n = samples.len() as f64;
    let mean = samples.iter().map(|v| v.abs()).sum::<f64>() / n;
    let var = samples
        .iter()
        .map(|v| (v.abs() - mean).powi(2))
        .sum::<f64>()
        / n;
    Some(AxisStats {
        mean,
        std: var.sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub window: [f64; 2],
    pub samples: usize,
    /// Roll, pitch, yaw error (deg).
    pub attitude_deg: [AxisStats; 3],
    /// World x, y, z error (cm).
    pub position_cm: [AxisStats; 3],
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("window [{0}, {1}] contains no samples")]
    EmptyWindow(f64, f64),
}

/// Statistics of the records with `t0 <= t <= t1`.
pub fn error_stats(log: &TrajectoryLog, window: (f64, f64)) -> Result<ErrorStats, MetricsError> {
    let (t0, t1) = window;
    let recs: Vec<_> = log.window(t0, t1).collect();
    if recs.is_empty() {
        return Err(MetricsError::EmptyWindow(t0, t1));
    }
    let axis = |f: &dyn Fn(&crate::sim::Record) -> f64| {
        let v: Vec<f64> = recs.iter().map(|r| f(r)).collect();
        abs_mean_std(&v).expect("non-empty")
    };
    let deg = 180.0 / std::f64::consts::PI;
    Ok(ErrorStats {
        window: [t0, t1],
        samples: recs.len(),
        attitude_deg: [0, 1, 2].map(|i| axis(&|r| r.error.attitude[i] * deg)),
        position_cm: [0, 1, 2].map(|i| axis(&|r| r.error.position[i] * 100.0)),
    })
}

/// `100·(b − a)/b`; `None` when the baseline is zero.
pub fn percent_reduction(a: f64, baseline: f64) -> Option<f64> {
    (baseline != 0.0).then(|| 100.0 * (baseline - a) / baseline)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub controller: ControllerKind,
    /// `None` when the run faulted (reported as DNF).
    pub stats: Option<ErrorStats>,
    pub fault: Option<Fault>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub controller: ControllerKind,
    pub baseline: ControllerKind,
    /// `attitude_x` ... `position_z`.
    pub quantity: String,
    pub mean_pct: Option<f64>,
    pub std_pct: Option<f64>,
}

/// One row of the hardware reference table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceRow {
    pub quantity: &'static str,
    pub controller: &'static str,
    pub mean: f64,
    pub std: f64,
}

/// Flight-test values for display beside simulated results. They come from a
/// physical airframe and are not targets for the simulation.
pub const HARDWARE_REFERENCE_LABEL: &str = "hardware reference, not a target";

pub const HARDWARE_REFERENCE: [ReferenceRow; 18] = {
    const fn row(
        quantity: &'static str,
        controller: &'static str,
        mean: f64,
        std: f64,
    ) -> ReferenceRow {
        ReferenceRow {
            quantity,
            controller,
            mean,
            std,
        }
    }
    [
        row("attitude_x_deg", "pid", 4.84, 1.60),
        row("attitude_x_deg", "standard-ehgo", 3.31, 1.09),
        row("attitude_x_deg", "cascaded-ehgo", 2.36, 0.24),
        row("attitude_y_deg", "pid", 4.14, 1.10),
        row("attitude_y_deg", "standard-ehgo", 1.79, 0.87),
        row("attitude_y_deg", "cascaded-ehgo", 1.34, 0.18),
        row("attitude_z_deg", "pid", 2.19, 0.89),
        row("attitude_z_deg", "standard-ehgo", 1.37, 0.25),
        row("attitude_z_deg", "cascaded-ehgo", 1.11, 0.18),
        row("position_x_cm", "pid", 7.44, 10.22),
        row("position_x_cm", "standard-ehgo", 7.28, 8.74),
        row("position_x_cm", "cascaded-ehgo", 5.67, 6.38),
        row("position_y_cm", "pid", 9.16, 12.22),
        row("position_y_cm", "standard-ehgo", 8.75, 10.49),
        row("position_y_cm", "cascaded-ehgo", 7.20, 8.15),
        row("position_z_cm", "pid", 8.35, 9.64),
        row("position_z_cm", "standard-ehgo", 7.61, 8.31),
        row("position_z_cm", "cascaded-ehgo", 3.33, 3.99),
    ]
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardwareReference {
    pub label: &'static str,
    pub rows: Vec<ReferenceRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub scenario: String,
    pub window: [f64; 2],
    pub runs: Vec<RunOutcome>,
    pub reductions: Vec<Reduction>,
    pub hardware_reference: HardwareReference,
}

fn quantities(s: &ErrorStats) -> [(String, AxisStats); 6] {
    [0, 1, 2, 3, 4, 5].map(|i| {
        if i < 3 {
            (format!("attitude_{}", AXES[i]), s.attitude_deg[i])
        } else {
            (format!("position_{}", AXES[i - 3]), s.position_cm[i - 3])
        }
    })
}

impl ComparisonReport {
    /// Statistics and pairwise reductions for logs that share a scenario.
    pub fn from_logs(scenario: &str, logs: &[TrajectoryLog], window: (f64, f64)) -> Self {
        let runs: Vec<RunOutcome> = logs
            .iter()
            .map(|log| RunOutcome {
                controller: log.controller,
                stats: if log.fault.is_some() {
                    None
                } else {
                    error_stats(log, window).ok()
                },
                fault: log.fault,
            })
            .collect();
        let mut reductions = Vec::new();
        for a in &runs {
            for b in &runs {
                if a.controller == b.controller {
                    continue;
                }
                let (Some(sa), Some(sb)) = (&a.stats, &b.stats) else {
                    continue;
                };
                for ((q, xa), (_, xb)) in quantities(sa).into_iter().zip(quantities(sb)) {
                    reductions.push(Reduction {
                        controller: a.controller,
                        baseline: b.controller,
                        quantity: q,
                        mean_pct: percent_reduction(xa.mean, xb.mean),
                        std_pct: percent_reduction(xa.std, xb.std),
                    });
                }
            }
        }
        Self {
            scenario: scenario.to_string(),
            window: [window.0, window.1],
            runs,
            reductions,
            hardware_reference: HardwareReference {
                label: HARDWARE_REFERENCE_LABEL,
                rows: HARDWARE_REFERENCE.to_vec(),
            },
        }
    }

    pub fn stats(&self, controller: ControllerKind) -> Option<&ErrorStats> {
        self.runs
            .iter()
            .find(|r| r.controller == controller)?
            .stats
            .as_ref()
    }

    pub fn reduction(
        &self,
        controller: ControllerKind,
        baseline: ControllerKind,
        quantity: &str,
    ) -> Option<&Reduction> {
        self.reductions.iter().find(|r| {
            r.controller == controller && r.baseline == baseline && r.quantity == quantity
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// Per-run statistics, one row per controller and quantity.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("controller,quantity,unit,mean,std,status\n");
        for run in &self.runs {
            match &run.stats {
                Some(st) => {
                    for (q, x) in quantities(st) {
                        let unit = if q.starts_with("attitude") {
                            "deg"
                        } else {
                            "cm"
                        };
                        writeln!(s, "{},{q},{unit},{},{},ok", run.controller, x.mean, x.std)
                            .unwrap();
                    }
                }
                None => writeln!(s, "{},,,,,dnf", run.controller).unwrap(),
            }
        }
        s
    }

    /// Aligned plain-text table grouped by quantity, with the hardware values
    /// alongside.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "scenario: {}   window: [{:.2}, {:.2}] s",
            self.scenario, self.window[0], self.window[1]
        )
        .unwrap();
        writeln!(
            s,
            "{:<26} {:<15} {:>9} {:>9}   {:>9} {:>9}",
            "quantity", "controller", "mean", "std", "hw mean", "hw std"
        )
        .unwrap();
        writeln!(
            s,
            "{:<26} {:<15} {:>9} {:>9}   ({})",
            "", "", "", "", HARDWARE_REFERENCE_LABEL
        )
        .unwrap();
        let labels = [
            ("attitude_x", "X_b angular error (deg)"),
            ("attitude_y", "Y_b angular error (deg)"),
            ("attitude_z", "Z_b angular error (deg)"),
            ("position_x", "X_w position error (cm)"),
            ("position_y", "Y_w position error (cm)"),
            ("position_z", "Z_w position error (cm)"),
        ];
        for (i, (key, label)) in labels.iter().enumerate() {
            s.push_str(&"-".repeat(84));
            s.push('\n');
            for (j, run) in self.runs.iter().enumerate() {
                let name = if j == 0 { *label } else { "" };
                let hw = HARDWARE_REFERENCE
                    .iter()
                    .find(|r| r.controller == run.controller.name() && r.quantity.starts_with(key));
                let hw_cols =
                    hw.map_or(String::new(), |r| format!("{:>9.2} {:>9.2}", r.mean, r.std));
                match &run.stats {
                    Some(st) => {
                        let x = quantities(st)[i].1;
                        writeln!(
                            s,
                            "{name:<26} {:<15} {:>9.3} {:>9.3}   {hw_cols}",
                            run.controller.name(),
                            x.mean,
                            x.std
                        )
                        .unwrap();
                    }
                    None => writeln!(
                        s,
                        "{name:<26} {:<15} {:>9} {:>9}   {hw_cols}",
                        run.controller.name(),
                        "DNF",
                        "DNF"
                    )
                    .unwrap(),
                }
            }
        }
        s.push_str(&"-".repeat(84));
        s.push('\n');
        for run in &self.runs {
            if let Some(f) = &run.fault {
                writeln!(s, "{}: {f}", run.controller).unwrap();
            }
        }
        s
    }
}
