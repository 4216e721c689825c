//! Subcommand implementations behind the `ehgo-quad` binary.
//!
//! Artifacts are written atomically: each file goes to a temporary file in the
//! target directory and is renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::Error;
use crate::metrics::ComparisonReport;
use crate::scaling::{estimation_error_scaling, ObserverKind, ScalingConfig, ScalingReport};
use crate::scenario::{ControllerKind, Scenario};
use crate::sim::{run, RunSummary, TrajectoryLog};

/// Write `contents` to `path` via a temporary file and rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), Error> {
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn load(path: &Path, seed: Option<u64>) -> Result<Scenario, Error> {
    let mut sc = Scenario::load(path)?;
    if let Some(s) = seed {
        sc.seed = s;
    }
    Ok(sc)
}

/// Paths written by one run.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub trajectory: PathBuf,
    pub summary: PathBuf,
    pub log: TrajectoryLog,
}

fn write_run(sc: &Scenario, log: TrajectoryLog, dir: &Path) -> Result<RunArtifacts, Error> {
    let trajectory = dir.join(&sc.output.trajectory);
    let summary = dir.join(&sc.output.summary);
    write_atomic(&trajectory, log.to_csv().as_bytes())?;
    let s = RunSummary::new(&log, sc.resolved_metrics_window());
    write_atomic(&summary, s.to_json().as_bytes())?;
    Ok(RunArtifacts {
        trajectory,
        summary,
        log,
    })
}

/// `run`: simulate one controller and write the trajectory CSV and summary
/// JSON. A fault still writes both files and is returned as an error.
pub fn cmd_run(
    scenario: &Path,
    out: &Path,
    controller: Option<ControllerKind>,
    seed: Option<u64>,
) -> Result<RunArtifacts, Error> {
    let mut sc = load(scenario, seed)?;
    if let Some(c) = controller {
        sc.check_stiffness(c)?;
        sc.controller = c;
    }
    let log = run(&sc)?;
    let fault = log.fault;
    let art = write_run(&sc, log, out)?;
    match fault {
        Some(f) => Err(Error::Fault(f)),
        None => Ok(art),
    }
}

#[derive(Debug, Clone)]
pub struct CompareArtifacts {
    pub report: ComparisonReport,
    pub files: Vec<PathBuf>,
}

/// `compare`: run several controllers in parallel on one scenario. Each run
/// writes into `out/<controller>/`; the report goes to `out/<report>.{json,txt,csv}`.
pub fn cmd_compare(
    scenario: &Path,
    out: &Path,
    controllers: &[ControllerKind],
    seed: Option<u64>,
) -> Result<CompareArtifacts, Error> {
    let sc = load(scenario, seed)?;
    let list: Vec<ControllerKind> = if controllers.is_empty() {
        sc.compare.clone()
    } else {
        controllers.to_vec()
    };
    let mut uniq = Vec::new();
    for c in list {
        if uniq.contains(&c) {
            return Err(Error::Usage(format!(
                "controller '{c}' given more than once"
            )));
        }
        sc.check_stiffness(c)?;
        uniq.push(c);
    }
    let runs: Vec<Result<RunArtifacts, Error>> = uniq
        .par_iter()
        .map(|c| {
            let s = sc.with_controller(*c);
            let log = run(&s)?;
            write_run(&s, log, &out.join(c.name()))
        })
        .collect();
    let runs: Vec<RunArtifacts> = runs.into_iter().collect::<Result<_, _>>()?;
    let mut files: Vec<PathBuf> = runs
        .iter()
        .flat_map(|r| [r.trajectory.clone(), r.summary.clone()])
        .collect();
    let logs: Vec<TrajectoryLog> = runs.into_iter().map(|r| r.log).collect();
    let report = ComparisonReport::from_logs(&sc.name, &logs, sc.resolved_metrics_window());
    for (ext, body) in [
        ("json", report.to_json()),
        ("txt", report.to_text()),
        ("csv", report.to_csv()),
    ] {
        let p = out.join(format!("{}.{ext}", sc.output.report));
        write_atomic(&p, body.as_bytes())?;
        files.push(p);
    }
    if let Some(f) = logs.iter().find_map(|l| l.fault) {
        return Err(Error::Fault(f));
    }
    Ok(CompareArtifacts { report, files })
}

/// `scaling`: residual-vs-ε sweep. Writes `scaling.json` when `out` is given.
pub fn cmd_scaling(
    kind: ObserverKind,
    epsilons: &[f64],
    out: Option<&Path>,
) -> Result<ScalingReport, Error> {
    let unique: std::collections::BTreeSet<u64> = epsilons.iter().map(|e| e.to_bits()).collect();
    if unique.len() < 3 {
        return Err(Error::Usage(format!(
            "scaling needs at least 3 distinct epsilon values, got {}",
            unique.len()
        )));
    }
    let report = estimation_error_scaling(kind, epsilons, &ScalingConfig::default())?;
    if let Some(dir) = out {
        let body = serde_json::to_string_pretty(&report).expect("report serialises");
        write_atomic(&dir.join("scaling.json"), body.as_bytes())?;
    }
    Ok(report)
}
