//! Scenario description: vehicle, controller, gains, disturbance, reference,
//! rates and seed. Loaded from JSON with unknown keys rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::control::{FeedbackGains, PidGains, SatConfig, SatMode};
use crate::disturbance::{smoothstep, DisturbanceProfile};
use crate::error::{ConfigError, Error};
use crate::observers::{CascadedGains, StandardGains};
use crate::state::{Vec3, VehicleParams};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, schemars::JsonSchema,
)]
#[serde(rename_all = "kebab-case")]
pub enum ControllerKind {
    #[default]
    CascadedEhgo,
    StandardEhgo,
    Pid,
    /// Zero thrust and torque.
    Off,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 4] = [
        ControllerKind::CascadedEhgo,
        ControllerKind::StandardEhgo,
        ControllerKind::Pid,
        ControllerKind::Off,
    ];

    /// The three controllers compared in reports.
    pub const COMPARED: [ControllerKind; 3] = [
        ControllerKind::CascadedEhgo,
        ControllerKind::StandardEhgo,
        ControllerKind::Pid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ControllerKind::CascadedEhgo => "cascaded-ehgo",
            ControllerKind::StandardEhgo => "standard-ehgo",
            ControllerKind::Pid => "pid",
            ControllerKind::Off => "off",
        }
    }
}

impl std::fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ControllerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                format!(
                    "unknown controller '{s}' (expected cascaded-ehgo, standard-ehgo, pid or off)"
                )
            })
    }
}

/// Desired position, velocity, acceleration and heading at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSample {
    pub position: Vec3,
    pub velocity: Vec3,
    pub acceleration: Vec3,
    pub yaw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Waypoint {
    pub time: f64,
    pub position: [f64; 3],
    #[serde(default)]
    pub yaw: f64,
}

/// Reference trajectory. Waypoint segments use a quintic smoothstep, so the
/// vehicle is at rest at every waypoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Reference {
    Hover {
        position: [f64; 3],
        #[serde(default)]
        yaw: f64,
    },
    Line {
        from: [f64; 3],
        to: [f64; 3],
        start: f64,
        end: f64,
    },
    Circle {
        center: [f64; 3],
        radius: f64,
        period: f64,
    },
    Waypoints {
        points: Vec<Waypoint>,
    },
}

impl Default for Reference {
    fn default() -> Self {
        Reference::Hover {
            position: [0.0, 0.0, 1.0],
            yaw: 0.0,
        }
    }
}

fn smoothstep_d1(u: f64) -> f64 {
    if (0.0..=1.0).contains(&u) {
        30.0 * u * u * (u - 1.0) * (u - 1.0)
    } else {
        0.0
    }
}

fn smoothstep_d2(u: f64) -> f64 {
    if (0.0..=1.0).contains(&u) {
        60.0 * u * (2.0 * u * u - 3.0 * u + 1.0)
    } else {
        0.0
    }
}

fn segment(a: &Waypoint, b: &Waypoint, t: f64) -> ReferenceSample {
    let span = b.time - a.time;
    let u = ((t - a.time) / span).clamp(0.0, 1.0);
    let pa = Vec3::from(a.position);
    let d = Vec3::from(b.position) - pa;
    ReferenceSample {
        position: pa + d * smoothstep(u),
        velocity: d * smoothstep_d1(u) / span,
        acceleration: d * smoothstep_d2(u) / (span * span),
        yaw: a.yaw + (b.yaw - a.yaw) * smoothstep(u),
    }
}

fn hold(w: &Waypoint) -> ReferenceSample {
    ReferenceSample {
        position: Vec3::from(w.position),
        velocity: Vec3::zeros(),
        acceleration: Vec3::zeros(),
        yaw: w.yaw,
    }
}

impl Reference {
    pub fn sample(&self, t: f64) -> ReferenceSample {
        match self {
            Reference::Hover { position, yaw } => hold(&Waypoint {
                time: 0.0,
                position: *position,
                yaw: *yaw,
            }),
            Reference::Line {
                from,
                to,
                start,
                end,
            } => segment(
                &Waypoint {
                    time: *start,
                    position: *from,
                    yaw: 0.0,
                },
                &Waypoint {
                    time: *end,
                    position: *to,
                    yaw: 0.0,
                },
                t,
            ),
            Reference::Circle {
                center,
                radius,
                period,
            } => {
                let (radius, w) = (*radius, std::f64::consts::TAU / period);
                let (s, c) = (w * t).sin_cos();
                ReferenceSample {
                    position: Vec3::from(*center) + radius * Vec3::new(c, s, 0.0),
                    velocity: radius * w * Vec3::new(-s, c, 0.0),
                    acceleration: -radius * w * w * Vec3::new(c, s, 0.0),
                    yaw: 0.0,
                }
            }
            Reference::Waypoints { points } => {
                let first = &points[0];
                if t <= first.time {
                    return hold(first);
                }
                for pair in points.windows(2) {
                    if t <= pair[1].time {
                        return segment(&pair[0], &pair[1], t);
                    }
                }
                hold(points.last().expect("validated non-empty"))
            }
        }
    }

    pub fn validate(&self, path: &str) -> Result<(), ConfigError> {
        let finite = |name: &str, v: &[f64]| {
            if v.iter().all(|x| x.is_finite()) {
                Ok(())
            } else {
                Err(ConfigError::invalid(
                    format!("{path}.{name}"),
                    "must be finite",
                ))
            }
        };
        match self {
            Reference::Hover { position, yaw } => {
                finite("position", position)?;
                finite("yaw", &[*yaw])
            }
            Reference::Line {
                from,
                to,
                start,
                end,
            } => {
                finite("from", from)?;
                finite("to", to)?;
                if !(start.is_finite() && end.is_finite() && end > start) {
                    return Err(ConfigError::invalid(
                        format!("{path}.end"),
                        "must be finite and after start",
                    ));
                }
                Ok(())
            }
            Reference::Circle {
                center,
                radius,
                period,
            } => {
                finite("center", center)?;
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(ConfigError::invalid(
                        format!("{path}.radius"),
                        "must be finite and >= 0",
                    ));
                }
                if !(period.is_finite() && *period > 0.0) {
                    return Err(ConfigError::invalid(
                        format!("{path}.period"),
                        "must be finite and > 0",
                    ));
                }
                Ok(())
            }
            Reference::Waypoints { points } => {
                if points.is_empty() {
                    return Err(ConfigError::invalid(
                        format!("{path}.points"),
                        "need at least one waypoint",
                    ));
                }
                for (i, w) in points.iter().enumerate() {
                    let p = format!("points[{i}]");
                    finite(&format!("{p}.position"), &w.position)?;
                    finite(&format!("{p}.yaw"), &[w.yaw])?;
                    if !w.time.is_finite() || (i > 0 && w.time <= points[i - 1].time) {
                        return Err(ConfigError::invalid(
                            format!("{path}.{p}.time"),
                            "waypoint times must be finite and strictly increasing",
                        ));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Feedback gains of every controller; each run uses the relevant subset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct GainSet {
    pub position: FeedbackGains,
    pub attitude: FeedbackGains,
    /// Position PID in N/m, N/(m·s), N·s/m.
    pub pid_position: PidGains,
    /// Attitude PID in N·m/rad and derived units.
    pub pid_attitude: PidGains,
}

impl Default for GainSet {
    fn default() -> Self {
        let p = VehicleParams::default();
        Self {
            position: FeedbackGains { k1: -4.0, k2: -4.0 },
            attitude: FeedbackGains {
                k1: -100.0,
                k2: -20.0,
            },
            pid_position: PidGains::triple_pole(2.0, &Vec3::repeat(p.nominal_mass)),
            pid_attitude: PidGains::triple_pole(10.0, &p.nominal_inertia_vec()),
        }
    }
}

/// Saturation settings. `bound` defaults to `2·m₀·g` (position) and
/// 1.5 N·m (attitude) when omitted.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct SaturationSection {
    pub position_bound: Option<f64>,
    pub attitude_bound: Option<f64>,
    pub h: Option<f64>,
    pub mode: SatMode,
}

impl SaturationSection {
    pub fn resolve(&self, vehicle: &VehicleParams) -> (SatConfig, SatConfig) {
        let h = self.h.unwrap_or(0.1);
        let pos = SatConfig {
            bound: self
                .position_bound
                .unwrap_or(2.0 * vehicle.nominal_mass * vehicle.gravity),
            h,
            mode: self.mode,
        };
        let att = SatConfig {
            bound: self.attitude_bound.unwrap_or(1.5),
            h,
            mode: self.mode,
        };
        (pos, att)
    }
}

/// How observers are initialised at `t = 0`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, schemars::JsonSchema,
)]
#[serde(rename_all = "snake_case")]
pub enum ObserverInit {
    /// Consistent start: the extended estimate equals the gravity prior
    /// (`−g·e3` for the position loop, zero for the attitude loop).
    #[default]
    Prior,
    /// Internal states zero apart from the output copy; the extended estimate
    /// starts wherever the rate error drives it.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct ObserverSection {
    pub cascaded_position: CascadedGains,
    pub cascaded_attitude: CascadedGains,
    pub standard_position: StandardGains,
    pub standard_attitude: StandardGains,
    pub init: ObserverInit,
    /// Initial error of the position-loop rate estimate (m/s).
    pub initial_rate_error: [f64; 3],
}

impl Default for ObserverSection {
    fn default() -> Self {
        Self {
            cascaded_position: CascadedGains::default(),
            cascaded_attitude: CascadedGains::default(),
            standard_position: StandardGains::default(),
            standard_attitude: StandardGains::default(),
            init: ObserverInit::Prior,
            initial_rate_error: [0.0; 3],
        }
    }
}

/// Loop periods in seconds; each must be an integer multiple of the previous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct Rates {
    pub plant_dt: f64,
    pub attitude_dt: f64,
    pub position_dt: f64,
}

impl Default for Rates {
    fn default() -> Self {
        Self {
            plant_dt: 0.0005,
            attitude_dt: 0.002,
            position_dt: 0.01,
        }
    }
}

impl Rates {
    /// `(attitude_dt / plant_dt, position_dt / attitude_dt)`.
    pub fn dividers(&self) -> Result<(usize, usize), ConfigError> {
        let ratio = |num: f64, den: f64, field: &str| {
            let r = num / den;
            let k = r.round();
            if k >= 1.0 && (r - k).abs() < 1e-9 * k {
                Ok(k as usize)
            } else {
                Err(ConfigError::invalid(
                    format!("rates.{field}"),
                    format!("must be an integer multiple (>= 1) of the faster loop period, got ratio {r}"),
                ))
            }
        };
        for (name, v) in [
            ("plant_dt", self.plant_dt),
            ("attitude_dt", self.attitude_dt),
            ("position_dt", self.position_dt),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::invalid(
                    format!("rates.{name}"),
                    format!("must be finite and > 0, got {v}"),
                ));
            }
        }
        Ok((
            ratio(self.attitude_dt, self.plant_dt, "attitude_dt")?,
            ratio(self.position_dt, self.attitude_dt, "position_dt")?,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct InitialConditions {
    /// Offset of the initial position from the reference (m).
    pub position_offset: [f64; 3],
    /// Half-width of a seeded uniform perturbation added to the initial position (m).
    pub perturbation: f64,
}

/// Artifact file names, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub trajectory: String,
    pub summary: String,
    pub report: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            trajectory: "trajectory.csv".into(),
            summary: "summary.json".into(),
            report: "report".into(),
        }
    }
}

/// A complete closed-loop experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub vehicle: VehicleParams,
    /// Controller for `run`.
    #[serde(default)]
    pub controller: ControllerKind,
    /// Controllers for `compare`; defaults to the three compared controllers.
    #[serde(default = "default_compared")]
    pub compare: Vec<ControllerKind>,
    #[serde(default)]
    pub gains: GainSet,
    #[serde(default)]
    pub saturation: SaturationSection,
    #[serde(default)]
    pub observer: ObserverSection,
    #[serde(default)]
    pub disturbance: DisturbanceProfile,
    #[serde(default)]
    pub reference: Reference,
    pub duration: f64,
    #[serde(default)]
    pub rates: Rates,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub initial: InitialConditions,
    /// Half-width of seeded uniform noise on the measured position and
    /// attitude; off when absent.
    #[serde(default)]
    pub measurement_jitter: Option<f64>,
    /// Statistics window `[t0, t1]`; defaults to the disturbance-active
    /// interval widened by 2 s, or the whole run without a disturbance.
    #[serde(default)]
    pub metrics_window: Option<[f64; 2]>,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_compared() -> Vec<ControllerKind> {
    ControllerKind::COMPARED.to_vec()
}

impl Scenario {
    /// Minimal scenario: hover at 1 m, no disturbance, default everything.
    pub fn hover(duration: f64) -> Self {
        Self {
            name: "hover".into(),
            description: String::new(),
            vehicle: VehicleParams::default(),
            controller: ControllerKind::CascadedEhgo,
            compare: default_compared(),
            gains: GainSet::default(),
            saturation: SaturationSection::default(),
            observer: ObserverSection::default(),
            disturbance: DisturbanceProfile::default(),
            reference: Reference::default(),
            duration,
            rates: Rates::default(),
            seed: 0,
            initial: InitialConditions::default(),
            measurement_jitter: None,
            metrics_window: None,
            output: OutputSection::default(),
        }
    }

    pub fn with_controller(&self, controller: ControllerKind) -> Self {
        Self {
            controller,
            ..self.clone()
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError::Parse {
                path: if path == "." { "<root>".into() } else { path },
                message: e.into_inner().to_string(),
            }
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Self::from_json(&text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialises")
    }

    /// Every check that can be made before stepping.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.name.trim().is_empty() {
            return Err(ConfigError::invalid("name", "must not be empty"));
        }
        self.vehicle.validate()?;
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(ConfigError::invalid(
                "duration",
                format!("must be finite and > 0, got {}", self.duration),
            ));
        }
        self.gains.position.validate("gains.position")?;
        self.gains.attitude.validate("gains.attitude")?;
        self.gains.pid_position.validate("gains.pid_position")?;
        self.gains.pid_attitude.validate("gains.pid_attitude")?;
        let (ps, as_) = self.saturation.resolve(&self.vehicle);
        ps.validate("saturation.position")?;
        as_.validate("saturation.attitude")?;
        let o = &self.observer;
        o.cascaded_position.validate("observer.cascaded_position")?;
        o.cascaded_attitude.validate("observer.cascaded_attitude")?;
        o.standard_position.validate("observer.standard_position")?;
        o.standard_attitude.validate("observer.standard_attitude")?;
        if o.initial_rate_error.iter().any(|v| !v.is_finite()) {
            return Err(ConfigError::invalid(
                "observer.initial_rate_error",
                "must be finite",
            ));
        }
        self.disturbance.validate("disturbance")?;
        self.reference.validate("reference")?;
        self.rates.dividers()?;
        self.check_stiffness(self.controller)?;
        for c in &self.compare {
            self.check_stiffness(*c)?;
        }
        if self.compare.is_empty() {
            return Err(ConfigError::invalid(
                "compare",
                "need at least one controller",
            ));
        }
        if !(self.initial.perturbation.is_finite() && self.initial.perturbation >= 0.0) {
            return Err(ConfigError::invalid(
                "initial.perturbation",
                "must be finite and >= 0",
            ));
        }
        if self.initial.position_offset.iter().any(|v| !v.is_finite()) {
            return Err(ConfigError::invalid(
                "initial.position_offset",
                "must be finite",
            ));
        }
        if let Some(j) = self.measurement_jitter {
            if !(j.is_finite() && j >= 0.0) {
                return Err(ConfigError::invalid(
                    "measurement_jitter",
                    "must be finite and >= 0",
                ));
            }
        }
        if let Some([a, b]) = self.metrics_window {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(ConfigError::invalid(
                    "metrics_window",
                    "must satisfy t0 < t1",
                ));
            }
        }
        Ok(())
    }

    /// Observers run at the plant rate; reject a step their guard forbids.
    pub fn check_stiffness(&self, controller: ControllerKind) -> Result<(), ConfigError> {
        let o = &self.observer;
        let limits: Vec<(&str, f64)> = match controller {
            ControllerKind::CascadedEhgo => vec![
                (
                    "observer.cascaded_position",
                    0.1 / o.cascaded_position.spectral_radius(),
                ),
                (
                    "observer.cascaded_attitude",
                    0.1 / o.cascaded_attitude.spectral_radius(),
                ),
            ],
            ControllerKind::StandardEhgo => vec![
                (
                    "observer.standard_position",
                    0.1 / o.standard_position.spectral_radius(),
                ),
                (
                    "observer.standard_attitude",
                    0.1 / o.standard_attitude.spectral_radius(),
                ),
            ],
            ControllerKind::Pid | ControllerKind::Off => vec![],
        };
        for (path, limit) in limits {
            if self.rates.plant_dt > limit * (1.0 + 1e-12) {
                return Err(ConfigError::invalid(
                    "rates.plant_dt",
                    format!(
                        "{} s exceeds the stiffness limit {limit:.3e} s of {path} ({controller})",
                        self.rates.plant_dt
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Number of plant steps.
    pub fn steps(&self) -> usize {
        (self.duration / self.rates.plant_dt).round() as usize
    }

    /// Default statistics window clipped to `[0, duration]`.
    pub fn resolved_metrics_window(&self) -> (f64, f64) {
        if let Some([a, b]) = self.metrics_window {
            return (a.max(0.0), b.min(self.duration));
        }
        match self.disturbance.active_interval() {
            Some((a, b)) => ((a - 2.0).max(0.0), (b + 2.0).min(self.duration)),
            None => (0.0, self.duration),
        }
    }

    /// JSON schema of the scenario file.
    pub fn json_schema() -> String {
        serde_json::to_string_pretty(&schemars::schema_for!(Scenario)).expect("schema serialises")
    }
}
