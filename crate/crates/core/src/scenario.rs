//! Experiment descriptions: reference defaults, the two-UAV deployment
//! generators, the hover-and-fly scenario, and strict JSON loading.
//!
//! Every section and field of the JSON form is optional and falls back to
//! [`default_scenario`]. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::antenna::{AntennaPattern, MisalignmentModel, PatternShape};
use crate::apf::{ApfConfig, FlightPlan, MotionLimits, PlanningField};
use crate::channel::{NoiseModel, PropagationParams};
use crate::error::{Error, Result};
use crate::geometry::Position3;
use crate::radio::{pair_channels, ChannelPlan, RadioConfig, Uav, UavId};

/// Id of the downlink victim in the generated two-UAV deployments.
pub const VICTIM: UavId = UavId(0);
/// Id of its co-channel pair partner.
pub const INTERFERER: UavId = UavId(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeploymentKind {
    Linear,
    Circular,
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Deployment {
    Linear {
        range_m: f64,
        height_m: f64,
        separation_m: f64,
    },
    Circular {
        radius_m: f64,
        height_m: f64,
        separation_m: f64,
    },
    /// Roster order defines the pairing.
    Explicit(Vec<(UavId, Position3)>),
}

impl Deployment {
    pub fn kind(&self) -> DeploymentKind {
        match self {
            Deployment::Linear { .. } => DeploymentKind::Linear,
            Deployment::Circular { .. } => DeploymentKind::Circular,
            Deployment::Explicit(_) => DeploymentKind::Explicit,
        }
    }

    /// UAV positions, with the generated deployments centred on the GS's
    /// horizontal position.
    pub fn place(&self, gs: Position3) -> Result<Vec<(UavId, Position3)>> {
        let pair = |(v, i): (Uav, Uav)| {
            vec![
                (v.id, v.position.offset(gs.x, gs.y, 0.0)),
                (i.id, i.position.offset(gs.x, gs.y, 0.0)),
            ]
        };
        Ok(match *self {
            Deployment::Linear {
                range_m,
                height_m,
                separation_m,
            } => pair(linear_deployment(range_m, height_m, separation_m)?),
            Deployment::Circular {
                radius_m,
                height_m,
                separation_m,
            } => pair(circular_deployment(radius_m, height_m, separation_m)?),
            Deployment::Explicit(ref uavs) => uavs.clone(),
        })
    }

    pub fn channel_plan(&self, uavs: &[(UavId, Position3)]) -> Result<ChannelPlan> {
        let ids: Vec<UavId> = uavs.iter().map(|u| u.0).collect();
        pair_channels(&ids, ids.len())
    }

    /// The same deployment type at another separation.
    pub fn with_separation(&self, separation_m: f64) -> Result<Deployment> {
        Ok(match *self {
            Deployment::Linear { range_m, height_m, .. } => Deployment::Linear {
                range_m,
                height_m,
                separation_m,
            },
            Deployment::Circular { radius_m, height_m, .. } => Deployment::Circular {
                radius_m,
                height_m,
                separation_m,
            },
            Deployment::Explicit(_) => {
                return Err(Error::validation(
                    "deployment.type",
                    "separation sweeps need a linear or circular deployment",
                ))
            }
        })
    }
}

fn generated_pair(victim: Position3, interferer: Position3) -> (Uav, Uav) {
    let plan = pair_channels(&[VICTIM, INTERFERER], 2).expect("two UAVs on two channels");
    (
        plan.uav(VICTIM, victim).expect("victim in plan"),
        plan.uav(INTERFERER, interferer).expect("interferer in plan"),
    )
}

fn check_height(height_m: f64) -> Result<()> {
    if !(height_m > 0.0 && height_m.is_finite()) {
        return Err(Error::validation(
            "deployment.height_m",
            format!("must be positive, got {height_m}"),
        ));
    }
    Ok(())
}

/// Victim at `(range, 0, h)`, interferer `separation` nearer the GS on the
/// same line, so the victim's GS-pointing beam sees it.
pub fn linear_deployment(range_m: f64, height_m: f64, separation_m: f64) -> Result<(Uav, Uav)> {
    check_height(height_m)?;
    if !(range_m > 0.0 && range_m.is_finite()) {
        return Err(Error::validation(
            "deployment.range_m",
            format!("must be positive, got {range_m}"),
        ));
    }
    if !(separation_m > 0.0 && separation_m < range_m) {
        return Err(Error::validation(
            "deployment.separation_m",
            format!("must be in (0, range_m = {range_m}), got {separation_m}"),
        ));
    }
    Ok(generated_pair(
        Position3::new(range_m, 0.0, height_m),
        Position3::new(range_m - separation_m, 0.0, height_m),
    ))
}

/// Victim at `(radius, 0, h)`, interferer on the same circle at chord
/// distance `separation`, on the positive-y side.
pub fn circular_deployment(radius_m: f64, height_m: f64, separation_m: f64) -> Result<(Uav, Uav)> {
    check_height(height_m)?;
    if !(radius_m > 0.0 && radius_m.is_finite()) {
        return Err(Error::validation(
            "deployment.radius_m",
            format!("must be positive, got {radius_m}"),
        ));
    }
    if !(separation_m > 0.0 && separation_m <= 2.0 * radius_m) {
        return Err(Error::validation(
            "deployment.separation_m",
            format!("must be in (0, 2 * radius_m = {}], got {separation_m}", 2.0 * radius_m),
        ));
    }
    let theta = 2.0 * (separation_m / (2.0 * radius_m)).min(1.0).asin();
    Ok(generated_pair(
        Position3::new(radius_m, 0.0, height_m),
        Position3::new(radius_m * theta.cos(), radius_m * theta.sin(), height_m),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightScenario {
    pub plan: FlightPlan,
    pub control: bool,
    pub limits: MotionLimits,
    pub apf: ApfConfig,
}

impl Default for FlightScenario {
    /// UAV₂ hovers at (4500, 0, 45) while UAV₁ flies from (4000, 0, 50) to
    /// (5000, 0, 50).
    fn default() -> Self {
        Self {
            plan: FlightPlan {
                start: Position3::new(4000.0, 0.0, 50.0),
                goal: Position3::new(5000.0, 0.0, 50.0),
                hover: Some(Position3::new(4500.0, 0.0, 45.0)),
                max_steps: 400,
            },
            control: true,
            limits: MotionLimits::default(),
            apf: ApfConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarlo {
    pub snapshots: usize,
    pub seed: u64,
}

impl Default for MonteCarlo {
    fn default() -> Self {
        Self {
            snapshots: 1000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub radio: RadioConfig,
    pub gs_position: Position3,
    pub deployment: Deployment,
    pub flight: Option<FlightScenario>,
    pub monte_carlo: MonteCarlo,
}

pub fn default_scenario() -> Scenario {
    Scenario {
        radio: RadioConfig::reference(),
        gs_position: Position3::new(0.0, 0.0, 10.0),
        deployment: Deployment::Linear {
            range_m: 5000.0,
            height_m: 100.0,
            separation_m: 50.0,
        },
        flight: Some(FlightScenario::default()),
        monte_carlo: MonteCarlo::default(),
    }
}

impl Default for Scenario {
    fn default() -> Self {
        default_scenario()
    }
}

// ---- JSON form ----

/// Missing fields fall back to the reference antenna of the same role.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct AntennaFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    gain_dbi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hpbw_v_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hpbw_h_deg: Option<f64>,
}

impl AntennaFile {
    fn from_pattern(p: &AntennaPattern) -> Self {
        Self {
            gain_dbi: Some(p.peak_gain_dbi),
            hpbw_v_deg: Some(p.hpbw_v_deg),
            hpbw_h_deg: Some(p.hpbw_h_deg),
        }
    }

    fn resolve(&self, fallback: &AntennaPattern) -> (f64, f64, f64) {
        (
            self.gain_dbi.unwrap_or(fallback.peak_gain_dbi),
            self.hpbw_h_deg.unwrap_or(fallback.hpbw_h_deg),
            self.hpbw_v_deg.unwrap_or(fallback.hpbw_v_deg),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct NoiseFile {
    density_dbm_hz: f64,
    figure_db: f64,
}

impl Default for NoiseFile {
    fn default() -> Self {
        let n = RadioConfig::reference().noise;
        Self {
            density_dbm_hz: n.density_dbm_per_hz,
            figure_db: n.noise_figure_db,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RadioFile {
    frequency_hz: f64,
    bandwidth_hz: f64,
    gs_tx_power_dbm: f64,
    uav_tx_power_dbm: f64,
    gs_antenna: AntennaFile,
    uav_antenna: AntennaFile,
    noise: NoiseFile,
    reflection_coefficient: f64,
    misalignment_sigma_deg: f64,
    pattern_floor_db: f64,
    pattern_shape: PatternShape,
}

impl Default for RadioFile {
    fn default() -> Self {
        Self::from_config(&RadioConfig::reference())
    }
}

impl RadioFile {
    fn from_config(c: &RadioConfig) -> Self {
        Self {
            frequency_hz: c.prop.frequency_hz,
            bandwidth_hz: c.bandwidth_hz,
            gs_tx_power_dbm: c.gs_tx_power_dbm,
            uav_tx_power_dbm: c.uav_tx_power_dbm,
            gs_antenna: AntennaFile::from_pattern(&c.gs_pattern),
            uav_antenna: AntennaFile::from_pattern(&c.uav_pattern),
            noise: NoiseFile {
                density_dbm_hz: c.noise.density_dbm_per_hz,
                figure_db: c.noise.noise_figure_db,
            },
            reflection_coefficient: c.prop.reflection_coefficient,
            misalignment_sigma_deg: c.misalignment.sigma_deg,
            pattern_floor_db: c.gs_pattern.floor_db,
            pattern_shape: c.gs_pattern.shape,
        }
    }

    fn to_config(&self) -> Result<RadioConfig> {
        let p = |path: &str, ok: bool, msg: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::validation(format!("radio.{path}"), msg))
            }
        };
        p(
            "frequency_hz",
            self.frequency_hz > 0.0 && self.frequency_hz.is_finite(),
            "must be positive",
        )?;
        p(
            "bandwidth_hz",
            self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite(),
            "must be positive",
        )?;
        p("gs_tx_power_dbm", self.gs_tx_power_dbm.is_finite(), "must be finite")?;
        p("uav_tx_power_dbm", self.uav_tx_power_dbm.is_finite(), "must be finite")?;
        p(
            "noise.density_dbm_hz",
            self.noise.density_dbm_hz.is_finite(),
            "must be finite",
        )?;
        p("noise.figure_db", self.noise.figure_db.is_finite(), "must be finite")?;
        p(
            "reflection_coefficient",
            (-1.0..=1.0).contains(&self.reflection_coefficient),
            "must be in [-1, 1]",
        )?;
        p(
            "misalignment_sigma_deg",
            self.misalignment_sigma_deg >= 0.0 && self.misalignment_sigma_deg.is_finite(),
            "must be non-negative",
        )?;
        let reference = RadioConfig::reference();
        let pattern = |name: &str, a: &AntennaFile, fallback: &AntennaPattern| -> Result<AntennaPattern> {
            let (gain, h, v) = a.resolve(fallback);
            let pat = AntennaPattern::new(gain, h, v, self.pattern_floor_db).with_shape(self.pattern_shape);
            pat.check().map_err(|m| Error::validation(format!("radio.{name}"), m))?;
            Ok(pat)
        };
        Ok(RadioConfig {
            bandwidth_hz: self.bandwidth_hz,
            gs_tx_power_dbm: self.gs_tx_power_dbm,
            uav_tx_power_dbm: self.uav_tx_power_dbm,
            gs_pattern: pattern("gs_antenna", &self.gs_antenna, &reference.gs_pattern)?,
            uav_pattern: pattern("uav_antenna", &self.uav_antenna, &reference.uav_pattern)?,
            noise: NoiseModel {
                density_dbm_per_hz: self.noise.density_dbm_hz,
                noise_figure_db: self.noise.figure_db,
            },
            prop: PropagationParams::new(self.frequency_hz, self.reflection_coefficient),
            misalignment: MisalignmentModel::new(self.misalignment_sigma_deg),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UavFile {
    id: u32,
    position: Position3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeploymentFile {
    #[serde(rename = "type", default = "default_kind")]
    kind: DeploymentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    range_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    height_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    separation_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    uavs: Option<Vec<UavFile>>,
}

fn default_kind() -> DeploymentKind {
    DeploymentKind::Linear
}

impl Default for DeploymentFile {
    fn default() -> Self {
        Self::from_deployment(&default_scenario().deployment)
    }
}

impl DeploymentFile {
    fn empty(kind: DeploymentKind) -> Self {
        Self {
            kind,
            range_m: None,
            radius_m: None,
            height_m: None,
            separation_m: None,
            uavs: None,
        }
    }

    fn from_deployment(d: &Deployment) -> Self {
        let mut f = Self::empty(d.kind());
        match *d {
            Deployment::Linear {
                range_m,
                height_m,
                separation_m,
            } => {
                f.range_m = Some(range_m);
                f.height_m = Some(height_m);
                f.separation_m = Some(separation_m);
            }
            Deployment::Circular {
                radius_m,
                height_m,
                separation_m,
            } => {
                f.radius_m = Some(radius_m);
                f.height_m = Some(height_m);
                f.separation_m = Some(separation_m);
            }
            Deployment::Explicit(ref uavs) => {
                f.uavs = Some(
                    uavs.iter()
                        .map(|&(id, position)| UavFile { id: id.0, position })
                        .collect(),
                );
            }
        }
        f
    }

    fn to_deployment(&self) -> Result<Deployment> {
        let reject = |name: &str, present: bool| -> Result<()> {
            if present {
                Err(Error::validation(
                    format!("deployment.{name}"),
                    format!("not allowed for a {:?} deployment", self.kind).to_lowercase(),
                ))
            } else {
                Ok(())
            }
        };
        let height = self.height_m.unwrap_or(100.0);
        let separation = self.separation_m.unwrap_or(50.0);
        let d = match self.kind {
            DeploymentKind::Linear => {
                reject("radius_m", self.radius_m.is_some())?;
                reject("uavs", self.uavs.is_some())?;
                Deployment::Linear {
                    range_m: self.range_m.unwrap_or(5000.0),
                    height_m: height,
                    separation_m: separation,
                }
            }
            DeploymentKind::Circular => {
                reject("range_m", self.range_m.is_some())?;
                reject("uavs", self.uavs.is_some())?;
                Deployment::Circular {
                    radius_m: self.radius_m.unwrap_or(5000.0),
                    height_m: height,
                    separation_m: separation,
                }
            }
            DeploymentKind::Explicit => {
                for (name, present) in [
                    ("range_m", self.range_m.is_some()),
                    ("radius_m", self.radius_m.is_some()),
                    ("height_m", self.height_m.is_some()),
                    ("separation_m", self.separation_m.is_some()),
                ] {
                    reject(name, present)?;
                }
                let uavs = self
                    .uavs
                    .as_ref()
                    .ok_or_else(|| Error::validation("deployment.uavs", "required for an explicit deployment"))?;
                if uavs.is_empty() {
                    return Err(Error::validation("deployment.uavs", "must not be empty"));
                }
                for (i, u) in uavs.iter().enumerate() {
                    let p = u.position;
                    if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite() && p.z >= 0.0) {
                        return Err(Error::validation(
                            format!("deployment.uavs[{i}].position"),
                            "must be finite with z >= 0",
                        ));
                    }
                }
                Deployment::Explicit(uavs.iter().map(|u| (UavId(u.id), u.position)).collect())
            }
        };
        Ok(d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FlightFile {
    start: Position3,
    goal: Position3,
    #[serde(default = "default_hover")]
    hover: Option<Position3>,
    control: bool,
    v_max_mps: f64,
    a_max_mps2: f64,
    dt_s: f64,
    min_altitude_m: f64,
    omega: f64,
    repulsive_scale: f64,
    reference_floor_dbm: f64,
    planning_field: PlanningField,
    accel_levels: usize,
    goal_radius_m: f64,
    max_steps: usize,
}

fn default_hover() -> Option<Position3> {
    FlightScenario::default().plan.hover
}

impl Default for FlightFile {
    fn default() -> Self {
        Self::from_flight(&FlightScenario::default())
    }
}

impl FlightFile {
    fn from_flight(f: &FlightScenario) -> Self {
        Self {
            start: f.plan.start,
            goal: f.plan.goal,
            hover: f.plan.hover,
            control: f.control,
            v_max_mps: f.limits.v_max_mps,
            a_max_mps2: f.limits.a_max_mps2,
            dt_s: f.limits.dt_s,
            min_altitude_m: f.limits.min_altitude_m,
            omega: f.apf.omega,
            repulsive_scale: f.apf.repulsive_scale,
            reference_floor_dbm: f.apf.reference_floor_dbm,
            planning_field: f.apf.planning_field,
            accel_levels: f.apf.accel_levels,
            goal_radius_m: f.apf.goal_radius_m,
            max_steps: f.plan.max_steps,
        }
    }

    fn to_flight(&self) -> Result<FlightScenario> {
        let f = FlightScenario {
            plan: FlightPlan {
                start: self.start,
                goal: self.goal,
                hover: self.hover,
                max_steps: self.max_steps,
            },
            control: self.control,
            limits: MotionLimits {
                v_max_mps: self.v_max_mps,
                a_max_mps2: self.a_max_mps2,
                dt_s: self.dt_s,
                min_altitude_m: self.min_altitude_m,
            },
            apf: ApfConfig {
                omega: self.omega,
                accel_levels: self.accel_levels,
                goal_radius_m: self.goal_radius_m,
                repulsive_scale: self.repulsive_scale,
                reference_floor_dbm: self.reference_floor_dbm,
                planning_field: self.planning_field,
            },
        };
        let wrap = |(name, msg): (&str, String)| Error::validation(format!("flight.{name}"), msg);
        f.limits.check().map_err(wrap)?;
        f.apf.check().map_err(wrap)?;
        if !self.reference_floor_dbm.is_finite() {
            return Err(Error::validation("flight.reference_floor_dbm", "must be finite"));
        }
        if self.max_steps == 0 {
            return Err(Error::validation("flight.max_steps", "must be at least 1"));
        }
        for (name, p) in [
            ("start", Some(self.start)),
            ("goal", Some(self.goal)),
            ("hover", self.hover),
        ] {
            if let Some(p) = p {
                if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite() && p.z > 0.0) {
                    return Err(Error::validation(
                        format!("flight.{name}"),
                        "must be finite and above ground",
                    ));
                }
            }
        }
        if self.start.z < self.min_altitude_m {
            return Err(Error::validation("flight.start", "below min_altitude_m"));
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct MonteCarloFile {
    snapshots: usize,
    seed: u64,
}

impl Default for MonteCarloFile {
    fn default() -> Self {
        let m = MonteCarlo::default();
        Self {
            snapshots: m.snapshots,
            seed: m.seed,
        }
    }
}

fn default_flight() -> Option<FlightFile> {
    Some(FlightFile::default())
}

fn default_gs_position() -> Position3 {
    default_scenario().gs_position
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default)]
    radio: RadioFile,
    #[serde(default = "default_gs_position")]
    gs_position: Position3,
    #[serde(default)]
    deployment: DeploymentFile,
    #[serde(default = "default_flight")]
    flight: Option<FlightFile>,
    #[serde(default)]
    monte_carlo: MonteCarloFile,
}

impl ScenarioFile {
    fn from_scenario(s: &Scenario) -> Self {
        Self {
            radio: RadioFile::from_config(&s.radio),
            gs_position: s.gs_position,
            deployment: DeploymentFile::from_deployment(&s.deployment),
            flight: s.flight.as_ref().map(FlightFile::from_flight),
            monte_carlo: MonteCarloFile {
                snapshots: s.monte_carlo.snapshots,
                seed: s.monte_carlo.seed,
            },
        }
    }

    fn to_scenario(&self) -> Result<Scenario> {
        let radio = self.radio.to_config()?;
        let g = self.gs_position;
        if !(g.x.is_finite() && g.y.is_finite() && g.z.is_finite() && g.z >= 0.0) {
            return Err(Error::validation("gs_position", "must be finite with z >= 0"));
        }
        let deployment = self.deployment.to_deployment()?;
        let uavs = deployment.place(g)?;
        deployment
            .channel_plan(&uavs)
            .map_err(|e| Error::validation("deployment", e.to_string()))?;
        let flight = self.flight.as_ref().map(FlightFile::to_flight).transpose()?;
        if self.monte_carlo.snapshots == 0 {
            return Err(Error::validation("monte_carlo.snapshots", "must be at least 1"));
        }
        Ok(Scenario {
            radio,
            gs_position: g,
            deployment,
            flight,
            monte_carlo: MonteCarlo {
                snapshots: self.monte_carlo.snapshots,
                seed: self.monte_carlo.seed,
            },
        })
    }
}

/// Parses and validates a scenario from JSON text.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    file.to_scenario()
}

/// Reads and validates a scenario file.
pub fn load_scenario_file(path: &std::path::Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    load_scenario(&text)
}

/// Pretty-printed JSON accepted by [`load_scenario`].
pub fn scenario_to_json(s: &Scenario) -> String {
    serde_json::to_string_pretty(&ScenarioFile::from_scenario(s)).expect("scenario serializes")
}
