//! Artificial-potential-field flight control: the goal attracts, co-channel
//! interference received at the UAV repels, and each step picks the
//! reachable next position of least total potential.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::antenna::Misalignment;
use crate::channel::{mean_two_ray_gain, Terminal};
use crate::error::{Error, Result};
use crate::geometry::{distance, Position3};
use crate::radio::{downlink_with_errors, uplink_interference_w, DownlinkErrors, RadioConfig};
use crate::units::{dbm_to_watts, watts_to_dbm};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UavState {
    pub position: Position3,
    /// m/s per axis.
    pub velocity: [f64; 3],
}

impl UavState {
    pub fn at_rest(position: Position3) -> Self {
        Self {
            position,
            velocity: [0.0; 3],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionLimits {
    pub v_max_mps: f64,
    pub a_max_mps2: f64,
    pub dt_s: f64,
    /// Altitude the UAV must always be able to stop above.
    pub min_altitude_m: f64,
}

impl Default for MotionLimits {
    fn default() -> Self {
        Self {
            v_max_mps: 10.0,
            a_max_mps2: 5.0,
            dt_s: 1.0,
            min_altitude_m: 10.0,
        }
    }
}

impl MotionLimits {
    pub fn check(&self) -> std::result::Result<(), (&'static str, String)> {
        for (name, v) in [
            ("v_max_mps", self.v_max_mps),
            ("a_max_mps2", self.a_max_mps2),
            ("dt_s", self.dt_s),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err((name, format!("must be positive, got {v}")));
            }
        }
        if !(self.min_altitude_m >= 0.0 && self.min_altitude_m.is_finite()) {
            return Err((
                "min_altitude_m",
                format!("must be non-negative, got {}", self.min_altitude_m),
            ));
        }
        Ok(())
    }

    /// Height lost while braking from vertical speed `vz` at full
    /// deceleration, under the discrete-step motion model.
    pub fn stopping_drop(&self, vz: f64) -> f64 {
        if vz >= 0.0 {
            return 0.0;
        }
        let dv = self.a_max_mps2 * self.dt_s;
        let mut speed = -vz;
        let mut drop = 0.0;
        loop {
            speed -= dv;
            if speed <= 0.0 {
                return drop;
            }
            drop += speed * self.dt_s;
        }
    }
}

/// How interference is evaluated for planning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanningField {
    /// Exact two-ray sum, fringes included.
    Coherent,
    /// LOS and reflected powers added, i.e. the fringe-averaged field.
    #[default]
    Incoherent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApfConfig {
    /// Attractive weight, score units per metre.
    pub omega: f64,
    pub accel_levels: usize,
    pub goal_radius_m: f64,
    /// Weight of the repulsive score.
    pub repulsive_scale: f64,
    /// Interference level (dBm) at which the repulsive score is zero.
    pub reference_floor_dbm: f64,
    pub planning_field: PlanningField,
}

impl Default for ApfConfig {
    fn default() -> Self {
        Self {
            omega: 0.5,
            accel_levels: 5,
            goal_radius_m: 5.0,
            repulsive_scale: 1.0,
            reference_floor_dbm: -130.0,
            planning_field: PlanningField::Incoherent,
        }
    }
}

impl ApfConfig {
    pub fn check(&self) -> std::result::Result<(), (&'static str, String)> {
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(("omega", format!("must be non-negative, got {}", self.omega)));
        }
        if self.accel_levels < 3 || self.accel_levels.is_multiple_of(2) {
            return Err((
                "accel_levels",
                format!("must be odd and >= 3, got {}", self.accel_levels),
            ));
        }
        if !(self.goal_radius_m > 0.0) {
            return Err(("goal_radius_m", format!("must be positive, got {}", self.goal_radius_m)));
        }
        if !(self.repulsive_scale >= 0.0 && self.repulsive_scale.is_finite()) {
            return Err(("repulsive_scale", "must be non-negative".into()));
        }
        Ok(())
    }

    /// Attraction only: the uncontrolled waypoint flight.
    pub fn attractive_only(mut self) -> Self {
        self.repulsive_scale = 0.0;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interferer {
    pub position: Position3,
    pub tx_power_dbm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialBreakdown {
    pub attractive: f64,
    /// Planning-field interference, watts.
    pub repulsive_w: f64,
    /// `max(0, I_dBm - floor)`, score units.
    pub repulsive_score: f64,
    pub total: f64,
}

pub fn attractive_potential(q: Position3, goal: Position3, omega: f64) -> f64 {
    omega * distance(q, goal)
}

/// Interference (W) received at `q` from `interferers`, every antenna aimed
/// at the GS with no pointing error. Exact coherent two-ray sum.
pub fn repulsive_potential(q: Position3, gs: Position3, interferers: &[Interferer], cfg: &RadioConfig) -> Result<f64> {
    interferers.iter().try_fold(0.0, |acc, i| {
        let zero = Misalignment::default();
        Ok(acc + uplink_interference_w(gs, q, i.position, i.tx_power_dbm, cfg, zero, zero)?)
    })
}

fn planning_interference(
    q: Position3,
    gs: Position3,
    interferers: &[Interferer],
    cfg: &RadioConfig,
    field: PlanningField,
) -> Result<f64> {
    match field {
        PlanningField::Coherent => repulsive_potential(q, gs, interferers, cfg),
        PlanningField::Incoherent => interferers.iter().try_fold(0.0, |acc, i| {
            let zero = Misalignment::default();
            let tx = Terminal {
                position: i.position,
                pointing: crate::antenna::boresight_toward(i.position, gs, zero)?,
                pattern: &cfg.uav_pattern,
            };
            let rx = Terminal {
                position: q,
                pointing: crate::antenna::boresight_toward(q, gs, zero)?,
                pattern: &cfg.uav_pattern,
            };
            Ok(acc + dbm_to_watts(i.tx_power_dbm) * mean_two_ray_gain(&tx, &rx, &cfg.prop)?)
        }),
    }
}

pub fn repulsive_score(interference_w: f64, reference_floor_dbm: f64) -> f64 {
    let s = watts_to_dbm(interference_w) - reference_floor_dbm;
    if s > 0.0 {
        s
    } else {
        0.0
    }
}

/// Total potential at `q`. A candidate on top of an interferer or the GS has
/// infinite potential.
pub fn potential(
    q: Position3,
    goal: Position3,
    gs: Position3,
    interferers: &[Interferer],
    apf: &ApfConfig,
    cfg: &RadioConfig,
) -> Result<PotentialBreakdown> {
    let attractive = attractive_potential(q, goal, apf.omega);
    if apf.repulsive_scale == 0.0 {
        return Ok(PotentialBreakdown {
            attractive,
            repulsive_w: 0.0,
            repulsive_score: 0.0,
            total: attractive,
        });
    }
    let repulsive_w = match planning_interference(q, gs, interferers, cfg, apf.planning_field) {
        Ok(w) => w,
        Err(Error::CoincidentPoints | Error::DegenerateBearing) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let repulsive_score = repulsive_score(repulsive_w, apf.reference_floor_dbm);
    Ok(PotentialBreakdown {
        attractive,
        repulsive_w,
        repulsive_score,
        total: attractive + apf.repulsive_scale * repulsive_score,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub index: usize,
    pub acceleration: [f64; 3],
    pub state: UavState,
}

/// Evenly spaced acceleration values in `[-a_max, a_max]`; the middle one
/// is exactly zero.
pub fn accel_levels(a_max: f64, levels: usize) -> Vec<f64> {
    let half = (levels / 2) as f64;
    (0..levels)
        .map(|i| {
            let k = i as f64 - half;
            if k == 0.0 {
                0.0
            } else {
                a_max * k / half
            }
        })
        .collect()
}

/// All `levels³` next states under the box-constrained kinematic model,
/// x-major order.
pub fn candidate_positions(state: &UavState, limits: &MotionLimits, levels: usize) -> Vec<Candidate> {
    let accs = accel_levels(limits.a_max_mps2, levels);
    let mut out = Vec::with_capacity(levels.pow(3));
    for &ax in &accs {
        for &ay in &accs {
            for &az in &accs {
                let a = [ax, ay, az];
                let mut v = [0.0; 3];
                for k in 0..3 {
                    v[k] = (state.velocity[k] + a[k] * limits.dt_s).clamp(-limits.v_max_mps, limits.v_max_mps);
                }
                let p = state.position;
                let position = Position3::new(
                    p.x + v[0] * limits.dt_s,
                    p.y + v[1] * limits.dt_s,
                    p.z + v[2] * limits.dt_s,
                );
                out.push(Candidate {
                    index: out.len(),
                    acceleration: a,
                    state: UavState { position, velocity: v },
                });
            }
        }
    }
    out
}

/// The candidate can still brake to a stop above the altitude floor.
pub fn is_admissible(c: &Candidate, limits: &MotionLimits) -> bool {
    c.state.position.z - limits.stopping_drop(c.state.velocity[2]) >= limits.min_altitude_m
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub candidate: Candidate,
    pub potential: PotentialBreakdown,
}

/// Strict total order used by the argmin: total potential, then distance to
/// goal, then candidate index.
fn better(a: (&Candidate, &PotentialBreakdown, f64), b: (&Candidate, &PotentialBreakdown, f64)) -> bool {
    match a.1.total.total_cmp(&b.1.total) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => match a.2.total_cmp(&b.2) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => a.0.index < b.0.index,
        },
    }
}

/// One controller step: the admissible candidate of least total potential.
/// If no candidate is admissible (the UAV started below its floor), all
/// candidates are considered.
pub fn apf_step(
    state: &UavState,
    goal: Position3,
    gs: Position3,
    interferers: &[Interferer],
    limits: &MotionLimits,
    apf: &ApfConfig,
    cfg: &RadioConfig,
) -> Result<StepOutcome> {
    let all = candidate_positions(state, limits, apf.accel_levels);
    let admissible: Vec<&Candidate> = all.iter().filter(|c| is_admissible(c, limits)).collect();
    let pool: Vec<&Candidate> = if admissible.is_empty() {
        all.iter().collect()
    } else {
        admissible
    };
    let mut best: Option<(Candidate, PotentialBreakdown, f64)> = None;
    for c in pool {
        let pot = potential(c.state.position, goal, gs, interferers, apf, cfg)?;
        let d = distance(c.state.position, goal);
        let take = match &best {
            None => true,
            Some((bc, bp, bd)) => better((c, &pot, d), (bc, bp, *bd)),
        };
        if take {
            best = Some((*c, pot, d));
        }
    }
    let (candidate, potential, _) = best.expect("candidate set is never empty");
    Ok(StepOutcome { candidate, potential })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightPlan {
    pub start: Position3,
    pub goal: Position3,
    /// Hovering co-channel UAV transmitting its uplink, if any.
    pub hover: Option<Position3>,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub step: usize,
    pub t_s: f64,
    pub state: UavState,
    /// Sampled downlink interference, W.
    pub interference_w: f64,
    pub capacity_bps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub converged: bool,
}

impl Trajectory {
    pub fn peak_interference_w(&self) -> f64 {
        self.points.iter().map(|p| p.interference_w).fold(0.0, f64::max)
    }

    pub fn mean_capacity_bps(&self) -> f64 {
        self.points.iter().map(|p| p.capacity_bps).sum::<f64>() / self.points.len() as f64
    }
}

/// Flies from `plan.start` (at rest) until within the goal radius or the
/// step budget runs out. With `control_enabled = false` the repulsive term is
/// dropped, giving the plain waypoint flight. Every recorded point samples
/// pointing errors from a stream seeded with `seed + step`.
pub fn simulate_flight(
    plan: &FlightPlan,
    control_enabled: bool,
    gs: Position3,
    cfg: &RadioConfig,
    limits: &MotionLimits,
    apf: &ApfConfig,
    seed: u64,
) -> Result<Trajectory> {
    let apf = if control_enabled { *apf } else { apf.attractive_only() };
    let interferers: Vec<Interferer> = plan
        .hover
        .iter()
        .map(|&position| Interferer {
            position,
            tx_power_dbm: cfg.uav_tx_power_dbm,
        })
        .collect();
    let record = |step: usize, state: UavState| -> Result<TrajectoryPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(step as u64));
        let errs = DownlinkErrors::sample(&cfg.misalignment, &mut rng);
        let link = downlink_with_errors(gs, state.position, plan.hover, cfg, &errs)?;
        Ok(TrajectoryPoint {
            step,
            t_s: step as f64 * limits.dt_s,
            state,
            interference_w: link.interference_w,
            capacity_bps: link.capacity_bps,
        })
    };
    let mut state = UavState::at_rest(plan.start);
    let mut points = vec![record(0, state)?];
    let arrived = |s: &UavState| distance(s.position, plan.goal) <= apf.goal_radius_m;
    let mut step = 0;
    while !arrived(&state) && step < plan.max_steps {
        step += 1;
        state = apf_step(&state, plan.goal, gs, &interferers, limits, &apf, cfg)?
            .candidate
            .state;
        points.push(record(step, state)?);
    }
    Ok(Trajectory {
        converged: arrived(&state),
        points,
    })
}
