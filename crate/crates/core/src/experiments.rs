//! The three experiments: downlink capacity versus UAV separation, resource
//! efficiency versus demanded downlink rate, and controlled versus
//! uncontrolled flight; plus the directional uplink power saving.
//!
//! Monte Carlo snapshot `i` draws from `ChaCha8Rng::seed_from_u64(seed + i)`
//! and results are reduced in snapshot order, so every number is a pure
//! function of the seed whatever the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::apf::{simulate_flight, Trajectory};
use crate::efficiency::{
    omni_link_se, proposed_efficiency, required_uplink_power, tdd_fdm_efficiency, tdd_split_for_demand, AntennaMode,
    ChannelContribution, EfficiencyResult, TddFdmConfig,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::Position3;
use crate::radio::{downlink_link_result, LinkResult, RadioConfig};
use crate::scenario::{Deployment, FlightScenario, MonteCarlo, INTERFERER, VICTIM};
use crate::units::{linear_to_db, watts_to_dbm};

pub fn snapshot_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64))
}

/// Mean and sample standard deviation, summed in order.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityRow {
    pub separation_m: f64,
    pub capacity_mean_mbps: f64,
    pub capacity_std_mbps: f64,
    /// Mean interference power over snapshots, in dBm.
    pub interference_mean_dbm: f64,
    /// Mean of the per-snapshot SINR in dB.
    pub sinr_mean_db: f64,
}

/// Victim downlink of a two-UAV deployment over `mc.snapshots` draws.
pub fn victim_downlink_snapshots(
    radio: &RadioConfig,
    gs: Position3,
    deployment: &Deployment,
    mc: &MonteCarlo,
    exec: Exec,
) -> Result<Vec<LinkResult>> {
    let uavs = deployment.place(gs)?;
    let plan = deployment.channel_plan(&uavs)?;
    let find = |id| {
        uavs.iter()
            .find(|u| u.0 == id)
            .map(|u| u.1)
            .ok_or(Error::UnknownUav(id))
    };
    let victim = plan.uav(VICTIM, find(VICTIM)?)?;
    let interferer = plan.uav(INTERFERER, find(INTERFERER)?)?;
    exec.try_map(mc.snapshots, |i| {
        let mut rng = snapshot_rng(mc.seed, i);
        downlink_link_result(gs, &victim, &interferer, radio, &mut rng)
    })
}

pub fn capacity_point(
    radio: &RadioConfig,
    gs: Position3,
    deployment: &Deployment,
    separation_m: f64,
    mc: &MonteCarlo,
    exec: Exec,
) -> Result<CapacityRow> {
    let d = deployment.with_separation(separation_m)?;
    let links = victim_downlink_snapshots(radio, gs, &d, mc, exec)?;
    let caps: Vec<f64> = links.iter().map(|l| l.capacity_bps / 1e6).collect();
    let (capacity_mean_mbps, capacity_std_mbps) = mean_std(&caps);
    let interference: Vec<f64> = links.iter().map(|l| l.interference_w).collect();
    let sinr_db: Vec<f64> = links.iter().map(|l| linear_to_db(l.sinr)).collect();
    Ok(CapacityRow {
        separation_m,
        capacity_mean_mbps,
        capacity_std_mbps,
        interference_mean_dbm: watts_to_dbm(mean_std(&interference).0),
        sinr_mean_db: mean_std(&sinr_db).0,
    })
}

pub fn capacity_sweep(
    radio: &RadioConfig,
    gs: Position3,
    deployment: &Deployment,
    separations: &[f64],
    mc: &MonteCarlo,
    exec: Exec,
) -> Result<Vec<CapacityRow>> {
    separations
        .iter()
        .map(|&s| capacity_point(radio, gs, deployment, s, mc, exec))
        .collect()
}

/// `start, start + step, …` up to `stop` inclusive (with a little slack for
/// rounding), computed by multiplication rather than accumulation.
pub fn linspace_step(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::validation("step", "must be positive with finite bounds"));
    }
    if stop < start {
        return Err(Error::validation("max", "must not be below min"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Proposed,
    TddFdm,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::TddFdm => "tdd-fdm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyRow {
    pub required_rate_mbps: f64,
    pub scheme: Scheme,
    pub separation_m: f64,
    pub eta_bps_hz: f64,
    /// TDD only: some UAV's demand saturates its frame.
    pub saturated: bool,
}

/// Monte Carlo mean of the proposed scheme's η.
pub fn proposed_eta_mean(
    radio: &RadioConfig,
    gs: Position3,
    deployment: &Deployment,
    mc: &MonteCarlo,
    exec: Exec,
) -> Result<f64> {
    let uavs = deployment.place(gs)?;
    let plan = deployment.channel_plan(&uavs)?;
    let etas = exec.try_map(mc.snapshots, |i| {
        let mut rng = snapshot_rng(mc.seed, i);
        proposed_efficiency(gs, &uavs, &plan, radio, &mut rng).map(|r| r.eta)
    })?;
    Ok(mean_std(&etas).0)
}

/// TDD-FDM η when every UAV must carry `required_downlink_bps`: each UAV
/// gets the frame split that meets its demand given its own omni link.
pub fn tdd_eta_for_demand(
    radio: &RadioConfig,
    gs: Position3,
    uavs: &[(crate::radio::UavId, Position3)],
    tdd: &TddFdmConfig,
    required_downlink_bps: f64,
) -> Result<(EfficiencyResult, bool)> {
    let omni = tdd.omni_radio(radio);
    let mut per_channel: Vec<ChannelContribution> = Vec::with_capacity(uavs.len());
    let mut saturated = false;
    for (k, u) in uavs.iter().enumerate() {
        let (_, down_se) = omni_link_se(gs, u.1, &omni)?;
        let split = tdd_split_for_demand(required_downlink_bps, radio.bandwidth_hz * down_se, tdd.guard_fraction)?;
        saturated |= split.infeasible;
        let cfg = tdd.with_split(split.uplink_fraction, split.downlink_fraction);
        let mut one = tdd_fdm_efficiency(gs, std::slice::from_ref(u), &cfg, radio)?.per_channel;
        one[0].channel = k;
        per_channel.append(&mut one);
    }
    Ok((EfficiencyResult::from_channels(per_channel)?, saturated))
}

/// Rows ordered by rate, then separation, TDD-FDM before proposed.
#[allow(clippy::too_many_arguments)]
pub fn efficiency_sweep(
    radio: &RadioConfig,
    gs: Position3,
    deployment: &Deployment,
    rates_bps: &[f64],
    separations: &[f64],
    tdd: &TddFdmConfig,
    mc: &MonteCarlo,
    exec: Exec,
) -> Result<Vec<EfficiencyRow>> {
    tdd.check()?;
    let mut per_sep = Vec::with_capacity(separations.len());
    for &s in separations {
        let d = deployment.with_separation(s)?;
        let uavs = d.place(gs)?;
        per_sep.push((s, uavs, proposed_eta_mean(radio, gs, &d, mc, exec)?));
    }
    let mut rows = Vec::new();
    for &rate in rates_bps {
        for (s, uavs, proposed) in &per_sep {
            let (t, saturated) = tdd_eta_for_demand(radio, gs, uavs, tdd, rate)?;
            rows.push(EfficiencyRow {
                required_rate_mbps: rate / 1e6,
                scheme: Scheme::TddFdm,
                separation_m: *s,
                eta_bps_hz: t.eta,
                saturated,
            });
            rows.push(EfficiencyRow {
                required_rate_mbps: rate / 1e6,
                scheme: Scheme::Proposed,
                separation_m: *s,
                eta_bps_hz: *proposed,
                saturated: false,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlightComparison {
    pub controlled: Trajectory,
    pub uncontrolled: Trajectory,
    /// Largest `I_off - I_on` (dB) at equal time steps.
    pub peak_interference_reduction_db: f64,
    /// Largest `C_on - C_off` (Mbps) at equal time steps.
    pub peak_capacity_gain_mbps: f64,
    /// Peak interference of the uncontrolled run over that of the controlled run, dB.
    pub peak_to_peak_reduction_db: f64,
}

/// Runs the flight with and without interference control on the same seed.
pub fn compare_flights(
    radio: &RadioConfig,
    gs: Position3,
    flight: &FlightScenario,
    seed: u64,
) -> Result<FlightComparison> {
    let run = |on| simulate_flight(&flight.plan, on, gs, radio, &flight.limits, &flight.apf, seed);
    let controlled = run(true)?;
    let uncontrolled = run(false)?;
    let pairs = controlled.points.iter().zip(&uncontrolled.points);
    let peak_interference_reduction_db = pairs
        .clone()
        .map(|(on, off)| watts_to_dbm(off.interference_w) - watts_to_dbm(on.interference_w))
        .fold(f64::NEG_INFINITY, f64::max);
    let peak_capacity_gain_mbps = pairs
        .map(|(on, off)| (on.capacity_bps - off.capacity_bps) / 1e6)
        .fold(f64::NEG_INFINITY, f64::max);
    let peak_to_peak_reduction_db =
        watts_to_dbm(uncontrolled.peak_interference_w()) - watts_to_dbm(controlled.peak_interference_w());
    Ok(FlightComparison {
        controlled,
        uncontrolled,
        peak_interference_reduction_db,
        peak_capacity_gain_mbps,
        peak_to_peak_reduction_db,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSavingRow {
    pub mode: AntennaMode,
    pub required_uplink_power_dbm: f64,
    /// Saving relative to omni antennas, dB.
    pub delta_db: f64,
}

pub fn power_saving(
    radio: &RadioConfig,
    gs: Position3,
    uav: Position3,
    target_rate_bps: f64,
) -> Result<Vec<PowerSavingRow>> {
    let omni = required_uplink_power(target_rate_bps, gs, uav, AntennaMode::Omni, radio)?;
    let directional = required_uplink_power(target_rate_bps, gs, uav, AntennaMode::Directional, radio)?;
    Ok(vec![
        PowerSavingRow {
            mode: AntennaMode::Directional,
            required_uplink_power_dbm: directional,
            delta_db: omni - directional,
        },
        PowerSavingRow {
            mode: AntennaMode::Omni,
            required_uplink_power_dbm: omni,
            delta_db: 0.0,
        },
    ])
}
