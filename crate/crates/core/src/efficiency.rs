//! Radio-resource efficiency of the paired full-duplex scheme against a
//! TDD-FDM baseline, and the uplink transmit power needed for a target rate.

use rand::Rng;

use crate::antenna::{AntennaPattern, Misalignment, MisalignmentModel};
use crate::error::{Error, Result};
use crate::geometry::Position3;
use crate::radio::{downlink_link_result, uplink_link_result, uplink_with_errors, ChannelPlan, RadioConfig, UavId};
use crate::units::{dbm_to_watts, watts_to_dbm};

/// Highest uplink transmit power [`required_uplink_power`] will return.
pub const MAX_UPLINK_POWER_DBM: f64 = 60.0;
/// Returned by [`required_uplink_power`] for a zero target rate.
pub const POWER_FLOOR_DBM: f64 = -300.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TddFdmConfig {
    pub guard_fraction: f64,
    pub omni_tx_power_dbm: f64,
    pub omni_gain_dbi: f64,
    pub uplink_fraction: f64,
    pub downlink_fraction: f64,
}

impl TddFdmConfig {
    /// 20% guard, 20 dBm omni (0 dBi) radios, remaining time split evenly.
    pub fn reference() -> Self {
        Self {
            guard_fraction: 0.2,
            omni_tx_power_dbm: 20.0,
            omni_gain_dbi: 0.0,
            uplink_fraction: 0.4,
            downlink_fraction: 0.4,
        }
    }

    pub fn with_split(mut self, uplink_fraction: f64, downlink_fraction: f64) -> Self {
        self.uplink_fraction = uplink_fraction;
        self.downlink_fraction = downlink_fraction;
        self
    }

    pub fn check(&self) -> Result<()> {
        let fr = [
            ("guard_fraction", self.guard_fraction),
            ("uplink_fraction", self.uplink_fraction),
            ("downlink_fraction", self.downlink_fraction),
        ];
        for (name, v) in fr {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidTddFractions(format!("{name} = {v} outside [0, 1]")));
            }
        }
        let sum = self.guard_fraction + self.uplink_fraction + self.downlink_fraction;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidTddFractions(format!("fractions sum to {sum}, not 1")));
        }
        if !self.omni_tx_power_dbm.is_finite() || !self.omni_gain_dbi.is_finite() {
            return Err(Error::InvalidTddFractions(
                "omni radio parameters must be finite".into(),
            ));
        }
        Ok(())
    }

    /// The radio configuration seen by TDD-FDM links: omni antennas at both
    /// ends, omni transmit power both ways, no pointing error.
    pub fn omni_radio(&self, cfg: &RadioConfig) -> RadioConfig {
        let omni = AntennaPattern::isotropic(self.omni_gain_dbi);
        RadioConfig {
            gs_tx_power_dbm: self.omni_tx_power_dbm,
            uav_tx_power_dbm: self.omni_tx_power_dbm,
            gs_pattern: omni,
            uav_pattern: omni,
            misalignment: MisalignmentModel::new(0.0),
            ..*cfg
        }
    }
}

impl Default for TddFdmConfig {
    fn default() -> Self {
        Self::reference()
    }
}

/// One channel's share of η: time-weighted spectral efficiencies (bits/s/Hz).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelContribution {
    pub channel: usize,
    pub uplink_uav: Option<UavId>,
    pub downlink_uav: Option<UavId>,
    pub uplink_se: f64,
    pub downlink_se: f64,
    pub uplink_weight: f64,
    pub downlink_weight: f64,
}

impl ChannelContribution {
    pub fn value(&self) -> f64 {
        self.uplink_weight * self.uplink_se + self.downlink_weight * self.downlink_se
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyResult {
    /// bits/s/Hz, normalised per channel.
    pub eta: f64,
    pub per_channel: Vec<ChannelContribution>,
}

impl EfficiencyResult {
    pub fn from_channels(per_channel: Vec<ChannelContribution>) -> Result<Self> {
        if per_channel.is_empty() {
            return Err(Error::EmptyDeployment);
        }
        let eta = eta_of(&per_channel);
        Ok(Self { eta, per_channel })
    }

    pub fn recompute_eta(&self) -> f64 {
        eta_of(&self.per_channel)
    }
}

fn eta_of(per_channel: &[ChannelContribution]) -> f64 {
    per_channel.iter().map(ChannelContribution::value).sum::<f64>() / per_channel.len() as f64
}

fn position_of(uavs: &[(UavId, Position3)], id: UavId) -> Result<Position3> {
    uavs.iter()
        .find(|(u, _)| *u == id)
        .map(|&(_, p)| p)
        .ok_or(Error::UnknownUav(id))
}

/// η of the paired full-duplex scheme for one misalignment snapshot. Every
/// channel carries an interference-free uplink (the GS cancels its own
/// co-channel interference) and a downlink interfered by the pair partner.
/// Draws per channel in channel order: uplink, then downlink.
pub fn proposed_efficiency<R: Rng + ?Sized>(
    gs: Position3,
    uavs: &[(UavId, Position3)],
    plan: &ChannelPlan,
    cfg: &RadioConfig,
    rng: &mut R,
) -> Result<EfficiencyResult> {
    if uavs.is_empty() {
        return Err(Error::EmptyDeployment);
    }
    let mut per_channel = Vec::with_capacity(plan.num_channels);
    for (k, slot) in plan.assignments.iter().enumerate() {
        let uplink_se = match slot.uplink {
            Some(id) => {
                let uav = plan.uav(id, position_of(uavs, id)?)?;
                uplink_link_result(gs, &uav, cfg, rng)?.spectral_efficiency()
            }
            None => 0.0,
        };
        let downlink_se = match (slot.downlink, slot.uplink) {
            (Some(v), Some(i)) => {
                let victim = plan.uav(v, position_of(uavs, v)?)?;
                let interferer = plan.uav(i, position_of(uavs, i)?)?;
                downlink_link_result(gs, &victim, &interferer, cfg, rng)?.spectral_efficiency()
            }
            (Some(v), None) => {
                let victim = plan.uav(v, position_of(uavs, v)?)?;
                let errs = crate::radio::DownlinkErrors::sample(&cfg.misalignment, rng);
                crate::radio::downlink_with_errors(gs, victim.position, None, cfg, &errs)?.spectral_efficiency()
            }
            (None, _) => 0.0,
        };
        per_channel.push(ChannelContribution {
            channel: k,
            uplink_uav: slot.uplink,
            downlink_uav: slot.downlink,
            uplink_se,
            downlink_se,
            uplink_weight: 1.0,
            downlink_weight: 1.0,
        });
    }
    EfficiencyResult::from_channels(per_channel)
}

/// η of TDD-FDM: each UAV owns channel `i` (its roster index) and splits the
/// frame in time between uplink and downlink. Omni radios, no interference.
pub fn tdd_fdm_efficiency(
    gs: Position3,
    uavs: &[(UavId, Position3)],
    tdd: &TddFdmConfig,
    cfg: &RadioConfig,
) -> Result<EfficiencyResult> {
    tdd.check()?;
    if uavs.is_empty() {
        return Err(Error::EmptyDeployment);
    }
    let omni = tdd.omni_radio(cfg);
    let mut per_channel = Vec::with_capacity(uavs.len());
    for (k, &(id, pos)) in uavs.iter().enumerate() {
        let (up, down) = omni_link_se(gs, pos, &omni)?;
        per_channel.push(ChannelContribution {
            channel: k,
            uplink_uav: Some(id),
            downlink_uav: Some(id),
            uplink_se: up,
            downlink_se: down,
            uplink_weight: tdd.uplink_fraction,
            downlink_weight: tdd.downlink_fraction,
        });
    }
    EfficiencyResult::from_channels(per_channel)
}

/// Interference-free `(uplink, downlink)` spectral efficiencies of one UAV
/// with the omni radio configuration.
pub fn omni_link_se(gs: Position3, uav: Position3, omni: &RadioConfig) -> Result<(f64, f64)> {
    let zero = Misalignment::default();
    let up = uplink_with_errors(gs, uav, omni, zero, zero)?;
    let errs = crate::radio::DownlinkErrors::default();
    let down = crate::radio::downlink_with_errors(gs, uav, None, omni, &errs)?;
    Ok((up.spectral_efficiency(), down.spectral_efficiency()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TddSplit {
    pub uplink_fraction: f64,
    pub downlink_fraction: f64,
    /// The demand saturates the frame: the downlink gets all non-guard time.
    pub infeasible: bool,
}

/// Smallest downlink share that carries `required_downlink_bps`, given what
/// the downlink achieves over a whole frame. The rest of the non-guard time
/// goes to the uplink.
pub fn tdd_split_for_demand(
    required_downlink_bps: f64,
    achievable_downlink_bps_fullframe: f64,
    guard_fraction: f64,
) -> Result<TddSplit> {
    if !(required_downlink_bps >= 0.0) || !required_downlink_bps.is_finite() {
        return Err(Error::validation(
            "required_downlink_bps",
            "must be finite and non-negative",
        ));
    }
    if !(achievable_downlink_bps_fullframe > 0.0) {
        return Err(Error::validation("achievable_downlink_bps", "must be positive"));
    }
    if !(0.0..=1.0).contains(&guard_fraction) {
        return Err(Error::validation("guard_fraction", "must be in [0, 1]"));
    }
    let usable = 1.0 - guard_fraction;
    let wanted = required_downlink_bps / achievable_downlink_bps_fullframe;
    let infeasible = wanted >= usable && required_downlink_bps > 0.0;
    let downlink_fraction = wanted.min(usable);
    Ok(TddSplit {
        uplink_fraction: usable - downlink_fraction,
        downlink_fraction,
        infeasible,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AntennaMode {
    /// Reference antennas at both ends, at peak gain.
    Directional,
    /// 0 dBi at both ends.
    Omni,
}

/// Radio configuration used for the uplink power budget: isotropic patterns
/// carrying the mode's peak gains and no pointing error, so the budget is the
/// two-ray path gain times the scalar antenna gains.
pub fn link_budget_config(cfg: &RadioConfig, mode: AntennaMode) -> RadioConfig {
    let (g_gs, g_uav) = match mode {
        AntennaMode::Directional => (cfg.gs_pattern.peak_gain_dbi, cfg.uav_pattern.peak_gain_dbi),
        AntennaMode::Omni => (0.0, 0.0),
    };
    RadioConfig {
        gs_pattern: AntennaPattern::isotropic(g_gs),
        uav_pattern: AntennaPattern::isotropic(g_uav),
        misalignment: MisalignmentModel::new(0.0),
        ..*cfg
    }
}

/// Uplink transmit power (dBm) needed for `target_rate_bps` with no
/// interference, by inverting the Shannon capacity.
pub fn required_uplink_power(
    target_rate_bps: f64,
    gs: Position3,
    uav: Position3,
    mode: AntennaMode,
    cfg: &RadioConfig,
) -> Result<f64> {
    if !(target_rate_bps >= 0.0) || !target_rate_bps.is_finite() {
        return Err(Error::validation("target_rate_bps", "must be finite and non-negative"));
    }
    if target_rate_bps == 0.0 {
        return Ok(POWER_FLOOR_DBM);
    }
    let budget = RadioConfig {
        uav_tx_power_dbm: 0.0,
        ..link_budget_config(cfg, mode)
    };
    let zero = Misalignment::default();
    let link = uplink_with_errors(gs, uav, &budget, zero, zero)?;
    let gain = link.signal_w / dbm_to_watts(0.0);
    let sinr = (target_rate_bps / cfg.bandwidth_hz).exp2() - 1.0;
    let required_dbm = watts_to_dbm(sinr * link.noise_w / gain);
    if !(required_dbm <= MAX_UPLINK_POWER_DBM) {
        return Err(Error::UnreachableTarget {
            required_dbm,
            limit_dbm: MAX_UPLINK_POWER_DBM,
        });
    }
    Ok(required_dbm)
}
