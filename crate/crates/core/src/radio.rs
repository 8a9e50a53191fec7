//! System model: radio configuration, the paired full-duplex channel plan,
//! and per-link SINR / Shannon capacity.
//!
//! Every channel carries the uplink of one UAV and the downlink of its pair
//! partner at the same time. The GS cancels uplink co-channel interference,
//! so only downlinks see interference, and only from the partner's uplink.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::antenna::{boresight_toward, sample_misalignment, AntennaPattern, Misalignment, MisalignmentModel};
use crate::channel::{noise_power, two_ray_gain, NoiseModel, PropagationParams, Terminal};
use crate::error::{Error, Result};
use crate::geometry::Position3;
use crate::units::dbm_to_watts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UavId(pub u32);

impl fmt::Display for UavId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "uav{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    pub bandwidth_hz: f64,
    pub gs_tx_power_dbm: f64,
    pub uav_tx_power_dbm: f64,
    pub gs_pattern: AntennaPattern,
    pub uav_pattern: AntennaPattern,
    pub noise: NoiseModel,
    pub prop: PropagationParams,
    pub misalignment: MisalignmentModel,
}

impl RadioConfig {
    /// Link parameters of the reference system: 5.7 GHz, 10 MHz channels,
    /// GS 11 dBm / 22 dBi (58° × 4°), UAV 0 dBm / 15 dBi (36° × 36°),
    /// -174 dBm/Hz with a 5 dB noise figure, R = -1, 3° pointing error.
    pub fn reference() -> Self {
        Self {
            bandwidth_hz: 10e6,
            gs_tx_power_dbm: 11.0,
            uav_tx_power_dbm: 0.0,
            gs_pattern: AntennaPattern::new(22.0, 58.0, 4.0, -50.0),
            uav_pattern: AntennaPattern::new(15.0, 36.0, 36.0, -50.0),
            noise: NoiseModel {
                density_dbm_per_hz: -174.0,
                noise_figure_db: 5.0,
            },
            prop: PropagationParams::new(5.7e9, -1.0),
            misalignment: MisalignmentModel::new(3.0),
        }
    }

    pub fn noise_w(&self) -> Result<f64> {
        noise_power(self.bandwidth_hz, &self.noise)
    }

    pub fn without_misalignment(mut self) -> Self {
        self.misalignment = MisalignmentModel::new(0.0);
        self
    }
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self::reference()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uav {
    pub id: UavId,
    pub position: Position3,
    pub uplink_channel: usize,
    pub downlink_channel: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ChannelAssignment {
    pub uplink: Option<UavId>,
    pub downlink: Option<UavId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelPlan {
    pub num_channels: usize,
    /// Indexed by channel.
    pub assignments: Vec<ChannelAssignment>,
    by_uav: BTreeMap<UavId, (usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkDirection {
    Downlink,
    Uplink,
}

impl ChannelPlan {
    /// `(uplink_channel, downlink_channel)` of a UAV.
    pub fn channels_of(&self, id: UavId) -> Result<(usize, usize)> {
        self.by_uav.get(&id).copied().ok_or(Error::UnknownUav(id))
    }

    pub fn uav(&self, id: UavId, position: Position3) -> Result<Uav> {
        let (up, down) = self.channels_of(id)?;
        Ok(Uav {
            id,
            position,
            uplink_channel: up,
            downlink_channel: down,
        })
    }

    pub fn uav_ids(&self) -> impl Iterator<Item = UavId> + '_ {
        self.by_uav.keys().copied()
    }

    /// Verifies the channel reuse invariants.
    pub fn check(&self) -> std::result::Result<(), String> {
        if self.assignments.len() != self.num_channels {
            return Err("assignment table length differs from channel count".into());
        }
        for (&id, &(up, down)) in &self.by_uav {
            if up == down {
                return Err(format!("{id} uses channel {up} both ways"));
            }
            if self.assignments[up].uplink != Some(id) || self.assignments[down].downlink != Some(id) {
                return Err(format!("{id} missing from assignment table"));
            }
            let partner = self.assignments[down]
                .uplink
                .ok_or_else(|| format!("{id} downlink channel has no uplink user"))?;
            let (p_up, p_down) = self.by_uav[&partner];
            if p_up != down || p_down != up {
                return Err(format!("{id} and {partner} are not mirrored"));
            }
        }
        Ok(())
    }
}

/// Pairs consecutive UAVs `(2m, 2m+1)` onto channels `(2m, 2m+1)`: the first
/// member downlinks on `2m` and uplinks on `2m+1`, the second the reverse.
pub fn pair_channels(uav_ids: &[UavId], num_channels: usize) -> Result<ChannelPlan> {
    if !uav_ids.len().is_multiple_of(2) {
        return Err(Error::UnpairedUav(uav_ids.len()));
    }
    if num_channels < uav_ids.len() {
        return Err(Error::InsufficientChannels {
            needed: uav_ids.len(),
            available: num_channels,
        });
    }
    let mut assignments = vec![ChannelAssignment::default(); num_channels];
    let mut by_uav = BTreeMap::new();
    for (m, pair) in uav_ids.chunks_exact(2).enumerate() {
        let (first, second) = (pair[0], pair[1]);
        let (c0, c1) = (2 * m, 2 * m + 1);
        assignments[c0] = ChannelAssignment {
            uplink: Some(second),
            downlink: Some(first),
        };
        assignments[c1] = ChannelAssignment {
            uplink: Some(first),
            downlink: Some(second),
        };
        if by_uav.insert(first, (c1, c0)).is_some() {
            return Err(Error::DuplicateUav(first));
        }
        if by_uav.insert(second, (c0, c1)).is_some() {
            return Err(Error::DuplicateUav(second));
        }
    }
    Ok(ChannelPlan {
        num_channels,
        assignments,
        by_uav,
    })
}

/// The UAV whose transmission shares the victim's receive channel: for a
/// downlink victim, the uplink user of its downlink channel, and vice versa.
pub fn co_channel_interferer(plan: &ChannelPlan, victim: UavId, direction: LinkDirection) -> Result<UavId> {
    let (up, down) = plan.channels_of(victim)?;
    let slot = match direction {
        LinkDirection::Downlink => plan.assignments[down].uplink,
        LinkDirection::Uplink => plan.assignments[up].downlink,
    };
    slot.ok_or(Error::UnknownUav(victim))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkResult {
    pub signal_w: f64,
    pub interference_w: f64,
    pub noise_w: f64,
    pub sinr: f64,
    pub capacity_bps: f64,
}

impl LinkResult {
    pub fn new(signal_w: f64, interference_w: f64, noise_w: f64, bandwidth_hz: f64) -> Result<Self> {
        let sinr = signal_w / (noise_w + interference_w);
        Ok(Self {
            signal_w,
            interference_w,
            noise_w,
            sinr,
            capacity_bps: capacity(bandwidth_hz, sinr)?,
        })
    }

    /// `log2(1 + sinr)`, bits/s/Hz.
    pub fn spectral_efficiency(&self) -> f64 {
        (1.0 + self.sinr).log2()
    }
}

/// Shannon capacity `B · log2(1 + sinr)`.
pub fn capacity(bandwidth_hz: f64, sinr: f64) -> Result<f64> {
    if !(sinr >= 0.0) {
        return Err(Error::NegativeSinr(sinr));
    }
    Ok(bandwidth_hz * sinr.ln_1p() / std::f64::consts::LN_2)
}

/// Pointing errors for one downlink evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DownlinkErrors {
    pub gs: Misalignment,
    pub victim: Misalignment,
    pub interferer: Misalignment,
}

impl DownlinkErrors {
    /// Draws GS, victim and interferer errors in that order.
    pub fn sample<R: Rng + ?Sized>(model: &MisalignmentModel, rng: &mut R) -> Self {
        let gs = sample_misalignment(model, rng);
        let victim = sample_misalignment(model, rng);
        let interferer = sample_misalignment(model, rng);
        Self { gs, victim, interferer }
    }
}

/// Interference power received at a UAV at `victim` (boresighted at the GS)
/// from a UAV uplink at `interferer` (also boresighted at the GS).
pub fn uplink_interference_w(
    gs: Position3,
    victim: Position3,
    interferer: Position3,
    tx_power_dbm: f64,
    cfg: &RadioConfig,
    victim_err: Misalignment,
    interferer_err: Misalignment,
) -> Result<f64> {
    let tx = Terminal {
        position: interferer,
        pointing: boresight_toward(interferer, gs, interferer_err)?,
        pattern: &cfg.uav_pattern,
    };
    let rx = Terminal {
        position: victim,
        pointing: boresight_toward(victim, gs, victim_err)?,
        pattern: &cfg.uav_pattern,
    };
    Ok(dbm_to_watts(tx_power_dbm) * two_ray_gain(&tx, &rx, &cfg.prop)?)
}

/// Downlink to `victim` with explicit pointing errors. `interferer` is the
/// co-channel uplink transmitter, if any.
pub fn downlink_with_errors(
    gs: Position3,
    victim: Position3,
    interferer: Option<Position3>,
    cfg: &RadioConfig,
    errs: &DownlinkErrors,
) -> Result<LinkResult> {
    let tx = Terminal {
        position: gs,
        pointing: boresight_toward(gs, victim, errs.gs)?,
        pattern: &cfg.gs_pattern,
    };
    let rx = Terminal {
        position: victim,
        pointing: boresight_toward(victim, gs, errs.victim)?,
        pattern: &cfg.uav_pattern,
    };
    let signal_w = dbm_to_watts(cfg.gs_tx_power_dbm) * two_ray_gain(&tx, &rx, &cfg.prop)?;
    let interference_w = match interferer {
        Some(p) => uplink_interference_w(gs, victim, p, cfg.uav_tx_power_dbm, cfg, errs.victim, errs.interferer)?,
        None => 0.0,
    };
    LinkResult::new(signal_w, interference_w, cfg.noise_w()?, cfg.bandwidth_hz)
}

/// Downlink of `victim`, interfered by its pair partner's uplink. Pointing
/// errors for all three antennas are drawn from `rng`.
pub fn downlink_link_result<R: Rng + ?Sized>(
    gs_pos: Position3,
    victim: &Uav,
    interferer: &Uav,
    cfg: &RadioConfig,
    rng: &mut R,
) -> Result<LinkResult> {
    if interferer.uplink_channel != victim.downlink_channel || interferer.id == victim.id {
        return Err(Error::NotPairPartners {
            victim: victim.id,
            interferer: interferer.id,
        });
    }
    let errs = DownlinkErrors::sample(&cfg.misalignment, rng);
    downlink_with_errors(gs_pos, victim.position, Some(interferer.position), cfg, &errs)
}

/// Uplink with explicit pointing errors. Co-channel interference at the GS
/// is assumed cancelled.
pub fn uplink_with_errors(
    gs: Position3,
    uav: Position3,
    cfg: &RadioConfig,
    gs_err: Misalignment,
    uav_err: Misalignment,
) -> Result<LinkResult> {
    let tx = Terminal {
        position: uav,
        pointing: boresight_toward(uav, gs, uav_err)?,
        pattern: &cfg.uav_pattern,
    };
    let rx = Terminal {
        position: gs,
        pointing: boresight_toward(gs, uav, gs_err)?,
        pattern: &cfg.gs_pattern,
    };
    let signal_w = dbm_to_watts(cfg.uav_tx_power_dbm) * two_ray_gain(&tx, &rx, &cfg.prop)?;
    LinkResult::new(signal_w, 0.0, cfg.noise_w()?, cfg.bandwidth_hz)
}

/// Uplink of `uav` to the GS. Draws GS then UAV pointing errors, the same
/// order [`downlink_link_result`] uses.
pub fn uplink_link_result<R: Rng + ?Sized>(
    gs_pos: Position3,
    uav: &Uav,
    cfg: &RadioConfig,
    rng: &mut R,
) -> Result<LinkResult> {
    let gs_err = sample_misalignment(&cfg.misalignment, rng);
    let uav_err = sample_misalignment(&cfg.misalignment, rng);
    uplink_with_errors(gs_pos, uav.position, cfg, gs_err, uav_err)
}
