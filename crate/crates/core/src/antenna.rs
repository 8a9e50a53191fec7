//! Directional antenna model: separable azimuth × elevation power pattern,
//! boresight pointing and Gaussian pointing error.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{bearing, Bearing, Position3};
use crate::units::db_to_linear;

/// Scale so that `sinc²(k·θ)` drops to one half at `θ = hpbw / 2`.
pub const SINC_HPBW_FACTOR: f64 = 0.8858;

/// First side-lobe peak of `sinc²(x)`: `tan(πx) = πx` near `x = 1.4303`.
pub const FIRST_SIDELOBE_LEVEL: f64 = 0.047_190_449_225_811_28;
/// Main-lobe abscissa where `sinc²(x)` has fallen to the side-lobe level.
pub const ENVELOPE_MAIN_LOBE_EDGE: f64 = 0.812_825_242_105_507_3;
/// Abscissa where the `1/(πx)²` side-lobe envelope meets the side-lobe level.
pub const ENVELOPE_PLATEAU_EDGE: f64 = 1.465_288_265_011_575_7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternShape {
    /// Exact `sinc²` per plane, including its nulls (clamped by the floor).
    Sinc2,
    /// `sinc²` main lobe; beyond it the side-lobe peak envelope: flat at the
    /// first side-lobe level, then decaying as `1/(πx)²`. No nulls.
    #[default]
    Sinc2Envelope,
    /// Direction-independent gain.
    Isotropic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPattern {
    pub peak_gain_dbi: f64,
    pub hpbw_h_deg: f64,
    pub hpbw_v_deg: f64,
    /// Clamp level relative to the peak, in dB (negative).
    pub floor_db: f64,
    pub shape: PatternShape,
}

impl AntennaPattern {
    pub fn new(peak_gain_dbi: f64, hpbw_h_deg: f64, hpbw_v_deg: f64, floor_db: f64) -> Self {
        Self {
            peak_gain_dbi,
            hpbw_h_deg,
            hpbw_v_deg,
            floor_db,
            shape: PatternShape::default(),
        }
    }

    pub fn isotropic(gain_dbi: f64) -> Self {
        Self {
            peak_gain_dbi: gain_dbi,
            hpbw_h_deg: 360.0,
            hpbw_v_deg: 360.0,
            floor_db: -50.0,
            shape: PatternShape::Isotropic,
        }
    }

    pub fn with_shape(mut self, shape: PatternShape) -> Self {
        self.shape = shape;
        self
    }

    pub fn peak_linear(&self) -> f64 {
        db_to_linear(self.peak_gain_dbi)
    }

    /// Checks the pattern invariants, returning a message for the first one
    /// that fails.
    pub fn check(&self) -> std::result::Result<(), String> {
        for (name, bw) in [("hpbw_h_deg", self.hpbw_h_deg), ("hpbw_v_deg", self.hpbw_v_deg)] {
            if !(bw > 0.0 && bw <= 360.0) {
                return Err(format!("{name} must be in (0, 360], got {bw}"));
            }
        }
        if !(self.floor_db < -3.0) {
            return Err(format!("floor_db must be below -3 dB, got {}", self.floor_db));
        }
        if !self.peak_gain_dbi.is_finite() {
            return Err("peak gain must be finite".into());
        }
        Ok(())
    }
}

/// Relative power pattern of one plane at `offset_deg` from boresight.
pub fn plane_pattern(shape: PatternShape, offset_deg: f64, hpbw_deg: f64) -> f64 {
    let x = (SINC_HPBW_FACTOR * offset_deg / hpbw_deg).abs();
    match shape {
        PatternShape::Isotropic => 1.0,
        PatternShape::Sinc2 => sinc2(x),
        PatternShape::Sinc2Envelope => {
            if x <= ENVELOPE_MAIN_LOBE_EDGE {
                sinc2(x)
            } else if x <= ENVELOPE_PLATEAU_EDGE {
                FIRST_SIDELOBE_LEVEL
            } else {
                let px = std::f64::consts::PI * x;
                1.0 / (px * px)
            }
        }
    }
}

// in-range angles pass through untouched so the pattern stays exactly even
fn wrap_if_needed(deg: f64) -> f64 {
    if (-180.0..180.0).contains(&deg) {
        deg
    } else {
        crate::geometry::wrap_deg(deg)
    }
}

fn sinc2(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let px = std::f64::consts::PI * x;
    let s = px.sin() / px;
    s * s
}

/// Linear power gain toward a direction offset `(offset_az, offset_el)`
/// degrees from boresight.
pub fn pattern_gain(pattern: &AntennaPattern, offset_az: f64, offset_el: f64) -> f64 {
    let peak = pattern.peak_linear();
    if pattern.shape == PatternShape::Isotropic {
        return peak;
    }
    let az = wrap_if_needed(offset_az);
    let el = wrap_if_needed(offset_el);
    let rel =
        plane_pattern(pattern.shape, az, pattern.hpbw_h_deg) * plane_pattern(pattern.shape, el, pattern.hpbw_v_deg);
    peak * rel.max(db_to_linear(pattern.floor_db))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pointing {
    pub boresight: Bearing,
}

impl Pointing {
    /// Gain of `pattern` mounted with this pointing, toward `direction`.
    pub fn gain_toward(&self, pattern: &AntennaPattern, direction: &Bearing) -> f64 {
        let (az, el) = direction.offset_from(&self.boresight);
        pattern_gain(pattern, az, el)
    }
}

/// Pointing error in degrees, per axis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Misalignment {
    pub az: f64,
    pub el: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MisalignmentModel {
    pub sigma_deg: f64,
}

impl MisalignmentModel {
    pub fn new(sigma_deg: f64) -> Self {
        Self { sigma_deg }
    }
}

pub fn boresight_toward(self_pos: Position3, target: Position3, err: Misalignment) -> Result<Pointing> {
    let b = bearing(self_pos, target)?;
    Ok(Pointing {
        boresight: Bearing::new(b.azimuth + err.az, b.elevation + err.el),
    })
}

/// Two independent zero-mean Gaussian draws (azimuth first).
pub fn sample_misalignment<R: Rng + ?Sized>(model: &MisalignmentModel, rng: &mut R) -> Misalignment {
    if model.sigma_deg == 0.0 {
        return Misalignment::default();
    }
    let normal = Normal::new(0.0, model.sigma_deg).expect("sigma validated non-negative");
    let az = normal.sample(rng);
    let el = normal.sample(rng);
    Misalignment { az, el }
}
