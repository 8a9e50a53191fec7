//! Flat-earth geometry: positions, bearings and the image-method reflection
//! path used by the two-ray channel.
//!
//! The ground is the plane `z = 0`; `z` is height above it. Azimuth is
//! measured counter-clockwise from +x in the horizontal plane, elevation from
//! the horizontal plane.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Position3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn offset(self, dx: f64, dy: f64, dz: f64) -> Self {
        Self::new(self.x + dx, self.y + dy, self.z + dz)
    }
}

impl From<[f64; 3]> for Position3 {
    fn from([x, y, z]: [f64; 3]) -> Self {
        Self { x, y, z }
    }
}

impl From<Position3> for [f64; 3] {
    fn from(p: Position3) -> Self {
        [p.x, p.y, p.z]
    }
}

/// Direction in degrees. Azimuth in `[-180, 180)`, elevation in `[-90, 90]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Bearing {
    pub azimuth: f64,
    pub elevation: f64,
}

impl Bearing {
    /// Builds a bearing, wrapping azimuth and clamping elevation into range.
    pub fn new(azimuth: f64, elevation: f64) -> Self {
        Self {
            azimuth: wrap_deg(azimuth),
            elevation: elevation.clamp(-90.0, 90.0),
        }
    }

    /// Angular offsets `(az, el)` of `self` relative to `reference`, with the
    /// azimuth difference wrapped to `[-180, 180)`.
    pub fn offset_from(&self, reference: &Bearing) -> (f64, f64) {
        (
            wrap_deg(self.azimuth - reference.azimuth),
            self.elevation - reference.elevation,
        )
    }
}

/// Wraps an angle in degrees to `[-180, 180)`.
pub fn wrap_deg(angle: f64) -> f64 {
    let w = (angle + 180.0).rem_euclid(360.0) - 180.0;
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if w >= 180.0 {
        w - 360.0
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayGeometry {
    pub d_los: f64,
    pub d_refl: f64,
    /// `d_refl - d_los`, from `d_refl² - d_los² = 4 z_t z_r` to avoid cancellation.
    pub path_difference: f64,
    pub reflection_point: Position3,
    pub tx_los_bearing: Bearing,
    pub tx_refl_bearing: Bearing,
    pub rx_los_bearing: Bearing,
    pub rx_refl_bearing: Bearing,
}

pub fn distance(a: Position3, b: Position3) -> f64 {
    let (dx, dy, dz) = (b.x - a.x, b.y - a.y, b.z - a.z);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

pub fn mirror_across_ground(p: Position3) -> Position3 {
    Position3::new(p.x, p.y, -p.z)
}

pub fn bearing(from: Position3, to: Position3) -> Result<Bearing> {
    let (dx, dy, dz) = (to.x - from.x, to.y - from.y, to.z - from.z);
    if dx == 0.0 && dy == 0.0 && dz == 0.0 {
        return Err(Error::DegenerateBearing);
    }
    let horizontal = dx.hypot(dy);
    Ok(Bearing::new(
        dy.atan2(dx).to_degrees(),
        dz.atan2(horizontal).to_degrees(),
    ))
}

/// LOS and ground-reflected ray geometry between a transmitter and receiver.
///
/// Reflected-ray bearings are taken toward the mirror image of the opposite
/// endpoint, which is the same direction as toward the specular point but
/// stays defined when one endpoint sits on the ground.
pub fn reflection_geometry(p_t: Position3, p_r: Position3) -> Result<RayGeometry> {
    if p_t.z == 0.0 && p_r.z == 0.0 {
        return Err(Error::DegenerateGeometry);
    }
    let image_r = mirror_across_ground(p_r);
    let image_t = mirror_across_ground(p_t);
    let s = p_t.z / (p_t.z + p_r.z);
    let reflection_point = Position3::new(p_t.x + s * (image_r.x - p_t.x), p_t.y + s * (image_r.y - p_t.y), 0.0);
    let d_los = distance(p_t, p_r);
    let d_refl = distance(p_t, image_r);
    Ok(RayGeometry {
        d_los,
        d_refl,
        path_difference: 4.0 * p_t.z * p_r.z / (d_refl + d_los),
        reflection_point,
        tx_los_bearing: bearing(p_t, p_r)?,
        tx_refl_bearing: bearing(p_t, image_r)?,
        rx_los_bearing: bearing(p_r, p_t)?,
        rx_refl_bearing: bearing(p_r, image_t)?,
    })
}
