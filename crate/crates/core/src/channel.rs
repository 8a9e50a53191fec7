//! Two-ray ground-reflection channel with direction-dependent antenna gains.

use std::f64::consts::PI;

use twofloat::TwoFloat;

use crate::antenna::{AntennaPattern, Pointing};
use crate::error::{Error, Result};
use crate::geometry::{reflection_geometry, Position3, RayGeometry};
use crate::units::{dbm_to_watts, SPEED_OF_LIGHT_MPS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationParams {
    pub frequency_hz: f64,
    pub wavelength_m: f64,
    pub reflection_coefficient: f64,
}

impl PropagationParams {
    pub fn new(frequency_hz: f64, reflection_coefficient: f64) -> Self {
        Self {
            frequency_hz,
            wavelength_m: SPEED_OF_LIGHT_MPS / frequency_hz,
            reflection_coefficient,
        }
    }

    pub fn with_reflection(mut self, reflection_coefficient: f64) -> Self {
        self.reflection_coefficient = reflection_coefficient;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub density_dbm_per_hz: f64,
    pub noise_figure_db: f64,
}

/// One end of a link: where it is, where it points and what it radiates with.
#[derive(Debug, Clone, Copy)]
pub struct Terminal<'a> {
    pub position: Position3,
    pub pointing: Pointing,
    pub pattern: &'a AntennaPattern,
}

/// Combined LOS and reflected-ray antenna gains `(G^L, G^R)`.
fn ray_gains(geom: &RayGeometry, tx: &Terminal, rx: &Terminal) -> (f64, f64) {
    let g_los = tx.pointing.gain_toward(tx.pattern, &geom.tx_los_bearing)
        * rx.pointing.gain_toward(rx.pattern, &geom.rx_los_bearing);
    let g_refl = tx.pointing.gain_toward(tx.pattern, &geom.tx_refl_bearing)
        * rx.pointing.gain_toward(rx.pattern, &geom.rx_refl_bearing);
    (g_los, g_refl)
}

fn los_geometry(tx: &Terminal, rx: &Terminal) -> Result<RayGeometry> {
    if tx.position == rx.position {
        return Err(Error::CoincidentPoints);
    }
    reflection_geometry(tx.position, rx.position)
}

/// `Δφ` reduced to `[-π, π]`. The path difference spans up to ~10⁴ wavelengths,
/// so it is formed in double-double and whole cycles are dropped before
/// rounding back to `f64`.
pub fn reflection_phase(p_t: Position3, p_r: Position3, frequency_hz: f64) -> f64 {
    let dd = TwoFloat::from;
    let sq = |u: f64, v: f64| {
        let d = dd(u) - dd(v);
        d * d
    };
    let horizontal = sq(p_t.x, p_r.x) + sq(p_t.y, p_r.y);
    let rise = dd(p_t.z) + dd(p_r.z);
    let d_los = (horizontal + sq(p_t.z, p_r.z)).sqrt();
    let d_refl = (horizontal + rise * rise).sqrt();
    // divide by f64 only: twofloat's dd/dd quotient is not correctly rounded
    let cycles = (d_refl - d_los) * frequency_hz / SPEED_OF_LIGHT_MPS;
    2.0 * PI * (cycles - cycles.round()).hi()
}

/// Total linear power gain of the LOS plus ground-reflected ray:
///
/// `(λ/4π)² · | √G^L / D^L + R · √G^R · e^{-jΔφ} / D^R |²`,
/// with `Δφ = 2π (D^R − D^L) / λ`.
pub fn two_ray_gain(tx: &Terminal, rx: &Terminal, params: &PropagationParams) -> Result<f64> {
    let geom = los_geometry(tx, rx)?;
    let (g_los, g_refl) = ray_gains(&geom, tx, rx);
    let lambda = params.wavelength_m;
    let dphi = reflection_phase(tx.position, rx.position, params.frequency_hz);
    let a_los = g_los.sqrt() / geom.d_los;
    let a_refl = params.reflection_coefficient * g_refl.sqrt() / geom.d_refl;
    // e^{-jΔφ} = cos Δφ − j sin Δφ
    let re = a_los + a_refl * dphi.cos();
    let im = -a_refl * dphi.sin();
    let scale = lambda / (4.0 * PI);
    Ok(scale * scale * (re * re + im * im))
}

/// Phase-averaged two-ray power: the two rays added incoherently. This is the
/// local mean of [`two_ray_gain`] over the interference fringes.
pub fn mean_two_ray_gain(tx: &Terminal, rx: &Terminal, params: &PropagationParams) -> Result<f64> {
    let geom = los_geometry(tx, rx)?;
    let (g_los, g_refl) = ray_gains(&geom, tx, rx);
    let r = params.reflection_coefficient;
    let scale = params.wavelength_m / (4.0 * PI);
    Ok(scale * scale * (g_los / (geom.d_los * geom.d_los) + r * r * g_refl / (geom.d_refl * geom.d_refl)))
}

/// LOS-only (free-space) gain `(λ / 4π D^L)² · G^L`.
pub fn free_space_gain(tx: &Terminal, rx: &Terminal, params: &PropagationParams) -> Result<f64> {
    let geom = los_geometry(tx, rx)?;
    let (g_los, _) = ray_gains(&geom, tx, rx);
    // same operation order as two_ray_gain so that R = 0 agrees bit for bit
    let a_los = g_los.sqrt() / geom.d_los;
    let scale = params.wavelength_m / (4.0 * PI);
    Ok(scale * scale * (a_los * a_los))
}

/// Thermal noise plus receiver noise figure over `bandwidth_hz`, in watts.
pub fn noise_power(bandwidth_hz: f64, noise: &NoiseModel) -> Result<f64> {
    if !(bandwidth_hz > 0.0) {
        return Err(Error::InvalidBandwidth(bandwidth_hz));
    }
    let dbm = noise.density_dbm_per_hz + 10.0 * bandwidth_hz.log10() + noise.noise_figure_db;
    Ok(dbm_to_watts(dbm))
}
