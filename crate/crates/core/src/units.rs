//! Decibel conversions. Everything inside the simulator is linear; these are
//! only used at configuration and reporting boundaries.

pub const SPEED_OF_LIGHT_MPS: f64 = 299_792_458.0;

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm) * 1e-3
}

#[inline]
pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w * 1e3)
}
