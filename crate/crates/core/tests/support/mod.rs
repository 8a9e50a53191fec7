//! Straight-line reference implementations used as test oracles. They share
//! no code with the crate: geometry goes through the explicit specular point,
//! patterns and constants are recomputed here from their definitions.
#![allow(dead_code)]

use std::f64::consts::PI;

use twofloat::TwoFloat;

pub const C: f64 = 299_792_458.0;

#[derive(Clone, Copy, Debug)]
pub struct Antenna {
    pub peak_dbi: f64,
    pub hpbw_h: f64,
    pub hpbw_v: f64,
    pub floor_db: f64,
    pub envelope: bool,
}

fn sinc_sq(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let s = (PI * x).sin() / (PI * x);
        s * s
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// (side-lobe level, main-lobe edge, plateau edge) of the sinc² envelope.
pub fn envelope_constants() -> (f64, f64, f64) {
    let peak = bisect(|x| (PI * x).tan() - PI * x, 1.3, 1.49);
    let level = sinc_sq(peak);
    let edge = bisect(|x| sinc_sq(x) - level, 0.5, 1.0);
    (level, edge, 1.0 / (PI * level.sqrt()))
}

fn plane(a: &Antenna, offset: f64, hpbw: f64, k: (f64, f64, f64)) -> f64 {
    let x = (0.8858 * offset / hpbw).abs();
    if !a.envelope || x <= k.1 {
        sinc_sq(x)
    } else if x <= k.2 {
        k.0
    } else {
        1.0 / (PI * x).powi(2)
    }
}

fn wrap(d: f64) -> f64 {
    let mut w = (d + 180.0) % 360.0;
    if w < 0.0 {
        w += 360.0;
    }
    w - 180.0
}

/// Linear gain toward direction `(az, el)` for boresight `(az0, el0)`.
pub fn gain(a: &Antenna, az0: f64, el0: f64, az: f64, el: f64) -> f64 {
    let k = envelope_constants();
    let rel = plane(a, wrap(az - az0), a.hpbw_h, k) * plane(a, wrap(el - el0), a.hpbw_v, k);
    10f64.powf(a.peak_dbi / 10.0) * rel.max(10f64.powf(a.floor_db / 10.0))
}

pub fn direction(from: [f64; 3], to: [f64; 3]) -> (f64, f64) {
    let (dx, dy, dz) = (to[0] - from[0], to[1] - from[1], to[2] - from[2]);
    (
        dy.atan2(dx).to_degrees(),
        dz.atan2((dx * dx + dy * dy).sqrt()).to_degrees(),
    )
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

pub struct End {
    pub pos: [f64; 3],
    pub boresight: (f64, f64),
    pub antenna: Antenna,
}

/// LOS plus specular ground ray, amplitudes summed with their phase lag.
pub fn two_ray(tx: &End, rx: &End, freq_hz: f64, refl: f64) -> f64 {
    let lambda = C / freq_hz;
    let s = tx.pos[2] / (tx.pos[2] + rx.pos[2]);
    let bounce = [
        tx.pos[0] + s * (rx.pos[0] - tx.pos[0]),
        tx.pos[1] + s * (rx.pos[1] - tx.pos[1]),
        0.0,
    ];
    let d_l = dist(tx.pos, rx.pos);
    let d_r = dist(tx.pos, bounce) + dist(bounce, rx.pos);

    let g = |e: &End, (az, el): (f64, f64)| gain(&e.antenna, e.boresight.0, e.boresight.1, az, el);
    let g_l = g(tx, direction(tx.pos, rx.pos)) * g(rx, direction(rx.pos, tx.pos));
    let g_r = g(tx, direction(tx.pos, bounce)) * g(rx, direction(rx.pos, bounce));

    let phi = phase(tx.pos, rx.pos, freq_hz);
    let re = g_l.sqrt() / d_l + refl * g_r.sqrt() * phi.cos() / d_r;
    let im = -refl * g_r.sqrt() * phi.sin() / d_r;
    (lambda / (4.0 * PI)).powi(2) * (re * re + im * im)
}

/// 2π (D^R − D^L) / λ mod 2π, with every length in double-double so that
/// the whole-cycle count drops out exactly.
pub fn phase(a: [f64; 3], b: [f64; 3], freq_hz: f64) -> f64 {
    let t = |v: [f64; 3]| v.map(TwoFloat::from);
    let (a, b) = (t(a), t(b));
    let len = |p: [TwoFloat; 3], q: [TwoFloat; 3]| {
        let d: Vec<TwoFloat> = (0..3).map(|i| p[i] - q[i]).collect();
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    };
    // the reflected length is stationary in the specular point, so an
    // f64-accurate split ratio is enough
    let s = TwoFloat::from(a[2].hi() / (a[2] + b[2]).hi());
    let zero = TwoFloat::from(0.0);
    let bounce = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]), zero];
    let cycles = (len(a, bounce) + len(bounce, b) - len(a, b)) * freq_hz / C;
    2.0 * PI * (cycles - cycles.round()).hi()
}

/// Reflected path length through the explicit specular point.
pub fn specular_path(tx: [f64; 3], rx: [f64; 3]) -> f64 {
    let s = tx[2] / (tx[2] + rx[2]);
    let bounce = [tx[0] + s * (rx[0] - tx[0]), tx[1] + s * (rx[1] - tx[1]), 0.0];
    dist(tx, bounce) + dist(bounce, rx)
}

/// Shannon capacity from linear signal, interference and noise powers.
pub fn shannon(bw: f64, s: f64, i: f64, n: f64) -> f64 {
    bw * (1.0 + s / (i + n)).log2()
}

/// Thermal noise plus noise figure, watts.
pub fn noise_w(bw: f64, density_dbm_hz: f64, nf_db: f64) -> f64 {
    10f64.powf((density_dbm_hz + 10.0 * bw.log10() + nf_db) / 10.0) / 1000.0
}
