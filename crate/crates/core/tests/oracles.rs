mod support;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uavfd_core::antenna::{boresight_toward, AntennaPattern, Misalignment, PatternShape};
use uavfd_core::channel::{two_ray_gain, PropagationParams, Terminal};
use uavfd_core::efficiency::{tdd_fdm_efficiency, TddFdmConfig};
use uavfd_core::geometry::Position3;
use uavfd_core::radio::{uplink_with_errors, RadioConfig, UavId};

fn oracle_antenna(p: &AntennaPattern) -> support::Antenna {
    support::Antenna {
        peak_dbi: p.peak_gain_dbi,
        hpbw_h: p.hpbw_h_deg,
        hpbw_v: p.hpbw_v_deg,
        floor_db: p.floor_db,
        envelope: p.shape == PatternShape::Sinc2Envelope,
    }
}

#[test]
fn envelope_constants_agree() {
    let (level, edge, plateau) = support::envelope_constants();
    assert!((level - uavfd_core::antenna::FIRST_SIDELOBE_LEVEL).abs() < 1e-15);
    assert!((edge - uavfd_core::antenna::ENVELOPE_MAIN_LOBE_EDGE).abs() < 1e-12);
    assert!((plateau - uavfd_core::antenna::ENVELOPE_PLATEAU_EDGE).abs() < 1e-12);
}

#[test]
fn two_ray_matches_oracle_on_random_configurations() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2a7);
    let mut worst: f64 = 0.0;
    for case in 0..1000 {
        let pos = |rng: &mut ChaCha8Rng| {
            Position3::new(
                rng.random_range(-6000.0..6000.0),
                rng.random_range(-6000.0..6000.0),
                rng.random_range(1.0..300.0),
            )
        };
        let (a, b) = (pos(&mut rng), pos(&mut rng));
        let shape = if rng.random_bool(0.5) {
            PatternShape::Sinc2
        } else {
            PatternShape::Sinc2Envelope
        };
        let pat = |rng: &mut ChaCha8Rng| {
            AntennaPattern::new(
                rng.random_range(0.0..25.0),
                rng.random_range(2.0..120.0),
                rng.random_range(2.0..120.0),
                rng.random_range(-60.0..-20.0),
            )
            .with_shape(shape)
        };
        let (pa, pb) = (pat(&mut rng), pat(&mut rng));
        let mis = |rng: &mut ChaCha8Rng| Misalignment {
            az: rng.random_range(-10.0..10.0),
            el: rng.random_range(-10.0..10.0),
        };
        let tx = Terminal {
            position: a,
            pointing: boresight_toward(a, b, mis(&mut rng)).unwrap(),
            pattern: &pa,
        };
        let rx = Terminal {
            position: b,
            pointing: boresight_toward(b, a, mis(&mut rng)).unwrap(),
            pattern: &pb,
        };
        let freq = rng.random_range(1e9..10e9);
        let refl = rng.random_range(-1.0..=1.0);
        let got = two_ray_gain(&tx, &rx, &PropagationParams::new(freq, refl)).unwrap();

        let end = |t: &Terminal| support::End {
            pos: [t.position.x, t.position.y, t.position.z],
            boresight: (t.pointing.boresight.azimuth, t.pointing.boresight.elevation),
            antenna: oracle_antenna(t.pattern),
        };
        let want = support::two_ray(&end(&tx), &end(&rx), freq, refl);
        let geom = uavfd_core::geometry::reflection_geometry(a, b).unwrap();
        let seg = support::specular_path([a.x, a.y, a.z], [b.x, b.y, b.z]);
        assert!((geom.d_refl - seg).abs() / seg < 1e-12);
        let rel = ((got - want) / want).abs();
        worst = worst.max(rel);
        assert!(rel < 1e-12, "case {case}: {got} vs {want} (rel {rel:e})");
    }
    eprintln!("two-ray oracle: worst relative error {worst:e}");
}

#[test]
fn uplink_capacity_matches_link_budget_oracle() {
    let cfg = RadioConfig::reference();
    let gs = Position3::new(0., 0., 10.);
    let uav = Position3::new(5000., 0., 100.);
    let zero = Misalignment::default();
    let link = uplink_with_errors(gs, uav, &cfg, zero, zero).unwrap();

    let (az, el) = support::direction([5000., 0., 100.], [0., 0., 10.]);
    let (gs_az, gs_el) = support::direction([0., 0., 10.], [5000., 0., 100.]);
    let tx = support::End {
        pos: [5000., 0., 100.],
        boresight: (az, el),
        antenna: oracle_antenna(&cfg.uav_pattern),
    };
    let rx = support::End {
        pos: [0., 0., 10.],
        boresight: (gs_az, gs_el),
        antenna: oracle_antenna(&cfg.gs_pattern),
    };
    let s = 1e-3 * support::two_ray(&tx, &rx, 5.7e9, -1.0);
    let n = support::noise_w(10e6, -174.0, 5.0);
    let c = support::shannon(10e6, s, 0.0, n);
    assert!((link.capacity_bps - c).abs() / c < 1e-12);
    assert!((link.noise_w - n).abs() / n < 1e-12);
    // near boresight: SNR ≈ P + 37 dB − path loss + 99 dB, within the fading swing
    let fs_db = 20.0 * (support::C / 5.7e9 / (4.0 * std::f64::consts::PI * 5000.81)).log10();
    let snr_db = 10.0 * link.sinr.log10();
    assert!(
        (snr_db - (0.0 + 37.0 + fs_db + 99.0)).abs() < 7.0,
        "{snr_db} vs {}",
        37.0 + fs_db + 99.0
    );
}

#[test]
fn tdd_efficiency_matches_time_form_oracle() {
    let cfg = RadioConfig::reference();
    let gs = Position3::new(0., 0., 10.);
    let uavs = [
        (UavId(0), Position3::new(5000., 0., 100.)),
        (UavId(1), Position3::new(4800., 0., 100.)),
    ];
    for (u, d) in [(0.4, 0.4), (0.1, 0.7), (0.8, 0.0)] {
        let tdd = TddFdmConfig::reference().with_split(u, d);
        let got = tdd_fdm_efficiency(gs, &uavs, &tdd, &cfg).unwrap().eta;

        let n = support::noise_w(10e6, -174.0, 5.0);
        let mut sum = 0.0;
        for (_, p) in uavs {
            let q = [p.x, p.y, p.z];
            let g = [0., 0., 10.];
            // omni, 0 dBi at both ends: two-ray through the image point
            let flat = |a: [f64; 3], b: [f64; 3]| {
                let lambda = support::C / 5.7e9;
                let img = [b[0], b[1], -b[2]];
                let dl = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
                let dr = ((a[0] - img[0]).powi(2) + (a[1] - img[1]).powi(2) + (a[2] - img[2]).powi(2)).sqrt();
                let phi = support::phase(a, b, 5.7e9);
                let re = 1.0 / dl - phi.cos() / dr;
                let im = phi.sin() / dr;
                (lambda / (4.0 * std::f64::consts::PI)).powi(2) * (re * re + im * im)
            };
            let su = 0.1 * flat(q, g);
            let sd = 0.1 * flat(g, q);
            sum += u * (1.0 + su / n).log2() + d * (1.0 + sd / n).log2();
        }
        let want = sum / uavs.len() as f64;
        assert!((got - want).abs() / want < 1e-12, "{got} vs {want}");
    }
}
