use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uavfd_core::apf::{
    accel_levels, is_admissible, simulate_flight, ApfConfig, Candidate, FlightPlan, MotionLimits, Trajectory, UavState,
};
use uavfd_core::exec::Exec;
use uavfd_core::experiments::{capacity_sweep, mean_std};
use uavfd_core::geometry::{distance, Position3};
use uavfd_core::radio::{co_channel_interferer, pair_channels, LinkDirection, RadioConfig, UavId};
use uavfd_core::scenario::{default_scenario, FlightScenario, MonteCarlo};
use uavfd_core::units::watts_to_dbm;

const GS: Position3 = Position3::new(0., 0., 10.);

fn random_position(rng: &mut ChaCha8Rng, z: std::ops::Range<f64>) -> Position3 {
    Position3::new(
        rng.random_range(1000.0..6000.0),
        rng.random_range(-800.0..800.0),
        rng.random_range(z),
    )
}

fn random_limits(rng: &mut ChaCha8Rng) -> MotionLimits {
    MotionLimits {
        v_max_mps: rng.random_range(2.0..20.0),
        a_max_mps2: rng.random_range(0.5..8.0),
        dt_s: rng.random_range(0.2..2.0),
        min_altitude_m: rng.random_range(0.0..20.0),
    }
}

/// Checks one transition against the kinematic model bit for bit: the new
/// velocity is `clamp(v + a·dt)` for some allowed acceleration, and the new
/// position is `q + v'·dt`.
fn transition_ok(prev: &UavState, next: &UavState, limits: &MotionLimits, levels: usize) -> Result<(), String> {
    let accs = accel_levels(limits.a_max_mps2, levels);
    for k in 0..3 {
        let v = next.velocity[k];
        if v.abs() > limits.v_max_mps {
            return Err(format!("axis {k}: |v| = {} > {}", v.abs(), limits.v_max_mps));
        }
        let reachable = accs
            .iter()
            .any(|a| (prev.velocity[k] + a * limits.dt_s).clamp(-limits.v_max_mps, limits.v_max_mps) == v);
        if !reachable {
            return Err(format!("axis {k}: v {} not reachable from {}", v, prev.velocity[k]));
        }
        // v' is exact per the model; re-deriving v' - v rounds at the scale of |v|
        let dv = (v - prev.velocity[k]).abs();
        let slack = 2.0 * f64::EPSILON * v.abs().max(prev.velocity[k].abs());
        if dv > limits.a_max_mps2 * limits.dt_s + slack {
            return Err(format!("axis {k}: |dv| = {dv} exceeds a_max dt"));
        }
    }
    let p = prev.position;
    let expect = Position3::new(
        p.x + next.velocity[0] * limits.dt_s,
        p.y + next.velocity[1] * limits.dt_s,
        p.z + next.velocity[2] * limits.dt_s,
    );
    if expect != next.position {
        return Err(format!("position {:?} != {:?}", next.position, expect));
    }
    Ok(())
}

#[test]
fn apf_motion_model_holds_exactly_on_random_scenarios() {
    let cfg = RadioConfig::reference();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut steps = 0;
    for scenario in 0..100 {
        let limits = random_limits(&mut rng);
        let floor = limits.min_altitude_m;
        let plan = FlightPlan {
            start: random_position(&mut rng, floor + 5.0..200.0),
            goal: random_position(&mut rng, floor + 5.0..200.0),
            hover: Some(random_position(&mut rng, 20.0..200.0)),
            max_steps: 40,
        };
        let apf = ApfConfig {
            omega: rng.random_range(0.05..2.0),
            ..ApfConfig::default()
        };
        let control = rng.random_bool(0.8);
        let traj = simulate_flight(&plan, control, GS, &cfg, &limits, &apf, scenario).unwrap();
        for w in traj.points.windows(2) {
            let (a, b) = (&w[0].state, &w[1].state);
            if let Err(e) = transition_ok(a, b, &limits, apf.accel_levels) {
                panic!("scenario {scenario}, step {}: {e}", w[1].step);
            }
            let c = Candidate {
                index: 0,
                acceleration: [0.0; 3],
                state: *b,
            };
            assert!(
                is_admissible(&c, &limits),
                "scenario {scenario}: altitude floor violated"
            );
            steps += 1;
        }
    }
    assert!(steps > 1000);
}

/// Distance to goal falls every step until within `reach` of it.
fn closes_on_goal(limits: &MotionLimits, reach: f64, rng: &mut ChaCha8Rng, scenario: u64) {
    let cfg = RadioConfig::reference();
    let floor = limits.min_altitude_m;
    let goal = random_position(rng, floor + 5.0..200.0);
    let plan = FlightPlan {
        start: random_position(rng, floor + 5.0..200.0),
        goal,
        hover: Some(random_position(rng, 20.0..200.0)),
        max_steps: 60,
    };
    let apf = ApfConfig {
        omega: rng.random_range(0.05..2.0),
        ..ApfConfig::default()
    };
    let traj = simulate_flight(&plan, false, GS, &cfg, limits, &apf, scenario).unwrap();
    for w in traj.points.windows(2) {
        let (d0, d1) = (distance(w[0].state.position, goal), distance(w[1].state.position, goal));
        if d0 <= reach {
            break;
        }
        assert!(
            d1 < d0,
            "scenario {scenario}, step {}: {d0} -> {d1} ({limits:?})",
            w[1].step
        );
    }
}

#[test]
fn zero_repulsion_closes_on_the_goal_every_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let limits = MotionLimits::default();
    let step = limits.v_max_mps * limits.dt_s * 3f64.sqrt();
    for scenario in 0..100 {
        closes_on_goal(&limits, step, &mut rng, scenario);
    }
}

#[test]
fn zero_repulsion_overshoot_is_bounded_by_braking() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for scenario in 0..200 {
        let limits = random_limits(&mut rng);
        let reach = (limits.v_max_mps * limits.dt_s + limits.stopping_drop(-limits.v_max_mps)) * 3f64.sqrt();
        closes_on_goal(&limits, reach, &mut rng, scenario);
    }
}

fn flyby() -> FlightScenario {
    default_scenario().flight.unwrap()
}

fn fly(control: bool) -> Trajectory {
    let f = flyby();
    let cfg = RadioConfig::reference();
    let t = simulate_flight(&f.plan, control, GS, &cfg, &f.limits, &f.apf, 1).unwrap();
    assert!(t.converged || !control);
    t
}

#[test]
fn controlled_interference_not_above_uncontrolled_at_equal_progress() {
    let (on, off) = (fly(true), fly(false));
    let bin = |x: f64| ((x - 4000.0) / 50.0).floor() as i64;
    // recorded samples inside a 50 m slab of x; their spread (fringes plus
    // pointing errors) sets the noise of the bin mean
    let binned = |t: &Trajectory, b: i64| {
        let xs: Vec<f64> = t
            .points
            .iter()
            .filter(|p| bin(p.state.position.x) == b)
            .map(|p| p.interference_w)
            .collect();
        (xs.len() >= 2).then(|| {
            let (m, sd) = mean_std(&xs);
            (m, sd / (xs.len() as f64).sqrt())
        })
    };
    let mut compared = 0;
    for b in 0..20 {
        let (Some((a, sa)), Some((c, sc))) = (binned(&on, b), binned(&off, b)) else {
            continue;
        };
        let noise = 3.0 * (sa * sa + sc * sc).sqrt();
        assert!(
            a <= c + noise,
            "bin {b}: controlled {:.2} dBm > uncontrolled {:.2} dBm + 3 sigma {:.2e} W",
            watts_to_dbm(a),
            watts_to_dbm(c),
            noise
        );
        compared += 1;
    }
    assert!(compared >= 15, "only {compared} bins populated on both runs");
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let m = (n - 1.0) / 2.0;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - m) * (b - m)).sum();
    let vx: f64 = rx.iter().map(|a| (a - m) * (a - m)).sum();
    let vy: f64 = ry.iter().map(|b| (b - m) * (b - m)).sum();
    cov / (vx * vy).sqrt()
}

#[test]
fn spearman_helper_examples() {
    assert!((spearman(&[1., 2., 3., 4.], &[10., 20., 30., 40.]) - 1.0).abs() < 1e-15);
    assert!((spearman(&[1., 2., 3., 4.], &[4., 3., 2., 1.]) + 1.0).abs() < 1e-15);
    assert_eq!(ranks(&[3., 1., 3., 2.]), vec![2.5, 0.0, 2.5, 1.0]);
}

#[test]
fn capacity_trend_over_separation_is_monotone() {
    let s = default_scenario();
    let seps: Vec<f64> = (1..=50).map(|i| 10.0 * i as f64).collect();
    let mc = MonteCarlo {
        snapshots: 1000,
        seed: 3,
    };
    let rows = capacity_sweep(&s.radio, s.gs_position, &s.deployment, &seps, &mc, Exec::Parallel).unwrap();
    let caps: Vec<f64> = rows.iter().map(|r| r.capacity_mean_mbps).collect();
    let rho = spearman(&seps, &caps);
    assert!(rho > 0.9, "rho = {rho}");
}

#[test]
fn channel_plans_hold_for_random_rosters() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..500 {
        let n = 2 * rng.random_range(1..=50usize);
        let mut ids: Vec<u32> = (0..4 * n as u32).collect();
        ids.shuffle(&mut rng);
        let ids: Vec<UavId> = ids[..n].iter().map(|&i| UavId(i)).collect();
        let k = n + rng.random_range(0..4usize);
        let plan = pair_channels(&ids, k).unwrap();
        plan.check().unwrap();

        let mut up_users = vec![None; k];
        let mut down_users = vec![None; k];
        for &id in &ids {
            let (up, down) = plan.channels_of(id).unwrap();
            assert_ne!(up, down);
            assert!(up < k && down < k);
            assert!(up_users[up].replace(id).is_none(), "channel {up} has two uplinks");
            assert!(
                down_users[down].replace(id).is_none(),
                "channel {down} has two downlinks"
            );
            let partner = co_channel_interferer(&plan, id, LinkDirection::Downlink).unwrap();
            assert_ne!(partner, id);
            assert_eq!(
                co_channel_interferer(&plan, partner, LinkDirection::Downlink).unwrap(),
                id
            );
            assert_eq!(plan.channels_of(partner).unwrap(), (down, up));
        }
        assert_eq!(up_users.iter().flatten().count(), n);
        if n > 2 {
            assert!(pair_channels(&ids[..n - 1], k).is_err());
            assert!(pair_channels(&ids, n - 2).is_err());
        }
    }
}
