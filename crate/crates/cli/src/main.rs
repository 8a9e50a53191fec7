//! `uavfd`: runs the capacity, efficiency, flight and power-saving
//! experiments and writes CSV.

// negated comparisons reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use uavfd_core::apf::simulate_flight;
use uavfd_core::efficiency::{AntennaMode, TddFdmConfig};
use uavfd_core::exec::Exec;
use uavfd_core::experiments::{capacity_sweep, efficiency_sweep, linspace_step, power_saving, Scheme};
use uavfd_core::scenario::{default_scenario, load_scenario_file, Deployment, DeploymentKind, Scenario};
use uavfd_core::units::watts_to_dbm;
use uavfd_core::Error;

#[derive(Parser, Debug)]
#[command(name = "uavfd", version, about = "Full-duplex multi-UAV link simulator")]
struct Cli {
    /// Scenario JSON; omitted sections take the reference defaults.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Overrides monte_carlo.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides monte_carlo.snapshots.
    #[arg(long, global = true)]
    snapshots: Option<usize>,
    /// Output path, `-` for stdout.
    #[arg(long, global = true, default_value = "-")]
    out: String,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DeploymentArg {
    Linear,
    Circular,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Victim downlink capacity versus UAV separation.
    CapacitySweep {
        /// Defaults to the scenario's deployment type.
        #[arg(long, value_enum)]
        deployment: Option<DeploymentArg>,
        #[arg(long, default_value_t = 10.0)]
        sep_min: f64,
        #[arg(long, default_value_t = 500.0)]
        sep_max: f64,
        #[arg(long, default_value_t = 10.0)]
        sep_step: f64,
    },
    /// Resource efficiency of full duplex and TDD-FDM versus demanded downlink rate.
    Efficiency {
        #[arg(long, default_value_t = 5.0)]
        rate_min: f64,
        #[arg(long, default_value_t = 80.0)]
        rate_max: f64,
        #[arg(long, default_value_t = 5.0)]
        rate_step: f64,
        /// Interferer separations, metres.
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,500")]
        separations: Vec<f64>,
        #[arg(long, default_value_t = 0.2)]
        guard: f64,
    },
    /// Fly the scenario's flight section with or without interference control.
    FlightSim {
        /// Defaults to the scenario's `flight.control`.
        #[arg(long, value_enum)]
        control: Option<Switch>,
    },
    /// Uplink power needed for a target rate, directional versus omni.
    PowerSaving {
        #[arg(long, default_value_t = 20.0)]
        target_rate_mbps: f64,
    },
}

enum Failure {
    /// Bad input: exit 1.
    Invalid(anyhow::Error),
    /// Ran, but the flight did not converge or the demand is infeasible: exit 2.
    Unmet(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Invalid(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnreachableTarget { .. } => Failure::Unmet(e.into()),
            _ => Failure::Invalid(e.into()),
        }
    }
}

struct Output {
    csv: Vec<u8>,
    unmet: Option<String>,
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(buf)
}

fn load(cli: &Cli) -> Result<Scenario, Failure> {
    let mut s = match &cli.scenario {
        Some(p) => load_scenario_file(p)?,
        None => default_scenario(),
    };
    if let Some(seed) = cli.seed {
        s.monte_carlo.seed = seed;
    }
    if let Some(n) = cli.snapshots {
        if n == 0 {
            return Err(anyhow!("--snapshots must be at least 1").into());
        }
        s.monte_carlo.snapshots = n;
    }
    Ok(s)
}

fn sweep_base(s: &Scenario, want: Option<DeploymentArg>) -> Result<Deployment, Failure> {
    let kind = match want {
        Some(DeploymentArg::Linear) => DeploymentKind::Linear,
        Some(DeploymentArg::Circular) => DeploymentKind::Circular,
        None => s.deployment.kind(),
    };
    if kind == s.deployment.kind() {
        if kind == DeploymentKind::Explicit {
            return Err(anyhow!("separation sweeps need a linear or circular deployment").into());
        }
        return Ok(s.deployment.clone());
    }
    let (extent, height) = match s.deployment {
        Deployment::Linear { range_m, height_m, .. } => (range_m, height_m),
        Deployment::Circular { radius_m, height_m, .. } => (radius_m, height_m),
        Deployment::Explicit(_) => (5000.0, 100.0),
    };
    Ok(match kind {
        DeploymentKind::Linear => Deployment::Linear {
            range_m: extent,
            height_m: height,
            separation_m: 50.0,
        },
        _ => Deployment::Circular {
            radius_m: extent,
            height_m: height,
            separation_m: 50.0,
        },
    })
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let s = load(cli)?;
    let exec = Exec::Parallel;
    let mut csv = Vec::new();
    let mut unmet = None;
    match &cli.command {
        Command::CapacitySweep {
            deployment,
            sep_min,
            sep_max,
            sep_step,
        } => {
            if !(sep_min < sep_max) {
                return Err(anyhow!("--sep-min must be below --sep-max").into());
            }
            let seps = linspace_step(*sep_min, *sep_max, *sep_step)?;
            let base = sweep_base(&s, *deployment)?;
            let rows = capacity_sweep(&s.radio, s.gs_position, &base, &seps, &s.monte_carlo, exec)?;
            let mut w = writer(&mut csv);
            w.write_record([
                "separation_m",
                "capacity_mean_mbps",
                "capacity_std_mbps",
                "interference_mean_dbm",
                "sinr_mean_db",
            ])
            .context("writing csv")?;
            for r in rows {
                w.write_record([
                    fmt(r.separation_m),
                    fmt(r.capacity_mean_mbps),
                    fmt(r.capacity_std_mbps),
                    fmt(r.interference_mean_dbm),
                    fmt(r.sinr_mean_db),
                ])
                .context("writing csv")?;
            }
            w.flush().context("writing csv")?;
        }
        Command::Efficiency {
            rate_min,
            rate_max,
            rate_step,
            separations,
            guard,
        } => {
            if !(*rate_min >= 0.0) {
                return Err(anyhow!("--rate-min must be non-negative").into());
            }
            let rates: Vec<f64> = linspace_step(*rate_min, *rate_max, *rate_step)?
                .iter()
                .map(|r| r * 1e6)
                .collect();
            if separations.is_empty() {
                return Err(anyhow!("--separations must list at least one value").into());
            }
            let usable = 1.0 - guard;
            let tdd = TddFdmConfig {
                guard_fraction: *guard,
                ..TddFdmConfig::reference().with_split(usable / 2.0, usable / 2.0)
            };
            let base = sweep_base(&s, None)?;
            let rows = efficiency_sweep(
                &s.radio,
                s.gs_position,
                &base,
                &rates,
                separations,
                &tdd,
                &s.monte_carlo,
                exec,
            )?;
            let mut w = writer(&mut csv);
            w.write_record([
                "required_rate_mbps",
                "scheme",
                "separation_m",
                "eta_bps_hz",
                "saturated",
            ])
            .context("writing csv")?;
            for r in rows {
                w.write_record([
                    fmt(r.required_rate_mbps),
                    r.scheme.label().to_string(),
                    fmt(r.separation_m),
                    fmt(r.eta_bps_hz),
                    (r.scheme == Scheme::TddFdm && r.saturated).to_string(),
                ])
                .context("writing csv")?;
            }
            w.flush().context("writing csv")?;
        }
        Command::FlightSim { control } => {
            let flight = s.flight.ok_or_else(|| anyhow!("scenario has no flight section"))?;
            let on = match control {
                Some(c) => *c == Switch::On,
                None => flight.control,
            };
            let t = simulate_flight(
                &flight.plan,
                on,
                s.gs_position,
                &s.radio,
                &flight.limits,
                &flight.apf,
                s.monte_carlo.seed,
            )?;
            let mut w = writer(&mut csv);
            w.write_record(["t_s", "x", "y", "z", "interference_dbm", "capacity_mbps"])
                .context("writing csv")?;
            for p in &t.points {
                let q = p.state.position;
                w.write_record([
                    fmt(p.t_s),
                    fmt(q.x),
                    fmt(q.y),
                    fmt(q.z),
                    fmt(watts_to_dbm(p.interference_w)),
                    fmt(p.capacity_bps / 1e6),
                ])
                .context("writing csv")?;
            }
            let label = if t.converged {
                "summary"
            } else {
                "summary-not-converged"
            };
            w.write_record([
                label.to_string(),
                String::new(),
                String::new(),
                String::new(),
                fmt(watts_to_dbm(t.peak_interference_w())),
                fmt(t.mean_capacity_bps() / 1e6),
            ])
            .context("writing csv")?;
            w.flush().context("writing csv")?;
            if !t.converged {
                unmet = Some(format!(
                    "flight did not reach the goal within {} steps",
                    flight.plan.max_steps
                ));
            }
        }
        Command::PowerSaving { target_rate_mbps } => {
            let uavs = s.deployment.place(s.gs_position)?;
            let uav = uavs.first().ok_or(Error::EmptyDeployment)?.1;
            let rows = power_saving(&s.radio, s.gs_position, uav, target_rate_mbps * 1e6)?;
            let mut w = writer(&mut csv);
            w.write_record(["mode", "required_uplink_power_dbm", "delta_db"])
                .context("writing csv")?;
            for r in rows {
                let mode = match r.mode {
                    AntennaMode::Directional => "directional",
                    AntennaMode::Omni => "omni",
                };
                w.write_record([mode.to_string(), fmt(r.required_uplink_power_dbm), fmt(r.delta_db)])
                    .context("writing csv")?;
            }
            w.flush().context("writing csv")?;
        }
    }
    Ok(Output { csv, unmet })
}

fn emit(out: &str, bytes: &[u8]) -> anyhow::Result<()> {
    if out == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(bytes)?;
        stdout.flush()?;
    } else {
        std::fs::write(out, bytes).with_context(|| format!("writing {out}"))?;
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn with_threads<T: Send>(n: usize, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
    Ok(pool.install(f))
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T: Send>(_n: usize, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    Ok(f())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match with_threads(cli.threads, || run(&cli)) {
        Ok(r) => r,
        Err(e) => Err(Failure::Invalid(e)),
    };
    match result {
        Ok(out) => {
            if let Err(e) = emit(&cli.out, &out.csv) {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            match out.unmet {
                Some(msg) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(2)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Unmet(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
