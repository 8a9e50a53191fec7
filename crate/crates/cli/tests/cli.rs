use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn uavfd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uavfd"))
        .args(args)
        .output()
        .expect("spawn uavfd")
}

fn scenario(json: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(json.as_bytes()).unwrap();
    f
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn csv_has_header_and_unix_newlines() {
    let o = uavfd(&["power-saving"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("mode,required_uplink_power_dbm,delta_db\n"));
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn capacity_sweep_row_count_matches_grid() {
    let o = uavfd(&[
        "--snapshots",
        "20",
        "capacity-sweep",
        "--sep-min",
        "10",
        "--sep-max",
        "100",
        "--sep-step",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 10);
    assert!(text.lines().nth(1).unwrap().starts_with("10,"));
    assert!(text.lines().last().unwrap().starts_with("100,"));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eff.csv");
    let to_file = uavfd(&["--snapshots", "50", "--out", path.to_str().unwrap(), "efficiency"]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    let to_stdout = uavfd(&["--snapshots", "50", "efficiency"]);
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
}

#[test]
fn seed_changes_monte_carlo_output() {
    let run = |seed: &str| uavfd(&["--snapshots", "50", "--seed", seed, "capacity-sweep", "--sep-max", "50"]).stdout;
    assert_eq!(run("4"), run("4"));
    assert_ne!(run("4"), run("5"));
}

#[test]
fn scenario_file_is_applied() {
    let f = scenario(r#"{"radio": {"gs_tx_power_dbm": 10}}"#);
    let base = uavfd(&["--snapshots", "50", "capacity-sweep", "--sep-max", "50"]);
    let louder = uavfd(&[
        "--scenario",
        f.path().to_str().unwrap(),
        "--snapshots",
        "50",
        "capacity-sweep",
        "--sep-max",
        "50",
    ]);
    assert_eq!(louder.status.code(), Some(0), "{}", stderr(&louder));
    assert_ne!(base.stdout, louder.stdout);
}

#[test]
fn invalid_values_exit_1_with_field_path() {
    let f = scenario(r#"{"radio": {"bandwidth_hz": -1}}"#);
    let o = uavfd(&["--scenario", f.path().to_str().unwrap(), "power-saving"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("radio.bandwidth_hz"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_keys_exit_1() {
    let f = scenario(r#"{"radio": {"bandwith_hz": 1e7}}"#);
    let o = uavfd(&["--scenario", f.path().to_str().unwrap(), "power-saving"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bandwith_hz"), "{}", stderr(&o));
}

#[test]
fn bad_flags_exit_1() {
    assert_eq!(uavfd(&["--snapshots", "0", "power-saving"]).status.code(), Some(1));
    assert_eq!(
        uavfd(&["capacity-sweep", "--sep-min", "100", "--sep-max", "50"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(uavfd(&["capacity-sweep", "--sep-step", "0"]).status.code(), Some(1));
    assert_eq!(uavfd(&["efficiency", "--guard", "1.5"]).status.code(), Some(1));
    assert_eq!(
        uavfd(&["--scenario", "/nonexistent/scenario.json", "power-saving"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn unconverged_flight_exits_2_and_still_writes_csv() {
    let f = scenario(r#"{"flight": {"max_steps": 5}}"#);
    let o = uavfd(&["--scenario", f.path().to_str().unwrap(), "flight-sim"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 6 + 1);
    assert!(text.lines().last().unwrap().starts_with("summary-not-converged,"));
}

#[test]
fn unreachable_rate_exits_2() {
    let o = uavfd(&["power-saving", "--target-rate-mbps", "100000"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn missing_flight_section_exits_1() {
    let f = scenario(r#"{"flight": null}"#);
    let o = uavfd(&["--scenario", f.path().to_str().unwrap(), "flight-sim"]);
    assert_eq!(o.status.code(), Some(1));
}
