//! Binary-level checks of the `uowc` command.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uowc"))
}

fn core_data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data")
}

#[test]
fn malformed_config_fails_with_context() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(&config, "wavelength_nm = 800.0\n").unwrap();
    let output = binary()
        .args(["transmittance", "--config"])
        .arg(&config)
        .args(["--out"])
        .arg(dir.path().join("out.csv"))
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("wavelength_nm"), "stderr: {stderr}");
}

#[test]
fn unknown_config_key_fails() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("typo.toml");
    fs::write(&config, "[qkd]\nbeeta = 0.9\n").unwrap();
    let output = binary()
        .args(["keyrate", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(!output.status.success());
}

#[test]
fn attenuation_writes_csv_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        "[sweep]\naxis = \"wavelength\"\nstart = 440.0\nstop = 540.0\nsteps = 11\n",
    )
    .unwrap();
    let out = dir.path().join("att.csv");
    let status = binary()
        .args(["attenuation", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "axis,axis_value,m,tc_mean,tc_std,p_success,i_ab,chi_be,key_rate,secure"
    );
    assert_eq!(lines.count(), 11);
}

#[test]
fn data_dir_environment_variable_loads_external_tables() {
    let dir = tempfile::tempdir().unwrap();
    for name in [
        "water_absorption.dat",
        "chl_specific_a.dat",
        "chl_specific_b.dat",
        "chlorophyll_profiles.dat",
    ] {
        fs::copy(core_data_dir().join(name), dir.path().join(name)).unwrap();
    }
    let out = dir.path().join("out.csv");
    let status = binary()
        .args(["transmittance", "--samples", "4", "--out"])
        .arg(&out)
        .env("UOWC_DATA_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.exists());

    // Pointing at a directory without the tables is a hard error.
    let empty = tempfile::tempdir().unwrap();
    let output = binary()
        .args(["transmittance", "--samples", "4"])
        .env("UOWC_DATA_DIR", empty.path())
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("water_absorption"), "stderr: {stderr}");
}
