use std::fs;
use std::path::Path;
use std::process::Command;

use bec_analogue_cli::config::Analysis;
use bec_analogue_cli::error::{EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, EXIT_WARNINGS};
use bec_analogue_cli::{parse_scenario, run, Preset, ScenarioConfig, Verb};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bec-analogue"))
}

fn write_scenario(dir: &Path, cfg: &ScenarioConfig) -> String {
    let path = dir.join("scenario.json");
    fs::write(&path, cfg.to_json()).unwrap();
    path.to_string_lossy().into_owned()
}

fn exit_code(args: &[&str]) -> i32 {
    bin().args(args).output().unwrap().status.code().unwrap()
}

#[test]
fn presets_round_trip() {
    for p in Preset::ALL {
        let cfg = p.config();
        assert_eq!(parse_scenario(&cfg.to_json()).unwrap(), cfg);
        assert_eq!(cfg.matching_preset(), Some(p));
    }
}

#[test]
fn preset_verb_prints_a_loadable_scenario() {
    let out = bin().args(["preset", "sodium-q2d"]).output().unwrap();
    assert!(out.status.success());
    let cfg = parse_scenario(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(cfg, Preset::SodiumQ2d.config());
}

#[test]
fn empty_analysis_runs_derive_only() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = Preset::SodiumQ2d.config();
    cfg.analysis.clear();
    let report = run(&cfg, Verb::Report, dir.path()).unwrap();
    assert_eq!(report.stages, ["derive", "report"]);
    assert!(report.trajectory.is_none() && report.spectrum2d.is_none());
    for f in ["derived.json", "report.json", "manifest.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert!(!dir.path().join("trajectory.csv").exists());
}

#[test]
fn report_runs_stages_in_order_and_writes_layout() {
    let dir = tempfile::tempdir().unwrap();
    let report = run(&Preset::SodiumQ2d.config(), Verb::Report, dir.path()).unwrap();
    assert_eq!(
        report.stages,
        ["derive", "evolve", "horizons", "spectrum2d", "report"]
    );
    for f in [
        "manifest.json",
        "derived.json",
        "trajectory.csv",
        "horizons.csv",
        "spectrum.csv",
        "report.json",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let header = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(header.starts_with("kappa_per_m,C_m2,C_over_xi2\n"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let rows = json["acceptance"].as_array().unwrap();
    let contrast = rows.iter().find(|r| r["key"] == "contrast").unwrap();
    assert!((contrast["ratio"].as_f64().unwrap() - 1.0).abs() < 0.01);
}

#[test]
fn only_exact_presets_get_published_comparisons() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = Preset::SodiumQ2d.config();
    cfg.condensate.atom_number *= 2.0;
    let report = run(&cfg, Verb::Derive, dir.path()).unwrap();
    assert!(report.preset.is_none());
    assert!(report.acceptance.is_empty());
}

#[test]
fn rubidium_spectrum_rows_are_in_band() {
    let dir = tempfile::tempdir().unwrap();
    let report = run(&Preset::Rubidium3d.config(), Verb::Spectrum3d, dir.path()).unwrap();
    let s = report.spectrum3d.unwrap();
    assert_eq!(s.in_band_points, s.points);
    assert_eq!(s.numeric_modes_frozen, s.points);
    assert!((s.slope_phase_closed_form.unwrap() + 4.0 / 3.0).abs() < 1e-9);
    assert!(report.warnings.is_empty());
    let modes = fs::read_to_string(dir.path().join("modes.csv")).unwrap();
    assert!(modes.lines().count() > 10);
}

#[test]
fn every_warning_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = Preset::Rubidium3d.config();
    cfg.numeric.kappa_max_per_m = Some(1e8);
    cfg.numeric.kappa_points = 8;
    cfg.analysis = vec![Analysis::Spectrum3d];
    let report = run(&cfg, Verb::Report, dir.path()).unwrap();
    assert!(!report.warnings.is_empty());
    for w in &report.warnings {
        assert!(
            w.kind.starts_with("validity:") || w.kind.starts_with("band:"),
            "{}",
            w.kind
        );
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let out = out.to_str().unwrap();
    assert_eq!(
        exit_code(&["derive", "--scenario", "sodium-q2d", "--out", out]),
        EXIT_OK
    );
    assert_eq!(
        exit_code(&["derive", "--scenario", "no-such-preset", "--out", out]),
        EXIT_CONFIG
    );
    assert_eq!(
        exit_code(&["spectrum2d", "--scenario", "rubidium-3d", "--out", out]),
        EXIT_CONFIG
    );
    assert_eq!(
        exit_code(&[
            "derive",
            "--scenario",
            "sodium-q2d",
            "--tol",
            "0.5",
            "--out",
            out
        ]),
        EXIT_CONFIG
    );

    let empty = dir.path().join("empty.json");
    fs::write(&empty, "").unwrap();
    assert_eq!(
        exit_code(&[
            "derive",
            "--scenario",
            empty.to_str().unwrap(),
            "--out",
            out
        ]),
        EXIT_CONFIG
    );

    let mut strict = Preset::SodiumQ2d.config();
    strict.validity.mode_mixing = 100.0;
    let path = write_scenario(dir.path(), &strict);
    assert_eq!(
        exit_code(&["derive", "--scenario", &path, "--out", out]),
        EXIT_WARNINGS
    );

    assert_eq!(exit_code(&["selftest"]), EXIT_OK);
}

#[test]
fn numeric_failure_keeps_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut short = Preset::Rubidium3d.config();
    short.numeric.t_max_s = Some(1e-6);
    let path = write_scenario(dir.path(), &short);
    let out = dir.path().join("run");
    let code = exit_code(&[
        "spectrum3d",
        "--scenario",
        &path,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_NUMERIC);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["complete"], false);
    assert_eq!(manifest["failed_stage"], "spectrum3d");
    assert!(out.join("trajectory.csv").exists());
    assert!(!out.join("spectrum.csv").exists());
}

#[test]
fn command_line_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let output = bin()
        .args([
            "spectrum2d",
            "--scenario",
            "sodium-q2d",
            "--kappa-min",
            "1e5",
            "--kappa-max",
            "1e7",
        ])
        .args(["--kappa-points", "5", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success());
    let csv = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    let kappas: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(kappas.len(), 5);
    assert!((kappas[0] / 1e5 - 1.0).abs() < 1e-9 && (kappas[4] / 1e7 - 1.0).abs() < 1e-9);
}
