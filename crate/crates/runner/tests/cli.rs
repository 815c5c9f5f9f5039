use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nlslab_runner::acceptance::{dichotomy_config, scattering_config};
use nlslab_runner::checkpoint::read_frames;
use nlslab_runner::record::{read_diagnostics, DIAGNOSTIC_COLUMNS};
use nlslab_runner::{parse_config, ScenarioConfig, OUT_ENV};

fn nlslab(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nlslab"));
    cmd.args(args).env_remove(OUT_ENV);
    if let Some(p) = out_env {
        cmd.env(OUT_ENV, p);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, cfg: &ScenarioConfig) -> String {
    let path = dir.join(format!("{}.toml", cfg.scenario));
    fs::write(&path, cfg.echo()).unwrap();
    path.to_str().unwrap().to_string()
}

fn records(path: &Path) -> Vec<nlslab_runner::record::DiagnosticRecord> {
    read_diagnostics(fs::read(path).unwrap().as_slice()).unwrap()
}

#[test]
fn zero_data_completes_with_zero_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::new("zero", 1);
    cfg.initial.preset = nlslab_runner::config::Preset::Zero;
    cfg.integrator.t_end = 0.2;
    cfg.integrator.save_every = 20;
    let path = write_config(dir.path(), &cfg);
    let out = dir.path().join("out");
    let o = nlslab(&["run", &path, "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rs = records(&out.join("zero.csv"));
    assert_eq!(rs.len(), 11);
    for r in &rs {
        assert!(r.values()[1..].iter().all(|v| *v == 0.0), "{r:?}");
    }
    let manifest = fs::read_to_string(out.join("zero.manifest.toml")).unwrap();
    assert!(manifest.contains("# status = \"completed\""));
}

#[test]
fn focusing_supercritical_run_exits_with_the_guard_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &dichotomy_config(-1));
    let o = nlslab(&["run", &path, "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    let manifest = fs::read_to_string(dir.path().join("dichotomy-focusing.manifest.toml")).unwrap();
    assert!(manifest.contains("# status = \"blowup_guard_tripped\""));
}

#[test]
fn scattering_run_has_a_small_tail() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &scattering_config());
    let o = nlslab(&["run", &path, "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let rs = records(&dir.path().join("scattering.csv"));
    let total = rs.last().unwrap().l6_accum;
    let half = rs.iter().find(|r| (r.t - 10.0).abs() < 1e-9).unwrap().l6_accum;
    assert!((total - half) / total <= 0.01, "{}", (total - half) / total);
}

#[test]
fn manifest_reproduces_the_run_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::new("random-defocusing", 1);
    cfg.seed = 5;
    cfg.grid.n = 256;
    cfg.grid.length = 16.0 * std::f64::consts::PI;
    cfg.integrator.t_end = 0.5;
    cfg.integrator.save_every = 25;
    cfg.initial.preset = nlslab_runner::config::Preset::Random;
    cfg.initial.amp = 0.6;
    let path = write_config(dir.path(), &cfg);
    let first = dir.path().join("first");
    assert_eq!(nlslab(&["run", &path, "--out", first.to_str().unwrap()], None).status.code(), Some(0));
    let manifest = first.join("random-defocusing.manifest.toml");
    assert_eq!(parse_config(&fs::read_to_string(&manifest).unwrap()).unwrap(), cfg);
    let second = dir.path().join("second");
    assert_eq!(nlslab(&["run", manifest.to_str().unwrap(), "--out", second.to_str().unwrap()], None).status.code(), Some(0));
    let a = fs::read(first.join("random-defocusing.csv")).unwrap();
    let b = fs::read(second.join("random-defocusing.csv")).unwrap();
    assert_eq!(a, b);
    let header = String::from_utf8_lossy(&a).lines().nth(1).unwrap().to_string();
    assert_eq!(header, DIAGNOSTIC_COLUMNS.join(","));
}

#[test]
fn environment_variable_sets_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::new("env", 1);
    cfg.grid.n = 128;
    cfg.grid.length = 16.0;
    cfg.integrator.t_end = 0.01;
    cfg.integrator.save_every = 5;
    cfg.checkpoint = true;
    let path = write_config(dir.path(), &cfg);
    let target = dir.path().join("from-env");
    let o = nlslab(&["run", &path], Some(&target));
    assert_eq!(o.status.code(), Some(0));
    assert!(target.join("env.csv").exists());
    let bytes = fs::read(target.join("env.fields.bin")).unwrap();
    assert_eq!(bytes.len(), 3 * (24 + 16 * 128));
    let frames = read_frames(bytes.as_slice()).unwrap();
    assert_eq!(frames.len(), 3);
    assert_eq!(frames[2].time(), records(&target.join("env.csv"))[2].t);
}

#[test]
fn invalid_config_reports_the_line_and_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "scenario = \"bad\"\n\nmu = 2\n").unwrap();
    let o = nlslab(&["run", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("μ must be ±1"), "{err}");

    let o = nlslab(&["run", dir.path().join("missing.toml").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.toml"));
}

#[test]
fn unknown_suite_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = nlslab(&["suite", "everything", "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown suite"));
}

#[test]
fn preset_dump_prints_the_field() {
    let o = nlslab(&["preset-dump", "gaussian"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,re,im");
    assert_eq!(lines.len(), 1025);
    let centre: Vec<f64> = lines[513].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(centre, vec![0.0, 1.0, 0.0]);

    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::new("q", -1);
    cfg.grid.length = 32.0;
    let path = write_config(dir.path(), &cfg);
    let o = nlslab(&["preset-dump", "soliton", "--config", &path], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1025);

    let o = nlslab(&["preset-dump", "sphere"], None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = parse_config(&fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(format!("{}.toml", cfg.scenario), path.file_name().unwrap().to_str().unwrap());
        seen += 1;
    }
    assert!(seen >= 4);
    let scattering = parse_config(&fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/scattering.toml")).unwrap()).unwrap();
    assert_eq!(scattering, scattering_config());
}
