use randopt_cli::config::Grid;
use randopt_cli::manifest::MANIFEST_FILE;
use randopt_cli::{apply_overrides, emit_report, run_experiment, CliError, Experiment, ExperimentConfig};
use std::path::Path;
use std::process::Command;

fn config(text: &str, exp: Experiment, sets: &[&str]) -> ExperimentConfig {
    let mut doc: toml::Value = text.parse().unwrap();
    let sets: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
    apply_overrides(&mut doc, exp.name(), &sets).unwrap();
    ExperimentConfig::from_value(doc).unwrap()
}

fn outputs(dir: &Path) -> std::collections::BTreeMap<String, String> {
    let m: randopt_cli::RunManifest =
        serde_json::from_str(&std::fs::read_to_string(dir.join(MANIFEST_FILE)).unwrap()).unwrap();
    m.outputs
}

#[test]
fn gen_writes_one_instance_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let c = config("seed = 4\n[gen]\nkind = \"graph\"\nn = 12\n", Experiment::Gen, &[]);
    let m = run_experiment(&c, Experiment::Gen, &out).unwrap();
    assert_eq!(m.instances.len(), 1);
    assert_eq!(m.instances[0].seed, 4);
    for f in ["instance_0.bin", "instance_0.json", "manifest.json", "config.toml", "wall_clock.txt"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let bin = std::fs::read(out.join("instance_0.bin")).unwrap();
    assert_eq!(m.outputs["instance_0.bin"], randopt_cli::manifest::sha256_hex(&bin));
    assert!(emit_report(&out).unwrap().is_clean());
}

#[test]
fn repeated_runs_have_identical_digests() {
    let tmp = tempfile::tempdir().unwrap();
    let c = config("seed = 9\n", Experiment::Graphopt, &["n=24", "seeds=3", "exact=true", "jobs=2"]);
    let a = run_experiment(&c, Experiment::Graphopt, &tmp.path().join("a")).unwrap();
    let mut c1 = c.clone();
    c1.jobs = Some(1);
    let b = run_experiment(&c1, Experiment::Graphopt, &tmp.path().join("b")).unwrap();
    assert_eq!(a.outputs.get("graphopt.csv"), b.outputs.get("graphopt.csv"));
    assert_eq!(a.instances, b.instances);
}

#[test]
fn ksat_sweep_has_one_row_per_grid_point() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("k");
    let c = config("[ksat]\nn = 20\ntrials = 3\n", Experiment::Ksat, &["densities=[2.0, 4.0, 6.0]"]);
    run_experiment(&c, Experiment::Ksat, &out).unwrap();
    let text = std::fs::read_to_string(out.join("sat_curve.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 3);
    let rep = emit_report(&out).unwrap();
    assert!(rep.is_clean(), "{rep}");
    assert_eq!(c.ksat.unwrap().densities, Grid::List(vec![2.0, 4.0, 6.0]));
}

#[test]
fn tampered_output_is_flagged() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("k");
    let c = config("[ksat]\nn = 15\ntrials = 2\n", Experiment::Ksat, &["densities=[3.0, 5.0]"]);
    run_experiment(&c, Experiment::Ksat, &out).unwrap();
    let path = out.join("sat_curve.csv");
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str("7.0,105,2,0,0.0,0,1.0\n");
    std::fs::write(&path, text).unwrap();
    let rep = emit_report(&out).unwrap();
    assert!(!rep.is_clean());
    assert!(rep.problems.iter().any(|p| p.contains("digest")));
    assert!(rep.problems.iter().any(|p| p.contains("rows")));
}

#[test]
fn config_errors_name_the_key() {
    let err = ExperimentConfig::from_toml_str("[spin]\nn = \"big\"\n").unwrap_err();
    assert!(matches!(&err, CliError::Config { key, .. } if key == "spin.n"), "{err}");
    let c = config("", Experiment::Ksat, &["trials=0"]);
    let err = run_experiment(&c, Experiment::Ksat, Path::new("/nonexistent/never")).unwrap_err();
    assert!(matches!(&err, CliError::Config { key, .. } if key == "ksat.trials"), "{err}");
}

#[test]
fn refuses_to_replace_foreign_directory() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("precious.txt"), "x").unwrap();
    let c = config("", Experiment::Gen, &[]);
    let err = run_experiment(&c, Experiment::Gen, tmp.path()).unwrap_err();
    assert!(matches!(err, CliError::Config { ref key, .. } if key == "out"));
    assert!(tmp.path().join("precious.txt").exists());

    // a previous run directory is replaced
    let out = tmp.path().join("run");
    run_experiment(&c, Experiment::Gen, &out).unwrap();
    run_experiment(&c, Experiment::Gen, &out).unwrap();
    assert!(emit_report(&out).unwrap().is_clean());
}

#[test]
fn binary_reports_config_errors_with_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_randopt"))
        .args(["ksat", "--set", "trails=3", "--out"])
        .arg(tmp.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&status.stderr).contains("ksat.trails"));

    let out = tmp.path().join("g");
    let ok = Command::new(env!("CARGO_BIN_EXE_randopt"))
        .args(["gen", "--seed", "3", "--set", "n=8", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(ok.success());
    let rep = Command::new(env!("CARGO_BIN_EXE_randopt")).arg("report").arg(&out).status().unwrap();
    assert!(rep.success());
    assert_eq!(outputs(&out).len(), 3);
}
