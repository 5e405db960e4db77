//! End-to-end tests of the `levitsim` binary: strict parsing, unit
//! conversion, exit codes, artifact determinism and the run manifest.

use levitsim_cli::scenario::parse_scenario;
use std::path::Path;
use std::process::{Command, Output};

fn levitsim<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_levitsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tiny_brownian(name: &str, seed: u64, duration: f64) -> String {
    format!(
        r#"{{
  "name": "{name}",
  "kind": "brownian",
  "seed": {seed},
  "params": {{
    "particle": {{
      "radius": {{ "value": 1.38551, "unit": "um" }},
      "density": 2000.0,
      "relative_permittivity": 2.1
    }},
    "gas": {{
      "pressure": {{ "value": 2750.0, "unit": "Pa" }},
      "temperature": {{ "value": 297.0, "unit": "K" }}
    }},
    "trap": {{
      "frequencies": [
        {{ "value": 8066.0, "unit": "Hz" }},
        {{ "value": 9095.0, "unit": "Hz" }},
        {{ "value": 2072.0, "unit": "Hz" }}
      ],
      "wavelength": {{ "value": 1064.0, "unit": "nm" }},
      "intensity": 1e9
    }},
    "duration": {duration},
    "trajectories": 2,
    "record_stride": 4,
    "velocity_axis": 1
  }}
}}"#
    )
}

#[test]
fn validate_accepts_and_echoes_si_units() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    // Pressure given in torr must come back as 133.322 Pa per torr.
    let text = tiny_brownian("torr-check", 1, 0.01)
        .replace(r#""value": 2750.0, "unit": "Pa""#, r#""value": 1.0, "unit": "torr""#);
    std::fs::write(&path, text).unwrap();

    let out = levitsim(["validate", path.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let echo: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let pa = echo["resolved_si"]["gas"]["pressure"].as_f64().unwrap();
    assert!((pa - 133.322).abs() < 1e-9, "pressure echoed as {pa}");
    assert_eq!(echo["valid"], serde_json::json!(true));
}

#[test]
fn unknown_key_is_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let text = tiny_brownian("typo", 1, 0.01).replace(r#""pressure""#, r#""preasure""#);
    std::fs::write(&path, text).unwrap();

    let out = levitsim(["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("preasure"), "error does not name the key: {err}");
}

#[test]
fn missing_field_is_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    // Strip the duration line entirely.
    let text = tiny_brownian("missing", 1, 0.01).replace(r#""duration": 0.01,"#, "");
    std::fs::write(&path, text).unwrap();

    let out = levitsim(["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("duration"), "error does not name the field: {err}");
}

#[test]
fn scenario_round_trips_through_its_canonical_form() {
    let text = tiny_brownian("roundtrip", 9, 0.01);
    let first = parse_scenario(&text).unwrap();
    let second = parse_scenario(&first.canonical).unwrap();
    assert_eq!(first.canonical, second.canonical);
    assert_eq!(first.name, second.name);
    assert_eq!(first.seed, second.seed);
}

#[test]
fn run_is_byte_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(&path, tiny_brownian("det", 77, 0.02)).unwrap();

    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let r = levitsim(["run", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(r.status.success(), "stderr: {}", String::from_utf8_lossy(&r.stderr));
    }

    let csv_a = std::fs::read(out_a.join("det/trajectory.csv")).unwrap();
    let csv_b = std::fs::read(out_b.join("det/trajectory.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "same seed must give byte-identical CSVs");

    let digests = |root: &Path| -> serde_json::Value {
        let m: serde_json::Value =
            serde_json::from_slice(&std::fs::read(root.join("det/manifest.json")).unwrap())
                .unwrap();
        m["files"].clone()
    };
    assert_eq!(digests(&out_a), digests(&out_b));

    // Manifest digests actually match the files on disk.
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_a.join("det/manifest.json")).unwrap()).unwrap();
    for f in manifest["files"].as_array().unwrap() {
        let bytes = std::fs::read(out_a.join("det").join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(
            levitsim_cli::manifest::sha256_hex(&bytes),
            f["sha256"].as_str().unwrap(),
            "digest mismatch for {}",
            f["path"]
        );
    }
}

#[test]
fn different_seed_changes_bytes_but_not_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(&path, tiny_brownian("seeds", 5, 0.3)).unwrap();

    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let r = levitsim(["run", path.to_str().unwrap(), "--out", out_a.to_str().unwrap()]);
    assert!(r.status.success());
    let r = levitsim([
        "run",
        path.to_str().unwrap(),
        "--out",
        out_b.to_str().unwrap(),
        "--seed",
        "6",
    ]);
    assert!(r.status.success());

    let csv_a = std::fs::read(out_a.join("seeds/trajectory.csv")).unwrap();
    let csv_b = std::fs::read(out_b.join("seeds/trajectory.csv")).unwrap();
    assert_ne!(csv_a, csv_b);

    let vrms = |root: &Path| -> f64 {
        let s: serde_json::Value =
            serde_json::from_slice(&std::fs::read(root.join("seeds/summary.json")).unwrap())
                .unwrap();
        s["v_rms"].as_f64().unwrap()
    };
    let (a, b) = (vrms(&out_a), vrms(&out_b));
    assert!((a / b - 1.0).abs() < 0.1, "v_rms {a} vs {b} disagree beyond tolerance");
}

#[test]
fn numerical_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    // Explicit dt far above the admissible step.
    let text = tiny_brownian("coarse", 1, 0.01)
        .replace(r#""duration": 0.01,"#, r#""duration": 0.01, "dt": 1e-3,"#);
    std::fs::write(&path, text).unwrap();

    let out = levitsim(["run", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value =
        serde_json::from_slice(String::from_utf8_lossy(&out.stderr).lines().next().unwrap().as_bytes())
            .unwrap();
    assert_eq!(err["error"], serde_json::json!("numerical"));
    assert!(err["message"].as_str().unwrap().contains("step-size"));
}

#[test]
fn shipped_suite_is_listed_and_loadable_by_name() {
    let out = levitsim(["list-scenarios"]);
    assert!(out.status.success());
    let listing = String::from_utf8_lossy(&out.stdout);
    for name in [
        "velocity-distribution",
        "feedback-ladder",
        "sideband-optimum",
        "noise-budget",
        "fock-qnd",
        "cat-fringes",
        "force-vs-radius",
        "force-vs-frequency",
        "collision-stream",
    ] {
        assert!(listing.contains(name), "missing {name} in listing");
    }

    // A shipped scenario runs when addressed by name.
    let dir = tempfile::tempdir().unwrap();
    let out = levitsim(["run", "noise-budget", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let budget: serde_json::Value = serde_json::from_slice(
        &std::fs::read(dir.path().join("noise-budget/budget.json")).unwrap(),
    )
    .unwrap();
    for key in [
        "gamma_gas",
        "gamma_recoil_s3",
        "gamma_recoil_s5",
        "gamma_intensity",
        "gamma_pointing",
        "n_ph_floor",
        "dominant",
    ] {
        assert!(budget.get(key).is_some(), "budget.json missing {key}");
    }
}

#[test]
fn golden_corpus_validates() {
    // Every shipped scenario must keep parsing with identical semantics
    // across patch releases.
    for name in [
        "velocity-distribution",
        "feedback-ladder",
        "sideband-optimum",
        "noise-budget",
        "fock-qnd",
        "cat-fringes",
        "force-vs-radius",
        "force-vs-frequency",
        "collision-stream",
    ] {
        let out = levitsim(["validate", name]);
        assert!(
            out.status.success(),
            "{name} failed validation: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let echo: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(echo["valid"], serde_json::json!(true), "{name}");
    }
}

#[test]
fn json_format_emits_tables_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(&path, tiny_brownian("jsonfmt", 3, 0.02)).unwrap();
    let out = levitsim([
        "run",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let rows: serde_json::Value = serde_json::from_slice(
        &std::fs::read(dir.path().join("jsonfmt/trajectory.json")).unwrap(),
    )
    .unwrap();
    let first = &rows.as_array().unwrap()[0];
    for col in ["t", "x", "y", "z", "vx", "vy", "vz"] {
        assert!(first.get(col).is_some(), "missing column {col}");
    }
}

#[test]
fn jobs_flag_runs_scenarios_concurrently() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("one.json");
    let p2 = dir.path().join("two.json");
    std::fs::write(&p1, tiny_brownian("one", 1, 0.02)).unwrap();
    std::fs::write(&p2, tiny_brownian("two", 2, 0.02)).unwrap();
    let out = levitsim([
        "run",
        p1.to_str().unwrap(),
        p2.to_str().unwrap(),
        "--jobs",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(dir.path().join("one/manifest.json").exists());
    assert!(dir.path().join("two/manifest.json").exists());
}
