use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lrqc_cli::{ExperimentConfig, Metadata, ResultTable};

const EVOLVE: &str = r#"{
  "model": {"n": 5, "d": 2, "structure": "path"},
  "run": {"initial_region": [0, 1], "k_max": 4, "seed": 3, "samples": 64, "bound": true}
}"#;

fn lrqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrqc")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn entries(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    names
}

#[test]
fn evolve_csv_with_metadata_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", EVOLVE);
    let out = dir.path().join("evolve.csv");
    let result = lrqc(&["evolve", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,P_k,P_infinity,bound");
    assert!(lines[1].starts_with("0,1.0000000000000000e0,"));
    assert!(lines[2].starts_with("1,9.4999999999999996e-1,"));
    assert_eq!(lines.len(), 6);
    let meta: Metadata = serde_json::from_slice(&fs::read(dir.path().join("evolve.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta.command, "evolve");
    assert_eq!(meta.seed, 3);
    let original = ExperimentConfig::from_json(EVOLVE).unwrap();
    assert_eq!(meta.config, original);
}

#[test]
fn json_metadata_reparses() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", EVOLVE);
    let out = dir.path().join("bounds.json");
    let result = lrqc(&["bounds", "--config", &config, "--out", out.to_str().unwrap(), "--format", "json", "--seed", "11"]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let table: ResultTable = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    let mut want = ExperimentConfig::from_json(EVOLVE).unwrap();
    want.run.seed = 11;
    want.output.format = lrqc_cli::Format::Json;
    assert_eq!(table.metadata.config, want);
    let echoed = serde_json::to_string(&table.metadata.config).unwrap();
    assert_eq!(ExperimentConfig::from_json(&echoed).unwrap(), want);
    assert_eq!(entries(dir.path()), vec!["bounds.json", "c.json"]);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", EVOLVE);
    for command in ["evolve", "path1d", "gap", "oracle", "bounds", "fixcheck"] {
        for format in ["csv", "json"] {
            let mut bytes = Vec::new();
            for run in 0..2 {
                let out = dir.path().join(format!("{command}-{run}.{format}"));
                let result = lrqc(&[command, "--config", &config, "--out", out.to_str().unwrap(), "--format", format]);
                assert!(result.status.success(), "{command}: {}", String::from_utf8_lossy(&result.stderr));
                let mut b = fs::read(&out).unwrap();
                if format == "csv" {
                    b.extend(fs::read(dir.path().join(format!("{command}-{run}.csv.meta.json"))).unwrap());
                }
                bytes.push(b);
            }
            assert_eq!(bytes[0], bytes[1], "{command} {format}");
        }
    }
}

#[test]
fn seed_changes_estimates_only() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", EVOLVE);
    let run = |seed: &str| {
        let out = lrqc(&["oracle", "--config", &config, "--seed", seed, "--format", "json"]);
        assert!(out.status.success());
        serde_json::from_slice::<ResultTable>(&out.stdout).unwrap()
    };
    let (a, b) = (run("1"), run("2"));
    assert_eq!(a.floats("P_k"), b.floats("P_k"));
    assert_ne!(a.floats("mc_mean"), b.floats("mc_mean"));
    assert_eq!(a.floats("z").unwrap()[0], Some(0.0));
}

#[test]
fn stdout_when_no_path() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "c.json", EVOLVE);
    let result = lrqc(&["path1d", "--config", &config]);
    assert!(result.status.success());
    let text = String::from_utf8(result.stdout).unwrap();
    assert!(text.starts_with("quantity,index,value,valid\neigenvalue,0,1.0000000000000000e0,true\n"));
}

#[test]
fn validation_failure_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = [
        r#"{"model": {"n": 5, "d": 1, "structure": "path"}, "run": {"initial_region": [0]}}"#,
        r#"{"model": {"n": 5, "d": 2, "structure": "path"}, "run": {"initial_region": [7]}}"#,
        r#"{"model": {"n": 3, "d": 2, "structure": "path"},
            "policy": {"kind": "markov", "matrix": [[0.5, 0.4], [0, 1]], "initial": [1, 0]},
            "run": {"initial_region": [0]}}"#,
        r#"{"model": {"n": 5, "d": 2, "structure": "path"}, "run": {"initial_region": [0]}, "unknown": true}"#,
        "not json",
    ];
    for (i, text) in bad.iter().enumerate() {
        let config = write_config(dir.path(), &format!("bad{i}.json"), text);
        let out = dir.path().join(format!("out{i}.csv"));
        let result = lrqc(&["evolve", "--config", &config, "--out", out.to_str().unwrap()]);
        assert_eq!(result.status.code(), Some(2), "config {i}: {}", String::from_utf8_lossy(&result.stderr));
        assert!(!out.exists());
    }
    let result = lrqc(&["evolve", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    assert!(entries(dir.path()).iter().all(|n| n.starts_with("bad")));
}

#[test]
fn cap_violation_exits_3_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("gap", r#"{"model": {"n": 15, "d": 2, "structure": "path"}, "run": {"initial_region": [0]}}"#),
        ("fixcheck", r#"{"model": {"n": 11, "d": 2, "structure": "path"}, "run": {"initial_region": [0]}}"#),
        ("oracle", r#"{"model": {"n": 21, "d": 2, "structure": "path"}, "run": {"initial_region": [0], "samples": 2}}"#),
        ("evolve", r#"{"model": {"n": 65, "d": 2, "structure": "path"}, "run": {"initial_region": [0]}}"#),
    ];
    for (i, (command, text)) in cases.iter().enumerate() {
        let config = write_config(dir.path(), &format!("cap{i}.json"), text);
        let out = dir.path().join(format!("out{i}.json"));
        let result = lrqc(&[command, "--config", &config, "--out", out.to_str().unwrap()]);
        assert_eq!(result.status.code(), Some(3), "{command}: {}", String::from_utf8_lossy(&result.stderr));
        assert!(!out.exists());
    }
    assert!(entries(dir.path()).iter().all(|n| n.starts_with("cap")));
}
