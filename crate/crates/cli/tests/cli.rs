use std::fs;
use std::path::Path;
use std::process::Command;

fn hardball(args: &[&str], dir: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_hardball"))
        .args(args)
        .env("HARDBALL_THREADS", "2")
        .current_dir(dir)
        .output()
        .expect("binary runs")
        .status
        .code()
        .unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SIMULATE: &str = r#"
[params]
a = 1.0
d = 2
n = 3
t_max = 0.2
seed = 9

[simulate]
process = "reduced"
init = { kind = "stretched", energy = 20.0 }
stride = 5
replicates = 2
"#;

#[test]
fn verify_without_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(hardball(&["verify", "--out", "o"], dir.path()), 0);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "verify");
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn unknown_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &SIMULATE.replace("stride = 5", "strid = 5"));
    assert_eq!(hardball(&["simulate", "--config", &cfg, "--out", "o"], dir.path()), 2);
    let cfg = write(dir.path(), "d.toml", &SIMULATE.replace("seed = 9", "seed = 9\nsede = 1"));
    assert_eq!(hardball(&["simulate", "--config", &cfg, "--out", "o"], dir.path()), 2);
    assert_eq!(hardball(&["simulate", "--bogus"], dir.path()), 2);
}

#[test]
fn unstable_dt_is_rejected_unless_relaxed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &SIMULATE.replace("seed = 9", "seed = 9\ndt = 0.1"));
    assert_eq!(hardball(&["simulate", "--config", &cfg, "--out", "o"], dir.path()), 2);
    let diverging = r#"
[params]
a = 1.0
d = 2
n = 3
dt = 1.0
t_max = 2000.0
strict_dt = false

[verify]
process = "reduced"
init = { kind = "equilateral" }
"#;
    let cfg = write(dir.path(), "v.toml", diverging);
    assert_eq!(hardball(&["verify", "--config", &cfg, "--out", "v"], dir.path()), 3);
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SIMULATE);
    assert_eq!(hardball(&["simulate", "--config", &cfg, "--out", "a"], dir.path()), 0);
    assert_eq!(hardball(&["simulate", "--config", &cfg, "--out", "b", "--parallel", "1"], dir.path()), 0);
    assert_eq!(hardball(&["simulate", "--config", &cfg, "--out", "c", "--seed", "10"], dir.path()), 0);
    for f in ["trajectory_0.csv", "trajectory_1.csv", "report.json", "manifest.json"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        assert_eq!(a, fs::read(dir.path().join("b").join(f)).unwrap(), "{f} differs");
        assert_ne!(a, fs::read(dir.path().join("c").join(f)).unwrap(), "{f} ignores the seed");
    }
    let csv = fs::read_to_string(dir.path().join("a/trajectory_0.csv")).unwrap();
    assert!(csv.starts_with("# hardball simulate config_sha256="));
    assert!(csv.lines().next().unwrap().contains("seed=9"));
}

#[test]
fn anneal_rejects_decreasing_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
[params]
a = 1.0
d = 2
n = 3
dt = 1e-3

[anneal]
init = { kind = "equilateral" }
replicates = 2
schedule = [{ until = 1.0, a = 2.0 }, { until = 2.0, a = 1.0 }]
"#;
    let cfg = write(dir.path(), "c.toml", body);
    assert_eq!(hardball(&["anneal", "--config", &cfg, "--out", "o"], dir.path()), 2);
    // increasing, but the last segment is unstable at this dt
    let cfg = write(dir.path(), "d.toml", &body.replace("a = 1.0 }]", "a = 10.0 }]"));
    assert_eq!(hardball(&["anneal", "--config", &cfg, "--out", "o"], dir.path()), 2);
    let cfg = write(dir.path(), "e.toml", &body.replace("a = 1.0 }]", "a = 3.0 }]"));
    assert_eq!(hardball(&["anneal", "--config", &cfg, "--out", "o"], dir.path()), 0);
}

#[test]
fn gap_table_written() {
    let dir = tempfile::tempdir().unwrap();
    let body = "[params]\na = 1.0\nd = 2\nn = 2\n\n[gap]\na = [0.5, 2.0]\n";
    let cfg = write(dir.path(), "c.toml", body);
    assert_eq!(hardball(&["gap", "--config", &cfg, "--out", "o"], dir.path()), 0);
    let csv = fs::read_to_string(dir.path().join("o/gap.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# hardball gap"));
    assert_eq!(lines[1], "a,x_a,gap");
    assert!(lines[3].starts_with("2,-2"));
    // a section the command needs is missing
    assert_eq!(hardball(&["hit", "--config", &cfg, "--out", "o"], dir.path()), 2);
}
