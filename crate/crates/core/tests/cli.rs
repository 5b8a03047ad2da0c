use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use instance_forge::solvers::ORACLE_ENV;

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_instance-forge"))
        .args(args)
        .env_remove(ORACLE_ENV)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn instance_json(coords: &[(f64, f64)]) -> String {
    let cities: Vec<String> = coords.iter().map(|(x, y)| format!("[{x}, {y}]")).collect();
    format!(
        "{{\"n\": {}, \"cities\": [{}]}}",
        coords.len(),
        cities.join(", ")
    )
}

#[test]
fn features_command() {
    let dir = tempfile::tempdir().unwrap();
    let square = write(
        dir.path(),
        "square.json",
        &instance_json(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]),
    );
    let broken = write(
        dir.path(),
        "broken.json",
        "{\"n\": 3, \"cities\": [[0, 0]]}",
    );

    let empty = forge(&["features"]);
    assert!(empty.status.success());
    assert_eq!(stdout(&empty).lines().count(), 1);

    let ok = forge(&["features", &square]);
    assert!(ok.status.success());
    let text = stdout(&ok);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "chull_area").unwrap();
    assert_eq!(row[col], "1");
    assert_eq!(row[0], "square");

    let mixed = forge(&["features", &square, &broken]);
    assert_eq!(mixed.status.code(), Some(1));
    assert_eq!(stdout(&mixed).lines().count(), 2);
    assert!(String::from_utf8_lossy(&mixed.stderr).contains("broken.json"));
}

#[test]
fn solve_command() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(
        dir.path(),
        "tri.json",
        &instance_json(&[(0.1, 0.1), (0.9, 0.2), (0.4, 0.8)]),
    );
    let out = forge(&["solve", &tri]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["alpha"], 1.0);
    assert_eq!(report["A"], report["OPT"]);
    assert_eq!(report["best_tour"].as_array().unwrap().len(), 3);

    let big: Vec<(f64, f64)> = (0..20)
        .map(|k| ((k as f64) / 20.0, ((k * 7) % 20) as f64 / 20.0))
        .collect();
    let big = write(dir.path(), "big.json", &instance_json(&big));
    let out = forge(&["solve", &big]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("16"));

    let cache = write(dir.path(), "opt.json", "{\"tri\": 10.0}");
    let out = forge(&["solve", &tri, "--oracle-cache", &cache]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn experiment(dir: &Path, out: &Path) -> String {
    let cfg = serde_json::json!({
        "runs": [
            {"n": 7, "mode": "easy", "feature": "nnds_mean", "alpha_threshold": 1.0, "mu": 4, "lambda": 2, "generations": 20},
            {"n": 7, "mode": "hard", "feature": "nnds_mean", "alpha_threshold": 1.02, "mu": 4, "lambda": 2, "generations": 20}
        ],
        "seeds": [1, 2, 3],
        "output_dir": out,
        "parallelism": 2
    });
    write(dir, "experiment.json", &cfg.to_string())
}

fn run_dirs(text: &str) -> Vec<PathBuf> {
    text.lines().map(PathBuf::from).collect()
}

#[test]
fn evolve_report_classify() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let cfg_a = experiment(dir.path(), &out_a);
    let first = forge(&["evolve", &cfg_a]);
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let dirs = run_dirs(&stdout(&first));
    assert_eq!(dirs.len(), 6);

    let cfg_b = experiment(dir.path(), &out_b);
    assert!(forge(&["evolve", &cfg_b]).status.success());
    for d in &dirs {
        let twin = out_b.join(d.file_name().unwrap());
        assert_eq!(
            fs::read(d.join("generations.csv")).unwrap(),
            fs::read(twin.join("generations.csv")).unwrap()
        );
    }

    let args: Vec<&str> = dirs.iter().map(|d| d.to_str().unwrap()).collect();
    let raw = dir.path().join("raw.csv");
    let mut report_args = vec!["report-ranges", "--raw", raw.to_str().unwrap()];
    report_args.extend(&args);
    let report = forge(&report_args);
    assert!(report.status.success());
    assert_eq!(stdout(&report).lines().count(), 7);
    assert_eq!(fs::read_to_string(&raw).unwrap().lines().count(), 1 + 6 * 4);

    let mut classify_args = vec![
        "classify",
        "--kernel",
        "rbf",
        "--C",
        "100",
        "--gamma",
        "2",
        "--combo-size",
        "2",
    ];
    classify_args.extend(&args);
    let sweep = forge(&classify_args);
    assert!(
        sweep.status.success(),
        "{}",
        String::from_utf8_lossy(&sweep.stderr)
    );
    let text = stdout(&sweep);
    assert_eq!(text.lines().count(), 22);
    assert!(text.lines().skip(1).all(|l| l.contains(",7,rbf,100,2,")));

    let easy_only: Vec<&str> = args
        .iter()
        .copied()
        .filter(|a| a.contains("easy"))
        .collect();
    let mut single = vec!["classify"];
    single.extend(&easy_only);
    let rejected = forge(&single);
    assert_eq!(rejected.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&rejected.stderr).contains("hard"));
}

#[test]
fn bad_config_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        "{\n  \"runs\": [],\n  \"seeds\": [1],\n  \"output_dir\": 5\n}",
    );
    let out = forge(&["evolve", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let missing = forge(&["evolve", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(1));
}
