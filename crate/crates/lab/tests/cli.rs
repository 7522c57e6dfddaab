use std::path::Path;
use std::process::{Command, Output};

fn lab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schatten-lab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("SCHATTEN_LAB_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(text: &str, name: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{name}: ")))
        .unwrap_or_else(|| panic!("no {name} in {text}"))
        .to_owned()
}

fn files(dir: &Path, prefix: &str) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with(prefix))
        .collect();
    names.sort();
    names
}

#[test]
fn kernel_defaults_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(dir.path(), &["kernel", "--defaults"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let max: f64 = field(&stdout(&o), "max residual").parse().unwrap();
    assert!(max <= 1e-6);
    assert_eq!(files(dir.path(), "kernel-residuals-").len(), 2);
    assert_eq!(files(dir.path(), "kernel-").len(), 3);
}

#[test]
fn truncated_kernel_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(dir.path(), &["kernel", "--s-extent", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("representation residual"));
}

#[test]
fn kernel_help() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(dir.path(), &["kernel", "--help"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("--s-extent"));
}

#[test]
fn norm_of_all_ones_symbol() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(dir.path(), &["norm", "--ones", "4", "--p", "3"]);
    assert!(o.status.success());
    let value: f64 = field(&stdout(&o), "value").parse().unwrap();
    assert!((value - 1.0).abs() <= 1e-9);
    assert_eq!(files(dir.path(), "norm-witness-").len(), 1);
}

#[test]
fn norm_of_oscillatory_symbol_at_p2() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(
        dir.path(),
        &["norm", "--mus", "1,2,3,4,5,6,7,8", "--s", "10", "--p", "2"],
    );
    assert!(o.status.success());
    let value: f64 = field(&stdout(&o), "value").parse().unwrap();
    assert!((value - 1.0).abs() <= 1e-6);
}

#[test]
fn norm_of_strictified_absolute_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(
        dir.path(),
        &[
            "norm",
            "--function",
            "absolute-value",
            "--strictify",
            "0.01",
            "--lambdas=-2,-1,1,3",
            "--p",
            "1.5",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(field(&text, "witness_check"), "ok");
    assert!(field(&text, "value").parse::<f64>().unwrap() > 0.0);
}

#[test]
fn norm_from_symbol_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("symbol.json");
    std::fs::write(&path, r#"{"n": 2, "re": [[0, 1], [1, 0]]}"#).unwrap();
    let o = lab(
        dir.path(),
        &["norm", "--symbol", path.to_str().unwrap(), "--p", "3"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let value: f64 = field(&stdout(&o), "value").parse().unwrap();
    assert!((value - 1.0).abs() <= 1e-9);

    std::fs::write(&path, r#"{"n": 2, "re": [[0, 1]]}"#).unwrap();
    let o = lab(
        dir.path(),
        &["norm", "--symbol", path.to_str().unwrap(), "--p", "2"],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn norm_rejects_bad_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(dir.path(), &["norm", "--ones", "3", "--p", "0.5"]);
    assert!(!o.status.success());
}

#[test]
fn lipschitz_contraction_at_p2() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(
        dir.path(),
        &[
            "experiment",
            "lipschitz",
            "--p",
            "2",
            "--n",
            "8",
            "--trials",
            "50",
            "--seed",
            "1",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json = files(dir.path(), "lipschitz-")
        .into_iter()
        .find(|n| n.ends_with(".json"))
        .unwrap();
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join(json)).unwrap()).unwrap();
    assert!(summary["summary"]["max_ratio"].as_f64().unwrap() <= 1.0 + 1e-9);
    assert_eq!(summary["parameters"]["seed"], 1);
    assert_eq!(summary["parameters"]["suite"]["trials"], 50);
}

#[test]
fn unknown_suite_fails_with_hint() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(dir.path(), &["experiment", "nosuch"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("possible values"));
}

#[test]
fn failing_invariant_lists_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    // A kernel this coarse cannot reconstruct the symbols.
    std::fs::write(
        &config,
        r#"{"kernel": {"s_extent": 5}, "suite": {"reconstruction_cases": 3}}"#,
    )
    .unwrap();
    let o = lab(
        dir.path(),
        &[
            "experiment",
            "reconstruction",
            "--config",
            config.to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("reconstruction row"), "{stderr}");
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"seed": 5, "suite": {"trials": 7, "n_grid": [3]}}"#,
    )
    .unwrap();
    let o = lab(
        dir.path(),
        &[
            "experiment",
            "lipschitz",
            "--config",
            config.to_str().unwrap(),
            "--p",
            "2",
            "--trials",
            "4",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json = files(dir.path(), "lipschitz-")
        .into_iter()
        .find(|n| n.ends_with(".json"))
        .unwrap();
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join(json)).unwrap()).unwrap();
    let params = &summary["parameters"];
    assert_eq!(params["seed"], 5);
    assert_eq!(params["suite"]["trials"], 4);
    assert_eq!(params["suite"]["n_grid"], serde_json::json!([3]));

    // The echoed parameters reproduce the run.
    let echo = dir.path().join("echo.json");
    std::fs::write(&echo, params.to_string()).unwrap();
    let again = dir.path().join("again");
    let o = lab(
        &again,
        &[
            "experiment",
            "lipschitz",
            "--config",
            echo.to_str().unwrap(),
        ],
    );
    assert!(o.status.success());
    for name in files(dir.path(), "lipschitz-") {
        assert_eq!(
            std::fs::read(dir.path().join(&name)).unwrap(),
            std::fs::read(again.join(&name)).unwrap(),
            "{name}"
        );
    }
}
