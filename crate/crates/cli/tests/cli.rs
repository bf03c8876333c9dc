use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_robust-moss");

fn bundled_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/paperv.cfg")
}

fn robust_moss(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("RMOSS_THREADS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

fn small_config(extra: &str) -> String {
    format!(
        r#"{{
            "algorithms": ["robust_moss", "moss", "robust_ucb_truncated", "robust_ucb_catoni"],
            "horizon": 600,
            "means": [-0.3, 0.0, 0.3],
            "noise": {{"kind": "gpd_symmetric", "shape": 0.33, "scale": 0.32}},
            "u": 1.0, "eps": 1.0, "a": 1.1, "eta": 2.2,
            "runs": 5,
            "grid_points": 30{extra}
        }}"#
    )
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn validate_reports_both_sides() {
    let ok = robust_moss(&["validate", "--a", "1.1", "--eta", "2.2"]);
    assert_eq!(ok.status.code(), Some(0));
    let text = stdout(&ok);
    assert!(
        text.contains("2.22595") && text.contains("2.200000"),
        "{text}"
    );

    let bad = robust_moss(&["validate", "--a", "1.1", "--eta", "1.0"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stdout(&bad).contains("slightly larger than 1"));

    assert_eq!(
        robust_moss(&["validate", "--a", "2", "--eta", "10"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn malformed_numbers_are_usage_errors() {
    let o = robust_moss(&["validate", "--a", "one", "--eta", "2.2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!stderr(&o).is_empty());
}

#[test]
fn bounds_for_bundled_config() {
    let o = robust_moss(&["bounds", bundled_config().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lower = 0.01 * 3f64.sqrt() * 1e5f64.sqrt();
    assert!(
        text.contains(&format!("minimax lower bound       {lower:.6}")),
        "{text}"
    );
    assert!(text.contains("127.960334"), "{text}");
}

#[test]
fn bounds_with_equal_means_has_zero_gap_term() {
    let dir = tempfile::tempdir().unwrap();
    let body = small_config("").replace("[-0.3, 0.0, 0.3]", "[0.1, 0.1, 0.1]");
    let cfg = write_config(dir.path(), &body);
    let o = robust_moss(&["bounds", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("gap-dependent bound       0.000000"));
}

#[test]
fn run_writes_csv_and_plot_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small_config(r#", "write_runs": true"#));
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for (out, threads) in [(&out_a, "1"), (&out_b, "3")] {
        let o = robust_moss(&[
            "run",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let agg_a = std::fs::read_to_string(out_a.join("aggregate.csv")).unwrap();
    let agg_b = std::fs::read_to_string(out_b.join("aggregate.csv")).unwrap();
    assert_eq!(agg_a, agg_b);
    assert_eq!(
        std::fs::read(out_a.join("runs.csv")).unwrap(),
        std::fs::read(out_b.join("runs.csv")).unwrap()
    );
    let mut lines = agg_a.lines();
    assert_eq!(lines.next(), Some("algorithm,t,mean_regret,q05,q50,q95"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.iter().any(|r| r.starts_with("robust_ucb_catoni,600,")));
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 6);
        let q: Vec<f64> = fields[3..].iter().map(|f| f.parse().unwrap()).collect();
        assert!(q[0] <= q[1] && q[1] <= q[2]);
    }
    let runs = std::fs::read_to_string(out_a.join("runs.csv")).unwrap();
    assert!(runs.starts_with("algorithm,run,t,cum_regret\n"));
    assert!(std::fs::read_to_string(out_a.join("regret.svg"))
        .unwrap()
        .starts_with("<svg"));
}

#[test]
fn thread_count_can_come_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &small_config(""));
    let out = dir.path().join("env");
    let o = Command::new(BIN)
        .args(["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .env("RMOSS_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out.join("aggregate.csv").exists());
    let bad = Command::new(BIN)
        .args(["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .env("RMOSS_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn invalid_tuning_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &small_config("").replace(r#""eta": 2.2"#, r#""eta": 1.0"#),
    );
    let o = robust_moss(&[
        "run",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("eta*psi(2*eta/a)") && err.contains("2*a = 2.200000"),
        "{err}"
    );
    assert!(!dir.path().join("aggregate.csv").exists());
}

#[test]
fn heavy_arm_beyond_moment_scale_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &small_config("").replace(r#""u": 1.0"#, r#""u": 0.5"#),
    );
    let o = robust_moss(&["bounds", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("exceeds u^(1+eps)"));
}

#[test]
fn missing_config_is_reported() {
    let o = robust_moss(&["bounds", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot read"));
}

#[test]
fn bundled_config_is_valid() {
    let cfg = robust_moss_cli::ExperimentConfig::load(&bundled_config()).unwrap();
    assert_eq!(cfg.algorithms.len(), 4);
    assert_eq!(cfg.runs, 200);
    assert_eq!(cfg.means, vec![-0.3, 0.0, 0.3]);
}
