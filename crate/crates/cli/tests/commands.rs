use std::path::Path;
use std::process::{Command, Output};

fn cran_sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cran-sim"))
        .args(args)
        .env_remove("CRAN_SIM_SEED")
        .output()
        .expect("spawn cran-sim")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_passes_with_four_lines() {
    let out = cran_sim(&["verify", "--tuples", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().all(|l| l.contains(" PASS ")));
    let json = cran_sim(&["verify", "--tuples", "2", "--json"]);
    for line in stdout(&json).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["passed"], true);
    }
}

#[test]
fn sweep_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("q.csv");
    let plots = dir.path().join("plots");
    let out = cran_sim(&[
        "sweep", "--preset", "q", "--out", csv.to_str().unwrap(), "--plot-dir", plots.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 13 * 4);
    assert!(Path::new(&format!("{}.meta.json", csv.display())).exists());
    assert_eq!(std::fs::read_dir(&plots).unwrap().count(), 4);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["sweep", "--preset", "rho", "--strategy", "mc", "--samples", "3000", "--seed", "11"];
    let a = cran_sim(&args);
    let b = cran_sim(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().skip(1).all(|l| l.ends_with(",11")));
}

#[test]
fn seed_falls_back_to_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_cran-sim"))
        .args(["sweep", "--preset", "latency", "--strategy", "mc", "--samples", "2000"])
        .env("CRAN_SIM_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().skip(1).all(|l| l.ends_with(",42")));
}

#[test]
fn overrides_apply() {
    let out = cran_sim(&["sweep", "--preset", "rho", "--p-u-db", "5,15", "--schemes", "NOMA-TIN", "--cells", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1 + 11 * 2);
    assert!(text.contains("NOMA-TIN@p_u_db=5,") && text.contains("NOMA-TIN@p_u_db=15,"));
}

#[test]
fn rate_prints_json() {
    let out = cran_sim(&["rate", "--scheme", "noma-sic", "--set", "q=0.3", "--set", "rho_sq=0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["scheme"], "NOMA-SIC");
    assert!(v["R_B"].as_f64().unwrap() > 0.0);
    assert!((v["R_U"].as_f64().unwrap() - 0.871).abs() < 1e-3);
    assert!(v["diagnostics"]["exact_states"].as_f64().unwrap() > 0.0);
}

#[test]
fn invalid_input_exits_one_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    let csv = dir.path().join("out.csv");
    std::fs::write(&config, r#"{"swept_parameter":"q","values":[0.1,0.2],"schemes":[]}"#).unwrap();
    let out = cran_sim(&["sweep", "--config", config.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!csv.exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("schemes"));
    assert_eq!(cran_sim(&["rate", "--set", "alpha_sq=2"]).status.code(), Some(1));
    assert_eq!(cran_sim(&["rate", "--set", "mu=0.25"]).status.code(), Some(1));
    assert_eq!(cran_sim(&["sweep"]).status.code(), Some(1));
    assert_eq!(cran_sim(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_files_exit_three() {
    let out = cran_sim(&["sweep", "--config", "/nonexistent/sweep.json"]);
    assert_eq!(out.status.code(), Some(3));
    let out = cran_sim(&["sweep", "--preset", "q", "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(3));
}
