use cran_core::sweep::{preset, run_sweep, sidecar_path, BaseConfig, Preset, SweepConfig, CSV_HEADER};
use cran_core::{evaluate_point, Error, ExpectationPolicy, FailureModel, Scheme};

fn small_config() -> SweepConfig {
    SweepConfig::from_json(
        r#"{
            "base": {"cells": 4, "q": 0.2},
            "swept_parameter": "alpha_sq",
            "values": [0.0, 0.3, 0.6],
            "schemes": ["OMA", "NOMA-TIN", "NOMA-SIC", "ideal-punct"],
            "variants": [{"mu": "1/2"}, {"mu": "1"}],
            "policy": {"strategy": "monte_carlo", "sample_count": 4000, "seed": 3}
        }"#,
    )
    .unwrap()
}

#[test]
fn csv_shape_and_ordering() {
    let result = run_sweep(&small_config(), Some(2)).unwrap();
    let csv = result.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 1 + 3 * 4 * 2);
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 9);
        assert_eq!(cols[0], "alpha_sq");
        assert_eq!(cols[8], "3");
    }
    let keys: Vec<(String, String)> =
        lines[1..].iter().map(|l| l.split(',').collect::<Vec<_>>()).map(|c| (c[1].to_string(), c[2].to_string())).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.0.parse::<f64>().unwrap().total_cmp(&b.0.parse().unwrap()).then(a.1.cmp(&b.1)));
    assert_eq!(keys, sorted);
    assert!(keys.iter().any(|k| k.1 == "NOMA-TIN@mu=1/2"));
}

#[test]
fn thread_count_does_not_change_bytes() {
    let config = small_config();
    let a = run_sweep(&config, Some(1)).unwrap().to_csv();
    let b = run_sweep(&config, Some(4)).unwrap().to_csv();
    let c = run_sweep(&config, None).unwrap().to_csv();
    assert_eq!(a, b);
    assert_eq!(a, c);
    let mut other = config.clone();
    other.policy.seed = 4;
    assert_ne!(a, run_sweep(&other, Some(1)).unwrap().to_csv());
}

#[test]
fn rows_match_single_point_evaluation() {
    let config = small_config();
    let result = run_sweep(&config, None).unwrap();
    let row = result.rows.iter().find(|r| r.scheme == "NOMA-SIC@mu=1" && r.swept_value == 0.3).unwrap();
    let mut base = BaseConfig { mu: "1".into(), ..config.base.clone() };
    base.set("alpha_sq", "0.3").unwrap();
    let point = evaluate_point(&base.to_params().unwrap(), Scheme::NomaSic, &config.policy, FailureModel::Conditional)
        .unwrap();
    assert_eq!(row.r_b, point.r_b);
    assert_eq!(row.r_u, point.r_u);
    assert_eq!(row.mc_std_err, point.mc_std_err());
}

#[test]
fn presets_have_expected_shape() {
    let gamma = run_sweep(&preset(Preset::Gamma), None).unwrap();
    assert_eq!(gamma.rows.len(), 21 * 4 * 2);
    let q = run_sweep(&preset(Preset::Q), None).unwrap();
    assert_eq!(q.rows.len(), 13 * 4);
    let last = q.rows.iter().filter(|r| r.swept_value == 1.0).collect::<Vec<_>>();
    assert!(last.iter().any(|r| r.scheme == "NOMA-punct" && r.r_b == 0.0));
    let rho = run_sweep(&preset(Preset::Rho), None).unwrap();
    assert!(rho.rows.iter().all(|r| r.scheme.ends_with("@p_u_db=10")));
    let latency = run_sweep(&preset(Preset::Latency), None).unwrap();
    let undefined: Vec<_> = latency.rows.iter().filter(|r| r.swept_value == 1.0 && r.scheme.starts_with("OMA")).collect();
    assert_eq!(undefined.len(), 2);
    assert!(undefined.iter().all(|r| r.r_b.is_nan() && !r.feasible));
    assert!(latency.to_csv().contains(",NaN,"));
}

#[test]
fn latency_preset_shows_blockage_boundary() {
    let result = run_sweep(&preset(Preset::Latency), None).unwrap();
    for r in result.rows.iter().filter(|r| r.scheme == "OMA@mu=1") {
        match r.swept_value as usize {
            2 | 3 => assert!(r.feasible && r.r_u > 0.0),
            4.. => assert!(!r.feasible && r.r_u == 0.0 && r.eps_u_d == 0.0),
            _ => {}
        }
    }
}

#[test]
fn writes_csv_sidecar_and_plot_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let result = run_sweep(&small_config(), None).unwrap();
    result.write(&path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), result.to_csv());
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(sidecar_path(&path)).unwrap()).unwrap();
    assert_eq!(meta["seed"], 3);
    assert_eq!(meta["config"]["swept_parameter"], "alpha_sq");
    let files = result.write_plot_files(&dir.path().join("plots")).unwrap();
    assert_eq!(files.len(), 8);
    assert!(files.iter().any(|f| f.ends_with("alpha_sq_NOMA-TIN_mu_1_2.dat")));
}

#[test]
fn invalid_configs_are_rejected() {
    let mut c = small_config();
    c.schemes.clear();
    assert!(matches!(run_sweep(&c, None), Err(Error::Config(_))));
    let mut c = small_config();
    c.values = vec![0.3, 0.1, 0.5];
    assert!(matches!(run_sweep(&c, None), Err(Error::Config(_))));
    let mut c = small_config();
    c.swept_parameter = "mu".into();
    assert!(matches!(run_sweep(&c, None), Err(Error::Config(_))));
    assert!(matches!(run_sweep(&small_config(), Some(0)), Err(Error::Config(_))));
    let unknown = SweepConfig::from_json(r#"{"swept_parameter":"q","values":[0.1],"schemes":["OMA"],"bogus":1}"#);
    assert!(matches!(unknown, Err(Error::Config(_))));
    let bad_scheme = SweepConfig::from_json(r#"{"swept_parameter":"q","values":[0.1],"schemes":["FDMA"]}"#);
    assert!(matches!(bad_scheme, Err(Error::Config(_))));
    let mut c = small_config();
    c.policy = ExpectationPolicy { sample_count: 0, ..ExpectationPolicy::monte_carlo(1, 0) };
    assert!(matches!(run_sweep(&c, None), Err(Error::Config(_))));
}

#[test]
fn base_config_keys() {
    let mut b = BaseConfig::default();
    b.set("L_U", "3").unwrap();
    b.set("mu", "1/4").unwrap();
    assert_eq!(b.l_u, 3);
    let p = b.to_params().unwrap();
    assert_eq!(p.subbands(), 4);
    assert!(b.set("nonsense", "1").is_err());
    assert!(b.set("l_u", "2.5").is_err());
    assert!(BaseConfig { mu: "0.25".into(), ..BaseConfig::default() }.to_params().is_err());
}
