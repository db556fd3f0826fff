use std::process::{Command, Output};

use ltlab_cli::config::{Matrix, PolySpec, RunConfig};
use ltlab_cli::run_suite;
use serde_json::Value;

fn ltlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn compute_fg_multiplicative() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fg.json");
    let o = ltlab(&["compute", "fg", "--preset", "multiplicative", "--N", "30", "--D", "20", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("F_P(X,Y) = X + Y + X*Y + O(deg"), "{}", stdout(&o));
    let js: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(js["target"], "fg");
    let rows = js["data"]["series"]["rows"].as_array().unwrap();
    assert_eq!(js["data"]["D_bivariate"], 20);
    assert_eq!(rows.len(), 21);
}

#[test]
fn compute_witt_level_one() {
    let o = ltlab(&["compute", "witt", "--p", "2", "--n", "1", "--N", "20"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("S_1 = -X0*Y0 + X1 + Y1"), "{s}");
    assert!(s.contains("P_1 = X0^2*Y1 + X1*Y0^2 + 2*X1*Y1"), "{s}");
}

#[test]
fn compute_json_and_tower() {
    let o = ltlab(&["compute", "tower", "--p", "5", "--n", "1", "--N", "20", "--D", "10", "--json"]);
    assert!(o.status.success());
    let js: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(js["data"]["degree"], 4);
    assert_eq!(js["data"]["omegas"][0]["v_p"], "1/4");
}

#[test]
fn thm4_with_canonical_polynomial_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"p": 3, "P": "canonical", "matrix": "single", "D_boundary": 60, "N": 60}"#).unwrap();
    let o = ltlab(&["check", "thm4", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let js: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    let cases = js["cases"].as_object().unwrap();
    assert_eq!(cases.len(), 1);
    let case = cases.values().next().unwrap();
    assert_eq!(case["error"]["kind"], "HypothesisViolated");
}

#[test]
fn config_errors_exit_three() {
    let o = ltlab(&["compute", "fg", "--preset", "nonsense"]);
    assert_eq!(o.status.code(), Some(3));
    let o = ltlab(&["check", "thm9"]);
    assert_eq!(o.status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"p": 3, "unknown_field": 1}"#).unwrap();
    let o = ltlab(&["check", "witt_axioms", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    // a coefficient list of the wrong degree is only noticed when the case runs
    std::fs::write(&cfg, r#"{"p": 3, "P": [0, 3, 1], "matrix": "single", "levels": [1], "D_series": 20}"#).unwrap();
    let o = ltlab(&["check", "thm1", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_round_trips() {
    let text = r#"{"p": 5, "N": 50, "D_series": 80, "P": "random(4)", "Q": [0, 5, 0, 0, 0, 1], "pi_prime": {"shift": 2}, "matrix": "single"}"#;
    let cfg = RunConfig::from_json(text).unwrap();
    assert_eq!(cfg.p_poly, PolySpec::Name("random(4)".into()));
    assert_eq!(cfg.q_spec(), &PolySpec::Coeffs(vec![0, 5, 0, 0, 0, 1]));
    assert_eq!(cfg.matrix, Matrix::Single);
    let again = RunConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(again, cfg);
}

#[test]
fn reports_are_deterministic() {
    let mut cfg = RunConfig { matrix: Matrix::Single, d_series: 40, n_prec: Some(50), seed: 7, ..RunConfig::default() };
    cfg.p_poly = PolySpec::random(3);
    cfg.q_poly = Some(PolySpec::random(4));
    for suite in ["thm1", "witt_axioms"] {
        let a = run_suite(&cfg, suite).unwrap();
        let b = run_suite(&cfg, suite).unwrap();
        assert!(a.pass(), "{}", a.summary());
        assert_eq!(a.to_json(), b.to_json());
    }
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("r{i}.json"))).collect();
    for p in &paths {
        let o = ltlab(&["check", "witt_axioms", "--seed", "11", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert!(std::fs::read(&paths[0]).unwrap() == std::fs::read(&paths[1]).unwrap());
}

#[test]
fn single_cell_thm1_reports_claim_ids() {
    let cfg = RunConfig {
        p: 2,
        matrix: Matrix::Single,
        levels: vec![2],
        d_series: 40,
        ..RunConfig::default()
    };
    let r = run_suite(&cfg, "thm1").unwrap();
    assert_eq!(r.exit_code(), 0, "{}", r.summary());
    let case = r.cases.values().next().unwrap();
    let ids: Vec<&str> = case.claims.keys().map(String::as_str).collect();
    assert_eq!(ids, ["expfp.radius", "overconvergence", "thm1.part1", "thm1.part2"]);
}

#[test]
fn too_little_precision_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"p": 3, "eis": [[-3], [0], [1]], "N": 80, "D_series": 200, "levels": [2], "P": "random(7)",
            "pi_prime": {"shift": 2}, "matrix": "single"}"#,
    )
    .unwrap();
    let o = ltlab(&["check", "thm1", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert!(stdout(&o).contains("PrecisionExhausted"));
}
