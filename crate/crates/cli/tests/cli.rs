//! End-to-end checks of the command surface: exit codes, artifact schemas,
//! determinism and atomicity.

use ssfrac_cli::run;

fn args(list: &[&str]) -> Vec<String> {
    std::iter::once("ssfrac".to_string())
        .chain(list.iter().map(|s| s.to_string()))
        .collect()
}

#[test]
fn gml_eval_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eval.csv");
    let code = run(args(&[
        "gml-eval",
        "--phi",
        "drift:b=1",
        "--alpha",
        "0.5",
        "--z",
        "0,1,-1",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "z,value,method,est_error");
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    // z = 0 -> 1, z = 1 -> e^2, z = -1 -> e^-2
    let vals: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!((vals[0] - 1.0).abs() < 1e-14);
    assert!((vals[1] - 7.3890560989306502).abs() < 1e-10);
    assert!((vals[2] - 0.13533528323661269).abs() < 1e-10);
    // 17 significant digits round-trip
    for r in &rows {
        let v: f64 = r[1].parse().unwrap();
        assert_eq!(format!("{v:.16e}"), r[1]);
    }
}

#[test]
fn gml_eval_stable_matches_erfcx_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eval.csv");
    let code = run(args(&[
        "gml-eval",
        "--phi",
        "stable",
        "--alpha",
        "0.5",
        "--z",
        "-1",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let row = text.lines().nth(1).unwrap();
    let v: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 0.427583576155807).abs() < 1e-9);
}

#[test]
fn parse_errors_exit_2() {
    assert_eq!(
        run(args(&["gml-eval", "--phi", "wiener", "--alpha", "0.5", "--z", "0"])),
        2
    );
    assert_eq!(
        run(args(&["gml-eval", "--phi", "drift:c=1", "--alpha", "0.5", "--z", "0"])),
        2
    );
    assert_eq!(run(args(&["gml-eval", "--alpha", "0.5", "--z", "0"])), 2);
    // clap-level unknown flag
    assert_eq!(run(args(&["gml-eval", "--bogus", "1"])), 2);
}

#[test]
fn eval_errors_exit_3() {
    // poisson outside the unit radius
    let code = run(args(&[
        "gml-eval",
        "--phi",
        "poisson:q=0.5",
        "--alpha",
        "0.5",
        "--z",
        "2",
    ]));
    assert_eq!(code, 3);
    // unsupported sampler/spec combination
    let code = run(args(&[
        "simulate",
        "--phi",
        "poisson:q=0.5",
        "--alpha",
        "0.5",
        "--t",
        "1",
        "--sampler",
        "exact",
        "--n",
        "10",
    ]));
    assert_eq!(code, 3);
}

#[test]
fn no_partial_output_on_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("partial.csv");
    let code = run(args(&[
        "gml-eval",
        "--phi",
        "poisson:q=0.5",
        "--alpha",
        "0.5",
        "--z",
        "0.5,2", // the second value fails after the first succeeded
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 3);
    assert!(!out.exists(), "failed run must not leave artifacts");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn simulate_json_summary_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a.json");
    let out2 = dir.path().join("b.json");
    for out in [&out1, &out2] {
        let code = run(args(&[
            "simulate",
            "--phi",
            "stable",
            "--alpha",
            "0.5",
            "--t",
            "1,2",
            "--sampler",
            "exact",
            "--n",
            "2000",
            "--seed",
            "42",
            "--out",
            out.to_str().unwrap(),
        ]));
        assert_eq!(code, 0);
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "identical seeds must give byte-identical JSON");

    let doc: serde_json::Value = serde_json::from_slice(&a).unwrap();
    let summaries = doc["summaries"].as_array().unwrap();
    assert_eq!(summaries.len(), 2);
    for s in summaries {
        assert!(s["mean"].is_f64() && s["std_error"].is_f64());
        assert_eq!(s["n"].as_u64(), Some(2000));
        assert_eq!(s["seed"].as_u64(), Some(42));
    }
    // stable mean of zeta_1 near 1/Gamma(1.5)
    let m = summaries[0]["mean"].as_f64().unwrap();
    let se = summaries[0]["std_error"].as_f64().unwrap();
    assert!((m - 1.1283791670955126).abs() < 5.0 * se);
}

#[test]
fn simulate_drift_deterministic_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("drift.json");
    let code = run(args(&[
        "simulate",
        "--phi",
        "drift:b=1",
        "--alpha",
        "0.5",
        "--t",
        "1",
        "--sampler",
        "exact",
        "--n",
        "100",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(doc["summaries"][0]["mean"].as_f64(), Some(2.0));
    assert_eq!(doc["summaries"][0]["std_error"].as_f64(), Some(0.0));
}

#[test]
fn simulate_dump_has_one_column_per_t() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("raw.csv");
    let code = run(args(&[
        "simulate",
        "--phi",
        "stable",
        "--alpha",
        "0.5",
        "--t",
        "1,2,4",
        "--n",
        "50",
        "--seed",
        "1",
        "--dump",
        dump.to_str().unwrap(),
        "--out",
        dir.path().join("s.json").to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&dump).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t=1,t=2,t=4");
    assert_eq!(lines.count(), 50);
}

#[test]
fn solve_grid_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let code = run(args(&[
        "solve",
        "--model",
        "laguerre",
        "--phi",
        "drift:b=1",
        "--alpha",
        "0.5",
        "--f",
        "mode:1",
        "--t",
        "0,1",
        "--x",
        "0:2:3",
        "--modes",
        "6",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("t,"));
    assert_eq!(lines.len(), 3); // header + 2 time rows
    // u(1, 0) with the drift spec: e^{-2} L_1(0) = e^{-2}
    let row1: Vec<f64> = lines[2]
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((row1[1] - 0.13533528323661269).abs() < 1e-10);
    // u(0, x) = L_1(x) = 1 - x at x = 0, 1, 2
    let row0: Vec<f64> = lines[1]
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((row0[1] - 1.0).abs() < 1e-10);
    assert!(row0[2].abs() < 1e-10);
    assert!((row0[3] + 1.0).abs() < 1e-10);

    let meta_path = dir.path().join("grid.csv.meta.json");
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&meta_path).unwrap()).unwrap();
    assert_eq!(meta["model"].as_str(), Some("laguerre"));
    assert_eq!(meta["alpha"].as_f64(), Some(0.5));
}

#[test]
fn solve_mode_zero_is_constant_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let code = run(args(&[
        "solve",
        "--model",
        "gen-jacobi:l1=5.5,m=2.5",
        "--phi",
        "stable",
        "--alpha",
        "0.5",
        "--f",
        "mode:0",
        "--t",
        "0,0.5,2",
        "--x",
        "0.25,0.5,0.75",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    for line in text.lines().skip(1) {
        for v in line.split(',').skip(1) {
            let u: f64 = v.parse().unwrap();
            assert!((u - 1.0).abs() < 1e-12, "constant mode drifted: {u}");
        }
    }
}

#[test]
fn solve_poisson_radius_violation_exits_3() {
    let code = run(args(&[
        "solve",
        "--model",
        "laguerre",
        "--phi",
        "poisson:q=0.5",
        "--alpha",
        "0.5",
        "--f",
        "mode:1",
        "--t",
        "4",
        "--x",
        "0,1",
    ]));
    assert_eq!(code, 3);
}

#[test]
fn config_file_merging_and_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "phi = drift:b=1\nalpha = 0.5\nz = 1 # comment\n").unwrap();
    let out = dir.path().join("out.csv");
    // flag --z overrides the config's z
    let code = run(args(&[
        "gml-eval",
        "--config",
        cfg.to_str().unwrap(),
        "--z",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("0.0"));

    std::fs::write(&cfg, "phi = drift:b=1\nwhat = 3\n").unwrap();
    let code = run(args(&["gml-eval", "--config", cfg.to_str().unwrap()]));
    assert_eq!(code, 2, "unknown config keys are rejected");
}

#[test]
fn verify_power_suite_passes() {
    assert_eq!(run(args(&["verify", "--suite", "power"])), 0);
    assert_eq!(run(args(&["verify", "--suite", "no-such-suite"])), 2);
}
