use std::process::{Command, Output};

fn trade_sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trade-sim"))
        .args(args)
        .env_remove("TRADE_SIM_WORKERS")
        .output()
        .expect("spawn trade-sim")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn run_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = trade_sim(&[
        "run", "--instance", "uniform", "--mechanism", "fixed:p=0,q=1", "--T", "1000", "--trials", "3", "--seed", "5",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut rd = csv::Reader::from_path(&out).unwrap();
    let recs: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(recs.len(), 2);
    assert_eq!(&recs[0][2], "1000");
    let mean: f64 = recs[0][4].parse().unwrap();
    assert!((mean - 125.0).abs() < 1e-9);
    assert_eq!(&recs[1][2], "fit");
}

#[test]
fn run_json_with_round_logs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = trade_sim(&[
        "run", "--instance", "uniform", "--mechanism", "gbb-onebit:K=4,beta=5", "--T", "200", "--out",
        out.to_str().unwrap(), "--format", "json", "--log-rounds",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let rounds = v["trials"][0][0]["rounds"].as_array().unwrap();
    let idle = v["trials"][0][0]["idle_rounds"].as_u64().unwrap();
    assert_eq!(rounds.len() as u64 + idle, 200);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = trade_sim(&[
            "run", "--instance", "pwu:seed=4", "--mechanism", "gbb-onebit", "--T", "3000", "--trials", "3", "--seed",
            "9", "--out", p.to_str().unwrap(), "--format", "json",
        ]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn scale_fits_linear_control() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = trade_sim(&[
        "scale", "--instance", "uniform", "--mechanism", "fixed:p=0,q=1", "--T-list", "1000,4000,16000", "--trials",
        "2", "--out", out.to_str().unwrap(), "--format", "json",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let slope = v["fit"]["slope"].as_f64().unwrap();
    assert!((slope - 1.0).abs() < 1e-9, "{slope}");
}

#[test]
fn scale_needs_three_horizons() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = trade_sim(&[
        "scale", "--instance", "uniform", "--mechanism", "gbb-onebit", "--T-list", "100,200", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn verify_instance_exit_codes() {
    let o = trade_sim(&["verify-instance", "--family", "corr-discrete", "--T", "1e4"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("PASS") && !text.contains("FAIL"));

    let o = trade_sim(&["verify-instance", "--family", "indep-semi", "--T", "1e4", "--grid", "50"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));

    let o = trade_sim(&["verify-instance", "--family", "nonsense", "--T", "1e4"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn audit_gbb_passes() {
    let o = trade_sim(&[
        "audit-gbb", "--instance", "uniform", "--mechanism", "gbb-onebit", "--T", "5000", "--trials", "4", "--seed", "2",
    ]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("PASS 4/4"));
}

#[test]
fn audit_gbb_flags_losses() {
    // Posting p > q on uniform values loses money on every trade.
    let o = trade_sim(&[
        "audit-gbb", "--instance", "uniform", "--mechanism", "fixed:p=0.6,q=0.4", "--T", "500", "--trials", "2",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn config_errors() {
    let bad = [
        vec!["run", "--instance", "uniform", "--mechanism", "bogus", "--T", "10", "--out", "/tmp/x.csv"],
        vec!["run", "--instance", "uniform", "--mechanism", "gbb-onebit", "--T", "ten", "--out", "/tmp/x.csv"],
        vec!["run", "--instance", "uniform", "--mechanism", "gbb-onebit", "--T", "10", "--trials", "0", "--out", "/tmp/x.csv"],
        vec!["run", "--instance", "uniform", "--mechanism", "gbb-onebit", "--T", "10", "--out", "/tmp/x", "--format", "xml"],
        vec!["frobnicate"],
    ];
    for args in bad {
        let o = trade_sim(&args);
        assert_eq!(code(&o), 3, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(code(&trade_sim(&["--help"])), 0);
    assert_eq!(code(&trade_sim(&["--version"])), 0);
}

#[test]
fn bad_worker_count_is_config_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_trade-sim"))
        .args(["audit-gbb", "--instance", "uniform", "--mechanism", "gbb-onebit", "--T", "100"])
        .env("TRADE_SIM_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}
