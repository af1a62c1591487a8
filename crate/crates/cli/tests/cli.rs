use std::process::{Command, Output};

use serde_json::Value;
use tpht::matrices::tpht_truncation;
use tpht::Symbol;

fn tpht(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpht"))
        .args(args)
        .env_remove("TPHT_SEED")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = tpht(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn rows(v: &Value) -> Vec<Vec<f64>> {
    v.as_array().unwrap().iter().map(floats).collect()
}

#[test]
fn matrix_examples() {
    let v = json(&["matrix", "--roots", "1,1", "-n", "2"]);
    assert_eq!(rows(&v["matrix"]), vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
    let v = json(&["matrix", "--roots", "", "-n", "2"]);
    assert_eq!(rows(&v["matrix"]), vec![vec![0.0, 1.0], vec![0.0, 0.0]]);
}

#[test]
fn matrix_output_round_trips_bit_exactly() {
    let roots = [0.1, 1.0 / 3.0, std::f64::consts::E];
    let arg = roots.map(|r| format!("{r:?}")).join(",");
    let t = tpht_truncation(&Symbol::from_roots(&roots).unwrap(), 6);

    let v = json(&["matrix", "--roots", &arg, "-n", "6"]);
    for (i, row) in rows(&v["matrix"]).iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            assert_eq!(x.to_bits(), t[(i, j)].to_bits());
        }
    }

    let out = tpht(&["matrix", "--roots", &arg, "-n", "6", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for (i, line) in text.lines().enumerate() {
        for (j, cell) in line.split(',').enumerate() {
            assert_eq!(cell.parse::<f64>().unwrap().to_bits(), t[(i, j)].to_bits());
        }
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(tpht(&["matrix", "--roots", "1,x", "-n", "2"]).status.code(), Some(2));
    assert_eq!(tpht(&["matrix", "--roots", "1,-1", "-n", "2"]).status.code(), Some(2));
    assert_eq!(tpht(&["gs", "--ones", "2", "-p", "0"]).status.code(), Some(2));
    assert_eq!(tpht(&["gs", "--ones", "2"]).status.code(), Some(2));
    assert_eq!(tpht(&["mc", "--dist", "bernoulli", "--q", "1.5", "-m", "2", "-p", "2"]).status.code(), Some(2));
}

#[test]
fn lu_examples() {
    let v = json(&["lu", "--roots", "1,1,1", "-n", "3"]);
    let l = rows(&v["l"]);
    let u = rows(&v["u"]);
    // leading minors of [[3,1,0],[3,3,1],[1,3,3]] are 3, 6, 10
    assert_eq!(u[0][0], 3.0);
    assert!((u[1][1] - 2.0).abs() < 1e-15);
    assert!((u[2][2] - 10.0 / 6.0).abs() < 1e-15);
    assert_eq!(l[1][0], 1.0);
    assert!((l[2][0] - 1.0 / 3.0).abs() < 1e-15);
    assert!((l[2][1] - 4.0 / 3.0).abs() < 1e-15);
    assert!(v["trajectory"].as_array().unwrap().is_empty());

    let v = json(&["lu", "--ones", "4", "-n", "6", "--dynamics", "3"]);
    let traj = v["trajectory"].as_array().unwrap();
    assert_eq!(traj.len(), 3);
    for step in traj {
        assert_eq!(step["is_tp"], Value::Bool(true));
        assert!(step["eigenvalue_drift"].as_f64().unwrap() < 1e-9);
    }

    let out = tpht(&["lu", "--roots", "0", "-n", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ZeroLeadingMinor"));
}

#[test]
fn spectrum_examples() {
    let v = json(&["spectrum", "--ones", "5", "-n", "5", "--oscillation"]);
    let ev = floats(&v["eigenvalues"]);
    for (got, want) in ev.iter().zip([11.0024, 7.9317, 4.3187, 1.5285, 0.2187]) {
        assert!((got - want).abs() < 5e-4);
    }
    let osc = &v["oscillation"];
    let var: Vec<u64> = osc["sign_variations"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert_eq!(var, vec![0, 1, 2, 3, 4]);
    assert!(osc["interlacing_ok"].as_array().unwrap().iter().all(|b| b == true));
    assert_eq!(osc["nodes"].as_array().unwrap().len(), 5);

    let v = json(&["spectrum", "--ones", "3", "-n", "1", "--oscillation"]);
    assert_eq!(floats(&v["eigenvalues"]), vec![3.0]);
    assert_eq!(v["oscillation"]["nodes"], serde_json::json!([[]]));
}

#[test]
fn spectrum_writes_charts() {
    let dir = tempfile::tempdir().unwrap();
    let osc = dir.path().join("osc.svg");
    let hist = dir.path().join("hist.svg");
    json(&["spectrum", "--ones", "5", "-n", "5", "--oscillation", "--svg", osc.to_str().unwrap()]);
    let v = json(&["spectrum", "--ones", "2", "-n", "50", "--hist", "10", "--svg", hist.to_str().unwrap()]);
    let counts = v["histogram"]["counts"].as_array().unwrap();
    assert_eq!(counts.iter().map(|c| c.as_u64().unwrap()).sum::<u64>(), 50);
    for p in [osc, hist] {
        let s = std::fs::read_to_string(p).unwrap();
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
    }
}

#[test]
fn gs_examples() {
    let v = json(&["gs", "--ones", "2", "-p", "3", "--table"]);
    assert_eq!(v["limit"].as_f64().unwrap(), 20.0);
    let table: Vec<f64> = v["table"].as_array().unwrap().iter().map(|r| r["value"].as_f64().unwrap()).collect();
    for (got, want) in table.iter().zip([19.88, 19.988, 19.9988]) {
        assert!((got - want).abs() < 5e-3, "{got}");
    }

    let v = json(&["gs", "--ones", "3", "--function", "exp"]);
    assert!((v["limit"].as_f64().unwrap() - 169.249).abs() < 1e-3);
    assert!((v["closed_form"]["value"].as_f64().unwrap() - 169.249).abs() < 1e-3);
    assert_eq!(v["quadrature"]["nodes_used"], 4096);
}

#[test]
fn mc_reports_bounds_and_is_reproducible() {
    let args = ["mc", "--dist", "lognormal", "--sigma", "1", "-m", "3", "-n", "20", "-p", "5", "--samples", "200"];
    let a = json(&args);
    let b = json(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(a["summary"], b["summary"]);

    let c = 3003.0f64;
    assert_eq!(a["all_ones_moment"].as_f64().unwrap(), c);
    let lower = a["bounds"]["lower"].as_f64().unwrap();
    let upper = a["bounds"]["upper"].as_f64().unwrap();
    assert!((lower / (c * (25.0f64 / 6.0).exp()) - 1.0).abs() < 1e-12);
    assert!((upper / (c * 12.5f64.exp()) - 1.0).abs() < 1e-12);
}

#[test]
fn mc_seed_flag_beats_environment() {
    let base = ["mc", "--dist", "exp", "-m", "2", "-p", "2", "--samples", "50"];
    let run = |env: Option<&str>, extra: &[&str]| -> Value {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_tpht"));
        cmd.args(base).args(extra).env_remove("TPHT_SEED");
        if let Some(s) = env {
            cmd.env("TPHT_SEED", s);
        }
        serde_json::from_slice(&cmd.output().unwrap().stdout).unwrap()
    };
    assert_eq!(run(Some("5"), &[])["config"]["seed"], 5);
    assert_eq!(run(Some("5"), &["--seed", "9"])["config"]["seed"], 9);
    assert_eq!(run(None, &[])["config"]["seed"], tpht::ensemble::DEFAULT_SEED);
    assert_eq!(run(Some("9"), &[])["summary"], run(None, &["--seed", "9"])["summary"]);
}

#[test]
fn mc_edge_cases() {
    let v = json(&["mc", "--dist", "lognormal", "-m", "3", "-p", "5", "--samples", "0"]);
    assert_eq!(v["summary"], Value::Null);

    let v = json(&["mc", "--dist", "bernoulli", "--q", "0.5", "-m", "10", "-p", "20", "--samples", "10"]);
    let probs = floats(&v["bernoulli_law"]["probs"]);
    assert_eq!(probs.len(), 11);
    assert_eq!(probs[0], 1.0 / 1024.0);
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);

    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("mc.svg");
    let out = dir.path().join("mc.csv");
    json(&["mc", "--dist", "exp", "-m", "2", "-p", "3", "--samples", "100", "--svg", svg.to_str().unwrap()]);
    assert!(std::fs::read_to_string(svg).unwrap().contains("<rect"));
    let status = tpht(&["mc", "--dist", "exp", "-m", "2", "-p", "3", "--samples", "100", "--format", "csv", "-o", out.to_str().unwrap()]);
    assert!(status.status.success());
    let csv = std::fs::read_to_string(out).unwrap();
    assert!(csv.starts_with("side,log10_lo,log10_hi,count"));
    assert_eq!(csv.lines().count(), 1 + 2 * tpht::ensemble::LOG_HISTOGRAM_BINS);
}

#[test]
fn fp_demo_tridiagonal_is_real_and_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("fp.svg");
    let v = json(&["fp-demo", "--ones", "2", "-n", "400", "--svg", svg.to_str().unwrap()]);
    assert_eq!(v["max_imag"].as_f64().unwrap(), 0.0);
    for z in rows(&v["eigenvalues"]) {
        assert!(z[0] >= 0.0 && z[0] <= 4.0);
    }
    assert_eq!(floats(&v["interval"]), vec![0.0, 4.0]);
    assert!(svg.exists());

    let v = json(&["fp-demo", "--ones", "3", "-n", "10"]);
    assert!(v["max_imag"].as_f64().unwrap() < 1e-6);
}
