use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn qmacro(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmacro")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String { String::from_utf8(o.stdout.clone()).unwrap() }

fn stderr(o: &Output) -> String { String::from_utf8(o.stderr.clone()).unwrap() }

#[test]
fn measure_writes_header_and_rows() {
    let o = qmacro(&["measure", "--n", "4", "--state", "ghz", "--theta", "pi/2", "--measure", "hs"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,axis_theta,axis_phi,state,theta,phi,measure,weight,sigma,value");
    assert_eq!(lines.len(), 2);
    // N^2 sin^2 / 4 = 4
    let value: f64 = lines[1].rsplit(',').next().unwrap().parse().unwrap();
    assert!((value - 4.0).abs() < 1e-12);
}

#[test]
fn bad_flag_exits_2_naming_field() {
    let o = qmacro(&["measure", "--n", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n:"), "{}", stderr(&o));
    let o = qmacro(&["measure", "--axis-theta", "inf"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("axis-theta:"), "{}", stderr(&o));
    let o = qmacro(&["measure", "--weight", "power:3", "--measure", "hs"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("weight:"), "{}", stderr(&o));
}

#[test]
fn json_config_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"n": [5], "measure": "tr", "state": ["ghz"], "theta": "pi/2"}"#).unwrap();
    let o = qmacro(&["measure", "--n", "3", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("5,"));
    // N^2 sin / 2
    let value: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!((value - 12.5).abs() < 1e-12);

    std::fs::write(&cfg, r#"{"theta": [0.5], "bogus": 1}"#).unwrap();
    let o = qmacro(&["measure", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus"), "{}", stderr(&o));
}

#[test]
fn sidecar_records_config_and_calls() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = qmacro(&["sweep-n", "--n", "2..6", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let side: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.csv.json")).unwrap()).unwrap();
    assert_eq!(side["config"]["n"], serde_json::json!([2, 3, 4, 5, 6]));
    assert_eq!(side["config"]["sigma"], "sqrt-NlogN");
    assert!(side["version"].is_string());
    assert!(side["tolerances"]["trace_drift_per_step"].is_number());
    assert!(side["calls"]["measure=sigma"].as_str().unwrap().contains("scaled_measure"));
    // 5 n x 4 series x 3 measures
    assert_eq!(side["rows"], 60);

    // the recorded config reproduces the file
    let cfg = dir.path().join("again.json");
    let mut config = side["config"].clone();
    config["out"] = Value::String(dir.path().join("again.csv").to_str().unwrap().into());
    std::fs::write(&cfg, config.to_string()).unwrap();
    let o = qmacro(&["sweep-n", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(dir.path().join("again.csv")).unwrap());
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["sweep-axis", "--n", "40", "--axis-theta", "0:pi:9", "--axis-phi", "0,1"];
    let (a, b) = (qmacro(&args), qmacro(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn axis_azimuth_does_not_matter() {
    // |0>^N is symmetric about z. For GHZ the two branches overlap in a tilted
    // frame with weight ~ sin(t)^N, negligible at N = 500 unless t = pi/2.
    // There the overlap is complete and the trace norm picks up the relative
    // phase N*phi, while hs and sigma do not. A coherent state at
    // theta = pi/2 has no symmetry at all.
    let keep = ["state=coherent|theta=0|", "state=ghz|theta=1.5707963267948966|"];
    let run = |phi: &str| {
        let o = qmacro(&["sweep-axis", "--n", "500", "--axis-theta", "0:pi:7", "--axis-phi", phi, "--layout", "wide"]);
        assert!(o.status.success(), "{}", stderr(&o));
        let text = stdout(&o);
        let header: Vec<String> = text.lines().next().unwrap().split(',').map(String::from).collect();
        let cols: Vec<usize> = (0..header.len()).filter(|&i| keep.iter().any(|k| header[i].starts_with(k))).collect();
        assert_eq!(cols.len(), 6);
        let rows = text
            .lines()
            .skip(1)
            .map(|l| {
                let cells: Vec<&str> = l.split(',').collect();
                let t: f64 = cells[0].parse().unwrap();
                (t, cols.iter().map(|&i| (header[i].clone(), cells[i].parse::<f64>().unwrap())).collect::<Vec<_>>())
            })
            .collect::<Vec<_>>();
        rows
    };
    let ghz_tr = "state=ghz|theta=1.5707963267948966|measure=tr";
    let mut equator_differs = false;
    for ((t, a), (_, b)) in run("0").iter().zip(&run("2.1")) {
        for ((name, x), (_, y)) in a.iter().zip(b) {
            let close = (x - y).abs() <= 1e-9 * x.abs().max(1.0);
            if name == ghz_tr && (t - PI / 2.0).abs() < 1e-12 {
                equator_differs = !close;
            } else {
                assert!(close, "{name} at {t}: {x} vs {y}");
            }
        }
    }
    assert!(equator_differs);
}

#[test]
fn json_format_and_evolve() {
    let o = qmacro(&["evolve", "--n", "6", "--points", "4", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows: Value = serde_json::from_str(&stdout(&o)).unwrap();
    // 4 times x 3 thetas
    assert_eq!(rows.as_array().unwrap().len(), 12);
    assert_eq!(rows[0]["channel"], "dephasing");
}

#[test]
fn io_failure_exits_1() {
    let o = qmacro(&["measure", "--n", "3", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_subset_prints_lines() {
    let o = qmacro(&["verify", "--criteria", "1,8"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().starts_with("PASS  1"));
    assert!(text.contains("2 of 2 criteria passed"));
}
