//! End-to-end checks of the command-line surface: exit codes, report
//! shapes, and byte-identical CSV output.

use std::process::{Command, Output};

fn dht(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dht"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn list_covers_all_families_and_json_parses() {
    let out = dht(&["list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for fam in ["F1", "F2", "F3", "F4", "F5", "F6", "F7", "F8"] {
        assert!(text.contains(fam), "missing {fam} in list output");
    }

    let out = dht(&["list", "--json"]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 8);

    let out = dht(&["list", "--family", "F6"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("F6"));
}

#[test]
fn verify_exit_codes_follow_the_contract() {
    // Pass: exact solution under the gate.
    let out = dht(&[
        "verify", "--family", "F6", "--d", "1", "--S", "3", "--R", "1.5", "--t0", "0.1",
        "--grid", "0.1,1.0,11,-3,3,11",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["pass"], serde_json::Value::Bool(true));
    assert!(doc["report"]["linf_s1"].as_f64().unwrap() <= 1e-6);
    assert!(doc["provenance"].as_array().unwrap().len() >= 1);

    // Fail: perturbed field trips the gate with exit 1.
    let out = dht(&[
        "verify", "--family", "F6", "--d", "1", "--S", "3", "--R", "1.5", "--t0", "0.1",
        "--grid", "0.1,1.0,11,-3,3,11", "--perturb", "0.01",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["pass"], serde_json::Value::Bool(false));

    // Invalid configuration: exit 2.
    let out = dht(&[
        "verify", "--family", "F6", "--d", "2", "--S", "3", "--R", "1.5", "--t0", "0.1",
        "--grid", "0.1,1.0,11,-3,3,11",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = dht(&["verify", "--family", "F9", "--grid", "0,1,5,0,1,5"]);
    assert_eq!(out.status.code(), Some(2));

    let out = dht(&["verify", "--family", "F6", "--S", "3", "--R", "1.5", "--grid", "bad"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn figure_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = dht(&["figure", "3", "--out-dir", d.to_str().unwrap()]);
        assert!(out.status.success());
    }
    let fa = std::fs::read(a.join("fig3.csv")).unwrap();
    let fb = std::fs::read(b.join("fig3.csv")).unwrap();
    assert_eq!(fa, fb, "repeated runs must be byte-identical");
    assert!(fa.starts_with(b"t,x,u,v\n"));
}

#[test]
fn figure_out_dir_env_var_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_dht"))
        .args(["figure", "4"])
        .env("DHT_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("fig4.csv").exists());
}

#[test]
fn eval_prints_both_components_at_full_precision() {
    let out = dht(&[
        "eval", "--family", "F8", "--S", "2", "--C", "-0.25", "--t", "0.5", "--x", "1.0",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let grab = |prefix: &str| -> f64 {
        text.lines()
            .find(|l| l.starts_with(prefix))
            .unwrap()
            .split('=')
            .nth(1)
            .unwrap()
            .trim()
            .parse()
            .unwrap()
    };
    // u = exp((9-S)/8 t + C e^{(S-1)t} - (S-1)/8 x^2) at the given point.
    let expect = (0.875 * 0.5 - 0.25 * 0.5_f64.exp() - 0.125).exp();
    assert!((grab("u") - expect).abs() < 1e-14 * expect);
    assert!(grab("v").is_finite());
}

#[test]
fn grid_csv_has_row_major_schema(){
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let out = dht(&[
        "grid", "--family", "F8", "--S", "2", "--C", "-0.25",
        "--grid", "0,1,3,-1,1,3", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x,u,v");
    assert_eq!(lines.len(), 1 + 9);
    // Row-major: x varies fastest.
    let t_of = |l: &str| l.split(',').next().unwrap().parse::<f64>().unwrap();
    assert_eq!(t_of(lines[1]), t_of(lines[2]));
    assert!(t_of(lines[4]) > t_of(lines[3]));
}

#[test]
fn reduce_compares_closed_forms_to_integration() {
    for case in [
        "chi-general",
        "chi-equal-rates",
        "chi-gaussian-general",
        "f-coefficient",
        "gh",
    ] {
        let mut args = vec!["reduce", "--case", case, "--S", "2.0"];
        match case {
            "chi-general" | "chi-gaussian-general" => args.extend(["--R", "3.0"]),
            "f-coefficient" => args.extend(["--d", "0.25"]),
            _ => {}
        }
        if case.starts_with("chi") {
            args.extend(["--beta", "1.0", "--constant", "0.5"]);
        }
        let out = dht(&args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "case {case}: {}{}",
            stdout(&out),
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(stdout(&out).contains("pass"));
    }
}

#[test]
fn simulate_tracks_an_exact_solution() {
    let out = dht(&[
        "simulate", "--family", "F8", "--S", "2", "--C", "-0.25",
        "--grid", "0,0.2,3,-3,3,81",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let linf: f64 = text
        .split("linf_u = ")
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(linf < 1e-3, "linf_u = {linf}");
}

#[test]
fn superpose_reports_residual_and_positivity() {
    let out = dht(&[
        "superpose", "--S", "2", "--C", "-0.35",
        "--shifts", "-1:-30,0:0,1:30",
        "--grid", "0.1,1.0,11,-35,35,11",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("pass"));

    // Crowded peaks exceed the tolerance: exit 1.
    let out = dht(&[
        "superpose", "--S", "2", "--C", "-0.35",
        "--shifts", "-1:-5,0:0,1:5",
        "--grid", "0.1,1.0,11,-10,10,11",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn symmetry_check_classifies_translations() {
    let out = dht(&[
        "symmetry-check", "--family", "F8", "--S", "2", "--C", "-0.25",
        "--operator", "P_t", "--grid", "0.1,1.0,7,-3,3,7",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let out = dht(&[
        "symmetry-check", "--family", "F8", "--S", "2", "--C", "-0.25",
        "--operator", "bogus", "--grid", "0.1,1.0,7,-3,3,7",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn figure_windows_match_the_documented_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = dht(&["figure", "1", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    let mut xs = Vec::new();
    let mut ts = Vec::new();
    for l in text.lines().skip(1) {
        let mut it = l.split(',');
        ts.push(it.next().unwrap().parse::<f64>().unwrap());
        xs.push(it.next().unwrap().parse::<f64>().unwrap());
    }
    let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(min(&ts) > 0.0 && max(&ts) <= 3.0);
    assert_eq!(min(&xs), -10.0);
    assert_eq!(max(&xs), 10.0);

    let out = dht(&["figure", "5", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("fig5.csv")).unwrap();
    let xs: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(min(&xs), -45.0);
    assert_eq!(max(&xs), 45.0);
}

#[test]
fn missing_required_parameter_is_a_config_error() {
    let out = dht(&["eval", "--family", "F2", "--R", "2", "--S", "3", "--t", "0", "--x", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--beta"));
}
