use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn qes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qes")).args(args).output().expect("qes runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(qes(&["solve"]).status.code(), Some(1));
    assert_eq!(qes(&["frobnicate"]).status.code(), Some(1));
    // H4 with ρ fixed has one equation too many
    let out = qes(&["solve", "--model", "h4", "--n", "1", "--l", "1", "--gamma", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = qes(&["solve", "--model", "h2", "--n", "1", "--l", "1", "--omega", "0.1", "--gamma", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = qes(&["solve", "--model", "h2", "--n", "1", "--l", "-2", "--omega", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let out = qes(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verify"));
}

#[test]
fn ground_state_of_the_pure_oscillator() {
    let out = qes(&["solve", "--model", "h2", "--n", "0", "--l", "0", "--omega", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let mut e: Vec<f64> = v["branches"].as_array().unwrap().iter().map(|b| b["energy"].as_f64().unwrap()).collect();
    e.sort_by(f64::total_cmp);
    assert_eq!(e.len(), 2);
    assert!((e[0] + 1.5).abs() < 1e-12 && (e[1] - 1.5).abs() < 1e-12, "{e:?}");
}

#[test]
fn csv_has_header_and_rows() {
    let out = qes(&["solve", "--model", "h2", "--n", "1", "--l", "1", "--omega", "0.1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "index,nu,nu_im,g,E,E_im,kappa,rho,roots,residual,flags");
    assert!(text.contains("1.471"));
    assert!(lines.count() >= 4);
}

#[test]
fn saved_report_verifies_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h2.json");
    let p = path.to_str().unwrap();
    let out = qes(&["solve", "--model", "h2", "--n", "1", "--l", "2", "--omega", "0.1", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    let saved: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();

    let out = qes(&["verify", "--input", p]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let verified = v["branches"].as_array().unwrap();
    assert!(!verified.is_empty());
    for b in verified {
        let i = b["index"].as_u64().unwrap() as usize;
        // floats survive the JSON round trip exactly
        assert_eq!(b["branch"], saved["branches"][i]);
        assert_eq!(b["passed"], Value::Bool(true));
    }
}

#[test]
fn coarse_grid_is_reported() {
    let out = qes(&["verify", "--table", "table1", "--l", "10", "--grid-n", "120"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid-n"));
}

#[test]
fn restricted_table_rows() {
    let out = qes(&["table", "table1", "--l", "1,2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 8);
    assert!(text.starts_with("ell,branch,nu,nu_ref,E,E_ref,delta"));
}

#[test]
fn short_scan() {
    let out = qes(&[
        "scan", "--model", "h4", "--n", "1", "--l", "1", "--gamma-min", "1", "--gamma-max", "4", "--samples", "2",
        "--starts", "500", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["samples"].as_array().unwrap().len(), 2);
    assert_eq!(v["samples"][0]["real_count"].as_u64(), Some(0));
}

#[test]
fn plot_writes_svg_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = qes(&["plot", "--model", "h2", "--n", "1", "--l", "1", "--omega", "0.1", "--nu", "0.0766", "--out", d]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let names: Vec<String> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    let svg = names.iter().find(|n| n.ends_with(".svg")).expect("svg written");
    let csv = names.iter().find(|n| n.ends_with(".csv")).expect("csv written");
    let doc = fs::read_to_string(dir.path().join(svg)).unwrap();
    assert!(doc.contains("<svg") && doc.contains("<polyline"));
    let table = fs::read_to_string(dir.path().join(csv)).unwrap();
    assert_eq!(table.lines().next().unwrap(), "r,V,psi");
    assert_eq!(table.lines().count(), 401);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"model":"h2","n":0,"l":[0],"omega":4.0}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let energies = |out: &Output| -> Vec<f64> {
        let mut e: Vec<f64> =
            json(out)["branches"].as_array().unwrap().iter().map(|b| b["energy"].as_f64().unwrap()).collect();
        e.sort_by(f64::total_cmp);
        e
    };
    let out = qes(&["solve", "--config", c]);
    assert_eq!(out.status.code(), Some(0));
    assert!((energies(&out)[1] - 3.0).abs() < 1e-12);
    let out = qes(&["solve", "--config", c, "--omega", "1"]);
    assert!((energies(&out)[1] - 1.5).abs() < 1e-12);

    fs::write(&cfg, r#"{"model":"h2","bogus":1}"#).unwrap();
    assert_eq!(qes(&["solve", "--config", c]).status.code(), Some(1));
}
