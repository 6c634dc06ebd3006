use std::process::{Command, Output};

fn kfpq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kfpq")).args(args).output().expect("kfpq runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn empty_grid_is_a_config_error() {
    let o = kfpq(&["norms", "--nu", "1", "--t", "0.1:5:0:log"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("t: empty grid"), "{}", stderr(&o));
}

#[test]
fn missing_and_invalid_fields_name_the_field() {
    let o = kfpq(&["norms", "--t", "0.1:1:3:lin"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nu:"));
    let o = kfpq(&["bargmann", "--nu", "0.2", "--t", "0.1:1:3:lin"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nu: must exceed 0.25"));
    let o = kfpq(&["subelliptic", "--nu", "1", "--dims", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dims:"));
}

#[test]
fn out_of_range_parameter_is_a_config_error() {
    let o = kfpq(&["optimality", "--nu", "100"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("invalid parameter"));
}

#[test]
fn norms_table_layout() {
    let o = kfpq(&["norms", "--nu", "1", "--t", "0.1:5:50:log"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "# schema_version=1 table=norms");
    assert_eq!(lines[1], "nu,t,analytic,bound,oracle,rel_discrepancy,converged_flag");
    assert_eq!(lines.len(), 52);
    for row in &lines[2..] {
        let f: Vec<&str> = row.split(',').collect();
        let (t, norm): (f64, f64) = (f[1].parse().unwrap(), f[2].parse().unwrap());
        let s = (t * 5f64.sqrt() / 2.0).sinh() / 5f64.sqrt();
        assert!((norm - (-s.asinh()).exp()).abs() <= 1e-12 * norm.max(1e-300) + 1e-300, "{row}");
        assert_eq!(f[6], "true");
    }
}

#[test]
fn delta0_table_has_ratio_column() {
    let o = kfpq(&["delta0", "--nu", "100,1", "--t", "0.05:3:40:log", "--alpha", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = s.lines().collect();
    assert!(lines[1].ends_with("converged_flag,asymptotic,ratio"));
    assert_eq!(lines.len(), 2 + 80);
    let first_nu: f64 = lines[2].split(',').next().unwrap().parse().unwrap();
    assert_eq!(first_nu, 1.0);
    let ratio: f64 = lines[2].rsplit(',').next().unwrap().parse().unwrap();
    assert!((ratio - 1.0).abs() < 0.02, "{ratio}");
}

#[test]
fn json_output_and_config_file() {
    let dir = std::env::temp_dir().join(format!("kfpq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("sweep.json");
    let out = dir.join("out.json");
    std::fs::write(&cfg, r#"{"lambda1": [1, 0], "t": "0.5:2:4:lin", "format": "csv"}"#).unwrap();
    let o = kfpq(&["degenerate", "--config", cfg.to_str().unwrap(), "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0][0].as_f64(), Some(0.0));
    for r in rows {
        let (analytic, bound, oracle) = (r[2].as_f64().unwrap(), r[3].as_f64().unwrap(), r[4].as_f64().unwrap());
        assert!(analytic <= bound && (oracle - analytic).abs() <= 1e-10 * analytic);
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn sweeps_are_byte_reproducible() {
    let args = ["bargmann", "--nu", "2", "--t", "0.5:2:3:lin", "--seed", "11", "--format", "json"];
    let (a, b) = (kfpq(&args), kfpq(&args));
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}
