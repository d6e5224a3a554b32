use std::path::Path;
use std::process::{Command, Output};

use xychain::driven::{kz_sweep, KzOptions};

fn xychain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xychain")).args(args).env_remove("XY_THREADS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Data rows of a CSV (header and metadata removed), split into cells.
fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).filter(|l| !l.starts_with('#')).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn metadata(csv: &str, key: &str) -> Option<String> {
    csv.lines().filter_map(|l| l.strip_prefix("# ")).find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
}

#[test]
fn static_expands_separation_range() {
    let o = xychain(&["static", "--h", "0.5", "--r", "1", "--n", "512", "--l", "1..4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = stdout(&o);
    assert!(csv.starts_with("l,b_l,zz_connected\n"));
    let rows = data_rows(&csv);
    let ls: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(ls, ["1", "2", "3", "4"]);
    assert_eq!(metadata(&csv, "n").as_deref(), Some("512"));
    assert_eq!(metadata(&csv, "tol").as_deref(), Some("0.00000001"));
    assert!(stderr(&o).starts_with("xychain static:"));
}

#[test]
fn kz_without_rate_is_a_config_error() {
    let o = xychain(&["kz"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kz.omega"), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_is_rejected_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "h = 0.5\nlenght = 4\n").unwrap();
    let o = xychain(&["static", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("static.lenght"), "{}", stderr(&o));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"h": 0.2, "n": 16, "l": [1, 2]}"#).unwrap();
    let o = xychain(&["static", "--config", cfg.to_str().unwrap(), "--h", "0.7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = stdout(&o);
    assert_eq!(metadata(&csv, "h").as_deref(), Some("0.7"));
    assert_eq!(data_rows(&csv).len(), 2);
}

#[test]
fn xx_drive_routes_to_exact_path() {
    let o = xychain(&["driven", "--r", "0", "--protocol", "linear", "--omega", "0.1", "--tau=-3,0,2", "--l", "1,2,3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = stdout(&o);
    assert_eq!(metadata(&csv, "result.path").as_deref(), Some("xx_exact"));
    let dev: f64 = metadata(&csv, "result.max_deviation_from_xx_reference").unwrap().parse().unwrap();
    assert!(dev < 1e-6, "{dev}");
}

#[test]
fn exponents_write_table_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exp.csv");
    let o = xychain(&["exponents", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("lambda,phi_h,xi,t_star\n"));
    assert_eq!(data_rows(&csv).len(), 7);
    let fit: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("exp.fit.json")).unwrap()).unwrap();
    let nu = fit["results"]["nu"].as_f64().unwrap();
    let z = fit["results"]["z"].as_f64().unwrap();
    assert!((nu - 0.5).abs() < 0.02 && (z - 2.0).abs() < 0.2, "nu {nu}, z {z}");
    assert!(stdout(&o).is_empty());
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 2, "no stray temporary files: {names:?}");
}

#[test]
fn oracle_compare_table() {
    let o = xychain(&["oracle-compare", "--n", "10", "--h", "0.6", "--r", "0.8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = stdout(&o);
    assert!(csv.starts_with("quantity,index,analytic,oracle,abs_diff\n"));
    for row in data_rows(&csv) {
        let d: f64 = row[4].parse().unwrap();
        assert!(d < 1e-10, "{row:?}");
    }
    assert!(xychain(&["oracle-compare", "--n", "14", "--h", "0.5"]).status.code() == Some(2));
}

#[test]
fn kz_table_matches_library_sweep() {
    let o = xychain(&["kz", "--omega", "1e-2,1e-1", "--n-phi", "120"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = stdout(&o);
    let opts = KzOptions {
        n_phi: 120,
        ..KzOptions::default()
    };
    let sweep = kz_sweep(&[1e-2, 1e-1], &[0, 1, 2], &opts).unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 2);
    for (row, lib) in rows.iter().zip(&sweep.rows) {
        assert_eq!(row[0].parse::<f64>().unwrap(), lib.omega);
        assert_eq!(row[3].parse::<f64>().unwrap(), lib.max_abs_c1);
        assert_eq!(row[4].parse::<f64>().unwrap(), lib.phi_peak);
        assert_eq!(row[2].is_empty(), lib.xi.is_none());
    }
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["entropy", "--h", "0.3", "--r", "0.5", "--n", "40", "--lengths", "2..12"];
    let a = xychain(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_xychain")).args(args).env("XY_THREADS", "3").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_output_parses() {
    let o = xychain(&["toy", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 10);
    assert!(v["results"]["max_abs_diff"].as_f64().unwrap() < 1e-12);
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_xychain")).args(["toy"]).env("XY_THREADS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("XY_THREADS"));
}

#[test]
fn non_convergence_exits_three_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = xychain(&["static", "--h", "0.5", "--l", "1", "--tol", "1e-300", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(metadata(&csv, "converged").as_deref(), Some("false"));
    assert!(Path::new(&out).exists());
}

#[test]
fn odd_chain_is_a_validation_error() {
    let o = xychain(&["spectrum", "--n", "7", "--h", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("spectrum.n"));
}
