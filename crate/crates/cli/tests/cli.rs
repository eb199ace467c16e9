use std::process::{Command, Output};

fn pllsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pllsym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').filter_map(|c| c.parse().ok()).collect())
        .collect()
}

#[test]
fn rightmost_sweep_reports_fix_instability() {
    let o = pllsym(&["rightmost", "--K", "1.05", "--mu", "0.3", "--tau-grid", "0:10:5"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("# model=full-phase"));
    assert!(out.contains("\ntau,re,im,certified\n"));
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 5);
    assert!(rows[0][1] < 0.0);
    assert!(rows[4][1] > 0.0);
}

#[test]
fn curves_have_header_and_rows() {
    let o = pllsym(&["curves", "--K", "1.05", "--mu-grid", "0.1:1:4", "--n", "0:2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("mu,n,root,omega,tau,delta_sign"));
    assert!(!data_rows(&out).is_empty());
}

#[test]
fn output_is_deterministic() {
    let args = ["phasediff-check", "--nodes", "3", "--K", "1.05", "--mu", "0.3", "--tau", "2", "--seed", "4", "--samples", "20"];
    let a = pllsym(&args);
    let b = pllsym(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn physical_units_are_normalized() {
    let unit = pllsym(&["snmap", "--K", "1.05", "--mu", "0.3", "--tau", "20"]);
    let scaled = pllsym(&["snmap", "--K", "2.1", "--mu", "0.6", "--omega-m", "2", "--tau", "10"]);
    assert!(unit.status.success() && scaled.status.success());
    assert_eq!(unit.stdout, scaled.stdout);
}

#[test]
fn exit_codes() {
    let domain = pllsym(&["rightmost", "--K", "0.5", "--mu", "0.3"]);
    assert_eq!(domain.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&domain.stderr).contains("K = 0.5"));
    let grid = pllsym(&["rightmost", "--K", "1.05", "--mu", "0.3", "--tau-grid", "1:0:3"]);
    assert_eq!(grid.status.code(), Some(2));
    let missing = pllsym(&["--config", "/nonexistent/run.json"]);
    assert_eq!(missing.status.code(), Some(2));
    let none = pllsym(&["--K", "1.05"]);
    assert_eq!(none.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"command":"zero-roots","K":1.05,"nodes":2,"n":"0:3"}"#).unwrap();
    let file_only = pllsym(&["--config", cfg.to_str().unwrap()]);
    assert!(file_only.status.success());
    let overridden = pllsym(&["--config", cfg.to_str().unwrap(), "--K", "0.5"]);
    assert!(overridden.status.success());
    assert_ne!(file_only.stdout, overridden.stdout);
    assert!(stdout(&overridden).contains("K=5.0000000000000000e-1"));
    std::fs::write(&cfg, r#"{"command":"zero-roots","bogus":1}"#).unwrap();
    assert_eq!(pllsym(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn out_and_svg_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let svg = dir.path().join("r.svg");
    let o = pllsym(&[
        "releq",
        "--K",
        "1.05",
        "--mu",
        "0.3",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("branches"));
    assert!(std::fs::read_to_string(&csv).unwrap().contains("branch,tau,omega_hat"));
    let chart = std::fs::read_to_string(&svg).unwrap();
    assert!(chart.starts_with("<svg") && chart.contains("polyline"));
}

#[test]
fn simulate_writes_trajectory() {
    let o = pllsym(&[
        "simulate", "--nodes", "2", "--K", "1.05", "--mu", "0.3", "--tau", "1", "--t-end", "5", "--direction", "1,-1",
        "--amplitude", "0.01",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("t,x1_1,x2_1,x1_2,x2_2"));
    let rows = data_rows(&out);
    assert_eq!(rows.last().unwrap()[0], 5.0);
    assert!(rows.iter().all(|r| r.len() == 5));
}
