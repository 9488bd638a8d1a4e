use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use toric_zeros::momentmap::{NormalSolver, TorusPoint};
use toric_zeros::zerocurrent::oracle::ExampleId;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_toric-zeros"));
    c.env_remove("TORIC_ZEROS_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn write_polytope(dir: &Path, name: &str, json: &str) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p.to_string_lossy().into_owned()
}

/// Data rows as vectors of fields, skipping comments and the column header.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn ehrhart_of_trapezoid() {
    let dir = tempfile::tempdir().unwrap();
    let trap = write_polytope(dir.path(), "trap.json", r#"{"m": 2, "p": 2, "vertices": [[0,0],[2,0],[0,1],[1,1]]}"#);
    let out = stdout(&["polytope", "ehrhart", "--polytope", &trap]);
    assert!(out.starts_with("# toric-zeros "));
    assert!(out.lines().nth(1).unwrap().starts_with("# config: {"));
    let coeffs: Vec<String> = rows(&out).into_iter().map(|r| r[1].clone()).collect();
    assert_eq!(coeffs, ["3/2", "5/2", "1"]);
}

#[test]
fn region_grid_reproduces_example_three() {
    let dir = tempfile::tempdir().unwrap();
    let ex3 = write_polytope(dir.path(), "ex3.json", r#"{"m": 2, "p": 3, "vertices": [[0,0],[3,0],[0,1],[1,1]]}"#);
    let out = stdout(&["region", "grid", "--polytope", &ex3, "--rho-min", "-2.05", "--rho-max", "2.05", "--steps", "14"]);
    let ex = ExampleId::TrapezoidEx3(2);
    let poly = ex.polytope().unwrap();
    let mut checked = 0;
    for r in rows(&out) {
        let rho = vec![r[0].parse::<f64>().unwrap(), r[1].parse::<f64>().unwrap()];
        let Ok(region) = ex.region(&TorusPoint::from_rho(rho)) else { continue };
        assert_eq!(r[2], ex.expected_label(&poly, region).label());
        checked += 1;
    }
    assert!(checked >= 150, "{checked}");
}

#[test]
fn mass_grid_shows_plateau_and_cliffs() {
    let dir = tempfile::tempdir().unwrap();
    let sq = write_polytope(dir.path(), "sq.json", r#"{"m": 2, "p": 2, "vertices": [[0,0],[1,0],[0,1],[1,1]]}"#);
    let out = stdout(&["szego", "mass-grid", "--polytope", &sq, "--N", "10,100", "--rho-min", "-2", "--rho-max", "2", "--steps", "5"]);
    let data = rows(&out);
    assert_eq!(data.len(), 50);
    let at = |n: &str, r1: &str, r2: &str| -> f64 {
        data.iter()
            .find(|r| r[2] == n && r[0] == r1 && r[1] == r2)
            .map(|r| r[4].parse().unwrap())
            .unwrap()
    };
    assert!((at("100", "0.0", "0.0") - 1.0).abs() < 0.02);
    assert!((at("10", "0.0", "0.0") - 1.0).abs() < 0.2);
    assert!(at("100", "-2.0", "2.0") < 1e-20);
    assert!(at("100", "-2.0", "2.0") < at("10", "-2.0", "2.0"));
}

#[test]
fn output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let seg = write_polytope(dir.path(), "seg.json", r#"{"m": 1, "p": 4, "vertices": [[1],[3]]}"#);
    let sq = write_polytope(dir.path(), "sq.json", r#"{"m": 2, "p": 2, "vertices": [[0,0],[1,0],[0,1],[1,1]]}"#);
    for args in [
        vec!["ensemble", "m1", "--polytope", &seg, "--N", "20", "--samples", "40", "--seed", "9"],
        vec!["bp", "grid", "--polytope", &sq, "--steps", "21"],
        vec!["psi", "rank-map", "--polytope", &sq, "--steps", "11"],
    ] {
        let mut one = vec!["--threads", "1"];
        one.extend(&args);
        let mut four = vec!["--threads", "4"];
        four.extend(&args);
        assert_eq!(stdout(&one), stdout(&four), "{args:?}");
        let from_env = bin().env("TORIC_ZEROS_THREADS", "2").args(&args).output().unwrap();
        assert_eq!(String::from_utf8(from_env.stdout).unwrap(), stdout(&one));
    }
}

#[test]
fn replay_reproduces_files() {
    let dir = tempfile::tempdir().unwrap();
    let seg = write_polytope(dir.path(), "seg.json", r#"{"m": 1, "p": 4, "vertices": [[1],[3]]}"#);
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    stdout(&["ensemble", "m1", "--polytope", &seg, "--N", "15", "--samples", "30", "--seed", "4", "--out", first.to_str().unwrap()]);
    stdout(&["replay", "--from", first.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    let a = std::fs::read_to_string(&first).unwrap();
    assert_eq!(a, std::fs::read_to_string(&second).unwrap());

    let config = dir.path().join("config.json");
    let echo = a.lines().find_map(|l| l.strip_prefix("# config: ")).unwrap();
    std::fs::write(&config, echo).unwrap();
    let third = dir.path().join("third.csv");
    stdout(&["run", "--config", config.to_str().unwrap(), "--out", third.to_str().unwrap()]);
    assert_eq!(a, std::fs::read_to_string(&third).unwrap());
}

#[test]
fn config_file_with_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let sq = write_polytope(dir.path(), "sq.json", r#"{"m": 2, "p": 2, "vertices": [[0,0],[1,0],[0,1],[1,1]]}"#);
    let out = dir.path().join("bp.csv");
    let config = serde_json::json!({
        "command": "bp-grid",
        "polytope_path": sq,
        "grid": {"rho_min": -1.0, "rho_max": 1.0, "steps": 3},
        "tolerances": {"transition": 1e-6},
        "out_path": out.to_str().unwrap(),
    });
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, config.to_string()).unwrap();
    stdout(&["run", "--config", cfg.to_str().unwrap()]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(rows(&text).len(), 9);
    assert!(!text.contains("out_path"));
    assert!(text.contains("\"transition\":1e-6"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"command": "bp-grid", "polytope_path": "x.json", "grid": {"rho_min": 0, "rho_max": 1, "steps": 2}, "extra": true}"#).unwrap();
    assert_eq!(run(&["run", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["polytope", "info", "--polytope", "/nonexistent.json"]).status.code(), Some(2));
    let outside = write_polytope(dir.path(), "o.json", r#"{"m": 2, "p": 1, "vertices": [[1,1]]}"#);
    assert_eq!(run(&["polytope", "info", "--polytope", &outside]).status.code(), Some(2));
    assert_eq!(run(&["bp", "grid"]).status.code(), Some(2));

    let sq = write_polytope(dir.path(), "sq.json", r#"{"m": 2, "p": 2, "vertices": [[0,0],[1,0],[0,1],[1,1]]}"#);
    let out = run(&["szego", "converge", "--polytope", &sq, "--point", "0,0", "--N", "10,100000"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("N = 100000") || String::from_utf8_lossy(&out.stderr).contains("rho"));
}

#[test]
fn help_for_every_subcommand() {
    for args in [
        vec!["--help"],
        vec!["polytope", "info", "--help"],
        vec!["polytope", "ehrhart", "--help"],
        vec!["bp", "grid", "--help"],
        vec!["region", "grid", "--help"],
        vec!["szego", "converge", "--help"],
        vec!["szego", "mass-grid", "--help"],
        vec!["character", "table", "--help"],
        vec!["character", "todd1d", "--help"],
        vec!["psi", "grid", "--help"],
        vec!["psi", "rank-map", "--help"],
        vec!["psi", "bk-check", "--help"],
        vec!["ensemble", "m1", "--help"],
        vec!["ensemble", "tentacles", "--help"],
        vec!["run", "--help"],
        vec!["replay", "--help"],
    ] {
        let out = run(&args);
        assert!(out.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"));
    }
}

#[test]
fn character_and_todd_tables() {
    let dir = tempfile::tempdir().unwrap();
    let sq = write_polytope(dir.path(), "sq.json", r#"{"m": 2, "p": 2, "vertices": [[0,0],[1,0],[0,1],[1,1]]}"#);
    let out = stdout(&["character", "table", "--polytope", &sq, "--N", "1,2", "--w", "0:0", "--w", "0:0"]);
    let data = rows(&out);
    assert_eq!(data[0][1], "4.0");
    assert_eq!(data[1][1], "9.0");
    let out = stdout(&["character", "todd1d", "--a", "0", "--b", "1", "--N", "3", "--w", "-0.5:0.3", "--max-order", "12"]);
    let last = rows(&out).pop().unwrap();
    assert!(last[5].parse::<f64>().unwrap() < 1e-10);
}

#[test]
fn psi_and_bk_commands() {
    let dir = tempfile::tempdir().unwrap();
    let sq = write_polytope(dir.path(), "sq.json", r#"{"m": 2, "p": 2, "vertices": [[0,0],[1,0],[0,1],[1,1]]}"#);
    let out = stdout(&["psi", "bk-check", "--polytope", &sq, "--resolution", "16"]);
    let r = &rows(&out)[0];
    assert_eq!(r[2], "2");
    assert!(r[3].parse::<f64>().unwrap() < 1e-3);
    let out = stdout(&["psi", "grid", "--polytope", &sq, "--steps", "5", "--rho-min", "-1", "--rho-max", "1"]);
    let data = rows(&out);
    assert_eq!(data.len(), 25);
    let centre = data.iter().find(|r| r[0] == "0.0" && r[1] == "0.0").unwrap();
    assert_eq!(centre[2], "allowed");
    assert_eq!(centre[3], "2");
    assert_eq!(centre[9], "2");
    assert!(centre[10].parse::<f64>().unwrap() < 1e-5);
    assert!(out.contains("# oracle: Square"));
    let square = ExampleId::Square.polytope().unwrap();
    let solver = NormalSolver::<f64>::new(&square).unwrap();
    let corner = data.iter().find(|r| r[0] == "1.0" && r[1] == "-1.0").unwrap();
    assert_eq!(corner[2], solver.classify(&TorusPoint::from_rho(vec![1.0, -1.0])).unwrap().label());
}

#[test]
fn tentacles_per_facet() {
    let dir = tempfile::tempdir().unwrap();
    let sq = write_polytope(dir.path(), "sq.json", r#"{"m": 2, "p": 2, "vertices": [[0,0],[1,0],[0,1],[1,1]]}"#);
    let out = stdout(&["ensemble", "tentacles", "--polytope", &sq, "--N", "30", "--samples", "50", "--seed", "2"]);
    assert!(out.contains("# skipped_facet: 0"));
    let data = rows(&out);
    assert_eq!(data.len(), 2);
    for r in data {
        assert_eq!(r[2], "30.0");
        assert!(r[3].parse::<f64>().unwrap() > 0.8);
    }
}
