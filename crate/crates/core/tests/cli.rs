use std::process::Command;

use dca::euclid::green::{green_table, QuadratureSpec};
use dca::export::read_lattice_csv_f64;
use dca::hyperbolic::{build_ball, HyperbolicBall};

fn dca(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_dca")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn documented_invocations() {
    let (code, text) = dca(&["hyper", "dof", "--radius", "4", "--rank"]);
    assert_eq!(code, 0, "{text}");
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    let nullity = report["claims"].as_array().unwrap().iter().find(|c| c["id"] == "exact nullity").unwrap();
    assert_eq!((nullity["expected"].as_u64(), nullity["computed"].as_u64()), (Some(225), Some(225)));
    let (code, text) = dca(&["dyn", "perron"]);
    assert_eq!(code, 0);
    assert!(text.contains("2+sqrt(3)"));
    let (code, text) = dca(&["euclid", "pol-dim", "--k", "5", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(text.contains("dim Pol_5,12,12"), "{text}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(dca(&["hyper"]).0, 2);
    assert_eq!(dca(&["euclid", "cauchy", "--kernel", "chebyshev"]).0, 2);
    assert_eq!(dca(&["hyper", "special", "--kind", "psi-xl", "--radius", "9"]).0, 2);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["core", "max-principle", "--hyper", "2", "--trials", "10", "--seed", "11"];
    assert_eq!(dca(&args), dca(&args));
    assert_ne!(dca(&args).1, dca(&["core", "max-principle", "--hyper", "2", "--trials", "10", "--seed", "12"]).1);
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "format = csv\nmax-radius = 2\n").unwrap();
    let c = cfg.to_str().unwrap();
    let (code, text) = dca(&["--config", c, "hyper", "dof", "--radius", "2", "--rank"]);
    assert_eq!(code, 0);
    assert!(text.starts_with("id,expected"));
    assert_eq!(dca(&["--config", c, "hyper", "dof", "--radius", "3", "--rank"]).0, 2);
    assert_eq!(dca(&["--config", c, "--max-radius", "3", "hyper", "dof", "--radius", "3", "--rank"]).0, 0);
}

#[test]
fn ball_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ball.json");
    let (code, _) = dca(&["hyper", "ball", "--radius", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let ball = HyperbolicBall::from_json(&v).unwrap();
    let fresh = build_ball(3);
    assert_eq!(ball.triangles, fresh.triangles);
    assert_eq!(ball.boundary_cycles, fresh.boundary_cycles);
    assert_eq!(ball.to_json(), fresh.to_json());
}

#[test]
fn green_csv_rereads_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let args = ["euclid", "green", "--window", "20", "--grid", "192", "--tol", "1e-4", "--out", path.to_str().unwrap()];
    let (code, text) = dca(&args);
    assert_eq!(code, 0, "{text}");
    let read = read_lattice_csv_f64(std::fs::File::open(&path).unwrap()).unwrap();
    let direct = green_table(20, &QuadratureSpec { grid: 192, refine: 2, tol: 1e-4 }).unwrap();
    assert_eq!(read, direct.values);
}

#[test]
fn taylor_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.csv");
    // a degree-2 polynomial projected to degree 1
    let p = dca::euclid::polynomials::PolElement::new(2, (0, 0), [3, -1, 4, 1, -5, 9].map(dca::scalar::q).to_vec());
    let mut buf = Vec::new();
    dca::export::write_lattice_exact(&mut buf, &p.eval_rect((-2, 8), (-2, 8))).unwrap();
    std::fs::write(&path, buf).unwrap();
    let (code, text) = dca(&["euclid", "taylor", "--input", path.to_str().unwrap(), "--k", "1", "--format", "csv"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("projection idempotent,true,true"));
}
