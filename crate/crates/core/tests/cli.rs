//! End-to-end runs of the `finsler` binary.

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;
use std::process::{Command, Output};

use finsler_core::matrix::{haar_sample, skew_exp, MatrixJson, SkewHermitian, UnitaryMatrix};
use finsler_core::rigidity::{cyclic_representation, dihedral_representation, FiniteGroupPresentation, RepresentationPair};
use finsler_core::scenarios::planted_pair;
use finsler_core::subspaces::SubspaceSpec;
use serde_json::Value;

fn finsler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsler")).args(args).env_remove("FINSLER_SEED").output().expect("spawn finsler")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn matrix_json(u: &UnitaryMatrix) -> String {
    serde_json::to_string(&MatrixJson::from_matrix(u.matrix())).unwrap()
}

fn points_json(points: &[UnitaryMatrix]) -> String {
    let mats: Vec<MatrixJson> = points.iter().map(|u| MatrixJson::from_matrix(u.matrix())).collect();
    serde_json::to_string(&mats).unwrap()
}

#[test]
fn envelope_shape() {
    let out = finsler(&["verify", "p2.1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in ["scenario", "config", "seed", "results", "pass", "runtime_ms"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["scenario"], "verify:p2.1");
    assert_eq!(v["pass"], true);
    assert!(v["runtime_ms"].is_null());
    let timed = json(&finsler(&["--timing", "verify", "p2.1"]));
    assert!(timed["runtime_ms"].is_u64());
}

#[test]
fn distance_of_diagonal_unitaries() {
    let a = matrix_json(&UnitaryMatrix::from_angles(&[0.3, -0.4]));
    let b = matrix_json(&UnitaryMatrix::identity(2));
    let v = json(&finsler(&["distance", &a, &b, "--metric", "p2"]));
    assert!((v["results"]["distance"].as_f64().unwrap() - 0.5).abs() < 1e-14);
    let v = json(&finsler(&["distance", &a, &b, "--metric", "inf"]));
    assert!((v["results"]["distance"].as_f64().unwrap() - 0.4).abs() < 1e-14);
    let v = json(&finsler(&["distance", &a, &b, "--metric", "inf+eps:0.5"]));
    assert!((v["results"]["distance"].as_f64().unwrap() - 0.4f64.hypot(0.25)).abs() < 1e-14);
}

#[test]
fn distance_reads_files() {
    let path = scratch("u.json");
    std::fs::write(&path, matrix_json(&haar_sample(3, 4))).unwrap();
    let p = path.to_str().unwrap();
    let out = finsler(&["distance", p, p, "--metric", "p4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["results"]["distance"].as_f64().unwrap() < 1e-12);
}

#[test]
fn exit_codes() {
    let one = matrix_json(&UnitaryMatrix::identity(1));
    let two = matrix_json(&UnitaryMatrix::identity(2));
    assert_eq!(finsler(&["distance", &one, &two]).status.code(), Some(3));
    assert_eq!(finsler(&["distance", &one, &one, "--metric", "p1"]).status.code(), Some(2));
    assert_eq!(finsler(&["distance", &one, "/nonexistent/file.json"]).status.code(), Some(2));
    let bad = r#"{"n":1,"re":[[2]],"im":[[0]]}"#;
    assert_eq!(finsler(&["distance", &one, bad]).status.code(), Some(2));
    assert_eq!(finsler(&["verify", "z0.0"]).status.code(), Some(2));
    assert_eq!(finsler(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn seed_from_environment() {
    let flag = finsler(&["verify", "t3.9", "--seed", "11"]);
    let env = Command::new(env!("CARGO_BIN_EXE_finsler")).args(["verify", "t3.9"]).env("FINSLER_SEED", "11").output().unwrap();
    assert_eq!(flag.stdout, env.stdout);
    assert_eq!(json(&flag)["seed"], 11);
    let other = finsler(&["verify", "t3.9", "--seed", "12"]);
    assert_ne!(flag.stdout, other.stdout);
}

#[test]
fn dump_dir_receives_profiles() {
    let dir = scratch("dumps-t3.1");
    let _ = std::fs::remove_dir_all(&dir);
    let out = finsler(&["verify", "t3.1", "--trials", "5", "--dump-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let files: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(!files.is_empty());
    for f in files {
        assert!(std::fs::read_to_string(&f).unwrap().lines().count() > 1, "{}", f.display());
    }
}

#[test]
fn circumcenter_of_single_point() {
    let pts = points_json(&[haar_sample(3, 1)]);
    let out = finsler(&["circumcenter", &pts, "--metric", "p2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["result"]["radius"].as_f64().unwrap(), 0.0);
}

#[test]
fn circumcenter_of_two_symmetries_sits_on_the_boundary() {
    let pts = points_json(&[UnitaryMatrix::from_angles(&[0.0, std::f64::consts::PI]), UnitaryMatrix::from_angles(&[std::f64::consts::PI, 0.0])]);
    let out = finsler(&["circumcenter", &pts, "--metric", "inf", "--subspace", "Gr:1"]);
    let v = json(&out);
    let res = &v["results"]["result"];
    assert!((res["radius"].as_f64().unwrap() - FRAC_PI_2).abs() < 1e-9, "{res}");
    assert_eq!(res["boundary_warning"], true);
}

#[test]
fn circumcenter_of_clustered_points_is_unique() {
    let base = haar_sample(3, 2);
    let pts: Vec<UnitaryMatrix> = (0..5)
        .map(|k| {
            let x = finsler_core::matrix::random_unit_direction(3, &mut finsler_core::matrix::rng_from_seed(100 + k));
            base.mul(&skew_exp(&x.scale(0.4)).unwrap())
        })
        .collect();
    let path = scratch("cluster.json");
    std::fs::write(&path, points_json(&pts)).unwrap();
    let dir = scratch("trace");
    let out = finsler(&["circumcenter", path.to_str().unwrap(), "--metric", "inf+eps:0.1", "--trace", "--dump-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["results"]["result"]["converged"], true);
    assert!(v["results"]["dispersion"].as_f64().unwrap() < 1e-6);
    assert!(dir.join("circumcenter_trace.csv").exists());
}

#[test]
fn rigidity_certifies_planted_conjugator() {
    let group = FiniteGroupPresentation::dihedral(3).unwrap();
    let w = skew_exp(&SkewHermitian::from_angles(&[0.2, -0.1])).unwrap().mul(&haar_sample(2, 3));
    let x = finsler_core::matrix::unitary_log(&w).unwrap().value;
    let w = skew_exp(&x.scale(0.3 / x.norm(finsler_core::matrix::NormOrder::Inf))).unwrap();
    let pair = planted_pair(group, dihedral_representation(3), &w).unwrap();
    let path = scratch("planted.json");
    std::fs::write(&path, pair.to_json()).unwrap();
    let out = finsler(&["rigidity", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let cert = &v["results"]["outcome"];
    assert_eq!(cert["status"], "CERTIFIED");
    assert!(cert["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn rigidity_of_equal_representations_returns_identity() {
    let group = FiniteGroupPresentation::cyclic(4).unwrap();
    let rep = cyclic_representation(4, &[1, 3]);
    let pair = RepresentationPair::new(group, rep.clone(), rep, SubspaceSpec::FullUnitary).unwrap();
    let out = finsler(&["rigidity", &pair.to_json()]);
    assert_eq!(out.status.code(), Some(0));
    let g = MatrixJson::parse(&json(&out)["results"]["outcome"]["conjugator"].to_string()).unwrap().to_matrix().unwrap();
    assert!(g.entrywise_dist(&UnitaryMatrix::identity(2).into_matrix()) < 1e-12);
}

#[test]
fn rigidity_trivial_against_sign_is_inconclusive() {
    let pair = RepresentationPair::new(FiniteGroupPresentation::cyclic(2).unwrap(), cyclic_representation(2, &[0]), cyclic_representation(2, &[1]), SubspaceSpec::FullUnitary).unwrap();
    let out = finsler(&["rigidity", &pair.to_json(), "--scan", "8"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["results"]["outcome"]["status"], "INCONCLUSIVE");
    assert!((v["results"]["outcome"]["orbit_radius"].as_f64().unwrap() - FRAC_PI_2).abs() <= 1e-9);
    assert!(v["results"]["radius_upper_bound"]["upper_bound_only"] == true);
}

#[test]
fn rigidity_rejects_non_homomorphism() {
    let group = FiniteGroupPresentation::cyclic(3).unwrap();
    let text = RepresentationPair::new(group, cyclic_representation(3, &[1]), cyclic_representation(3, &[2]), SubspaceSpec::FullUnitary).unwrap().to_json();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    let first = v["group"]["elements"][1].as_str().unwrap().to_string();
    v["phi"][first] = serde_json::from_str(&matrix_json(&UnitaryMatrix::from_angles(&[0.5]))).unwrap();
    assert_eq!(finsler(&["rigidity", &v.to_string()]).status.code(), Some(2));
}
