use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn teich(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teich")).args(args).env_remove("TEICH_THREADS").output().expect("running teich")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn equal_seeds_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let out = out.to_str().unwrap();
        let o = teich(&["count-orbit", "--rmax", "8", "--out", out]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let o = teich(&["volume", "--seed", "42", "--radii", "4,5,6,7", "--out", out]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in ["count-orbit.json", "count-orbit.csv", "volume.json", "volume.csv"] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between runs");
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let seq = teich(&["volume", "--radii", "4,5,6,7", "--sequential"]);
    let par = teich(&["volume", "--radii", "4,5,6,7", "--threads", "2"]);
    assert_eq!(seq.stdout, par.stdout);
}

#[test]
fn short_radius_grid_is_a_config_error() {
    let o = teich(&["count-orbit", "--radii", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("fit"));
    let o = teich(&["count-orbit", "--rmin", "5", "--rmax", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn derivative_on_shipped_octagon() {
    let surface = data("octagon.json");
    let o = teich(&["verify-derivative", "--surface", surface.to_str().unwrap(), "--step", "1e-5", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["passed"], true);
    assert!(v["report"]["max_residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn config_values_override_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 11\n[count-orbit]\nradii = [5, 6, 7, 8]\n").unwrap();
    let o = teich(&["count-orbit", "--radii", "1,2", "--format", "csv", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = String::from_utf8(o.stdout).unwrap();
    let radii: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(radii, ["5", "6", "7", "8"]);

    let o = teich(&["volume", "--seed", "3", "--radii", "4,5,6,7", "--config", cfg.to_str().unwrap()]);
    assert_eq!(stdout_json(&o)["seed"], 11);
}

#[test]
fn failed_checks_exit_one_and_are_named() {
    let o = teich(&["sectors", "--radius", "6", "--k-radius=-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("disjointness"));
    assert_eq!(stdout_json(&o)["passed"], false);
}

#[test]
fn invalid_inputs_exit_two() {
    assert_eq!(teich(&["sandbox", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(teich(&["count-orbit", "--gamma", "1,1,0,1"]).status.code(), Some(2));
    assert_eq!(teich(&["net-partition", "--origin", "0,5"]).status.code(), Some(2));
    assert_eq!(teich(&["verify-derivative", "--surface", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(teich(&["volume", "--samples", "10"]).status.code(), Some(2));
    assert_eq!(teich(&["count-orbit", "--base", "0.3,2"]).status.code(), Some(2));
}

#[test]
fn track_pipeline_from_surface_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let surface = data("octagon.json");
    let o = teich(&["tt", "adapted", "--surface", surface.to_str().unwrap(), "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    let track = dir.path().join("track.json");
    let check = stdout_json(&teich(&["tt", "check", "--track", track.to_str().unwrap()]));
    assert_eq!(check["passed"], true);
    let large = check["report"]["large_branches"][0].as_u64().unwrap().to_string();

    let split_dir = dir.path().join("split");
    let o = teich(&[
        "tt",
        "split",
        "--track",
        track.to_str().unwrap(),
        "--branch",
        &large,
        "--out",
        split_dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = teich(&["tt", "check", "--track", split_dir.join("track.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    let o = teich(&["tt", "split", "--track", track.to_str().unwrap(), "--branch", "999"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn csv_counts_have_a_header_and_one_row_per_radius() {
    let o = teich(&["count-orbit", "--rmin", "4", "--rmax", "7", "--format", "csv"]);
    let csv = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "R,raw_count,quotient_count");
    assert_eq!(lines.len(), 5);
    for l in &lines[1..] {
        let f: Vec<u64> = l.split(',').skip(1).map(|x| x.parse().unwrap()).collect();
        assert!(f[1] <= f[0]);
    }
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(format!("{name}.schema.json"));
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::options().with_base_uri("file:///schemas/").build(&value).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn assert_valid(name: &str, doc: &serde_json::Value) {
    let errors: Vec<String> = schema(name).iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

#[test]
fn reports_match_shipped_schemas() {
    let o = teich(&["count-orbit", "--rmin", "4", "--rmax", "7"]);
    let v = stdout_json(&o);
    assert_valid("envelope", &v);
    assert_valid("count_report", &v["report"]["counts"]);
    assert_valid("cell_measures", &v["report"]["cells"]);

    for (args, name) in [
        (&["sectors", "--radius", "6"][..], "sector_report"),
        (&["volume", "--radii", "4,5,6,7", "--with-counts"][..], "volume_report"),
        (&["verify-derivative", "--instances", "3"][..], "derivative_report"),
    ] {
        let v = stdout_json(&teich(args));
        assert_valid("envelope", &v);
        assert_valid(name, &v["report"]);
    }

    let surface: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(data("octagon.json")).unwrap()).unwrap();
    assert_valid("surface", &surface);
    let track: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(data("octagon_track.json")).unwrap()).unwrap();
    assert_valid("track", &track);
}
