use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.scn"))
}

fn vdp(args: &[&str], scenario: &Path, out: &Path) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_vdp"))
        .args(args)
        .arg("--scenario")
        .arg(scenario)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stdout).into_owned(), String::from_utf8_lossy(&o.stderr).into_owned())
}

#[test]
fn verify_on_the_danielewski_surface_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, stderr) = vdp(&["verify"], &scenario("danielewski"), dir.path());
    assert_eq!(code, 0, "{stdout}{stderr}");
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    for o in report["random"].as_array().unwrap() {
        assert_eq!(o["failures"], 0);
        assert_eq!(o["cases"], 200);
    }
    assert!(dir.path().join("timings.json").exists());
}

#[test]
fn criterion_on_the_plane_is_certified_with_rank_three() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, stderr) = vdp(&["criterion"], &scenario("plane_z1"), dir.path());
    assert_eq!(code, 0, "{stdout}{stderr}");
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("criterion.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "certified-at-samples");
    let points = report["points"].as_array().unwrap();
    assert_eq!(points.len(), 50);
    assert!(points.iter().all(|p| p["rank"] == 3));
}

#[test]
fn unasserted_cohomology_gives_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenario("plane_z1")).unwrap().replace("cohomology = asserted", "cohomology = unknown");
    let path = dir.path().join("s.scn");
    fs::write(&path, text).unwrap();
    let (code, _, _) = vdp(&["criterion", "--samples", "5"], &path, &dir.path().join("out"));
    assert_eq!(code, 1);
    let report = fs::read_to_string(dir.path().join("out/criterion.json")).unwrap();
    assert!(report.contains("\"inconclusive\""));
}

#[test]
fn malformed_polynomial_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.scn");
    fs::write(&path, "n = 1\nf = z1^\n").unwrap();
    let (code, _, stderr) = vdp(&["verify"], &path, &dir.path().join("out"));
    assert_eq!(code, 2);
    assert!(stderr.contains(":2:"), "{stderr}");
}

#[test]
fn missing_scenario_is_an_internal_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = vdp(&["flow"], &dir.path().join("nope.scn"), dir.path());
    assert_eq!(code, 2);
}

#[test]
fn flow_and_approx_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, stderr) = vdp(&["flow", "--samples", "5"], &scenario("hyperbola"), dir.path());
    assert_eq!(code, 0, "{stdout}{stderr}");
    let csv = fs::read_to_string(dir.path().join("flow.csv")).unwrap();
    assert!(csv.starts_with("field,point,t,deviation"));
    assert_eq!(csv.lines().count(), 1 + 4 * 5 * 4);

    let (code, stdout, stderr) = vdp(&["approx", "--degree-bound", "2", "--float"], &scenario("circle"), dir.path());
    assert_eq!(code, 0, "{stdout}{stderr}");
    let csv = fs::read_to_string(dir.path().join("residuals.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("approx.json")).unwrap()).unwrap();
    assert_eq!(report["reproduced"], true);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for cmd in ["criterion", "approx", "flow"] {
        for d in [&a, &b] {
            let (code, _, stderr) = vdp(&[cmd, "--seed", "11", "--samples", "12"], &scenario("circle"), d.path());
            assert_eq!(code, 0, "{cmd}: {stderr}");
        }
    }
    for name in ["criterion.json", "approx.json", "residuals.csv", "flow.json", "flow.csv"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name} differs");
    }
}
