//! End-to-end runs of the `raytomo` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use raytomo::io::{read_pgm, read_sinogram, ImageSidecar, SinogramContext};
use raytomo::Sinogram64;
use serde_json::Value;
use tempfile::TempDir;

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("phantoms").join(format!("{name}.json"))
}

fn raytomo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raytomo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

fn stderr_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stderr).expect("stderr carries a JSON error")
}

/// Non-type-H rational family: `ξ/ρ = λ²/2` has modulus 1/2 on the unit circle.
const HALF_MODULUS_FAMILY: &str = r#"{
  "name": "half-modulus",
  "a": { "num": [ { "c": [1.0, 0.0], "p": [0, 0] } ] },
  "b": { "num": [ { "c": [2.0, 0.0], "p": [0, 0] } ] },
  "s": { "num": [ { "c": [0.0, 0.5], "p": [1, 0] }, { "c": [0.0, -0.5], "p": [0, 1] } ] },
  "t": { "num": [ { "c": [0.5, 0.0], "p": [1, 0] }, { "c": [0.5, 0.0], "p": [0, 1] } ] },
  "s_range": [-1.0, 1.0],
  "t_range": [-1.0, 1.0]
}"#;

#[test]
fn forward_of_radial_phantom_has_identical_rows() {
    let dir = TempDir::new().unwrap();
    let sino_path = dir.path().join("gaussian.sino");
    let gaussian = bundled("gaussian");
    let output = raytomo(&[
        "forward",
        "--phantom",
        text(&gaussian),
        "--ntheta",
        "16",
        "--ns",
        "65",
        "--out",
        text(&sino_path),
    ]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let context = SinogramContext {
        cover_radius: 0.975,
        t_intervals: 1024,
    };
    let sino: Sinogram64 = read_sinogram(&sino_path, context).unwrap();
    let first = sino.row(0);
    let spread = (1..sino.grid().ntheta())
        .flat_map(|k| sino.row(k).iter().zip(first).map(|(a, b)| (a - b).abs()))
        .fold(0.0_f64, f64::max);
    assert!(spread < 1e-8, "row spread {spread}");
    assert!(first.iter().any(|&v| v > 0.1));
}

#[test]
fn invert_after_forward_writes_image_and_metrics() {
    let dir = TempDir::new().unwrap();
    let sino_path = dir.path().join("mollifier.sino");
    let image_path = dir.path().join("mollifier.pgm");
    let mollifier = bundled("mollifier");
    let forward = raytomo(&[
        "forward",
        "--family",
        "hyperbolic-geodesics",
        "--phantom",
        text(&mollifier),
        "--ntheta",
        "120",
        "--ns",
        "257",
        "--out",
        text(&sino_path),
    ]);
    assert!(forward.status.success(), "{}", String::from_utf8_lossy(&forward.stderr));
    let invert = raytomo(&[
        "invert",
        "--family",
        "hyperbolic-geodesics",
        "--sino",
        text(&sino_path),
        "--grid",
        "48",
        "--reference",
        text(&mollifier),
        "--out",
        text(&image_path),
    ]);
    assert!(invert.status.success(), "{}", String::from_utf8_lossy(&invert.stderr));
    assert!(String::from_utf8_lossy(&invert.stdout).contains("l2_rel"));

    let (width, height, samples) = read_pgm(&image_path).unwrap();
    assert_eq!((width, height, samples.len()), (48, 48, 48 * 48));
    let sidecar: ImageSidecar =
        serde_json::from_str(&fs::read_to_string(dir.path().join("mollifier.pgm.json")).unwrap()).unwrap();
    assert_eq!(sidecar.n, 48);
    assert_eq!(sidecar.family, "hyperbolic-geodesics");
    let metrics = sidecar.metrics.expect("reference metrics recorded");
    assert!(metrics.l2_rel <= 0.05, "l2_rel {}", metrics.l2_rel);
}

#[test]
fn invalid_grid_exits_with_validation_status() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bad.sino");
    let gaussian = bundled("gaussian");
    let output = raytomo(&["forward", "--phantom", text(&gaussian), "--ns", "64", "--out", text(&out)]);
    assert_eq!(output.status.code(), Some(2));
    assert_eq!(stderr_json(&output)["error"], "InvalidGrid");
    assert!(!out.exists());
}

#[test]
fn output_overwriting_an_input_is_refused() {
    let dir = TempDir::new().unwrap();
    let phantom = dir.path().join("phantom.json");
    fs::copy(bundled("gaussian"), &phantom).unwrap();
    let output = raytomo(&["forward", "--phantom", text(&phantom), "--out", text(&phantom)]);
    assert_eq!(output.status.code(), Some(2));
    assert_eq!(stderr_json(&output)["error"], "ConfigError");
    assert_eq!(fs::read(&phantom).unwrap(), fs::read(bundled("gaussian")).unwrap());
}

#[test]
fn unknown_family_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.sino");
    let gaussian = bundled("gaussian");
    let output = raytomo(&["forward", "--family", "spirals", "--phantom", text(&gaussian), "--out", text(&out)]);
    assert_eq!(output.status.code(), Some(2));
    assert_eq!(stderr_json(&output)["error"], "UnknownFamily");
}

#[test]
fn verify_passes_for_the_lines_family() {
    let dir = TempDir::new().unwrap();
    let report_path = dir.path().join("report.json");
    let output = raytomo(&["verify", "--family", "euclidean-lines", "--samples", "40", "--report", text(&report_path)]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for check in checks {
        assert_eq!(check["passed"], true, "{check}");
        assert!(check["residual"].as_f64().unwrap() <= check["threshold"].as_f64().unwrap());
    }
}

#[test]
fn non_type_h_family_is_a_numerical_failure() {
    let dir = TempDir::new().unwrap();
    let family = dir.path().join("half.json");
    fs::write(&family, HALF_MODULUS_FAMILY).unwrap();
    let sino_path = dir.path().join("zero.sino");
    let image_path = dir.path().join("zero.pgm");
    let gaussian = bundled("gaussian");
    let forward = raytomo(&[
        "forward",
        "--family",
        text(&family),
        "--phantom",
        text(&gaussian),
        "--ntheta",
        "8",
        "--ns",
        "33",
        "--out",
        text(&sino_path),
    ]);
    assert!(forward.status.success(), "{}", String::from_utf8_lossy(&forward.stderr));
    let invert = raytomo(&[
        "invert",
        "--family",
        text(&family),
        "--sino",
        text(&sino_path),
        "--grid",
        "8",
        "--out",
        text(&image_path),
    ]);
    assert_eq!(invert.status.code(), Some(3), "{}", String::from_utf8_lossy(&invert.stderr));
    assert_eq!(stderr_json(&invert)["error"], "TypeHViolation");
}
