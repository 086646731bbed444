//! Command-line interface tests: subcommands, formats, flags, and exit
//! codes not already exercised by the acceptance suite.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polydiam"))
}

fn run(args: &[&str]) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    cmd.output().expect("binary runs")
}

fn generate(dir: &Path, args: &[&str], name: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    let mut cmd = bin();
    cmd.args(["generate"]).args(args).arg("-o").arg(&path);
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "generate failed: {out:?}");
    path
}

#[test]
fn generate_roundtrips_through_parse() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<(&[&str], &str)> = vec![
        (&["hypercube", "--dim", "3"], "cube.hrep"),
        (&["simplex", "--dim", "3"], "simplex.hrep"),
        (&["regular-polygon", "--sides", "6"], "hexagon.hrep"),
        (&["random-tangent", "--rows", "10", "--dim", "3", "--seed", "7"], "tangent.hrep"),
    ];
    for (args, name) in cases {
        let path = generate(dir.path(), args, name);
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed = polydiam::parse_hrep(&text).unwrap();
        let rewritten = polydiam::parse_hrep(&polydiam::write_hrep(&parsed)).unwrap();
        for i in 0..parsed.m() {
            for j in 0..parsed.n() {
                let a = parsed.matrix().get(i, j);
                let b = rewritten.matrix().get(i, j);
                assert!((a - b).abs() <= 1e-15, "{name} row {i} col {j}");
            }
            assert!((parsed.offsets()[i] - rewritten.offsets()[i]).abs() <= 1e-15);
        }
    }
}

#[test]
fn generate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let args: &[&str] = &["random-tangent", "--rows", "10", "--dim", "3", "--seed", "7"];
    let a = generate(dir.path(), args, "a.hrep");
    let b = generate(dir.path(), args, "b.hrep");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn generate_validates_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.hrep");
    // Missing required flag for the family.
    let out = bin().args(["generate", "hypercube", "-o"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Too few rows for boundedness headroom.
    let out = bin()
        .args(["generate", "random-tangent", "--rows", "4", "--dim", "3", "-o"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn analyze_json_and_csv_carry_identical_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cube = generate(dir.path(), &["hypercube", "--dim", "2"], "square.hrep");

    let json_out = bin()
        .args(["analyze"])
        .arg(&cube)
        .args(["--samples", "10000", "--format", "json"])
        .output()
        .unwrap();
    assert!(json_out.status.success());
    let report: Value = serde_json::from_slice(&json_out.stdout).unwrap();

    let csv_out = bin()
        .args(["analyze"])
        .arg(&cube)
        .args(["--samples", "10000", "--format", "csv"])
        .output()
        .unwrap();
    assert!(csv_out.status.success());
    let csv = String::from_utf8(csv_out.stdout).unwrap();

    let csv_value = |key: &str| -> String {
        csv.lines()
            .find(|l| l.starts_with(&format!("{key},")))
            .unwrap_or_else(|| panic!("csv key {key}"))
            .split_once(',')
            .unwrap()
            .1
            .to_string()
    };
    assert_eq!(csv_value("delta").parse::<f64>().unwrap(), report["delta"].as_f64().unwrap());
    assert_eq!(
        csv_value("exact_diameter").parse::<u64>().unwrap(),
        report["exact_diameter"].as_u64().unwrap()
    );
    assert_eq!(
        csv_value("cone_stats[0].volume").parse::<f64>().unwrap(),
        report["cone_stats"][0]["volume"].as_f64().unwrap()
    );

    let text_out = bin()
        .args(["analyze"])
        .arg(&cube)
        .args(["--samples", "10000", "--format", "text"])
        .output()
        .unwrap();
    assert!(text_out.status.success());
    assert!(String::from_utf8(text_out.stdout).unwrap().contains("exact_diameter"));
}

#[test]
fn verify_selects_lemmas_and_reports_pass() {
    let dir = tempfile::tempdir().unwrap();
    let cube = generate(dir.path(), &["hypercube", "--dim", "3"], "cube.hrep");
    for lemma in ["1", "2", "3", "all"] {
        let out = bin()
            .args(["verify"])
            .arg(&cube)
            .args(["--lemma", lemma, "--samples", "10000"])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "lemma {lemma}");
        let report: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(report["lemma_failures"].as_u64(), Some(0));
        if lemma != "all" {
            let expected: u64 = lemma.parse().unwrap();
            for check in report["lemma_results"].as_array().unwrap() {
                assert_eq!(check["lemma"].as_u64(), Some(expected));
            }
        }
    }
}

#[test]
fn diameter_and_bound_commands() {
    let dir = tempfile::tempdir().unwrap();
    let gon = generate(dir.path(), &["regular-polygon", "--sides", "8"], "octagon.hrep");

    let out = bin().args(["diameter"]).arg(&gon).output().unwrap();
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["exact_diameter"].as_u64(), Some(4));
    assert_eq!(report["vertex_count"].as_u64(), Some(8));

    let out = bin().args(["bound"]).arg(&gon).args(["--all-minors"]).output().unwrap();
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["det_star_all_minors"].as_f64().is_some());
    assert!(report["j_max_paper"].as_u64().unwrap() >= 1);
    assert!(report["j_max_standard"].as_u64().unwrap() <= report["j_max_paper"].as_u64().unwrap());
}

#[test]
fn trace_between_witness_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let cube = generate(dir.path(), &["hypercube", "--dim", "3"], "cube.hrep");
    let out = bin()
        .args(["trace"])
        .arg(&cube)
        .args(["--from", "0", "--to", "7", "--samples", "10000"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let trace = &report["trace"];
    assert_eq!(trace["distance"].as_u64(), Some(3));
    assert_eq!(trace["meet_iteration"].as_u64(), Some(2));
    assert_eq!(trace["frontier_bound"].as_u64(), Some(4));

    let out = bin()
        .args(["trace"])
        .arg(&cube)
        .args(["--from", "0", "--to", "99", "--samples", "10000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn perturb_unlocks_degenerate_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let octa = generate(dir.path(), &["cross-polytope", "--dim", "3"], "octa.hrep");
    let out = bin().args(["analyze"]).arg(&octa).args(["--samples", "10000"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));

    let out = bin()
        .args(["analyze"])
        .arg(&octa)
        .args(["--samples", "10000", "--perturb", "0.001"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["perturb_sigma"].as_f64(), Some(0.001));
    assert!(report["vertex_count"].as_u64().unwrap() > 6);
}

#[test]
fn missing_file_is_an_input_error() {
    let out = run(&["analyze", "/nonexistent/input.hrep"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_override_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let cube = generate(dir.path(), &["hypercube", "--dim", "2"], "square.hrep");
    let out = bin()
        .args(["diameter"])
        .arg(&cube)
        .args(["--tol", "1e-7"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["exact_diameter"].as_u64(), Some(2));
}
