use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hshear::geometry::convexity_check;
use hshear_cli::output::read_curve_csv;
use hshear_cli::plot::{render_svg, ConvexityOutput};
use serde_json::Value;

fn hshear(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hshear"));
    cmd.args(args).env_remove("HSHEAR_OUT_DIR");
    if let Some(d) = out_dir {
        cmd.env("HSHEAR_OUT_DIR", d);
    }
    cmd.output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn vk_of_half_plane_map_is_two() {
    let o = hshear(&["vk", "--phi", "H", "--k", "2"], None);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["verdict"], "MEMBER");
    for row in v["values"].as_array().unwrap() {
        assert_eq!(row["value_over_pi"].as_f64(), Some(2.0));
    }
}

#[test]
fn probe_reports_failure_without_failing() {
    let o = hshear(&["probe", "--phi", "H", "--eta", "theta=0", "--family", "explicit:monomial:N=1"], None);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["summary"], "FAILURE");
    assert_eq!(v["seed"], 7);
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed: 7"));
    assert!(!v["failures"].as_array().unwrap().is_empty());
}

#[test]
fn probe_union_of_families() {
    let o = hshear(
        &[
            "probe",
            "--phi",
            "H",
            "--family",
            "monomial_grid:phases=2,nmax=1",
            "--family",
            "explicit:zero",
            "--radii",
            "0.9,0.99",
            "--seed",
            "3",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["entries"].as_array().unwrap().len(), 3);
    assert_eq!(v["summary"], "NO_FAILURE_FOUND");
    assert_eq!(v["seed"], 3);
}

#[test]
fn reproduce_parabola_map() {
    let o = hshear(&["reproduce", "--case", "f0"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("parabola residual"));
    assert!(text.contains("observed NON_CONVEX"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn reproduce_koebe_directions() {
    let o = hshear(&["reproduce", "--case", "koebe-directions"], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn reproduce_mismatch_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = hshear(
        &["reproduce", "--case", "brannan", "--quad-tol", "1e-3", "--quad-order", "5", "--json", "b.json"],
        Some(dir.path()),
    );
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("b.json")).unwrap()).unwrap();
    assert_eq!(v["pass"], false);
    assert_eq!(v["case"], "brannan");
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["nosuch"],
        vec!["shear", "--phi", "bogus", "--omega", "zero", "--eta", "-1,0"],
        vec!["shear", "--phi", "H", "--omega", "zero", "--eta", "0.5,0"],
        vec!["shear", "--phi", "H", "--omega", "monomial:N=0", "--eta", "-1,0"],
        vec!["convexity", "--phi", "H", "--r", "1.5"],
        vec!["probe", "--phi", "H", "--family", "grid"],
        vec!["--precision", "3", "vk", "--phi", "H", "--k", "2"],
        vec!["--quad-order", "2", "vk", "--phi", "H", "--k", "2"],
    ] {
        let o = hshear(&args, None);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
    assert_eq!(hshear(&["--help"], None).status.code(), Some(0));
}

#[test]
fn shear_csv_columns_and_identities() {
    let dir = tempfile::tempdir().unwrap();
    let o = hshear(
        &["shear", "--phi", "H", "--omega", "monomial:N=1", "--eta", "theta=0", "--r", "0.5", "--n", "32", "--out", "s.csv"],
        Some(dir.path()),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let (header, rows) = hshear_cli::output::read_table(&text).unwrap();
    assert_eq!(header, hshear_cli::output::SHEAR_COLUMNS);
    assert_eq!(rows.len(), 32);
    for row in rows {
        let z = hshear::C64::new(row[1], row[2]);
        let (h, g) = (hshear::C64::new(row[5], row[6]), hshear::C64::new(row[7], row[8]));
        assert!((row[3] - (h.re + g.re)).abs() < 1e-10);
        assert!((row[4] - (h.im - g.im)).abs() < 1e-10);
        // h − g = z/(1 − z) for η = 1
        assert!((h - g - z / (1.0 - z)).norm() < 1e-10);
    }
}

fn convexity_artifacts(args: &[&str], r: f64, parabola: bool) {
    let dir = tempfile::tempdir().unwrap();
    let mut full = vec!["convexity"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--json", "c.json", "--svg", "c.svg", "--csv", "c.csv"]);
    let o = hshear(&full, Some(dir.path()));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let json = fs::read_to_string(dir.path().join("c.json")).unwrap();
    assert_eq!(stdout_json(&o), serde_json::from_str::<Value>(&json).unwrap());
    let report: ConvexityOutput = serde_json::from_str(&json).unwrap();
    assert_eq!(report.parabola_residual.is_some(), parabola);

    let svg = fs::read_to_string(dir.path().join("c.svg")).unwrap();
    assert_eq!(render_svg(&report), svg);
    assert_eq!(svg.contains("stroke-dasharray"), parabola);

    let curve = read_curve_csv(&fs::read_to_string(dir.path().join("c.csv")).unwrap(), r).unwrap();
    let again = convexity_check(&curve, report.tol_backturn);
    assert_eq!(again.verdict, report.report.verdict);
    assert!((again.total_turning - report.report.total_turning).abs() < 1e-9);
}

#[test]
fn parabola_map_artifacts_round_trip() {
    convexity_artifacts(
        &["--phi", "H", "--omega", "monomial:N=1", "--eta", "1,0", "--r", "0.99", "--direction", "1.5707963267948966"],
        0.99,
        true,
    );
}

#[test]
fn convex_map_artifacts_round_trip() {
    convexity_artifacts(&["--phi", "Llambda:re=0,im=1", "--r", "0.9", "--n", "512"], 0.9, false);
}

#[test]
fn convexity_reports_verdicts() {
    let v = stdout_json(&hshear(&["convexity", "--phi", "koebe", "--r", "0.25", "--n", "512"], None));
    assert_eq!(v["report"]["verdict"], "CONVEX");
    let v = stdout_json(&hshear(
        &["convexity", "--phi", "H", "--omega", "monomial:N=1", "--eta", "1,0", "--direction", "0"],
        None,
    ));
    assert_eq!(v["report"]["verdict"], "NON_CONVEX");
    assert_eq!(v["directional"]["pass"], true);
}
