use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fracconn::cli::{matrix_to_csv, read_matrix_csv};

const BIN: &str = env!("CARGO_BIN_EXE_fracconn");

fn manifest(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn fracconn(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("FRACCONN_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = fracconn(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut all: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
        .collect();
    all.sort();
    all
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_is_deterministic_and_seedable() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = manifest("configs/simulate_2A.json");
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    ok(&["simulate", s(&cfg), "--out-dir", s(&a)]);
    ok(&["simulate", s(&cfg), "--out-dir", s(&b)]);
    ok(&["simulate", s(&cfg), "--seed", "8", "--out-dir", s(&c)]);
    let fa = files(&a);
    let names: Vec<&str> = fa.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        ["fractal_true.csv", "gamma_true.csv", "nonfractal_true.csv", "series.csv", "truth.json"]
    );
    assert_eq!(fa, files(&b));
    let fc = files(&c);
    assert_ne!(fa[3].1, fc[3].1);
    assert_eq!(fa[2].1, fc[2].1, "truth does not depend on the seed");
}

#[test]
fn simulated_truth_is_recovered_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("sim.json");
    fs::write(
        &cfg,
        r#"{"length": 16384, "d": [-0.3, -0.1, 0.1, 0.3], "condition": "2A", "rho": 0.3, "seed": 99}"#,
    )
    .unwrap();
    let sim = tmp.path().join("sim");
    let est = tmp.path().join("est");
    ok(&["simulate", s(&cfg), "--out-dir", s(&sim)]);
    ok(&["estimate", s(&sim.join("series.csv")), "--memory", "ml", "--gamma", "cov", "--out-dir", s(&est)]);
    let truth = read_matrix_csv(&sim.join("nonfractal_true.csv")).unwrap();
    let hat = read_matrix_csv(&est.join("nonfractal.csv")).unwrap();
    assert_eq!(truth.labels, hat.labels);
    let worst = (truth.matrix.clone() - hat.matrix).abs().max();
    assert!(worst < 0.1, "max |D_hat - D| = {worst}");
}

#[test]
fn estimate_on_fixture_separates_nonfractal_from_pearson() {
    let tmp = tempfile::tempdir().unwrap();
    let fixture = manifest("tests/fixtures/rois15.csv");
    let out = ok(&[
        "estimate",
        s(&fixture),
        "--memory",
        "ml",
        "--gamma",
        "lin",
        "--sampling-interval",
        "2.0",
        "--out-dir",
        s(tmp.path()),
    ]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("truncated 1200 time points to 1024"), "{stderr}");
    let names: Vec<String> = files(tmp.path()).into_iter().map(|(n, _)| n).collect();
    assert_eq!(
        names,
        ["d_hat.csv", "estimate.json", "fractal.csv", "gamma_hat.csv", "nonfractal.csv", "pearson.csv"]
    );
    let pearson = read_matrix_csv(&tmp.path().join("pearson.csv")).unwrap();
    let d = read_matrix_csv(&tmp.path().join("nonfractal.csv")).unwrap();
    assert_eq!(pearson.matrix.nrows(), 15);
    let diff = (pearson.matrix - d.matrix).abs().max();
    assert!(diff > 0.05, "max |D_hat - Pearson| = {diff}");

    let bundle: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("estimate.json")).unwrap()).unwrap();
    assert_eq!(bundle["gamma_method"], "LIN");
    assert_eq!(bundle["dataset"]["provenance"]["truncated"], 176);
    assert_eq!(bundle["dataset"]["sampling_interval"], 2.0);
    assert!(bundle["result"]["memory"]["scale_interval"].is_array());
    // N = 1024 keeps 7 levels; LA8 leaves fewer than 16 clean coefficients at 6 and 7
    assert_eq!(bundle["excluded_scales"]["gamma"], serde_json::json!([6, 7]));
}

#[test]
fn emitted_matrices_round_trip_bit_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["estimate", s(&manifest("tests/fixtures/rois15.csv")), "--out-dir", s(tmp.path())]);
    for name in ["pearson.csv", "gamma_hat.csv", "nonfractal.csv", "fractal.csv"] {
        let path = tmp.path().join(name);
        let parsed = read_matrix_csv(&path).unwrap();
        let rewritten = matrix_to_csv(&parsed.labels, &parsed.matrix);
        assert_eq!(rewritten.as_bytes(), fs::read(&path).unwrap().as_slice(), "{name}");
    }
}

#[test]
fn every_seeded_command_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let fixture = manifest("tests/fixtures/rois15.csv");
    let plan = tmp.path().join("plan.json");
    fs::write(
        &plan,
        r#"{"experiment": {"condition": "1A", "q": 4, "length": 1024, "reps": 4, "score_memory": true},
            "sweep": {"axis": "length", "values": [512, 1024]}}"#,
    )
    .unwrap();
    let run = |tag: &str| {
        let root = tmp.path().join(tag);
        let est = root.join("estimate");
        let grid = root.join("grid");
        let graph = root.join("graph");
        let exp = root.join("experiment");
        ok(&["estimate", s(&fixture), "--memory", "lms", "--gamma", "sdf", "--filter", "haar", "--out-dir", s(&est)]);
        ok(&["grid", "--out-dir", s(&grid)]);
        ok(&["graph", s(&est.join("fractal.csv")), "--k", "20", "--out-dir", s(&graph)]);
        ok(&["experiment", s(&plan), "--out-dir", s(&exp)]);
        [est, grid, graph, exp].map(|d| files(&d))
    };
    let first = run("one");
    assert_eq!(first, run("two"));
    let exp_names: Vec<&str> = first[3].iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        exp_names,
        ["bias_report_0.json", "bias_report_1.json", "bias_samples_0.csv", "bias_samples_1.csv", "bias_summary.csv"]
    );
    let edges = String::from_utf8(first[2][0].1.clone()).unwrap();
    assert_eq!(edges.lines().count(), 21);
}

#[test]
fn shipped_condition_config_reports_six_pairs() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["experiment", s(&manifest("configs/fig3_2A.json")), "--out-dir", s(tmp.path())]);
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("bias_report.json")).unwrap()).unwrap();
    let pairs: Vec<&str> = report["estimators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["pair"].as_str().unwrap())
        .collect();
    assert_eq!(pairs, ["LMS-LIN", "LMS-COV", "LMS-SDF", "ML-LIN", "ML-COV", "ML-SDF"]);
    for e in report["estimators"].as_array().unwrap() {
        assert!(e["summary"]["median"].is_f64());
    }
    let summary = fs::read_to_string(tmp.path().join("bias_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 7);
    let samples = fs::read_to_string(tmp.path().join("bias_samples.csv")).unwrap();
    assert_eq!(samples.lines().next(), Some("pair,replicate,m,n,bias"));
}

#[test]
fn duplicated_series_have_unit_connectivity() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(manifest("tests/fixtures/rois15.csv")).unwrap();
    let dup: String = text
        .lines()
        .enumerate()
        .map(|(i, line)| {
            let first = line.split(',').next().unwrap();
            let extra = if i == 0 { "COPY" } else { first };
            format!("{line},{extra}\n")
        })
        .collect();
    let input = tmp.path().join("dup.csv");
    fs::write(&input, dup).unwrap();
    let out = tmp.path().join("out");
    ok(&["estimate", s(&input), "--out-dir", s(&out)]);
    let pearson = read_matrix_csv(&out.join("pearson.csv")).unwrap();
    let d = read_matrix_csv(&out.join("nonfractal.csv")).unwrap();
    assert_eq!(pearson.labels[15], "COPY");
    assert!((pearson.matrix[(0, 15)] - 1.0).abs() < 1e-12, "{}", pearson.matrix[(0, 15)]);
    assert!((d.matrix[(0, 15)] - 1.0).abs() < 1e-12, "{}", d.matrix[(0, 15)]);
}

#[test]
fn grid_output_shape() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["grid", "--out-dir", s(tmp.path())]);
    let text = fs::read_to_string(tmp.path().join("upsilon_grid.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("h1,h2,upsilon"));
    assert_eq!(text.lines().count(), 41 * 41 + 1);
    assert!(text.contains("\n0.5000,0.5000,1.0000000000000000e0\n"));
}

#[test]
fn exit_status_contract() {
    let tmp = tempfile::tempdir().unwrap();
    let code = |out: Output| out.status.code().unwrap();

    assert_eq!(code(fracconn(&["--help"])), 0);
    assert_eq!(code(fracconn(&["--version"])), 0);
    assert_eq!(code(fracconn(&[])), 1);
    assert_eq!(code(fracconn(&["estimate", "x.csv", "--memory", "whittle"])), 1);
    assert_eq!(code(fracconn(&["estimate", s(&tmp.path().join("missing.csv"))])), 1);

    let plan = tmp.path().join("zero.json");
    fs::write(&plan, r#"{"experiment": {"condition": "2A", "q": 4, "length": 2048, "reps": 0, "rho": 0.3}}"#).unwrap();
    let out = fracconn(&["experiment", s(&plan), "--out-dir", s(&tmp.path().join("zero"))]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("experiment.reps"));
    assert_eq!(code(out), 1);
    assert!(!tmp.path().join("zero").exists());

    let matrix = tmp.path().join("asym.csv");
    fs::write(&matrix, "\"\",a,b\na,1,0.5\nb,0.4,1\n").unwrap();
    assert_eq!(code(fracconn(&["graph", s(&matrix), "--k", "1", "--out-dir", s(tmp.path())])), 1);
    fs::write(&matrix, "\"\",a,b\na,1,0.5\nb,0.5,1\n").unwrap();
    assert_eq!(code(fracconn(&["graph", s(&matrix), "--k", "0", "--out-dir", s(tmp.path())])), 1);

    let out = Command::new(BIN)
        .args(["grid", "--out-dir", s(tmp.path())])
        .env("FRACCONN_THREADS", "none")
        .output()
        .unwrap();
    assert_eq!(code(out), 1);
    let out = Command::new(BIN)
        .args(["grid", "--out-dir", s(&tmp.path().join("threads"))])
        .env("FRACCONN_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(out), 0);
}

#[test]
fn estimation_failure_exits_2_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut text = String::from("a,b,c\n");
    for t in 0..512 {
        text.push_str(&format!("{},{},1.5\n", (t * 37 % 11) as f64, (t * 17 % 7) as f64));
    }
    let input = tmp.path().join("flat.csv");
    fs::write(&input, text).unwrap();
    let out_dir = tmp.path().join("out");
    let out = fracconn(&["estimate", s(&input), "--out-dir", s(&out_dir)]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!out_dir.exists() || files(&out_dir).is_empty());
}
