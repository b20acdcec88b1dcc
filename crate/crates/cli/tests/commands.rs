use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn twinsg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twinsg")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

/// Data rows of a CSV written by the tool, skipping comments and the header.
fn rows(file: &str) -> Vec<Vec<f64>> {
    std::fs::read_to_string(file)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn report_value(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.trim_start().strip_prefix('=')))
        .unwrap_or_else(|| panic!("{key} missing from {report}"))
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn help_lists_exit_codes() {
    let o = twinsg(&["--help"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for line in ["1  invalid argument", "2  file", "3  malformed", "4  fit failed", "5  self-test"] {
        assert!(text.contains(line), "{line}");
    }
    assert_eq!(code(&twinsg(&["--version"])), 0);
    assert_eq!(code(&twinsg(&["frobnicate"])), 1);
    assert_eq!(code(&twinsg(&["scan"])), 1);
}

#[test]
fn scan_writes_header_and_grid_rows() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "s.csv");
    let o = twinsg(&["scan", "--lambda", "1", "--phi-l", "1.5707963", "--grid", "512", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let meta = lines.next().unwrap();
    assert!(meta.starts_with("# twinsg scan version="));
    assert!(meta.contains("lambda=1") && meta.contains("phi_l=1.5707963") && meta.contains("grid=512"));
    assert!(text.lines().any(|l| l == "phi_r,intensity,analytic_intensity"));
    let data = rows(&out);
    assert_eq!(data.len(), 512);
    assert_eq!(data[0][0], 0.0);
    assert!((data[511][0] - 2.0 * PI).abs() < 1e-15);
}

#[test]
fn scan_intensity_is_proportional_to_closed_form() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "s.csv");
    assert_eq!(code(&twinsg(&["scan", "--lambda", "0.37", "--phi-l", "2.1", "--out", &out])), 0);
    let ratios: Vec<f64> = rows(&out).iter().filter(|r| r[2] > 1e-6).map(|r| r[1] / r[2]).collect();
    assert!(ratios.len() > 400);
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!((hi - lo) / hi < 1e-9, "{lo} .. {hi}");
}

#[test]
fn invalid_lambda_exits_one_without_writing() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "bad.csv");
    let o = twinsg(&["scan", "--lambda", "2", "--out", &out]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("lambda"));
    assert!(!Path::new(&out).exists());
    assert_eq!(code(&twinsg(&["scan", "--lambda", "0.5", "--phi-l", "pie", "--out", &out])), 1);
    assert_eq!(code(&twinsg(&["scan", "--lambda", "0.5", "--grid", "1", "--out", &out])), 1);
    assert_eq!(code(&twinsg(&["noise", "--rel-amp", "1.5", "--out", &out])), 1);
    assert!(!Path::new(&out).exists());
}

#[test]
fn unwritable_output_exits_two() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "missing/dir/s.csv");
    let o = twinsg(&["scan", "--lambda", "0.5", "--out", &out]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn phi_l_shorthand_matches_radians() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.csv"), path(&dir, "b.csv"));
    assert_eq!(code(&twinsg(&["scan", "--lambda", "0.5", "--phi-l", "3pi/4", "--grid", "16", "--out", &a])), 0);
    let radians = format!("{}", 3.0 * PI / 4.0);
    assert_eq!(code(&twinsg(&["scan", "--lambda", "0.5", "--phi-l", &radians, "--grid", "16", "--out", &b])), 0);
    assert_eq!(rows(&a), rows(&b));
}

/// Parabola-refined height of the local maximum at `i`.
fn refined(points: &[Vec<f64>], i: usize) -> f64 {
    let (x0, y0, x1, y1, x2, y2) =
        (points[i - 1][0], points[i - 1][1], points[i][0], points[i][1], points[i + 1][0], points[i + 1][1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    let b = d01 - a * (x0 + x1);
    let c = y0 - a * x0 * x0 - b * x0;
    c - b * b / (4.0 * a)
}

fn local_maxima(points: &[Vec<f64>]) -> Vec<usize> {
    (1..points.len() - 1).filter(|&i| points[i][1] > points[i - 1][1] && points[i][1] >= points[i + 1][1]).collect()
}

#[test]
fn curves_reproduce_the_three_coherence_values() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "c.csv");
    let o = twinsg(&["curves", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let data = rows(&out);
    assert_eq!(data.len(), 3 * 512);
    let curve = |l: f64| -> Vec<Vec<f64>> { data.iter().filter(|r| r[3] == l).cloned().collect() };

    // λ = 0: the two halves of the grid peak at the same height
    let c0 = curve(0.0);
    let first = c0[..256].iter().map(|r| r[1]).fold(0.0, f64::max);
    let second = c0[256..].iter().map(|r| r[1]).fold(0.0, f64::max);
    assert!((first - second).abs() / first < 1e-9);

    // λ = 1: the lobes are bounded by the curve's minima; from the closed form
    // at φ_L = π/2 their heights are in the ratio (3 + √5)²/4
    let c1 = curve(1.0);
    let peaks = local_maxima(&c1);
    assert_eq!(peaks.len(), 2);
    let ratio = refined(&c1, peaks[0]) / refined(&c1, peaks[1]);
    let exact = (3.0 + 5f64.sqrt()).powi(2) / 4.0;
    assert!((ratio - exact).abs() / exact < 1e-6, "{ratio} vs {exact}");
    assert!(c1[peaks[1]][0] > 1.5 * PI);
}

#[test]
fn curves_ratio_at_quarter_turns_is_nine() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "c.csv");
    assert_eq!(code(&twinsg(&["curves", "--grid", "513", "--out", &out])), 0);
    let c1: Vec<Vec<f64>> = rows(&out).into_iter().filter(|r| r[3] == 1.0).collect();
    assert!((c1[128][0] - PI / 2.0).abs() < 1e-14 && (c1[384][0] - 1.5 * PI).abs() < 1e-14);
    assert!((c1[128][1] / c1[384][1] - 9.0).abs() / 9.0 < 1e-6);
}

#[test]
fn noise_is_byte_identical_for_a_fixed_seed() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.csv"), path(&dir, "b.csv"));
    let args = |out: &str| {
        let o = twinsg(&["noise", "--rel-amp", "0.15", "--samples", "1000", "--seed", "42", "--grid", "128", "--out", out]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        stdout(&o)
    };
    let summary = args(&a);
    args(&b);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(summary.contains("lambda 0 vs 1: gap") && summary.lines().next().unwrap().ends_with("-> distinguishable"));
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.lines().next().unwrap().contains("seed=42"));
    assert!(text.contains("# verdicts: {\"lambda_a\":0.0,\"lambda_b\":1.0"));
    assert!(text.contains("phi_r,intensity,analytic_intensity,lambda,p05,p25,p50,p75,p95,mean,std"));
    assert_eq!(rows(&a).len(), 3 * 128);
}

#[test]
fn zero_noise_gives_zero_width_bands() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "n.csv");
    assert_eq!(code(&twinsg(&["noise", "--rel-amp", "0", "--samples", "20", "--grid", "64", "--out", &out])), 0);
    for r in rows(&out) {
        for p in &r[4..9] {
            assert_eq!(*p, r[1]);
        }
        assert!(r[10] <= 1e-14 * r[1].abs());
    }
}

#[test]
fn noise_json_has_meta_and_data() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "n.json");
    let o = twinsg(&["noise", "--samples", "50", "--grid", "16", "--dist", "gaussian", "--out", &out]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["meta"]["command"], "noise");
    assert_eq!(doc["meta"]["params"]["dist"], "gaussian");
    assert_eq!(doc["meta"]["seed"], 42);
    assert_eq!(doc["meta"]["verdicts"].as_array().unwrap().len(), 3);
    let first = doc["data"][0].as_object().unwrap();
    let keys: Vec<&str> = first.keys().map(String::as_str).collect();
    assert_eq!(keys, ["phi_r", "intensity", "analytic_intensity", "lambda", "p05", "p25", "p50", "p75", "p95", "mean", "std"]);
}

#[test]
fn estimate_round_trip_csv() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "s.csv");
    assert_eq!(code(&twinsg(&["scan", "--lambda", "0.7", "--out", &out])), 0);
    let before = std::fs::read(&out).unwrap();
    let o = twinsg(&["estimate", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = stdout(&o);
    assert!((report_value(&report, "lambda") - 0.7).abs() < 1e-8);
    assert!((report_value(&report, "scale") - 0.125).abs() < 1e-10);
    // 5/9 + 4(0.49)/9
    assert!((report_value(&report, "purity") - 6.96 / 9.0).abs() < 1e-8);
    assert!((report_value(&report, "linear_entropy") - 2.04 / 9.0).abs() < 1e-8);
    assert_eq!(std::fs::read(&out).unwrap(), before);
}

#[test]
fn estimate_round_trip_json_and_incoherent_scan() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "s.json");
    assert_eq!(code(&twinsg(&["scan", "--lambda", "0", "--phi-l", "pi/3", "--out", &out])), 0);
    let o = twinsg(&["estimate", &out, "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["lambda"].as_f64().unwrap(), 0.0);
    assert!((report["linear_entropy"].as_f64().unwrap() - 4.0 / 9.0).abs() < 1e-12);
    assert!((report["phi_l"].as_f64().unwrap() - PI / 3.0).abs() < 1e-15);
}

#[test]
fn estimate_on_vanishing_data_is_a_fit_failure() {
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "zero.csv");
    let mut text = String::from("# twinsg scan version=0.1.0 lambda=0.5 phi_l=1.5707963267948966 grid=32\nphi_r,intensity,analytic_intensity\n");
    for k in 0..32 {
        text.push_str(&format!("{},0,0\n", 2.0 * PI * k as f64 / 31.0));
    }
    std::fs::write(&file, text).unwrap();
    let o = twinsg(&["estimate", &file]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn malformed_input_reports_the_line() {
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "bad.csv");
    std::fs::write(&file, "# twinsg scan phi_l=1.0\nphi_r,intensity,analytic_intensity\n0,1,1\n0.5,oops,1\n").unwrap();
    let o = twinsg(&["estimate", &file]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));

    std::fs::write(&file, "phi_r,intensity\n0,1\n").unwrap();
    let o = twinsg(&["estimate", &file]);
    assert_eq!(code(&o), 3, "missing phi_l: {}", stderr(&o));

    assert_eq!(code(&twinsg(&["estimate", &path(&dir, "absent.csv")])), 2);
}

#[test]
fn selftest_passes_and_catches_transposed_rotation() {
    let o = twinsg(&["selftest"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));

    let o = twinsg(&["selftest", "--inject-fault", "transposed-d"]);
    assert_eq!(code(&o), 5);
    assert!(stderr(&o).contains("axis-switch identity"), "{}", stderr(&o));
    assert!(stdout(&o).contains("FAIL"));
}
