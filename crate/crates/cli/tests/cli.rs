use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cfraj_cli::config::RunConfig;
use cfraj_core::verify::desk_config;
use cfraj_core::Profile;

fn cfraj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfraj"))
        .args(args)
        .output()
        .expect("spawn cfraj")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn desk_file(dir: &Path) -> PathBuf {
    let p = dir.join("desk.json");
    std::fs::write(&p, serde_json::to_string(&desk_config()).unwrap()).unwrap();
    p
}

struct Row {
    xi: f64,
    re: f64,
    im: f64,
    abs: f64,
    err: f64,
}

fn parse_csv(text: &str) -> Vec<Row> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("xi,re,im,abs,err,n_index,exc_tv"));
    lines
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            assert_eq!(f.len(), 7);
            Row {
                xi: f[0],
                re: f[1],
                im: f[2],
                abs: f[3],
                err: f[4],
            }
        })
        .collect()
}

#[test]
fn nu_build_small_window_has_five_atoms() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nu.json");
    let o = cfraj(&[
        "nu", "build", "--N", "3", "--p", "2", "--sigma-log", "5", "--eps", "0.3", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let support = doc["measure"]["support"].as_array().unwrap();
    assert_eq!(support.len(), 5);
    assert_eq!(doc["measure"]["support"][0], serde_json::json!([1, 3]));
    assert_eq!(doc["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    assert!(doc["feasibility"]["beta_achieved"].is_number());
}

#[test]
fn missing_arguments_are_usage_errors() {
    assert_eq!(code(&cfraj(&["nu", "build", "--N", "3"])), 64);
    assert_eq!(code(&cfraj(&["frobnicate"])), 64);
    assert_eq!(code(&cfraj(&["fourier", "scan", "--xi", "1"])), 64);
    assert_eq!(code(&cfraj(&["--help"])), 0);
}

#[test]
fn oversized_enumeration_is_operational_error() {
    let o = cfraj(&["nu", "build", "--N", "1000", "--p", "5", "--sigma", "20"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn empty_window_is_operational_error() {
    let o = cfraj(&["nu", "build", "--N", "3", "--p", "2", "--sigma-log", "150", "--eps", "0.1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn scan_is_deterministic_and_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = desk_file(dir.path());
    let run = |method: &str| {
        let o = cfraj(&[
            "fourier", "scan", "--config", cfg.to_str().unwrap(), "--xi", "0,3,40,500",
            "--method", method, "--samples", "5000", "--seed", "11",
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    for method in ["cylinder", "mc"] {
        let a = run(method);
        assert_eq!(a, run(method));
        assert!(a.starts_with("# cfraj "));
        assert!(a.lines().next().unwrap().contains("config_hash="));
        let rows = parse_csv(&a);
        assert_eq!(rows[0].xi, 0.0);
        assert!((rows[0].abs - 1.0).abs() <= 1e-15);
    }
}

#[test]
fn monte_carlo_agrees_with_cylinder_sum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = desk_file(dir.path());
    let scan = |extra: &[&str]| {
        let mut args = vec![
            "fourier", "scan", "--config", cfg.to_str().unwrap(), "--dyadic", "0:12", "--seed", "3",
        ];
        args.extend_from_slice(extra);
        let o = cfraj(&args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        parse_csv(&stdout(&o))
    };
    let exact = scan(&["--method", "cylinder"]);
    let mc = scan(&["--method", "mc", "--samples", "100000"]);
    assert_eq!(exact.len(), 13);
    for (a, b) in exact.iter().zip(&mc) {
        assert_eq!(a.xi, b.xi);
        let gap = ((a.re - b.re).powi(2) + (a.im - b.im).powi(2)).sqrt();
        assert!(gap <= a.err + b.err, "xi {}: gap {gap} vs {} + {}", a.xi, a.err, b.err);
    }
}

#[test]
fn product_scan_from_built_measure() {
    let dir = tempfile::tempdir().unwrap();
    let nu = dir.path().join("nu.json");
    let o = cfraj(&[
        "nu", "build", "--N", "3", "--p", "2", "--sigma-log", "5", "--eps", "0.3", "--out",
        nu.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let o = cfraj(&[
        "fourier", "scan", "--nu-file", nu.to_str().unwrap(), "--kaufman-only", "--xi", "0,7",
        "--depth", "3",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = parse_csv(&stdout(&o));
    assert_eq!(rows[0].abs, 1.0);
    assert!(rows[1].abs < 1.0);
}

#[test]
fn verify_cf_is_green() {
    let o = cfraj(&["verify", "--suite", "cf"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn verify_audit_prints_both_columns() {
    let o = cfraj(&["verify", "--suite", "audit"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("stated"));
    assert!(text.contains("recomputed"));
    assert!(text.contains("259/358"));
    assert!(text.contains("-99/358"));
}

#[test]
fn audit_exponents_reports_discrepancies_without_failing() {
    let o = cfraj(&["audit", "exponents"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("-97/358"));
    assert_eq!(code(&cfraj(&["audit", "exponents", "--alpha", "1"])), 2);
}

#[test]
fn corrupted_measure_file_is_operational_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"N":3,"p":2,"sigma":1.6094379124341003,"eps_window":0.3,"support":[[1,3],[9,9]],"beta_achieved":1}"#,
    )
    .unwrap();
    assert_eq!(code(&cfraj(&["verify", "--suite", "cf", "--measure", bad.to_str().unwrap()])), 2);
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&cfraj(&["verify", "--suite", "cf", "--measure", bad.to_str().unwrap()])), 2);
    let missing = dir.path().join("absent.json");
    assert_eq!(code(&cfraj(&["verify", "--suite", "cf", "--measure", missing.to_str().unwrap()])), 2);
}

#[test]
fn lambda_masses_of_siblings_add_up() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = desk_file(dir.path());
    let o = cfraj(&["lambda", "mass", "--config", cfg.to_str().unwrap(), "--labels", "1,2,3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let m: Vec<f64> = doc["masses"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["mass_f64"].as_f64().unwrap())
        .collect();
    assert_eq!(m[0], 1.0);
    assert!((m[1] + m[2] - 1.0).abs() < 1e-15);
}

#[test]
fn lambda_sample_depends_only_on_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = desk_file(dir.path());
    let run = |seed: &str| {
        let o = cfraj(&["lambda", "sample", "--config", cfg.to_str().unwrap(), "--count", "3", "--seed", seed]);
        assert_eq!(code(&o), 0);
        stdout(&o)
    };
    assert_eq!(run("5"), run("5"));
    assert_ne!(run("5"), run("6"));
}

#[test]
fn schedule_make_emits_a_buildable_config() {
    let dir = tempfile::tempdir().unwrap();
    let nu = dir.path().join("nu.json");
    let o = cfraj(&[
        "nu", "build", "--N", "3", "--p", "2", "--sigma-log", "5", "--eps", "0.3", "--out",
        nu.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let o = cfraj(&["schedule", "make", "--nu-file", nu.to_str().unwrap(), "--tau", "3", "--depth", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let i = doc["schedule"]["i"].as_array().unwrap();
    assert_eq!(i.len(), 2);
    assert_eq!(i[0], 1);
    let lc: cfraj_core::LambdaConfig = serde_json::from_value(doc["lambda"].clone()).unwrap();
    assert_eq!(lc.schedule.i.len(), 2);
}

#[test]
fn run_config_round_trips() {
    let mut c = RunConfig::new("fourier scan", Profile::Desk, 42, 100_000)
        .param("alpha", "25/179")
        .param("xi", "0,1,2");
    c.lambda = Some(desk_config());
    c.output = Some("scan.csv".into());
    let text = c.to_json().unwrap();
    let back = RunConfig::from_json(&text).unwrap();
    assert_eq!(back, c);
    assert_eq!(back.to_json().unwrap(), text);
    assert!(RunConfig::from_json(&text.replace("\"seed\"", "\"sneed\"")).is_err());
}
