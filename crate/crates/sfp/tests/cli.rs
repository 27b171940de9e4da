use std::process::{Command, Output};
use std::time::Instant;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfp")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn convergence_preset_succeeds() {
    let o = run(&["convergence", "--preset", "BSM-Para1", "--no-timing"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 4);
    let last: f64 = r[3][1].parse().unwrap();
    assert!(last <= 1e-10, "{last}");
}

#[test]
fn runs_without_timing_are_byte_identical() {
    let a = run(&["convergence", "--preset", "VG-Para1", "--terms", "16,32", "--no-timing"]);
    let b = run(&["convergence", "--preset", "VG-Para1", "--terms", "16,32", "--no-timing"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn missing_strike_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "model = { kind = \"bsm\", vol = 0.2 }\ncontract = { kind = \"put\" }\nmarket = { spot = 100.0, rate = 0.0, maturity = 1.0 }\n",
    )
    .unwrap();
    let o = run(&["price", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn unknown_preset_and_bad_flags_exit_two() {
    assert_eq!(run(&["price", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["price", "--bogus"]).status.code(), Some(2));
}

#[test]
fn analytic_reference_for_levy_model_exits_three() {
    let o = run(&["convergence", "--preset", "VG-Para1", "--reference", "analytic", "--terms", "16"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn density_output_integrates_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("density.csv");
    let o = run(&["density", "--preset", "BSM-Para1", "--terms", "64", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let pts: Vec<(f64, f64)> = rows(&std::fs::read_to_string(&out).unwrap())
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    let mass: f64 = pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
    assert!((mass - 1.0).abs() < 1e-6, "{mass}");
}

#[test]
fn detect_jumps_reports_the_cusp() {
    let o = run(&["detect-jumps", "--preset", "VG-Para1", "--terms", "128"]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 1, "{}", stdout(&o));
    let quiet = run(&["detect-jumps", "--preset", "BSM-Para1", "--terms", "64"]);
    assert!(rows(&stdout(&quiet)).is_empty());
}

#[test]
fn price_prints_full_precision() {
    let o = run(&["price", "--preset", "BSM-Para2", "--terms", "32"]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o));
    let v: f64 = r[0][3].parse().unwrap();
    assert!((v - 99.2025928525532).abs() < 3e-7, "{v}");
    assert!(r[0][3].contains('e'));
}

#[test]
fn small_budget_run_is_fast() {
    let start = Instant::now();
    let o = run(&["curve", "--preset", "BSM-Para1", "--terms", "8"]);
    assert_eq!(o.status.code(), Some(0));
    // Generous to tolerate process start-up on loaded machines.
    assert!(start.elapsed().as_secs_f64() < 1.0, "{:?}", start.elapsed());
}
